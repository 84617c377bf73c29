/*
   Copyright 2026 The diophant authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "diophant/exact.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diophant {

enum class Provenance { ExactRational, DecimalLiteral, ConstructionTrace };

inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::ExactRational: return "exact-rational";
    case Provenance::DecimalLiteral: return "decimal-literal";
    case Provenance::ConstructionTrace: return "construction-trace";
    }
    return "unknown";
}

// "p/q", "p", or a decimal literal such as "-12.5e-3"; exact.
inline Rational parse_rational(const std::string& s) {
    if (s.find('/') != std::string::npos) {
        Rational r;
        if (r.set_str(s, 10) != 0 || r.get_den() == 0)
            throw Error(ErrorKind::InvalidArgument, "malformed rational: " + s);
        r.canonicalize();
        return r;
    }
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        const char ch = s[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits += ch;
            seen_digit = true;
            if (seen_dot) --scale;
        } else if (ch == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        try {
            std::size_t used = 0;
            scale += std::stol(s.substr(i + 1), &used);
            i += 1 + used;
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "malformed exponent: " + s);
        }
    }
    if (!seen_digit || i != s.size()) throw Error(ErrorKind::InvalidArgument, "malformed number: " + s);
    Integer m(digits, 10);
    if (neg) m = -m;
    if (scale >= 0) return Rational(m * ipow(10, static_cast<unsigned long>(scale)));
    return make_rational(m, ipow(10, static_cast<unsigned long>(-scale)));
}

// xi = (1, xi1[, xi2]) known through rational enclosures.
struct TargetVector {
    RatInterval xi1;
    std::optional<RatInterval> xi2;
    Provenance provenance = Provenance::ExactRational;
    unsigned precision_bits = 0;

    int dim() const { return xi2 ? 2 : 1; }
    const RatInterval& coord(int j) const { return j == 0 ? xi1 : *xi2; }

    static TargetVector exact(const Rational& a, std::optional<Rational> b = std::nullopt) {
        TargetVector t;
        t.xi1 = RatInterval(a);
        if (b) t.xi2 = RatInterval(*b);
        return t;
    }

    // Literal value with enclosure radius 2^-bits.
    static TargetVector decimal(const std::string& a, const std::optional<std::string>& b, unsigned bits) {
        const Rational rad = make_rational(1, pow2(bits));
        TargetVector t;
        const Rational va = parse_rational(a);
        t.xi1 = RatInterval(va - rad, va + rad);
        if (b) {
            const Rational vb = parse_rational(*b);
            t.xi2 = RatInterval(vb - rad, vb + rad);
        }
        t.provenance = Provenance::DecimalLiteral;
        t.precision_bits = bits;
        return t;
    }

    static TargetVector enclosure(const RatInterval& a, std::optional<RatInterval> b, Provenance p,
                                  unsigned bits = 0) {
        TargetVector t;
        t.xi1 = a;
        t.xi2 = std::move(b);
        t.provenance = p;
        t.precision_bits = bits;
        return t;
    }
};

// Dyadic enclosure [floor(sqrt(r) 2^b), ceil(sqrt(r) 2^b)] / 2^b.
inline RatInterval enclose_sqrt(const Rational& r, unsigned bits) {
    const Integer s = pow2(bits);
    const Rational scaled = r * s * s;
    return {make_rational(isqrt_floor(floor_of(scaled)), s), make_rational(isqrt_ceil(ceil_of(scaled)), s)};
}

struct Residual {
    Integer a1, a2;
    RatInterval r;
};

namespace detail {

// The target with every endpoint over one common denominator, so that the
// hot loops of best_sequence run on integers only.
class ScanForm {
public:
    explicit ScanForm(const TargetVector& xi) : dim_(xi.dim()) {
        den_ = 1;
        for (int j = 0; j < dim_; ++j) {
            const RatInterval& c = xi.coord(j);
            mpz_lcm(den_.get_mpz_t(), den_.get_mpz_t(), c.lo.get_den_mpz_t());
            mpz_lcm(den_.get_mpz_t(), den_.get_mpz_t(), c.hi.get_den_mpz_t());
        }
        for (int j = 0; j < dim_; ++j) {
            const RatInterval& c = xi.coord(j);
            lo_[j] = c.lo.get_num() * (den_ / c.lo.get_den());
            hi_[j] = c.hi.get_num() * (den_ / c.hi.get_den());
        }
        den2_ = 2 * den_;
    }

    const Integer& den() const { return den_; }

    // Residual numerators over den(). Returns false on ambiguous rounding.
    bool eval(const Integer& q, std::array<Integer, 2>& a, Integer& rlo, Integer& rhi) {
        rlo = 0;
        rhi = 0;
        for (int j = 0; j < dim_; ++j) {
            x_lo_ = q * lo_[j];
            x_hi_ = q * hi_[j];
            t_ = 2 * x_lo_ + den_;
            mpz_fdiv_q(a[j].get_mpz_t(), t_.get_mpz_t(), den2_.get_mpz_t());
            t_ = 2 * x_hi_ + den_;
            mpz_fdiv_q(t_.get_mpz_t(), t_.get_mpz_t(), den2_.get_mpz_t());
            if (t_ != a[j]) return false;
            t_ = a[j] * den_;
            x_lo_ -= t_;
            x_hi_ -= t_;
            // |[x_lo, x_hi]|
            if (x_lo_ >= 0) {
                lo_abs_ = x_lo_;
                hi_abs_ = x_hi_;
            } else if (x_hi_ <= 0) {
                lo_abs_ = -x_hi_;
                hi_abs_ = -x_lo_;
            } else {
                lo_abs_ = 0;
                hi_abs_ = std::max(Integer(-x_lo_), x_hi_);
            }
            if (lo_abs_ > rlo) rlo = lo_abs_;
            if (hi_abs_ > rhi) rhi = hi_abs_;
        }
        return true;
    }

private:
    int dim_;
    Integer den_, den2_;
    std::array<Integer, 2> lo_, hi_;
    Integer x_lo_, x_hi_, t_, lo_abs_, hi_abs_;
};

}  // namespace detail

inline Residual residual(const TargetVector& xi, const Integer& q) {
    if (q < 1) throw Error(ErrorKind::InvalidArgument, "residual needs q >= 1");
    detail::ScanForm sf(xi);
    std::array<Integer, 2> a;
    Integer lo, hi;
    if (!sf.eval(q, a, lo, hi))
        throw Error(ErrorKind::AmbiguousRounding, "cannot round q*xi at q = " + q.get_str());
    return {a[0], xi.dim() == 2 ? a[1] : Integer(0),
            RatInterval(make_rational(lo, sf.den()), make_rational(hi, sf.den()))};
}

// max_j |x0 xi_j - x_j| for a fixed integer point x.
inline RatInterval column_residual(const TargetVector& xi, const IntVec3& x) {
    RatInterval r(Rational(0));
    for (int j = 0; j < xi.dim(); ++j) r = max(r, abs(Rational(x[0]) * xi.coord(j) - Rational(x[j + 1])));
    return r;
}

inline RatInterval psi(const TargetVector& xi, const Integer& t) {
    if (t < 1) throw Error(ErrorKind::InvalidArgument, "psi needs t >= 1");
    detail::ScanForm sf(xi);
    std::array<Integer, 2> a;
    Integer lo, hi, best_lo, best_hi;
    for (Integer q = 1; q <= t; ++q) {
        if (!sf.eval(q, a, lo, hi))
            throw Error(ErrorKind::AmbiguousRounding, "cannot round q*xi at q = " + q.get_str());
        if (q == 1 || lo < best_lo) best_lo = lo;
        if (q == 1 || hi < best_hi) best_hi = hi;
    }
    return {make_rational(best_lo, sf.den()), make_rational(best_hi, sf.den())};
}

struct BestApproxEntry {
    IntVec3 vector;
    RatInterval residual;
};

struct BestApproxSeq {
    std::vector<BestApproxEntry> entries;
    Integer horizon;
    int dim = 2;
    bool reached_zero = false;  // a residual vanished: coordinates are dependent
};

// q = 1 is always the first entry; afterwards strict decrease is required.
inline BestApproxSeq best_sequence(const TargetVector& xi, const Integer& Q) {
    if (Q < 1) throw Error(ErrorKind::InvalidArgument, "best_sequence needs Q >= 1");
    detail::ScanForm sf(xi);
    BestApproxSeq seq;
    seq.horizon = Q;
    seq.dim = xi.dim();
    std::array<Integer, 2> a{0, 0};
    Integer lo, hi, cur_lo, cur_hi;
    auto emit = [&](const Integer& q) {
        seq.entries.push_back({IntVec3(q, a[0], xi.dim() == 2 ? a[1] : Integer(0)),
                               RatInterval(make_rational(lo, sf.den()), make_rational(hi, sf.den()))});
        cur_lo = lo;
        cur_hi = hi;
    };
    for (Integer q = 1; q <= Q; ++q) {
        if (!sf.eval(q, a, lo, hi))
            throw Error(ErrorKind::AmbiguousRounding, "cannot round q*xi at q = " + q.get_str());
        if (q == 1) {
            emit(q);
        } else if (hi < cur_lo) {
            emit(q);
        } else if (lo < cur_hi) {
            throw Error(ErrorKind::AmbiguousRounding, "cannot order residuals at q = " + q.get_str());
        }
        if (cur_hi == 0) {
            seq.reached_zero = true;
            break;
        }
    }
    return seq;
}

struct Convergent {
    Integer p, q;
    friend bool operator==(const Convergent& a, const Convergent& b) { return a.p == b.p && a.q == b.q; }
};

// Convergents p/q with q <= Q of every real number in xi1.
inline std::vector<Convergent> cf_convergents(const RatInterval& xi1, const Integer& Q) {
    std::vector<Convergent> out;
    Integer p1 = 1, q1 = 0, p2 = 0, q2 = 1;  // p_{k-1}, q_{k-1}, p_{k-2}, q_{k-2}
    Rational lo = xi1.lo;
    std::optional<Rational> hi = xi1.hi;  // nullopt: +infinity
    for (;;) {
        const Integer a = floor_of(lo);
        if (!hi || floor_of(*hi) != a) {
            // partial quotient uncertain; harmless if even the smallest candidate overshoots Q
            if (a * q1 + q2 > Q && q1 != 0) break;
            throw Error(ErrorKind::AmbiguousRounding,
                        "enclosure cannot certify the next partial quotient");
        }
        const Integer p = a * p1 + p2;
        const Integer q = a * q1 + q2;
        if (q > Q) break;
        out.push_back({p, q});
        p2 = p1;
        q2 = q1;
        p1 = p;
        q1 = q;
        const Rational flo = lo - Rational(a);
        const Rational fhi = *hi - Rational(a);
        if (fhi == 0) break;  // exact rational reached its last convergent
        std::optional<Rational> nhi;
        if (flo != 0) nhi = 1 / flo;
        lo = 1 / fhi;
        hi = nhi;
    }
    return out;
}

struct MinkowskiReport {
    std::size_t pairs_checked = 0;
    std::vector<std::size_t> violations;  // indices nu with residual_nu^n * q_{nu+1} > 1
    bool dependent = false;
};

inline MinkowskiReport check_minkowski(const BestApproxSeq& seq, int n) {
    if (seq.entries.empty()) throw Error(ErrorKind::InvalidArgument, "empty sequence");
    if (n != 1 && n != 2) throw Error(ErrorKind::InvalidArgument, "n must be 1 or 2");
    MinkowskiReport rep;
    rep.dependent = seq.reached_zero;
    for (std::size_t i = 0; i + 1 < seq.entries.size(); ++i) {
        const Rational& r = seq.entries[i].residual.hi;
        const Rational lhs = (n == 1 ? r : r * r) * seq.entries[i + 1].vector[0];
        ++rep.pairs_checked;
        if (lhs > 1) rep.violations.push_back(i);
    }
    return rep;
}

struct JarnikTriple {
    std::size_t index;
    Integer det;
};

inline std::vector<JarnikTriple> jarnik_triples(const BestApproxSeq& seq) {
    std::vector<JarnikTriple> out;
    const auto& e = seq.entries;
    for (std::size_t i = 0; i + 2 < e.size(); ++i) {
        Integer d = det3(e[i].vector, e[i + 1].vector, e[i + 2].vector);
        if (d != 0) out.push_back({i, std::move(d)});
    }
    return out;
}

class UnimodMatrix {
public:
    UnimodMatrix(const IntVec3& c0, const IntVec3& c1, const IntVec3& c2) : cols_{c0, c1, c2} {
        const Integer d = det();
        if (d != 1 && d != -1) throw Error(ErrorKind::InvalidArgument, "matrix is not unimodular");
        for (const auto& c : cols_) {
            if (c[0] < 1) throw Error(ErrorKind::NonPositiveQ, "column with first coordinate < 1");
        }
    }

    const IntVec3& column(std::size_t i) const { return cols_[i]; }
    const std::array<IntVec3, 3>& columns() const { return cols_; }
    Integer det() const { return det3(cols_[0], cols_[1], cols_[2]); }

    friend bool operator==(const UnimodMatrix& a, const UnimodMatrix& b) { return a.cols_ == b.cols_; }

private:
    std::array<IntVec3, 3> cols_;
};

inline RatInterval matrix_R(const TargetVector& xi, const UnimodMatrix& m) {
    RatInterval r(Rational(0));
    for (const auto& c : m.columns()) r = max(r, column_residual(xi, c));
    return r;
}

// Consecutive convergents: q |q xi - p| <= 1 for both, and p'q'' - p''q' = +-1.
struct ConvergentPairReport {
    std::size_t pairs_checked = 0;
    std::vector<std::size_t> bound_violations;
    std::vector<std::size_t> det_violations;
};

inline ConvergentPairReport check_convergent_pairs(const RatInterval& xi1, const std::vector<Convergent>& cv) {
    ConvergentPairReport rep;
    auto scaled = [&](const Convergent& c) {
        return Rational(c.q) * abs(Rational(c.q) * xi1 - Rational(c.p));
    };
    for (std::size_t i = 0; i + 1 < cv.size(); ++i) {
        ++rep.pairs_checked;
        if (scaled(cv[i]).hi > 1 || scaled(cv[i + 1]).hi > 1) rep.bound_violations.push_back(i);
        const Integer d = cv[i].p * cv[i + 1].q - cv[i + 1].p * cv[i].q;
        if (d != 1 && d != -1) rep.det_violations.push_back(i);
    }
    return rep;
}

}  // namespace diophant
