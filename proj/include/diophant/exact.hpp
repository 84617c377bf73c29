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

// Exact scalar and vector algebra. Every quantity in the library is an
// Integer, a Rational, or a closed RatInterval; nothing is ever rounded
// except through the explicit sqrt_lower/sqrt_upper bounds.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace diophant {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ErrorKind {
    ZeroVector,
    NegativeArgument,
    OutOfRange,
    CollinearInput,
    NotExtendable,
    NotInLattice,
    AnchorNotPrimitive,
    PairContainsZ,
    SearchExhausted,
    AmbiguousRounding,
    NonPositiveQ,
    CertificateFailure,
    TooFewSteps,
    InvalidArgument,
    CorruptTrace,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NegativeArgument: return "NegativeArgument";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::CollinearInput: return "CollinearInput";
    case ErrorKind::NotExtendable: return "NotExtendable";
    case ErrorKind::NotInLattice: return "NotInLattice";
    case ErrorKind::AnchorNotPrimitive: return "AnchorNotPrimitive";
    case ErrorKind::PairContainsZ: return "PairContainsZ";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::AmbiguousRounding: return "AmbiguousRounding";
    case ErrorKind::NonPositiveQ: return "NonPositiveQ";
    case ErrorKind::CertificateFailure: return "CertificateFailure";
    case ErrorKind::TooFewSteps: return "TooFewSteps";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CorruptTrace: return "CorruptTrace";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// scalars

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Integer floor_of(const Rational& x) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

inline Integer ceil_of(const Rational& x) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

// Nearest integer, halves rounded up.
inline Integer round_of(const Rational& x) { return floor_of(x + Rational(1, 2)); }

inline Rational frac_of(const Rational& x) { return x - Rational(floor_of(x)); }

inline Integer isqrt_floor(const Integer& n) {
    if (n < 0) throw Error(ErrorKind::NegativeArgument, "isqrt of negative");
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline Integer isqrt_ceil(const Integer& n) {
    Integer r = isqrt_floor(n);
    if (r * r < n) ++r;
    return r;
}

inline Integer pow2(unsigned long k) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
    return r;
}

inline Integer ipow(const Integer& b, unsigned long k) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), k);
    return r;
}

namespace detail {

// k such that isqrt(p q 4^k) carries about `bits` significant bits.
inline unsigned long sqrt_scale(const Integer& pq, unsigned bits) {
    const long have = static_cast<long>(mpz_sizeinbase(pq.get_mpz_t(), 2)) / 2;
    const long want = static_cast<long>(bits) + 2;
    return want > have ? static_cast<unsigned long>(want - have) : 0UL;
}

}  // namespace detail

// Certified rational bounds with sqrt_lower(r) <= sqrt(r) <= sqrt_upper(r),
// relative gap about 2^-bits.
inline Rational sqrt_lower(const Rational& r, unsigned bits = 64) {
    if (r < 0) throw Error(ErrorKind::NegativeArgument, "sqrt of negative");
    if (r == 0) return Rational(0);
    const Integer pq = r.get_num() * r.get_den();
    const unsigned long k = detail::sqrt_scale(pq, bits);
    const Integer s = isqrt_floor(pq * pow2(2 * k));
    return make_rational(s, r.get_den() * pow2(k));
}

inline Rational sqrt_upper(const Rational& r, unsigned bits = 64) {
    if (r < 0) throw Error(ErrorKind::NegativeArgument, "sqrt of negative");
    if (r == 0) return Rational(0);
    const Integer pq = r.get_num() * r.get_den();
    const unsigned long k = detail::sqrt_scale(pq, bits);
    const Integer s = isqrt_ceil(pq * pow2(2 * k));
    return make_rational(s, r.get_den() * pow2(k));
}

// Exact test of sqrt(a) + sqrt(b) <= sqrt(c) for a, b, c >= 0.
inline bool sqrt_sum_le(const Rational& a, const Rational& b, const Rational& c) {
    const Rational d = c - a - b;
    if (d < 0) return false;
    return d * d >= 4 * a * b;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }
inline std::string to_string(const Integer& z) { return z.get_str(); }

// Decimal rendering for plot data only; never used in a certificate.
inline std::string to_decimal(const Rational& r, unsigned digits = 20) {
    mpf_class f(r, 64 + 4 * digits);
    mp_exp_t exp = 0;
    std::string m = f.get_str(exp, 10, digits);
    if (m.empty()) return "0";
    std::string sign;
    if (m[0] == '-') {
        sign = "-";
        m.erase(0, 1);
    }
    return sign + "0." + m + "e" + std::to_string(exp);
}

// ---------------------------------------------------------------------------
// intervals

struct RatInterval {
    Rational lo, hi;

    RatInterval() = default;
    explicit RatInterval(const Rational& x) : lo(x), hi(x) {}
    RatInterval(const Rational& l, const Rational& h) : lo(l), hi(h) {
        if (lo > hi) throw Error(ErrorKind::InvalidArgument, "interval with lo > hi");
    }

    Rational width() const { return hi - lo; }
    bool is_point() const { return lo == hi; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains(const RatInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool strictly_contains(const RatInterval& o) const {
        return contains(o) && (lo < o.lo || o.hi < hi);
    }

    friend bool operator==(const RatInterval& a, const RatInterval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

inline RatInterval operator+(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}
inline RatInterval operator-(const RatInterval& a, const RatInterval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}
inline RatInterval operator-(const RatInterval& a) { return {-a.hi, -a.lo}; }
inline RatInterval operator+(const RatInterval& a, const Rational& b) {
    return {a.lo + b, a.hi + b};
}
inline RatInterval operator-(const RatInterval& a, const Rational& b) {
    return {a.lo - b, a.hi - b};
}
inline RatInterval operator*(const Rational& s, const RatInterval& a) {
    if (s >= 0) return {s * a.lo, s * a.hi};
    return {s * a.hi, s * a.lo};
}
inline RatInterval operator*(const RatInterval& a, const RatInterval& b) {
    const Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

inline RatInterval abs(const RatInterval& a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return -a;
    return {Rational(0), std::max(Rational(-a.lo), a.hi)};
}

// Enclosure of max(x, y) for x in a, y in b.
inline RatInterval max(const RatInterval& a, const RatInterval& b) {
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline RatInterval min(const RatInterval& a, const RatInterval& b) {
    return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

inline RatInterval intersect(const RatInterval& a, const RatInterval& b) {
    const Rational lo = std::max(a.lo, b.lo);
    const Rational hi = std::min(a.hi, b.hi);
    if (lo > hi) throw Error(ErrorKind::CertificateFailure, "empty interval intersection");
    return {lo, hi};
}

// Outward rounding of both endpoints to the dyadic grid 2^-bits.
inline RatInterval round_outward(const RatInterval& a, unsigned bits) {
    const Integer s = pow2(bits);
    return {make_rational(floor_of(a.lo * s), s), make_rational(ceil_of(a.hi * s), s)};
}

inline std::ostream& operator<<(std::ostream& os, const RatInterval& a) {
    return os << '[' << a.lo << ", " << a.hi << ']';
}

// ---------------------------------------------------------------------------
// 3-vectors

struct IntVec3 {
    std::array<Integer, 3> c{};

    IntVec3() = default;
    IntVec3(Integer x0, Integer x1, Integer x2) : c{std::move(x0), std::move(x1), std::move(x2)} {}

    const Integer& operator[](std::size_t i) const { return c[i]; }
    Integer& operator[](std::size_t i) { return c[i]; }
    const Integer& x0() const { return c[0]; }

    bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }
    Integer norm_sq() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }

    friend bool operator==(const IntVec3& a, const IntVec3& b) {
        return a.c[0] == b.c[0] && a.c[1] == b.c[1] && a.c[2] == b.c[2];
    }
    friend bool operator!=(const IntVec3& a, const IntVec3& b) { return !(a == b); }
    friend bool operator<(const IntVec3& a, const IntVec3& b) {
        for (std::size_t i = 0; i < 3; ++i) {
            if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
        }
        return false;
    }
};

inline IntVec3 operator+(const IntVec3& a, const IntVec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline IntVec3 operator-(const IntVec3& a, const IntVec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline IntVec3 operator-(const IntVec3& a) { return {-a[0], -a[1], -a[2]}; }
inline IntVec3 operator*(const Integer& s, const IntVec3& a) {
    return {s * a[0], s * a[1], s * a[2]};
}

inline std::ostream& operator<<(std::ostream& os, const IntVec3& v) {
    return os << '(' << v[0] << ',' << v[1] << ',' << v[2] << ')';
}

inline Integer dot(const IntVec3& u, const IntVec3& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

inline IntVec3 cross(const IntVec3& u, const IntVec3& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

inline Integer det3(const IntVec3& a, const IntVec3& b, const IntVec3& c) {
    return dot(cross(a, b), c);
}

inline Integer content(const IntVec3& v) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), v[0].get_mpz_t(), v[1].get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[2].get_mpz_t());
    return g;
}

inline bool is_primitive(const IntVec3& v) { return content(v) == 1; }

inline IntVec3 primitive_part(const IntVec3& v) {
    if (v.is_zero()) throw Error(ErrorKind::ZeroVector, "primitive part of zero vector");
    const Integer g = content(v);
    IntVec3 r;
    for (std::size_t i = 0; i < 3; ++i) mpz_divexact(r[i].get_mpz_t(), v[i].get_mpz_t(), g.get_mpz_t());
    return r;
}

// Sign-normalized primitive direction: first nonzero coordinate positive.
inline IntVec3 canonical_direction(const IntVec3& v) {
    IntVec3 p = primitive_part(v);
    for (std::size_t i = 0; i < 3; ++i) {
        if (p[i] != 0) return p[i] < 0 ? -p : p;
    }
    return p;
}

struct RatVec3 {
    std::array<Rational, 3> c{};

    const Rational& operator[](std::size_t i) const { return c[i]; }
    Rational& operator[](std::size_t i) { return c[i]; }

    Rational norm_sq() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }

    friend bool operator==(const RatVec3& a, const RatVec3& b) { return a.c == b.c; }
};

// ---------------------------------------------------------------------------
// angles as exact squared sines

class SinSq {
public:
    SinSq() = default;
    explicit SinSq(const Rational& v) : v_(v) {
        if (v_ < 0 || v_ > 1) throw Error(ErrorKind::OutOfRange, "sin^2 outside [0,1]: " + v_.get_str());
    }

    const Rational& value() const { return v_; }

    friend bool operator==(const SinSq& a, const SinSq& b) { return a.v_ == b.v_; }
    friend bool operator!=(const SinSq& a, const SinSq& b) { return a.v_ != b.v_; }
    friend bool operator<(const SinSq& a, const SinSq& b) { return a.v_ < b.v_; }
    friend bool operator<=(const SinSq& a, const SinSq& b) { return a.v_ <= b.v_; }
    friend bool operator>(const SinSq& a, const SinSq& b) { return a.v_ > b.v_; }
    friend bool operator>=(const SinSq& a, const SinSq& b) { return a.v_ >= b.v_; }

private:
    Rational v_{0};
};

inline SinSq sin_sq_between_lines(const IntVec3& u, const IntVec3& v) {
    if (u.is_zero() || v.is_zero()) throw Error(ErrorKind::ZeroVector, "angle with zero vector");
    return SinSq(make_rational(cross(u, v).norm_sq(), u.norm_sq() * v.norm_sq()));
}

inline SinSq sin_sq_line_plane(const IntVec3& u, const IntVec3& n) {
    if (u.is_zero() || n.is_zero()) throw Error(ErrorKind::ZeroVector, "angle with zero vector");
    const Integer d = dot(n, u);
    return SinSq(make_rational(d * d, n.norm_sq() * u.norm_sq()));
}

// Angle between planes with normals n1, n2 equals the angle between the normals.
inline SinSq sin_sq_between_planes(const IntVec3& n1, const IntVec3& n2) {
    return sin_sq_between_lines(n1, n2);
}

inline Rational dist_sq_point_line(const IntVec3& x, const IntVec3& z) {
    if (z.is_zero()) throw Error(ErrorKind::ZeroVector, "distance to span of zero vector");
    return make_rational(cross(x, z).norm_sq(), z.norm_sq());
}

}  // namespace diophant
