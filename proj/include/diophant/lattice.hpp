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

#include "diophant/decreasing_fn.hpp"
#include "diophant/exact.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace diophant {

namespace detail {

// Extended gcd with g = s*a + t*b, g >= 0.
inline void ext_gcd(const Integer& a, const Integer& b, Integer& g, Integer& s, Integer& t) {
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

// Unimodular U (as columns) with n . U = (g, 0, 0), g = content(n) >= 0.
inline std::array<IntVec3, 3> hermite_row(const IntVec3& n, Integer& g) {
    std::array<IntVec3, 3> u{IntVec3(1, 0, 0), IntVec3(0, 1, 0), IntVec3(0, 0, 1)};
    std::array<Integer, 3> v{n[0], n[1], n[2]};
    for (;;) {
        int piv = -1;
        for (int i = 0; i < 3; ++i) {
            if (v[i] != 0 && (piv < 0 || abs(v[i]) < abs(v[piv]))) piv = i;
        }
        if (piv < 0) break;
        bool clean = true;
        for (int j = 0; j < 3; ++j) {
            if (j == piv || v[j] == 0) continue;
            Integer q;
            mpz_tdiv_q(q.get_mpz_t(), v[j].get_mpz_t(), v[piv].get_mpz_t());
            v[j] -= q * v[piv];
            u[j] = u[j] - q * u[piv];
            if (v[j] != 0) clean = false;
        }
        if (clean) {
            std::swap(v[0], v[piv]);
            std::swap(u[0], u[piv]);
            break;
        }
    }
    if (v[0] < 0) {
        v[0] = -v[0];
        u[0] = -u[0];
    }
    g = v[0];
    return u;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// planar lattices

// Rank-2 lattice {x : normal . x = 0}. Invariants: normal primitive,
// cross(b1, b2) == normal, (b1, b2) Lagrange-reduced.
struct PlanarLattice {
    IntVec3 normal, b1, b2;

    static PlanarLattice from_normal(const IntVec3& n) {
        if (n.is_zero()) throw Error(ErrorKind::ZeroVector, "lattice normal is zero");
        PlanarLattice lat;
        lat.normal = primitive_part(n);
        Integer g;
        const auto u = detail::hermite_row(lat.normal, g);
        lat.b1 = u[1];
        lat.b2 = u[2];
        lat.reduce();
        return lat;
    }

    bool contains(const IntVec3& x) const { return dot(normal, x) == 0; }
    Integer covolume_sq() const { return normal.norm_sq(); }

    // x = u*b1 + v*b2; x must lie in the lattice.
    std::pair<Integer, Integer> coords(const IntVec3& x) const {
        if (!contains(x)) throw Error(ErrorKind::NotInLattice, "point not in lattice");
        const Integer nn = normal.norm_sq();
        Integer u = dot(cross(x, b2), normal);
        Integer v = dot(cross(b1, x), normal);
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), nn.get_mpz_t());
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), nn.get_mpz_t());
        return {u, v};
    }

    friend bool operator==(const PlanarLattice& a, const PlanarLattice& b) {
        return a.normal == b.normal && a.b1 == b.b1 && a.b2 == b.b2;
    }

private:
    void reduce() {
        if (b2.norm_sq() < b1.norm_sq()) std::swap(b1, b2);
        for (;;) {
            const Integer mu = round_of(make_rational(dot(b1, b2), b1.norm_sq()));
            if (mu != 0) b2 = b2 - mu * b1;
            if (b2.norm_sq() < b1.norm_sq())
                std::swap(b1, b2);
            else
                break;
        }
        if (cross(b1, b2) != normal) b2 = -b2;
    }
};

inline bool is_extendable_pair(const IntVec3& z1, const IntVec3& z2) {
    const IntVec3 n = cross(z1, z2);
    return !n.is_zero() && is_primitive(n);
}

inline PlanarLattice span_lattice(const IntVec3& z1, const IntVec3& z2) {
    const IntVec3 n = cross(z1, z2);
    if (n.is_zero()) throw Error(ErrorKind::CollinearInput, "span of collinear vectors");
    return PlanarLattice::from_normal(n);
}

// y with det(z1, z2, y) = +1, reduced so that y - n/|n|^2 has coordinates in
// [-1/2, 1/2) along (z1, z2).
inline IntVec3 complete_basis(const IntVec3& z1, const IntVec3& z2) {
    if (!is_extendable_pair(z1, z2)) throw Error(ErrorKind::NotExtendable, "pair is not extendable");
    const IntVec3 n = cross(z1, z2);
    Integer g;
    IntVec3 y = detail::hermite_row(n, g)[0];
    const Integer nn = n.norm_sq();
    // d = y - n/nn lies in the plane; its (z1, z2) coordinates are
    // (cross(d, z2).n, cross(z1, d).n) / nn, and cross(n, z2).n = 0.
    const Rational sigma = make_rational(dot(cross(y, z2), n), nn);
    const Rational tau = make_rational(dot(cross(z1, y), n), nn);
    return y - round_of(sigma) * z1 - round_of(tau) * z2;
}

struct AffineLayer {
    IntVec3 normal;
    Integer level;

    bool contains(const IntVec3& x) const { return dot(normal, x) == level; }
    friend bool operator==(const AffineLayer& a, const AffineLayer& b) {
        return a.normal == b.normal && a.level == b.level;
    }
};

inline std::pair<AffineLayer, AffineLayer> affine_layers(const IntVec3& z1, const IntVec3& z2) {
    if (!is_extendable_pair(z1, z2)) throw Error(ErrorKind::NotExtendable, "pair is not extendable");
    const IntVec3 n = cross(z1, z2);
    return {AffineLayer{n, Integer(1)}, AffineLayer{n, Integer(-1)}};
}

inline Rational eta_sq(const IntVec3& z1, const IntVec3& z2) {
    if (!is_extendable_pair(z1, z2)) throw Error(ErrorKind::NotExtendable, "pair is not extendable");
    return make_rational(cross(z1, z2).norm_sq(), z1.norm_sq());
}

// c in lat with cross(anchor, c) = lat.normal, reduced against anchor.
inline IntVec3 complete_in_lattice(const PlanarLattice& lat, const IntVec3& anchor) {
    if (anchor.is_zero()) throw Error(ErrorKind::ZeroVector, "anchor is zero");
    const auto [u, v] = lat.coords(anchor);
    Integer g, s, t;
    detail::ext_gcd(u, v, g, s, t);
    if (g != 1) throw Error(ErrorKind::AnchorNotPrimitive, "anchor is not primitive in the lattice");
    IntVec3 c = s * lat.b2 - t * lat.b1;
    const Integer mu = round_of(make_rational(dot(c, anchor), anchor.norm_sq()));
    return c - mu * anchor;
}

// k with x in anchor*Z + k*c, where c = complete_in_lattice(lat, anchor).
inline Integer layer_index(const PlanarLattice& lat, const IntVec3& anchor, const IntVec3& x) {
    if (!lat.contains(anchor)) throw Error(ErrorKind::NotInLattice, "anchor not in lattice");
    if (!lat.contains(x)) throw Error(ErrorKind::NotInLattice, "point not in lattice");
    if (anchor.is_zero() || !is_primitive(anchor))
        throw Error(ErrorKind::AnchorNotPrimitive, "anchor is not primitive");
    Integer k = dot(cross(anchor, x), lat.normal);
    const Integer nn = lat.normal.norm_sq();
    mpz_divexact(k.get_mpz_t(), k.get_mpz_t(), nn.get_mpz_t());
    return k;
}

// All x in lat with |x|^2 <= radius_sq, sorted lexicographically.
inline std::vector<IntVec3> enumerate_points(const PlanarLattice& lat, const Rational& radius_sq) {
    if (radius_sq < 0) throw Error(ErrorKind::NegativeArgument, "negative radius");
    std::vector<IntVec3> out;
    const IntVec3& b1 = lat.b1;
    const IntVec3& b2 = lat.b2;
    const Integer n11 = b1.norm_sq();
    const Integer n12 = dot(b1, b2);
    const Integer nn = lat.normal.norm_sq();
    // |x| >= |beta| * covolume / |b1|
    const Integer bmax = floor_of(sqrt_upper(radius_sq * n11 / nn));
    for (Integer beta = -bmax; beta <= bmax; ++beta) {
        const Rational disc = n11 * radius_sq - beta * beta * nn;
        if (disc < 0) continue;
        const Rational root = sqrt_upper(disc);
        const Rational center = Rational(-beta * n12);
        const Integer amin = floor_of((center - root) / n11);
        const Integer amax = ceil_of((center + root) / n11);
        for (Integer alpha = amin; alpha <= amax; ++alpha) {
            IntVec3 x = alpha * b1 + beta * b2;
            if (Rational(x.norm_sq()) <= radius_sq) out.push_back(std::move(x));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Smith normal form

using IntMatrix = std::vector<std::vector<Integer>>;

struct SmithForm {
    IntMatrix U, D, V;  // U * A * V = D, U and V unimodular
    std::size_t rank = 0;
};

inline SmithForm smith_form(const IntMatrix& a) {
    const std::size_t m = a.size();
    const std::size_t n = m ? a[0].size() : 0;
    SmithForm s;
    s.D = a;
    s.U.assign(m, std::vector<Integer>(m, 0));
    s.V.assign(n, std::vector<Integer>(n, 0));
    for (std::size_t i = 0; i < m; ++i) s.U[i][i] = 1;
    for (std::size_t j = 0; j < n; ++j) s.V[j][j] = 1;
    auto& d = s.D;

    auto row_axpy = [&](std::size_t dst, std::size_t src, const Integer& q) {  // row dst -= q row src
        for (std::size_t j = 0; j < n; ++j) d[dst][j] -= q * d[src][j];
        for (std::size_t j = 0; j < m; ++j) s.U[dst][j] -= q * s.U[src][j];
    };
    auto col_axpy = [&](std::size_t dst, std::size_t src, const Integer& q) {  // col dst -= q col src
        for (std::size_t i = 0; i < m; ++i) d[i][dst] -= q * d[i][src];
        for (std::size_t i = 0; i < n; ++i) s.V[i][dst] -= q * s.V[i][src];
    };
    auto row_swap = [&](std::size_t i, std::size_t k) {
        std::swap(d[i], d[k]);
        std::swap(s.U[i], s.U[k]);
    };
    auto col_swap = [&](std::size_t j, std::size_t k) {
        for (std::size_t i = 0; i < m; ++i) std::swap(d[i][j], d[i][k]);
        for (std::size_t i = 0; i < n; ++i) std::swap(s.V[i][j], s.V[i][k]);
    };

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i) {
                for (std::size_t j = t; j < n; ++j) {
                    if (d[i][j] != 0 && (pi == m || abs(d[i][j]) < abs(d[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
                }
            }
            if (pi == m) return s;
            row_swap(t, pi);
            col_swap(t, pj);
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                Integer q;
                mpz_tdiv_q(q.get_mpz_t(), d[i][t].get_mpz_t(), d[t][t].get_mpz_t());
                if (q != 0) row_axpy(i, t, q);
                if (d[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                Integer q;
                mpz_tdiv_q(q.get_mpz_t(), d[t][j].get_mpz_t(), d[t][t].get_mpz_t());
                if (q != 0) col_axpy(j, t, q);
                if (d[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            std::size_t bad = m;
            for (std::size_t i = t + 1; i < m && bad == m; ++i) {
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (!mpz_divisible_p(d[i][j].get_mpz_t(), d[t][t].get_mpz_t())) {
                        bad = i;
                        break;
                    }
                }
            }
            if (bad == m) break;
            row_axpy(t, bad, Integer(-1));
        }
        if (d[t][t] < 0) {
            for (std::size_t j = 0; j < n; ++j) d[t][j] = -d[t][j];
            for (std::size_t j = 0; j < m; ++j) s.U[t][j] = -s.U[t][j];
        }
        s.rank = t + 1;
    }
    return s;
}

// Integer solution of A x = b, if any.
inline std::optional<std::vector<Integer>> solve_integer_system(const IntMatrix& a,
                                                                const std::vector<Integer>& b) {
    const SmithForm s = smith_form(a);
    const std::size_t m = a.size();
    const std::size_t n = m ? a[0].size() : 0;
    std::vector<Integer> ub(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) ub[i] += s.U[i][j] * b[j];
    }
    std::vector<Integer> y(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
        if (i < s.rank) {
            if (!mpz_divisible_p(ub[i].get_mpz_t(), s.D[i][i].get_mpz_t())) return std::nullopt;
            mpz_divexact(y[i].get_mpz_t(), ub[i].get_mpz_t(), s.D[i][i].get_mpz_t());
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Integer> x(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) x[i] += s.V[i][j] * y[j];
    }
    return x;
}

inline std::optional<IntVec3> layer_point_on_plane(const IntVec3& n_plane, const AffineLayer& layer) {
    if (n_plane.is_zero()) throw Error(ErrorKind::ZeroVector, "plane normal is zero");
    const IntMatrix a{{n_plane[0], n_plane[1], n_plane[2]},
                      {layer.normal[0], layer.normal[1], layer.normal[2]}};
    const auto x = solve_integer_system(a, {Integer(0), layer.level});
    if (!x) return std::nullopt;
    return IntVec3((*x)[0], (*x)[1], (*x)[2]);
}

inline bool layer_has_point_on_plane(const IntVec3& n_plane, const AffineLayer& layer) {
    return layer_point_on_plane(n_plane, layer).has_value();
}

// ---------------------------------------------------------------------------
// effective delta and T

struct DeltaT {
    SinSq delta;       // sin^2 of the cone half-angle around z
    Integer T;         // norm threshold
    SinSq gamma_min;   // smallest plane-line sin^2 over the pairs (1 if none)
    Rational w_sq_max; // max |w|^2, w = z/(n.z)
};

inline const SinSq& default_cap() {
    static const SinSq cap(Rational(1, 100));
    return cap;
}

// For a pair (z', z'') with normal n and a point x on n.x = +-1:
// sin angle(x, z) >= sin(gamma)/2 once |x| >= 2|w|, every direction within
// delta of z with sin^2 delta <= sin^2 gamma / 16 keeps sin angle(x, xi) >=
// sin(gamma)/4, and the sup-norm residual is at least dist(x, span xi)/sqrt 2.
// T makes |x| sin(gamma)/(4 sqrt 2) >= phi(1) >= phi(q) for q >= 1.
inline DeltaT effective_delta_T(const IntVec3& z, const std::vector<std::pair<IntVec3, IntVec3>>& pairs,
                                const DecreasingFn& phi, const SinSq& cap = default_cap()) {
    if (z.is_zero()) throw Error(ErrorKind::ZeroVector, "z is zero");
    DeltaT out{cap, Integer(1), SinSq(Rational(1)), Rational(0)};
    if (pairs.empty()) return out;
    Rational s_min(1);
    Rational w_max(0);
    for (const auto& [a, b] : pairs) {
        if (!is_extendable_pair(a, b)) throw Error(ErrorKind::NotExtendable, "pair is not extendable");
        const IntVec3 n = cross(a, b);
        const Integer nz = dot(n, z);
        if (nz == 0) throw Error(ErrorKind::PairContainsZ, "z lies in the plane of a pair");
        const Rational s = make_rational(nz * nz, n.norm_sq() * z.norm_sq());
        const Rational w = make_rational(z.norm_sq(), nz * nz);
        s_min = std::min(s_min, s);
        w_max = std::max(w_max, w);
    }
    const Rational p1 = phi.eval(Rational(1));
    const Rational t_sq = std::max({Rational(1), Rational(4 * w_max), Rational(32 * p1 * p1 / s_min)});
    out.delta = SinSq(std::min(cap.value(), Rational(s_min / 16)));
    out.T = isqrt_ceil(ceil_of(t_sq));
    out.gamma_min = SinSq(s_min);
    out.w_sq_max = w_max;
    return out;
}

// ---------------------------------------------------------------------------
// plane search

struct PlaneSearchConstraints {
    IntVec3 anchor;
    PlanarLattice reference_plane;
    SinSq min_plane_angle{Rational(0)};
    SinSq max_family_angle{Rational(1)};
    Rational min_normal_norm_sq{0};
    std::vector<AffineLayer> forbidden_layers;
    std::uint64_t budget = 1000000;
};

struct PlaneConditions {
    bool contains_anchor = false;
    bool min_angle = false;
    bool max_angle = false;
    bool norm = false;
    bool layers = false;

    bool all() const { return contains_anchor && min_angle && max_angle && norm && layers; }
};

inline PlaneConditions check_plane_conditions(const PlaneSearchConstraints& c, const IntVec3& n) {
    PlaneConditions r;
    r.contains_anchor = dot(n, c.anchor) == 0;
    const SinSq s = sin_sq_between_planes(n, c.reference_plane.normal);
    r.min_angle = s >= c.min_plane_angle;
    r.max_angle = s <= c.max_family_angle;
    r.norm = Rational(n.norm_sq()) > c.min_normal_norm_sq;
    r.layers = std::none_of(c.forbidden_layers.begin(), c.forbidden_layers.end(),
                            [&](const AffineLayer& l) { return layer_has_point_on_plane(n, l); });
    return r;
}

struct PlaneSearchResult {
    PlanarLattice lattice;
    std::uint64_t candidates = 0;
    Integer first_B;
};

// Candidates n = A*r + B*m where r is the reference normal and cross(r, m) =
// anchor, so (r, m) is a basis of the normals through the anchor. With
// d = |r|^2, e = r.m, t = A*d + B*e and Z = |anchor|^2:
//   d |n|^2 = t^2 + B^2 Z,   sin^2(n, r) = B^2 Z / (t^2 + B^2 Z).
// Order: B = 0 first; then B = B0, B0 + 1, ... where B0 >= 1 is the first B
// whose admissible |t| window spans a full residue period d; within one B,
// ascending |t| with the smaller A first on ties.
inline PlaneSearchResult plane_search(const PlaneSearchConstraints& c) {
    const IntVec3& a = c.anchor;
    if (a.is_zero()) throw Error(ErrorKind::ZeroVector, "anchor is zero");
    if (!is_primitive(a)) throw Error(ErrorKind::AnchorNotPrimitive, "anchor is not primitive");
    const IntVec3& r = c.reference_plane.normal;
    if (dot(r, a) != 0)
        throw Error(ErrorKind::InvalidArgument, "reference plane must contain the anchor");

    PlaneSearchResult res;
    auto accept = [&](const IntVec3& n) {
        const PlaneConditions pc = check_plane_conditions(c, n);
        if (!pc.all()) return false;
        res.lattice = PlanarLattice::from_normal(n);
        return true;
    };
    auto spend = [&] {
        if (++res.candidates > c.budget)
            throw Error(ErrorKind::SearchExhausted,
                        "plane_search budget of " + std::to_string(c.budget) + " candidates");
    };

    spend();
    if (accept(r)) return res;

    const PlanarLattice normals = PlanarLattice::from_normal(a);
    const IntVec3 m = complete_in_lattice(normals, r);
    const Integer d = r.norm_sq();
    const Integer e = dot(r, m);
    const Integer Z = a.norm_sq();
    const Rational& s_lo = c.min_plane_angle.value();
    const Rational& s_hi = c.max_family_angle.value();
    if (s_hi == 0 || (s_lo > 0 && s_hi < 1 && s_hi <= s_lo) || s_lo == 1)
        throw Error(ErrorKind::SearchExhausted, "plane_search: empty angle window");

    // |t| window for a given B; thi < 0 encodes an unbounded window.
    auto window = [&](const Integer& B, Integer& tlo, Integer& thi, bool& bounded) {
        const Rational bz = Rational(B * B * Z);
        Rational lo2 = c.min_normal_norm_sq * d - bz;  // strict: t^2 > lo2
        if (s_hi < 1) lo2 = std::max(lo2, Rational((1 - s_hi) * bz / s_hi));
        tlo = lo2 < 0 ? Integer(0) : floor_of(sqrt_lower(lo2));
        bounded = s_lo > 0;
        if (bounded)
            thi = ceil_of(sqrt_upper((1 - s_lo) * bz / s_lo));
        else
            thi = tlo + B * d;  // unbounded cone: B residues per side for this B
    };
    auto wide_enough = [&](const Integer& B) {
        Integer tlo, thi;
        bool bounded;
        window(B, tlo, thi, bounded);
        return thi - tlo >= d;
    };

    Integer B0 = 1;
    if (!wide_enough(B0)) {
        Integer lo = 1, hi = 2;
        while (!wide_enough(hi)) {
            lo = hi;
            hi *= 2;
            if (mpz_sizeinbase(hi.get_mpz_t(), 2) > 1u << 16)
                throw Error(ErrorKind::SearchExhausted, "plane_search: admissible window never opens");
        }
        while (hi - lo > 1) {
            const Integer mid = (lo + hi) / 2;
            if (wide_enough(mid))
                hi = mid;
            else
                lo = mid;
        }
        B0 = hi;
    }
    res.first_B = B0;

    auto pmod = [](const Integer& x, const Integer& mod) {
        Integer r2;
        mpz_fdiv_r(r2.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
        return r2;
    };

    for (Integer B = B0;; ++B) {
        Integer tlo, thi;
        bool bounded;
        window(B, tlo, thi, bounded);
        (void)bounded;
        const Integer be = B * e;
        Integer tp = tlo + pmod(be - tlo, d);  // smallest t >= tlo, t = be mod d
        Integer tn = -tlo - pmod(-tlo - be, d); // largest t <= -tlo
        for (;;) {
            const bool pos_ok = tp <= thi;
            const bool neg_ok = -tn <= thi;
            if (!pos_ok && !neg_ok) break;
            Integer t;
            if (neg_ok && (!pos_ok || -tn <= tp)) {
                t = tn;
                tn -= d;
                if (t == tp) tp += d;
            } else {
                t = tp;
                tp += d;
            }
            spend();
            Integer A = t - be;
            mpz_divexact(A.get_mpz_t(), A.get_mpz_t(), d.get_mpz_t());
            Integer g;
            mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
            if (g != 1) continue;
            if (accept(A * r + B * m)) return res;
        }
    }
}

}  // namespace diophant
