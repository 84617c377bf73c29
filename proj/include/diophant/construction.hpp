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

// The inductive construction of a target xi = (1, xi1, xi2) that admits no
// unimodular matrix of phi-good approximations.
//
// Indexing follows the construction: z_1 = (1,0,0), z_2 = (0,1,0); step nu
// (nu >= 2) chooses the plane Lambda_{nu+1} through z_nu and the vector
// z_{nu+1} in it, and fixes H_nu, delta_nu, T_nu and rho_nu.

#include "diophant/best_approx.hpp"
#include "diophant/decreasing_fn.hpp"
#include "diophant/lattice.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace diophant {

struct ConstructionConfig {
    SinSq cap = default_cap();
    SinSq plane_angle{Rational(7, 8)};  // sin^2 bound for condition (iii), >= sin^2(3 pi / 8)
    std::uint64_t plane_budget = 1000000;
    std::uint64_t layer_budget = 1000000;
    unsigned sqrt_bits = 64;

    friend bool operator==(const ConstructionConfig&, const ConstructionConfig&) = default;
};

struct StepCertificate {
    bool cond_i = false;       // z_nu in Lambda_{nu+1}
    bool cond_ii = false;      // Lambda_{nu+1} spanned by (z_nu, z_{nu+1}) over Z
    bool cond_iii = false;     // plane angle against Lambda_nu
    bool cond_iv = false;      // no short points off span(z_nu)
    bool cond_v = false;       // forbidden layers miss the plane
    bool daba = false;         // 4 sin^2(z_nu, z_{nu-1}) < sin^2 delta_{nu-1}
    bool delta1 = false;       // 4 sin^2(z_{nu+1}, z_nu) < sin^2 delta_nu
    bool delta2 = false;       // sin(z_nu, z_{nu-1}) + sin delta_nu <= sin delta_{nu-1}
    bool delta_halving = false;
    bool ce = false;
    bool rho_halving = false;
    bool rho_identity = false;
    bool norm_growth = false;
    bool q_positive = false;
    bool nesting = false;
    bool recomputed = false;   // stored H, delta, T, sizes match a fresh computation

    std::vector<std::pair<std::string, bool>> flags() const {
        return {{"i", cond_i},           {"ii", cond_ii},
                {"iii", cond_iii},       {"iv", cond_iv},
                {"v", cond_v},           {"daba", daba},
                {"delta1", delta1},      {"delta2", delta2},
                {"delta_halving", delta_halving}, {"ce", ce},
                {"rho_halving", rho_halving},     {"rho_identity", rho_identity},
                {"norm_growth", norm_growth},     {"q_positive", q_positive},
                {"nesting", nesting},    {"recomputed", recomputed}};
    }
    bool all() const {
        for (const auto& [name, ok] : flags()) {
            if (!ok) return false;
        }
        return true;
    }
};

struct StepRecord {
    int nu = 0;
    Integer H;
    std::size_t C_size = 0;    // admissible pairs
    std::size_t C_planes = 0;  // distinct planes among them
    std::size_t E_size = 0;
    SinSq delta;
    Integer T;
    IntVec3 normal;  // Lambda_{nu+1}
    IntVec3 z_next;  // z_{nu+1}
    Rational rho_sq; // rho_nu^2 = |normal|^2 / |z_{nu+1}|^2
    Integer k;
    std::uint64_t plane_candidates = 0;
    std::uint64_t layer_evaluations = 0;
    StepCertificate cert;
};

struct ConstructionState {
    DecreasingFn phi = DecreasingFn::power(Rational(1), 1);
    ConstructionConfig config;
    std::vector<StepRecord> steps;

    int nu() const { return static_cast<int>(steps.size()) + 2; }

    IntVec3 z(int i) const {
        if (i == 1) return IntVec3(1, 0, 0);
        if (i == 2) return IntVec3(0, 1, 0);
        return steps.at(static_cast<std::size_t>(i - 3)).z_next;
    }
    IntVec3 lattice_normal(int i) const {
        if (i == 2) return IntVec3(0, 0, 1);
        return steps.at(static_cast<std::size_t>(i - 3)).normal;
    }
    PlanarLattice lattice(int i) const { return PlanarLattice::from_normal(lattice_normal(i)); }
    SinSq delta(int i) const {
        if (i == 1) return config.cap;
        return steps.at(static_cast<std::size_t>(i - 2)).delta;
    }
    Rational rho_sq(int i) const {
        if (i == 1) return Rational(1);
        return steps.at(static_cast<std::size_t>(i - 2)).rho_sq;
    }
    Integer H(int i) const { return steps.at(static_cast<std::size_t>(i - 2)).H; }
};

inline ConstructionState init(const DecreasingFn& phi, const ConstructionConfig& config = {}) {
    ConstructionState s;
    s.phi = phi;
    s.config = config;
    return s;
}

inline Integer compute_H(const ConstructionState& s, int nu) {
    if (nu < 2) throw Error(ErrorKind::InvalidArgument, "H needs nu >= 2");
    const Rational eta_lo = sqrt_lower(eta_sq(s.z(nu - 1), s.z(nu)), s.config.sqrt_bits);
    return inverse_upper(s.phi, eta_lo / 8);
}

namespace detail {

// Nonzero points of Lambda_lambda with |x| <= H_lambda, lambda = 2..nu,
// sorted and deduplicated; H_nu supplied by the caller.
inline std::vector<IntVec3> short_points(const ConstructionState& s, int nu, const Integer& H_nu) {
    std::set<IntVec3> pts;
    for (int lam = 2; lam <= nu; ++lam) {
        const Integer h = lam == nu ? H_nu : s.H(lam);
        for (auto& x : enumerate_points(s.lattice(lam), Rational(h * h))) {
            if (!x.is_zero()) pts.insert(std::move(x));
        }
    }
    return {pts.begin(), pts.end()};
}

}  // namespace detail

struct CEnumeration {
    std::size_t pair_count = 0;
    std::vector<std::pair<IntVec3, IntVec3>> representatives;  // one per plane
};

inline CEnumeration enumerate_C(const ConstructionState& s, int nu, const Integer& H_nu) {
    const IntVec3 z = s.z(nu);
    const auto pts = detail::short_points(s, nu, H_nu);
    CEnumeration out;
    std::set<IntVec3> planes;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const IntVec3 n = cross(pts[i], pts[j]);
            if (n.is_zero() || !is_primitive(n) || dot(n, z) == 0) continue;
            ++out.pair_count;
            if (planes.insert(canonical_direction(n)).second) out.representatives.emplace_back(pts[i], pts[j]);
        }
    }
    return out;
}

struct EEnumeration {
    std::vector<IntVec3> points;
    std::vector<AffineLayer> layers;  // deduplicated by plane
};

inline EEnumeration enumerate_E(const ConstructionState& s, int nu, const Integer& H_nu) {
    const IntVec3 z = s.z(nu);
    EEnumeration out;
    std::set<IntVec3> planes;
    for (const auto& x : detail::short_points(s, nu, H_nu)) {
        if (!is_extendable_pair(z, x)) continue;
        out.points.push_back(x);
        if (planes.insert(canonical_direction(cross(z, x))).second) {
            const auto [lp, lm] = affine_layers(z, x);
            out.layers.push_back(lp);
            out.layers.push_back(lm);
        }
    }
    return out;
}

// Box around a_j/q_nu containing xi_j. With D = 2 rho_nu >= dist(z_nu, span xi)
// (rho halving, norms increasing), |q xi_j - a_j| <= D |z_nu| / (q_nu - D).
struct EnclosureBox {
    int nu = 0;
    RatInterval xi1, xi2;
};

inline std::optional<EnclosureBox> box_for(const IntVec3& z, const Rational& rho_sq, int nu, unsigned bits) {
    if (z[0] < 1) return std::nullopt;
    const Rational D = 2 * sqrt_upper(rho_sq, bits);
    const Rational q(z[0]);
    if (q <= D) return std::nullopt;
    const Rational rad = D * sqrt_upper(Rational(z.norm_sq()), bits) / (q * (q - D));
    const Rational c1 = Rational(z[1]) / q;
    const Rational c2 = Rational(z[2]) / q;
    return EnclosureBox{nu, RatInterval(c1 - rad, c1 + rad), RatInterval(c2 - rad, c2 + rad)};
}

inline std::optional<EnclosureBox> box_at(const ConstructionState& s, int nu) {
    if (nu < 2 || nu >= s.nu()) return std::nullopt;
    return box_for(s.z(nu), s.rho_sq(nu), nu, s.config.sqrt_bits);
}

inline bool box_nested(const EnclosureBox& inner, const EnclosureBox& outer) {
    return outer.xi1.lo < inner.xi1.lo && inner.xi1.hi < outer.xi1.hi && outer.xi2.lo < inner.xi2.lo &&
           inner.xi2.hi < outer.xi2.hi && 2 * inner.xi1.width() <= outer.xi1.width();
}

inline std::vector<EnclosureBox> enclosure_boxes(const ConstructionState& s) {
    std::vector<EnclosureBox> out;
    for (int nu = 2; nu < s.nu(); ++nu) {
        if (auto b = box_at(s, nu)) out.push_back(*b);
    }
    return out;
}

// Enclosure from the nested boxes, rounded outward to 2^-bits.
inline TargetVector xi_enclosure(const ConstructionState& s, unsigned bits = 256) {
    const auto boxes = enclosure_boxes(s);
    if (boxes.empty()) throw Error(ErrorKind::TooFewSteps, "no enclosure box yet");
    RatInterval x1 = boxes.front().xi1, x2 = boxes.front().xi2;
    for (std::size_t i = 1; i < boxes.size(); ++i) {
        if (!boxes[i - 1].xi1.contains(boxes[i].xi1) || !boxes[i - 1].xi2.contains(boxes[i].xi2))
            throw Error(ErrorKind::CertificateFailure, "enclosure boxes are not nested");
        x1 = intersect(x1, boxes[i].xi1);
        x2 = intersect(x2, boxes[i].xi2);
    }
    // rounding must stay far below the box width or late residuals lose their lower bound
    const Rational w = std::min(Rational(x1.hi - x1.lo), Rational(x2.hi - x2.lo));
    if (w > 0) {
        const unsigned need = static_cast<unsigned>(mpz_sizeinbase(ceil_of(1 / w).get_mpz_t(), 2)) + 64;
        bits = std::max(bits, need);
    }
    return TargetVector::enclosure(round_outward(x1, bits), round_outward(x2, bits), Provenance::ConstructionTrace,
                                   bits);
}

// phi(1/(64 rho_{nu-1} rho_nu)) <= 1/(16 q_{nu+1} rho_nu), evaluated with a
// rational lower bound u of the argument (phi decreasing, so phi(u) bounds
// the left side from above) and a lower bound of the right side.
inline bool ce_holds(const DecreasingFn& phi, const Rational& rho_prev_sq, const Rational& rho_sq, const Integer& q_next,
                     unsigned bits) {
    if (q_next < 1) return false;
    const Rational u = 1 / (64 * sqrt_upper(rho_prev_sq * rho_sq, bits));
    const Rational v = 1 / (16 * Rational(q_next) * sqrt_upper(rho_sq, bits));
    return phi.eval(u) <= v;
}

struct LemmaWindow {
    Integer left;
    Rational right;
    bool empty() const { return Rational(left) > right; }
};

// Every integer point x independent of (z', z'') with q in [left, right]
// has residual >= phi(q), given residual bounds R', R'' of z', z''.
// Expanding det(x, z', z'') along xi gives
//   1 <= 2 q R' R'' + 2 R_x (q' R'' + q'' R').
inline LemmaWindow lemma5_window(const DecreasingFn& phi, const Integer& q_prev, const Integer& q_cur,
                                 const Rational& R_prev, const Rational& R_cur) {
    LemmaWindow w;
    const Rational mix = Rational(q_prev) * R_cur + Rational(q_cur) * R_prev;
    w.left = mix > 0 ? inverse_upper(phi, 1 / (4 * mix)) : Integer(0);
    w.right = 1 / (4 * R_prev * R_cur);
    return w;
}

inline LemmaWindow interval_I(const ConstructionState& s, const TargetVector& xi, int nu) {
    if (nu < 3 || nu >= s.nu()) throw Error(ErrorKind::InvalidArgument, "interval_I needs 3 <= nu < current step");
    const IntVec3 zp = s.z(nu - 1);
    const IntVec3 zc = s.z(nu);
    return lemma5_window(s.phi, zp[0], zc[0], column_residual(xi, zp).hi, column_residual(xi, zc).hi);
}

// ---------------------------------------------------------------------------
// one step

namespace detail {

struct StepPlan {
    Integer H;
    CEnumeration C;
    EEnumeration E;
    DeltaT dt;
    SinSq delta;
};

inline StepPlan plan_step(const ConstructionState& s, int nu) {
    StepPlan p;
    p.H = compute_H(s, nu);
    p.C = enumerate_C(s, nu, p.H);
    p.E = enumerate_E(s, nu, p.H);
    p.dt = effective_delta_T(s.z(nu), p.C.representatives, s.phi, s.config.cap);
    p.delta = SinSq(std::min(p.dt.delta.value(), Rational(s.delta(nu - 1).value() / 4)));
    return p;
}

// Predicates on z_{nu+1} = x given the plane normal n = cross(z_nu, x).
struct Candidate {
    bool q_positive, norm_growth, delta1, rho_halving, ce, nesting;
    bool all() const { return q_positive && norm_growth && delta1 && rho_halving && ce && nesting; }
};

inline Candidate check_candidate(const ConstructionState& s, int nu, const IntVec3& x, const SinSq& delta) {
    const IntVec3 z = s.z(nu);
    const IntVec3 n = cross(z, x);
    Candidate c{};
    c.q_positive = x[0] >= 1;
    c.norm_growth = x.norm_sq() > z.norm_sq();
    c.delta1 = !n.is_zero() && 4 * sin_sq_between_lines(x, z).value() < delta.value();
    const Rational rho_sq = make_rational(n.norm_sq(), x.norm_sq());
    c.rho_halving = 4 * rho_sq <= s.rho_sq(nu - 1);
    c.ce = c.q_positive && rho_sq > 0 && ce_holds(s.phi, s.rho_sq(nu - 1), rho_sq, x[0], s.config.sqrt_bits);
    c.nesting = true;
    if (const auto outer = box_at(s, nu - 1)) {
        const auto inner = box_for(z, rho_sq, nu, s.config.sqrt_bits);
        c.nesting = inner && box_nested(*inner, *outer);
    }
    return c;
}

}  // namespace detail

// Re-derives every certified predicate of step nu from the state alone.
inline StepCertificate verify_step(const ConstructionState& s, int nu) {
    const StepRecord& st = s.steps.at(static_cast<std::size_t>(nu - 2));
    StepCertificate c;
    const IntVec3 z = s.z(nu);
    const IntVec3 zn = st.z_next;
    const IntVec3 n = st.normal;

    detail::StepPlan p;
    try {
        p = detail::plan_step(s, nu);
    } catch (const Error&) {
        return c;
    }
    c.recomputed = p.H == st.H && p.C.pair_count == st.C_size && p.C.representatives.size() == st.C_planes &&
                   p.E.points.size() == st.E_size && p.delta == st.delta && p.dt.T == st.T && st.nu == nu;

    const bool normal_ok = !n.is_zero() && is_primitive(n);
    c.cond_i = normal_ok && dot(n, z) == 0;
    const IntVec3 cr = cross(z, zn);
    c.cond_ii = normal_ok && is_extendable_pair(z, zn) && (cr == n || cr == -n);
    c.cond_iii = normal_ok && sin_sq_between_planes(n, s.lattice_normal(nu)) >= s.config.plane_angle;
    if (normal_ok) {
        const PlanarLattice lat = PlanarLattice::from_normal(n);
        const auto pts = enumerate_points(lat, Rational(st.T * st.T));
        c.cond_iv = Rational(n.norm_sq()) > Rational(st.T * st.T * z.norm_sq()) &&
                    std::all_of(pts.begin(), pts.end(), [&](const IntVec3& x) { return cross(x, z).is_zero(); });
        c.cond_v = std::none_of(p.E.layers.begin(), p.E.layers.end(),
                                [&](const AffineLayer& l) { return layer_has_point_on_plane(n, l); });
    }
    const Rational d_prev = s.delta(nu - 1).value();
    const Rational d_cur = st.delta.value();
    if (nu >= 3) {
        const Rational a = sin_sq_between_lines(z, s.z(nu - 1)).value();
        c.daba = 4 * a < d_prev;
        c.delta2 = sqrt_sum_le(a, d_cur, d_prev);
    } else {
        c.daba = c.delta2 = true;
    }
    c.delta_halving = 4 * d_cur <= d_prev;
    const detail::Candidate cand = detail::check_candidate(s, nu, zn, st.delta);
    c.delta1 = cand.delta1;
    c.ce = cand.ce;
    c.rho_halving = cand.rho_halving;
    c.norm_growth = cand.norm_growth;
    c.q_positive = cand.q_positive;
    c.nesting = cand.nesting;
    c.rho_identity = st.rho_sq * Rational(zn.norm_sq()) == Rational(n.norm_sq());
    return c;
}

inline void step(ConstructionState& s) {
    const int nu = s.nu();
    const IntVec3 z = s.z(nu);
    const detail::StepPlan p = detail::plan_step(s, nu);

    PlaneSearchConstraints pc;
    pc.anchor = z;
    pc.reference_plane = s.lattice(nu);
    pc.min_plane_angle = s.config.plane_angle;
    pc.max_family_angle = SinSq(Rational(1));
    pc.min_normal_norm_sq = Rational(p.dt.T * p.dt.T * z.norm_sq());
    pc.forbidden_layers = p.E.layers;
    pc.budget = s.config.plane_budget;
    const PlaneSearchResult found = plane_search(pc);

    IntVec3 c = complete_in_lattice(found.lattice, z);
    if (z[0] == 0) {
        if (c[0] == 0) throw Error(ErrorKind::SearchExhausted, "chosen plane has no point with q >= 1");
        if (c[0] < 0) c = -c;
    }

    std::uint64_t evals = 0;
    auto pass = [&](const Integer& k) {
        if (++evals > s.config.layer_budget)
            throw Error(ErrorKind::SearchExhausted,
                        "layer scan budget of " + std::to_string(s.config.layer_budget) + " values of k");
        return detail::check_candidate(s, nu, c + k * z, p.delta).all();
    };
    // gallop to a passing k, then bisect to the first pass after the last known failure
    Integer lo = 0, hi = 1;
    while (!pass(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const Integer mid = (lo + hi) / 2;
        if (pass(mid))
            hi = mid;
        else
            lo = mid;
    }

    StepRecord st;
    st.nu = nu;
    st.H = p.H;
    st.C_size = p.C.pair_count;
    st.C_planes = p.C.representatives.size();
    st.E_size = p.E.points.size();
    st.delta = p.delta;
    st.T = p.dt.T;
    st.z_next = c + hi * z;
    st.normal = cross(z, st.z_next);
    st.rho_sq = make_rational(st.normal.norm_sq(), st.z_next.norm_sq());
    st.k = hi;
    st.plane_candidates = found.candidates;
    st.layer_evaluations = evals;
    s.steps.push_back(std::move(st));

    StepCertificate cert = verify_step(s, nu);
    s.steps.back().cert = cert;
    if (!cert.all()) {
        s.steps.pop_back();
        std::string failed;
        for (const auto& [name, ok] : cert.flags()) {
            if (!ok) failed += " " + name;
        }
        throw Error(ErrorKind::CertificateFailure, "step " + std::to_string(nu) + " failed:" + failed);
    }
}

}  // namespace diophant
