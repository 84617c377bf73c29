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

#include "diophant/best_approx.hpp"
#include "diophant/construction.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace diophant {

struct Lemma5Report {
    int nu = 0;
    Integer left;
    Rational right;
    std::size_t scanned = 0;
    std::size_t exempt = 0;
    std::vector<Integer> failures;

    bool pass() const { return failures.empty(); }
};

// Scans q in I_nu cap [1, Q] at the nearest integer point; dependent points
// (coplanar with z_{nu-1}, z_nu) are exempt.
inline Lemma5Report lemma5_scan(const TargetVector& xi, const ConstructionState& s, int nu, const Integer& Q) {
    const LemmaWindow w = interval_I(s, xi, nu);
    Lemma5Report rep;
    rep.nu = nu;
    rep.left = w.left;
    rep.right = w.right;
    const IntVec3 zp = s.z(nu - 1);
    const IntVec3 zc = s.z(nu);
    const Integer first = std::max(Integer(1), w.left);
    const Integer last = std::min(Q, floor_of(w.right));
    for (Integer q = first; q <= last; ++q) {
        const Residual r = residual(xi, q);
        const IntVec3 x(q, r.a1, r.a2);
        ++rep.scanned;
        if (det3(x, zp, zc) == 0) {
            ++rep.exempt;
            continue;
        }
        if (r.r.lo < s.phi.eval(Rational(q))) rep.failures.push_back(q);
    }
    return rep;
}

// Indices nu whose window meets [1, Q].
inline std::vector<int> lemma5_indices(const TargetVector& xi, const ConstructionState& s, const Integer& Q) {
    std::vector<int> out;
    for (int nu = 3; nu < s.nu(); ++nu) {
        const LemmaWindow w = interval_I(s, xi, nu);
        const Integer first = std::max(Integer(1), w.left);
        if (!w.empty() && Rational(first) <= w.right && first <= Q) out.push_back(nu);
    }
    return out;
}

struct GoodColumn {
    IntVec3 x;
    RatInterval residual;
    Rational ratio;  // residual.hi / phi(q); good at eps iff ratio < eps
};

struct TripleDet {
    std::size_t i, j, k;
    Integer det;
};

struct GridRow {
    int k = 0;  // eps = 2^-k
    std::size_t good = 0;
    std::size_t unimodular = 0;
};

struct CertificationReport {
    Integer Q;
    Rational epsilon;          // 0 when no grid value passes
    int epsilon_exponent = -1; // eps = 2^-exponent
    std::vector<GoodColumn> good_points;  // at the reported epsilon
    std::size_t triples_checked = 0;
    std::vector<TripleDet> unimodular_at_one;  // among columns good at eps = 1
    std::vector<GoodColumn> good_at_one;
    std::vector<GridRow> grid;
    bool monotone = true;
    std::vector<Lemma5Report> lemma5_windows;
    // best-approximation triples (any, not only consecutive) with |det| = 1
    std::size_t best_triples_checked = 0;
    std::vector<TripleDet> best_unimodular;
    std::vector<IntVec3> best_vectors;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool pass() const { return violations.empty(); }
};

// Columns (q, a1, a2), q_lo <= q <= q_hi, with residual < phi(q) (the eps = 1
// set). Disjoint q-ranges concatenate in order, so the scan splits freely.
inline std::vector<GoodColumn> good_columns(const TargetVector& xi, const DecreasingFn& phi, const Integer& q_lo,
                                            const Integer& q_hi) {
    if (q_lo < 1) throw Error(ErrorKind::InvalidArgument, "good_columns needs q >= 1");
    std::vector<GoodColumn> out;
    for (Integer q = q_lo; q <= q_hi; ++q) {
        const Rational f = phi.eval(Rational(q));
        std::vector<std::vector<std::pair<Integer, RatInterval>>> per(static_cast<std::size_t>(xi.dim()));
        bool any = true;
        for (int j = 0; j < xi.dim() && any; ++j) {
            const RatInterval qx = Rational(q) * xi.coord(j);
            for (Integer a = ceil_of(qx.hi - f); Rational(a) <= qx.lo + f; ++a) {
                const RatInterval r = abs(qx - Rational(a));
                if (r.hi < f) per[static_cast<std::size_t>(j)].emplace_back(a, r);
            }
            any = !per[static_cast<std::size_t>(j)].empty();
        }
        if (!any) continue;
        for (const auto& [a1, r1] : per[0]) {
            if (xi.dim() == 1) {
                out.push_back({IntVec3(q, a1, 0), r1, r1.hi / f});
                continue;
            }
            for (const auto& [a2, r2] : per[1]) {
                const RatInterval r = max(r1, r2);
                out.push_back({IntVec3(q, a1, a2), r, r.hi / f});
            }
        }
    }
    return out;
}

inline std::vector<GoodColumn> good_columns(const TargetVector& xi, const DecreasingFn& phi, const Integer& Q) {
    return good_columns(xi, phi, Integer(1), Q);
}

inline std::vector<TripleDet> unimodular_triples(const std::vector<IntVec3>& v, std::size_t* checked = nullptr) {
    std::vector<TripleDet> out;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const IntVec3 c = cross(v[i], v[j]);
            if (c.is_zero()) continue;
            for (std::size_t k = j + 1; k < v.size(); ++k) {
                ++n;
                Integer d = dot(c, v[k]);
                if (d == 1 || d == -1) out.push_back({i, j, k, std::move(d)});
            }
        }
    }
    if (checked) *checked = n;
    return out;
}

// good_at_one must equal good_columns(xi, s.phi, Q); callers may compute it in parallel.
inline CertificationReport certify_counterexample(const TargetVector& xi, const ConstructionState& s, const Integer& Q,
                                                  std::vector<GoodColumn> good_at_one, int max_k = 40) {
    if (s.steps.size() < 3) throw Error(ErrorKind::TooFewSteps, "certification needs at least 3 steps");
    CertificationReport rep;
    rep.Q = Q;
    rep.good_at_one = std::move(good_at_one);
    std::vector<IntVec3> cols;
    for (const auto& g : rep.good_at_one) cols.push_back(g.x);
    rep.unimodular_at_one = unimodular_triples(cols, &rep.triples_checked);

    // a triple survives at eps iff all three ratios are < eps
    std::vector<Rational> worst;
    for (const auto& t : rep.unimodular_at_one) {
        worst.push_back(std::max({rep.good_at_one[t.i].ratio, rep.good_at_one[t.j].ratio, rep.good_at_one[t.k].ratio}));
    }
    for (int k = 0; k <= max_k; ++k) {
        const Rational eps = make_rational(1, pow2(static_cast<unsigned long>(k)));
        GridRow row;
        row.k = k;
        row.good = static_cast<std::size_t>(std::count_if(rep.good_at_one.begin(), rep.good_at_one.end(),
                                                          [&](const GoodColumn& g) { return g.ratio < eps; }));
        row.unimodular =
            static_cast<std::size_t>(std::count_if(worst.begin(), worst.end(), [&](const Rational& w) { return w < eps; }));
        if (!rep.grid.empty() && (row.unimodular > rep.grid.back().unimodular || row.good > rep.grid.back().good))
            rep.monotone = false;
        rep.grid.push_back(row);
        if (rep.epsilon_exponent < 0 && row.unimodular == 0) {
            rep.epsilon_exponent = k;
            rep.epsilon = eps;
        }
    }
    if (rep.epsilon_exponent >= 0) {
        for (const auto& g : rep.good_at_one) {
            if (g.ratio < rep.epsilon) rep.good_points.push_back(g);
        }
    } else {
        rep.violations.push_back("every grid epsilon down to 2^-" + std::to_string(max_k) +
                                 " admits a unimodular triple of good columns");
    }
    if (!rep.monotone) rep.violations.push_back("grid counts are not monotone in epsilon");

    const BestApproxSeq seq = best_sequence(xi, Q);
    for (const auto& e : seq.entries) rep.best_vectors.push_back(e.vector);
    rep.best_unimodular = unimodular_triples(rep.best_vectors, &rep.best_triples_checked);
    if (!rep.best_unimodular.empty())
        rep.warnings.push_back(std::to_string(rep.best_unimodular.size()) +
                               " best-approximation triple(s) with determinant +-1 below Q");
    return rep;
}

inline CertificationReport certify_counterexample(const TargetVector& xi, const ConstructionState& s, const Integer& Q,
                                                  int max_k = 40) {
    if (s.steps.size() < 3) throw Error(ErrorKind::TooFewSteps, "certification needs at least 3 steps");
    return certify_counterexample(xi, s, Q, good_columns(xi, s.phi, Q), max_k);
}

struct InvariantStep {
    int nu = 0;
    StepCertificate cert;
    // (q_{nu+1} rho_nu)^2 <= |n_{nu+1}|^2, equal to |n|^2 (q/|z_{nu+1}|)^2
    Rational q_ratio_sq;
    bool q_rho_bounded = false;
};

struct InvariantReport {
    std::vector<InvariantStep> steps;
    bool enclosure_nested = true;
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
};

// Every predicate re-derived from the state; stored flags are ignored.
inline InvariantReport invariant_suite(const ConstructionState& s) {
    InvariantReport rep;
    for (int nu = 2; nu < s.nu(); ++nu) {
        InvariantStep st;
        st.nu = nu;
        try {
            st.cert = verify_step(s, nu);
            const StepRecord& rec = s.steps.at(static_cast<std::size_t>(nu - 2));
            const Rational q(rec.z_next[0]);
            const Rational n_sq(rec.normal.norm_sq());
            if (rec.z_next.norm_sq() != 0) {
                st.q_ratio_sq = q * q / Rational(rec.z_next.norm_sq());
                const Rational lhs = q * q * rec.rho_sq;
                st.q_rho_bounded = lhs <= n_sq && lhs == n_sq * st.q_ratio_sq;
            }
            if (!st.q_rho_bounded) rep.failures.push_back("step " + std::to_string(nu) + ": q rho bound");
        } catch (const Error& e) {
            rep.failures.push_back("step " + std::to_string(nu) + ": " + e.what());
        }
        for (const auto& [name, ok] : st.cert.flags()) {
            if (!ok) rep.failures.push_back("step " + std::to_string(nu) + ": " + name);
        }
        rep.steps.push_back(std::move(st));
    }
    std::vector<EnclosureBox> boxes;
    try {
        boxes = enclosure_boxes(s);
    } catch (const Error& e) {
        rep.enclosure_nested = false;
        rep.failures.push_back(std::string("enclosure boxes: ") + e.what());
    }
    for (std::size_t i = 1; i < boxes.size(); ++i) {
        if (!box_nested(boxes[i], boxes[i - 1])) {
            rep.enclosure_nested = false;
            rep.failures.push_back("enclosure box " + std::to_string(boxes[i].nu) + " not nested");
        }
    }
    return rep;
}

struct HaSample {
    int nu = 0;
    IntVec3 x;
    RatInterval residual;
    bool distance_bound = false;  // residual >= rho_{nu-1}/2
    bool phi_checked = false;     // q >= inverse_upper(phi, rho_{nu-1}/2)
    bool phi_bound = true;        // residual >= phi(q) when checked

    bool pass() const { return distance_bound && phi_bound; }
};

// Points of Lambda_nu off span(z_nu) lie at distance >= rho_{nu-1} from that
// span. Against the final enclosure their residual is compared with
// rho_{nu-1}/2 and, for q past the phi-inverse of that bound, with phi(q).
// Samples are x = j c + i z_nu with q >= 1 and |x| >= H_nu.
inline std::vector<HaSample> ha_check(const ConstructionState& s, const TargetVector& xi, int nu, int samples = 24) {
    if (nu < 3 || nu >= s.nu()) throw Error(ErrorKind::InvalidArgument, "ha_check needs 3 <= nu < current step");
    std::vector<HaSample> out;
    const IntVec3 z = s.z(nu);
    const IntVec3 c = complete_in_lattice(s.lattice(nu), z);
    const Integer H_sq = s.H(nu) * s.H(nu);
    const Rational half_rho = sqrt_lower(s.rho_sq(nu - 1), s.config.sqrt_bits) / 2;
    const Integer q_min = inverse_upper(s.phi, half_rho);
    for (int j = 1; static_cast<int>(out.size()) < samples && j <= 4 * samples; ++j) {
        for (const int sgn : {1, -1}) {
            for (int i = -2; i <= 2 && static_cast<int>(out.size()) < samples; ++i) {
                IntVec3 x = Integer(sgn * j) * c + Integer(i) * z;
                if (x[0] < 0) x = -x;
                if (x[0] < 1 || x.norm_sq() < H_sq) continue;
                HaSample h;
                h.nu = nu;
                h.x = x;
                h.residual = column_residual(xi, x);
                h.distance_bound = h.residual.lo >= half_rho;
                h.phi_checked = x[0] >= q_min;
                if (h.phi_checked) h.phi_bound = h.residual.lo >= s.phi.eval(Rational(x[0]));
                out.push_back(std::move(h));
            }
        }
    }
    return out;
}

}  // namespace diophant
