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

#include "diophant/construction.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

namespace diophant {
namespace {

const DecreasingFn harmonic = DecreasingFn::power(Rational(1), 1);

Rational q(long n, long d = 1) { return make_rational(n, d); }

TEST(Init, StartingVectors) {
    const ConstructionState s = init(harmonic);
    EXPECT_EQ(s.nu(), 2);
    EXPECT_EQ(s.z(1), IntVec3(1, 0, 0));
    EXPECT_EQ(s.z(2), IntVec3(0, 1, 0));
    EXPECT_EQ(s.rho_sq(1), 1);
    EXPECT_TRUE(is_extendable_pair(s.z(1), s.z(2)));
    EXPECT_EQ(eta_sq(s.z(1), s.z(2)), 1);
    EXPECT_EQ(s.lattice_normal(2), IntVec3(0, 0, 1));
    EXPECT_TRUE(enclosure_boxes(s).empty());
    EXPECT_THROW(xi_enclosure(s), Error);
}

TEST(ComputeH, Examples) {
    ConstructionState s = init(harmonic);
    EXPECT_EQ(compute_H(s, 2), 7);
    EXPECT_THROW(compute_H(s, 1), Error);

    // fake a third vector with eta^2(z2, z3) = 2
    StepRecord r;
    r.z_next = IntVec3(1, 0, 1);
    s.steps.push_back(r);
    ASSERT_EQ(eta_sq(s.z(2), s.z(3)), 2);
    // 141/100 < sqrt 2 and the certified bound is tighter, so H is at most the 141/100 value
    const Integer coarse = inverse_upper(harmonic, q(141, 800));
    EXPECT_EQ(coarse, 5);
    EXPECT_LE(compute_H(s, 3), coarse);
    // 8/sqrt2 - 1 = 4.65..., so the ceiling is 5 for any bound within 10^-3
    EXPECT_EQ(compute_H(s, 3), 5);

    using R = DecreasingFn::Row;
    ConstructionState t = init(DecreasingFn::table({R{q(0), q(4)}, R{q(8), q(1, 8)}}, q(1, 8), 1));
    // table oracle: linear from 4 at 0 to 1/8 at 8, so value 1/8 is first met at t = 8
    EXPECT_EQ(compute_H(t, 2), 8);
}

TEST(EnumerateC, FirstStepHasNoAdmissiblePairs) {
    const ConstructionState s = init(harmonic);
    // every pair of points of {x3 = 0} spans that plane, which contains z2
    const CEnumeration c = enumerate_C(s, 2, Integer(7));
    EXPECT_EQ(c.pair_count, 0u);
    EXPECT_TRUE(c.representatives.empty());
}

TEST(EnumerateE, FirstStepMatchesOracle) {
    const ConstructionState s = init(harmonic);
    const EEnumeration e = enumerate_E(s, 2, Integer(7));
    std::size_t ref = 0;
    for (const auto& x : oracle::plane_points({0, 0, 1}, 49)) {
        const oracle::V3 c = oracle::cross({0, 1, 0}, x);
        if (oracle::norm_sq(c) != 0 && oracle::gcd3(c) == 1) ++ref;
    }
    EXPECT_EQ(ref, 26u);
    EXPECT_EQ(e.points.size(), ref);
    EXPECT_EQ(e.layers.size(), 2u);
    for (const auto& x : e.points) EXPECT_EQ(abs(x[0]), 1);
}

// Pairs counted by brute force over the same short points.
TEST(EnumerateC, SecondStepMatchesOracle) {
    const ConstructionState& s = fixtures::harmonic_run(1);
    const Integer H = compute_H(s, 3);
    std::set<oracle::V3> pts;
    for (int lam = 2; lam <= 3; ++lam) {
        const Integer h = lam == 3 ? H : s.H(lam);
        const oracle::V3 n = oracle::to_v3(s.lattice_normal(lam));
        for (const auto& p : oracle::plane_points(n, Integer(h * h).get_si())) {
            if (p != oracle::V3{0, 0, 0}) pts.insert(p);
        }
    }
    const std::vector<oracle::V3> v(pts.begin(), pts.end());
    const oracle::V3 z = oracle::to_v3(s.z(3));
    std::size_t pairs = 0, extendable = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const oracle::V3 n = oracle::cross(v[i], v[j]);
            if (oracle::norm_sq(n) != 0 && oracle::gcd3(n) == 1 && oracle::dot(n, z) != 0) ++pairs;
        }
        const oracle::V3 c = oracle::cross(z, v[i]);
        if (oracle::norm_sq(c) != 0 && oracle::gcd3(c) == 1) ++extendable;
    }
    EXPECT_EQ(enumerate_C(s, 3, H).pair_count, pairs);
    EXPECT_EQ(enumerate_E(s, 3, H).points.size(), extendable);
    EXPECT_GT(pairs, 0u);
}

TEST(Step, FirstStepCertified) {
    ConstructionState s = init(harmonic);
    step(s);
    ASSERT_EQ(s.nu(), 3);
    const StepRecord& r = s.steps[0];
    EXPECT_TRUE(r.cert.all());
    EXPECT_EQ(r.nu, 2);
    EXPECT_EQ(r.H, 7);
    EXPECT_LE(4 * s.rho_sq(2), 1);
    EXPECT_GE(r.z_next[0], 1);
    EXPECT_EQ(r.rho_sq * Rational(r.z_next.norm_sq()), Rational(r.normal.norm_sq()));
    EXPECT_TRUE(verify_step(s, 2).all());
}

TEST(Step, Deterministic) {
    ConstructionState a = init(harmonic), b = init(harmonic);
    for (int i = 0; i < 3; ++i) {
        step(a);
        step(b);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a.steps[i].z_next, b.steps[i].z_next);
        EXPECT_EQ(a.steps[i].normal, b.steps[i].normal);
    }
}

TEST(Step, BudgetIsObservable) {
    ConstructionConfig cfg;
    cfg.plane_budget = 1;
    ConstructionState s = init(harmonic, cfg);
    try {
        step(s);
        FAIL() << "expected SearchExhausted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SearchExhausted);
    }
    EXPECT_EQ(s.nu(), 2);
}

TEST(Step, TablePhi) {
    using R = DecreasingFn::Row;
    ConstructionState s = init(DecreasingFn::table({R{q(0), q(1)}, R{q(4), q(1, 8)}}, q(1, 8), 2));
    for (int i = 0; i < 4; ++i) step(s);
    for (int nu = 2; nu < s.nu(); ++nu) EXPECT_TRUE(verify_step(s, nu).all()) << nu;
}

TEST(Invariants, ConditionsHoldOnEveryStep) {
    const ConstructionState& s = fixtures::harmonic_run(6);
    for (int nu = 2; nu < s.nu(); ++nu) {
        const StepRecord& r = s.steps[static_cast<std::size_t>(nu - 2)];
        const IntVec3 z = s.z(nu);
        EXPECT_TRUE(r.cert.all());
        // (iv): no point of the new plane within T of the origin off span(z_nu)
        const PlanarLattice lat = PlanarLattice::from_normal(r.normal);
        for (const auto& x : enumerate_points(lat, Rational(r.T * r.T))) EXPECT_TRUE(cross(x, z).is_zero());
        // (v)
        for (const auto& l : enumerate_E(s, nu, r.H).layers) EXPECT_FALSE(layer_has_point_on_plane(r.normal, l));
        // rho identity, halving, norm growth
        EXPECT_EQ(r.rho_sq * Rational(r.z_next.norm_sq()), Rational(cross(z, r.z_next).norm_sq()));
        EXPECT_LE(4 * r.rho_sq, s.rho_sq(nu - 1));
        EXPECT_GT(r.z_next.norm_sq(), z.norm_sq());
        // delta1 and delta halving, exact
        EXPECT_LT(4 * sin_sq_between_lines(r.z_next, z).value(), r.delta.value());
        EXPECT_LE(4 * r.delta.value(), s.delta(nu - 1).value());
        EXPECT_TRUE(ce_holds(s.phi, s.rho_sq(nu - 1), r.rho_sq, r.z_next[0], 64));
    }
}

TEST(CeHolds, Examples) {
    // rho' = 10^-3, rho = 10^-5, q = 10^4: 1/(1 + 1.5625e6) <= 1/1.6
    EXPECT_TRUE(ce_holds(harmonic, q(1, 1000000), q(1, 10000000000), Integer(10000), 64));
    // rho' = 1/2, rho = 1/4, q = 10: phi(1/8) = 8/9 > 1/40
    EXPECT_FALSE(ce_holds(harmonic, q(1, 4), q(1, 16), Integer(10), 64));
    EXPECT_FALSE(ce_holds(harmonic, q(1, 4), q(1, 16), Integer(0), 64));
}

TEST(LemmaWindow, Examples) {
    // residual bounds 4 rho: q_nu = 10^4, rho_{nu-1} = 10^-3, rho_nu = 10^-5
    const LemmaWindow w = lemma5_window(harmonic, Integer(0), Integer(10000), q(4, 1000), q(4, 100000));
    EXPECT_EQ(w.left, 159);
    EXPECT_EQ(w.right, 1562500);
    EXPECT_FALSE(w.empty());
    // 16 q rho_{nu-1} < 1 clamps to 0
    EXPECT_EQ(lemma5_window(harmonic, Integer(0), Integer(1), q(1, 100), q(1, 100)).left, 0);
}

// (ce) makes consecutive windows overlap in the rho form:
// right(I_nu) = 1/(64 rho_{nu-1} rho_nu) >= inverse of phi at 1/(16 q_{nu+1} rho_nu).
TEST(LemmaWindow, ConsecutiveWindowsOverlap) {
    const ConstructionState& s = fixtures::harmonic_run(6);
    for (int nu = 3; nu + 1 < s.nu(); ++nu) {
        const Rational rp = sqrt_upper(s.rho_sq(nu - 1), 64), rc = sqrt_upper(s.rho_sq(nu), 64);
        const Rational right = 1 / (64 * rp * rc);
        const Integer left_next = inverse_upper(s.phi, 1 / (16 * Rational(s.z(nu + 1)[0]) * rc));
        EXPECT_LE(Rational(left_next), right + 1) << nu;
    }
}

TEST(IntervalI, RangeAndValues) {
    const ConstructionState& s = fixtures::harmonic_run(4);
    const TargetVector xi = xi_enclosure(s);
    EXPECT_THROW(interval_I(s, xi, 2), Error);
    EXPECT_THROW(interval_I(s, xi, s.nu()), Error);
    const LemmaWindow w = interval_I(s, xi, 3);
    const LemmaWindow ref = lemma5_window(s.phi, s.z(2)[0], s.z(3)[0], column_residual(xi, s.z(2)).hi,
                                          column_residual(xi, s.z(3)).hi);
    EXPECT_EQ(w.left, ref.left);
    EXPECT_EQ(w.right, ref.right);
}

TEST(Enclosure, BoxesNestAndHalve) {
    const ConstructionState& s = fixtures::harmonic_run(6);
    const auto boxes = enclosure_boxes(s);
    ASSERT_GE(boxes.size(), 4u);
    for (std::size_t i = 1; i < boxes.size(); ++i) {
        EXPECT_TRUE(box_nested(boxes[i], boxes[i - 1]));
        EXPECT_TRUE(boxes[i - 1].xi1.strictly_contains(boxes[i].xi1));
        EXPECT_TRUE(boxes[i - 1].xi2.strictly_contains(boxes[i].xi2));
    }
    const TargetVector xi = xi_enclosure(s);
    EXPECT_TRUE(xi.xi1.contains(boxes.back().xi1));
    EXPECT_TRUE(xi.xi2->contains(boxes.back().xi2));
    EXPECT_EQ(xi.provenance, Provenance::ConstructionTrace);
    // box center a/q is within D |z| / (q (q - D)) of xi
    for (const auto& b : boxes) {
        const IntVec3 z = s.z(b.nu);
        const Rational c1 = make_rational(z[1], z[0]);
        EXPECT_TRUE(b.xi1.contains(RatInterval(c1)));
        EXPECT_LE(xi.xi1.lo, b.xi1.hi);
        EXPECT_GE(xi.xi1.hi, b.xi1.lo);
    }
}

TEST(Enclosure, DegenerateStartIsSkipped) {
    const ConstructionState& s = fixtures::harmonic_run(2);
    // z_2 = (0,1,0) has q = 0, so boxes start at nu = 3
    const auto boxes = enclosure_boxes(s);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].nu, 3);
    EXPECT_FALSE(box_at(s, 2));
}

TEST(Verify, DetectsTampering) {
    ConstructionState s = fixtures::harmonic_run(4);
    s.steps[1].z_next = s.steps[1].z_next + IntVec3(0, 1, 0);
    bool any_fail = false;
    for (int nu = 2; nu < s.nu(); ++nu) any_fail = any_fail || !verify_step(s, nu).all();
    EXPECT_TRUE(any_fail);

    ConstructionState t = fixtures::harmonic_run(3);
    t.steps[0].rho_sq += q(1, 1000000000);
    EXPECT_FALSE(verify_step(t, 2).rho_identity);

    ConstructionState u = fixtures::harmonic_run(3);
    u.steps[1].T += 1;
    EXPECT_FALSE(verify_step(u, 3).recomputed);
}

}  // namespace
}  // namespace diophant
