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
#include "diophant/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace diophant {

// z* = e + frac(sigma) z1 + frac(tau) z2 [+ z1], e = n/|n|^2, n = cross(z1, z2).
struct WitnessPoint {
    IntVec3 z_star;
    RatVec3 e;
    Rational e_norm_sq;
    Rational sigma_frac, tau_frac;
    bool added_z1 = false;
};

inline WitnessPoint witness_point(const IntVec3& z1, const IntVec3& z2) {
    if (!is_extendable_pair(z1, z2)) throw Error(ErrorKind::NotExtendable, "pair is not extendable");
    const IntVec3 n = cross(z1, z2);
    const Integer nn = n.norm_sq();
    WitnessPoint w;
    for (std::size_t i = 0; i < 3; ++i) w.e[i] = make_rational(n[i], nn);
    w.e_norm_sq = make_rational(1, nn);
    const IntVec3 y = complete_basis(z1, z2);
    // y - e lies in the plane; cross(n, .) . n vanishes, so the e part drops out.
    const Rational sigma = make_rational(dot(cross(y, z2), n), nn);
    const Rational tau = make_rational(dot(cross(z1, y), n), nn);
    w.z_star = y - floor_of(sigma) * z1 - floor_of(tau) * z2;
    w.sigma_frac = frac_of(sigma);
    w.tau_frac = frac_of(tau);
    if (w.z_star[0] < 1) {
        w.z_star = w.z_star + z1;
        w.added_z1 = true;
        if (w.z_star[0] < 1) throw Error(ErrorKind::NonPositiveQ, "z* has no positive first coordinate");
    }
    return w;
}

inline UnimodMatrix unimodular_witness(const IntVec3& z1, const IntVec3& z2) {
    const WitnessPoint w = witness_point(z1, z2);
    return UnimodMatrix(z1, z2, w.z_star);
}

struct WitnessRecord {
    std::size_t pair_index = 0;
    UnimodMatrix matrix{IntVec3(1, 0, 0), IntVec3(1, 1, 0), IntVec3(1, 0, 1)};
    Rational e_norm_sq;
    RatInterval R;
    Rational R_bound;            // certified from the parallelogram decomposition
    RatInterval jarnik_sq;       // (q_{nu+1} res_nu |e|)^2
    bool added_z1 = false;
};

struct SkippedPair {
    std::size_t pair_index;
    std::string reason;
};

struct WitnessSequence {
    std::vector<WitnessRecord> records;
    std::vector<SkippedPair> skipped;
    BestApproxSeq sequence;
};

// Bound on R(M): residuals of z1, z2 and of z* through its decomposition.
inline Rational witness_bound(const TargetVector& xi, const IntVec3& z1, const IntVec3& z2, const WitnessPoint& w) {
    const Rational r1 = column_residual(xi, z1).hi;
    const Rational r2 = column_residual(xi, z2).hi;
    Rational rz(0);
    for (int j = 0; j < xi.dim(); ++j) {
        const RatInterval re = abs(RatInterval(w.e[j + 1]) - w.e[0] * xi.coord(j));
        rz = std::max(rz, re.hi);
    }
    rz += w.sigma_frac * r1 + w.tau_frac * r2;
    if (w.added_z1) rz += r1;
    return std::max({r1, r2, rz});
}

inline WitnessSequence witness_sequence(const TargetVector& xi, const Integer& Q) {
    if (xi.dim() != 2) throw Error(ErrorKind::InvalidArgument, "witness_sequence needs n = 2");
    WitnessSequence out;
    out.sequence = best_sequence(xi, Q);
    const auto& e = out.sequence.entries;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        const IntVec3& z1 = e[i].vector;
        const IntVec3& z2 = e[i + 1].vector;
        if (!is_extendable_pair(z1, z2)) {
            out.skipped.push_back({i, cross(z1, z2).is_zero() ? "collinear" : "cross product not primitive"});
            continue;
        }
        const WitnessPoint w = witness_point(z1, z2);
        WitnessRecord rec;
        rec.pair_index = i;
        rec.matrix = UnimodMatrix(z1, z2, w.z_star);
        rec.e_norm_sq = w.e_norm_sq;
        rec.R = matrix_R(xi, rec.matrix);
        rec.R_bound = witness_bound(xi, z1, z2, w);
        const Rational q2 = Rational(z2[0]);
        rec.jarnik_sq = Rational(q2 * q2 * w.e_norm_sq) * (e[i].residual * e[i].residual);
        rec.added_z1 = w.added_z1;
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace diophant
