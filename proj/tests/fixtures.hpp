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

#include "diophant/construction.hpp"

namespace fixtures {

// Construction for phi(t) = 1/(1+t) after n steps, built once per process.
inline const diophant::ConstructionState& harmonic_run(int n) {
    static diophant::ConstructionState s = diophant::init(diophant::DecreasingFn::power(diophant::Rational(1), 1));
    while (static_cast<int>(s.steps.size()) < n) diophant::step(s);
    static std::map<int, diophant::ConstructionState> prefixes;
    auto it = prefixes.find(n);
    if (it == prefixes.end()) {
        diophant::ConstructionState p = s;
        p.steps.resize(static_cast<std::size_t>(n));
        it = prefixes.emplace(n, std::move(p)).first;
    }
    return it->second;
}

inline diophant::TargetVector root_pair(unsigned bits) {
    using namespace diophant;
    const RatInterval a = enclose_sqrt(Rational(2), bits), b = enclose_sqrt(Rational(3), bits);
    return TargetVector::enclosure(RatInterval(a.lo - 1, a.hi - 1), RatInterval(b.lo - 1, b.hi - 1),
                                   Provenance::DecimalLiteral, bits);
}

}  // namespace fixtures
