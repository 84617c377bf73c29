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

#include "diophant/trace.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <functional>

namespace diophant {
namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

void expect_same_state(const ConstructionState& a, const ConstructionState& b) {
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_EQ(a.config, b.config);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const StepRecord &x = a.steps[i], &y = b.steps[i];
        EXPECT_EQ(x.nu, y.nu);
        EXPECT_EQ(x.H, y.H);
        EXPECT_EQ(x.C_size, y.C_size);
        EXPECT_EQ(x.C_planes, y.C_planes);
        EXPECT_EQ(x.E_size, y.E_size);
        EXPECT_EQ(x.delta, y.delta);
        EXPECT_EQ(x.T, y.T);
        EXPECT_EQ(x.normal, y.normal);
        EXPECT_EQ(x.z_next, y.z_next);
        EXPECT_EQ(x.rho_sq, y.rho_sq);
        EXPECT_EQ(x.k, y.k);
        EXPECT_EQ(x.plane_candidates, y.plane_candidates);
        EXPECT_EQ(x.layer_evaluations, y.layer_evaluations);
        EXPECT_EQ(x.cert.flags(), y.cert.flags());
    }
}

TEST(Trace, RoundTrip) {
    const ConstructionState& s = fixtures::harmonic_run(6);
    const json doc = trace_document(s);
    const ConstructionState back = state_from_json(json::parse(dump(doc)));
    expect_same_state(s, back);
    EXPECT_EQ(dump(trace_document(back)), dump(doc));
}

TEST(Trace, FileRoundTripAndResume) {
    const auto path = std::filesystem::temp_directory_path() / "diophant_trace_test.json";
    ConstructionState s = fixtures::harmonic_run(3);
    write_trace(path.string(), s);
    ConstructionState resumed = read_trace(path.string());
    step(resumed);
    EXPECT_EQ(resumed.nu(), 6);
    expect_same_state(resumed, fixtures::harmonic_run(4));
    std::filesystem::remove(path);
}

TEST(Trace, ByteDeterminism) {
    ConstructionState a = init(DecreasingFn::power(Rational(1), 1));
    ConstructionState b = init(DecreasingFn::power(Rational(1), 1));
    for (int i = 0; i < 4; ++i) {
        step(a);
        step(b);
    }
    EXPECT_EQ(dump(trace_document(a)), dump(trace_document(b)));
    // keys come out sorted, integers as strings
    const std::string text = dump(trace_document(a));
    EXPECT_LT(text.find("\"config\""), text.find("\"phi\""));
    EXPECT_NE(text.find("\"z_next\": [\n"), std::string::npos);
}

TEST(Trace, PhiDescriptors) {
    const DecreasingFn p = DecreasingFn::power(q(3, 2), 2);
    EXPECT_EQ(phi_from_json(to_json(p)), p);
    using R = DecreasingFn::Row;
    const DecreasingFn t = DecreasingFn::table({R{q(0), q(2)}, R{q(5, 2), q(1, 3)}}, q(1, 3), 3);
    EXPECT_EQ(phi_from_json(to_json(t)), t);
    EXPECT_EQ(to_json(p)["kind"], "power");
    EXPECT_EQ(to_json(t)["kind"], "table");

    EXPECT_THROW(phi_from_json(json{{"kind", "power"}, {"scale", {"1", "1"}}, {"k", 0}}), Error);
    EXPECT_THROW(phi_from_json(json{{"kind", "exp"}}), Error);
    EXPECT_THROW(phi_from_json(json{{"kind", "power"}, {"scale", {"-1", "1"}}, {"k", 1}}), Error);
}

using Mutator = std::function<void(json&)>;

TEST(Trace, CorruptDocumentsAreRejected) {
    const json good = trace_document(fixtures::harmonic_run(3));
    const std::vector<std::pair<const char*, Mutator>> cases{
        {"version", [](json& d) { d["version"] = 99; }},
        {"missing steps", [](json& d) { d.erase("steps"); }},
        {"bad integer", [](json& d) { d["steps"][0]["H"] = "12x"; }},
        {"integer as number", [](json& d) { d["steps"][0]["H"] = 7; }},
        {"unreduced rational", [](json& d) { d["steps"][0]["rho_sq"] = {"2", "4"}; }},
        {"zero denominator", [](json& d) { d["steps"][0]["rho_sq"] = {"1", "0"}; }},
        {"short vector", [](json& d) { d["steps"][1]["z_next"] = {"1", "2"}; }},
        {"order", [](json& d) { d["steps"][1]["nu"] = 7; }},
        {"initial", [](json& d) { d["initial"]["z1"] = {"2", "0", "0"}; }},
        {"flag type", [](json& d) { d["steps"][0]["certificate"]["ce"] = "yes"; }},
        {"sin out of range", [](json& d) { d["steps"][0]["delta"] = {"3", "2"}; }},
        {"phi", [](json& d) { d["phi"] = json{{"kind", "power"}}; }},
    };
    for (const auto& [name, mutate] : cases) {
        json d = good;
        mutate(d);
        try {
            state_from_json(d);
            ADD_FAILURE() << name << " accepted";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::CorruptTrace) << name;
        }
    }
    EXPECT_THROW(read_trace("/nonexistent/diophant/trace.json"), Error);
}

TEST(Trace, UnparseableFile) {
    const auto path = std::filesystem::temp_directory_path() / "diophant_corrupt_test.json";
    write_text_file(path.string(), "{\"version\": 1, \"steps\": [");
    try {
        read_trace(path.string());
        FAIL() << "expected CorruptTrace";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CorruptTrace);
    }
    std::filesystem::remove(path);
}

TEST(Csv, CrlfAndQuoting) {
    EXPECT_EQ(csv({"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", ""}}), "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",\r\n");
    const BestApproxSeq seq = best_sequence(TargetVector::exact(q(1, 3), q(1, 2)), Integer(6));
    const std::string text = psi_csv(seq);
    EXPECT_EQ(text.substr(0, 27), "q,residual_lo,residual_hi\r\n");
    std::size_t lines = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) lines += text.compare(i, 2, "\r\n") == 0;
    EXPECT_EQ(lines, 4u);
    EXPECT_EQ(text.find('\n', 0), text.find("\r\n") + 1);

    const std::string steps = steps_csv(fixtures::harmonic_run(2));
    EXPECT_EQ(steps.rfind("\r\n"), steps.size() - 2);
}

TEST(Reports, SerializeCertification) {
    const ConstructionState& s = fixtures::harmonic_run(8);
    const TargetVector xi = xi_enclosure(s);
    const CertificationReport rep = certify_counterexample(xi, s, Integer(500));
    const json j = to_json(rep);
    EXPECT_EQ(j["pass"], rep.pass());
    EXPECT_EQ(j["grid"].size(), rep.grid.size());
    const json inv = to_json(invariant_suite(s));
    EXPECT_EQ(inv["pass"], true);
    EXPECT_EQ(to_json(xi)["provenance"], "construction-trace");
}

}  // namespace
}  // namespace diophant
