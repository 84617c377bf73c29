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

// JSON trace and CSV emission. Integers are decimal strings, rationals are
// [num, den] string pairs, vectors are 3-arrays of integer strings. Objects
// are key-sorted, so equal states serialize to identical bytes.

#include "diophant/certifier.hpp"
#include "diophant/construction.hpp"
#include "diophant/witness.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace diophant {

using json = nlohmann::json;

inline constexpr int kTraceVersion = 1;

namespace codec {

inline json enc(const Integer& z) { return z.get_str(); }
inline json enc(const Rational& r) { return json::array({r.get_num().get_str(), r.get_den().get_str()}); }
inline json enc(const IntVec3& v) { return json::array({v[0].get_str(), v[1].get_str(), v[2].get_str()}); }
inline json enc(const RatInterval& a) { return json::array({enc(a.lo), enc(a.hi)}); }

[[noreturn]] inline void corrupt(const std::string& what) { throw Error(ErrorKind::CorruptTrace, what); }

inline Integer dec_int(const json& j) {
    if (!j.is_string()) corrupt("integer must be a decimal string");
    const std::string& s = j.get_ref<const std::string&>();
    Integer z;
    if (s.empty() || z.set_str(s, 10) != 0) corrupt("malformed integer: " + s);
    return z;
}

inline Rational dec_rat(const json& j) {
    if (!j.is_array() || j.size() != 2) corrupt("rational must be a [num, den] pair");
    const Integer den = dec_int(j[1]);
    if (den <= 0) corrupt("rational denominator must be positive");
    const Integer num = dec_int(j[0]);
    Rational r(num, den);
    r.canonicalize();
    if (r.get_num() != num || r.get_den() != den) corrupt("rational not in lowest terms");
    return r;
}

inline IntVec3 dec_vec(const json& j) {
    if (!j.is_array() || j.size() != 3) corrupt("vector must be a 3-array");
    return {dec_int(j[0]), dec_int(j[1]), dec_int(j[2])};
}

inline RatInterval dec_interval(const json& j) {
    if (!j.is_array() || j.size() != 2) corrupt("interval must be a [lo, hi] pair");
    const Rational lo = dec_rat(j[0]), hi = dec_rat(j[1]);
    if (lo > hi) corrupt("interval with lo > hi");
    return {lo, hi};
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) corrupt(std::string("missing field: ") + key);
    return j.at(key);
}

inline std::uint64_t dec_u64(const json& j) {
    const Integer z = dec_int(j);
    if (z < 0 || !z.fits_ulong_p()) corrupt("count out of range");
    return z.get_ui();
}

}  // namespace codec

inline json to_json(const DecreasingFn& f) {
    using namespace codec;
    json tail = {{"kind", "power"}, {"scale", enc(f.scale())}, {"k", f.k()}};
    if (!f.is_table()) return tail;
    json rows = json::array();
    for (const auto& r : f.rows()) {
        rows.push_back({r.t.get_num().get_str(), r.t.get_den().get_str(), r.v.get_num().get_str(),
                        r.v.get_den().get_str()});
    }
    return {{"kind", "table"}, {"rows", rows}, {"tail", tail}};
}

inline DecreasingFn phi_from_json(const json& j) {
    using namespace codec;
    try {
        const std::string kind = field(j, "kind").get<std::string>();
        if (kind == "power") {
            const json& k = field(j, "k");
            if (!k.is_number_integer() || k.get<long long>() < 1) corrupt("power exponent must be an integer >= 1");
            return DecreasingFn::power(dec_rat(field(j, "scale")), k.get<unsigned>());
        }
        if (kind == "table") {
            std::vector<DecreasingFn::Row> rows;
            for (const auto& r : field(j, "rows")) {
                if (!r.is_array() || r.size() != 4) corrupt("table row must have 4 entries");
                rows.push_back({make_rational(dec_int(r[0]), dec_int(r[1])), make_rational(dec_int(r[2]), dec_int(r[3]))});
            }
            const json& tail = field(j, "tail");
            const json& k = field(tail, "k");
            if (!k.is_number_integer() || k.get<long long>() < 1) corrupt("tail exponent must be an integer >= 1");
            return DecreasingFn::table(std::move(rows), dec_rat(field(tail, "scale")), k.get<unsigned>());
        }
        corrupt("unknown phi kind: " + kind);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::CorruptTrace) throw;
        corrupt(e.what());
    } catch (const json::exception& e) {
        corrupt(e.what());
    }
}

inline json to_json(const StepCertificate& c) {
    json j = json::object();
    for (const auto& [name, ok] : c.flags()) j[name] = ok;
    return j;
}

inline json to_json(const StepRecord& s) {
    using namespace codec;
    return {{"nu", s.nu},
            {"H", enc(s.H)},
            {"C_size", s.C_size},
            {"C_planes", s.C_planes},
            {"E_size", s.E_size},
            {"delta", enc(s.delta.value())},
            {"T", enc(s.T)},
            {"normal", enc(s.normal)},
            {"z_next", enc(s.z_next)},
            {"rho_sq", enc(s.rho_sq)},
            {"k", enc(s.k)},
            {"search_stats",
             {{"plane_candidates", std::to_string(s.plane_candidates)},
              {"layer_evaluations", std::to_string(s.layer_evaluations)}}},
            {"certificate", to_json(s.cert)}};
}

inline json to_json(const ConstructionConfig& c) {
    using namespace codec;
    return {{"cap", enc(c.cap.value())},
            {"plane_angle", enc(c.plane_angle.value())},
            {"plane_budget", std::to_string(c.plane_budget)},
            {"layer_budget", std::to_string(c.layer_budget)},
            {"sqrt_bits", c.sqrt_bits}};
}

inline json trace_document(const ConstructionState& s, const json& reports = json::array()) {
    using namespace codec;
    json steps = json::array();
    for (const auto& st : s.steps) steps.push_back(to_json(st));
    return {{"version", kTraceVersion},
            {"phi", to_json(s.phi)},
            {"config", to_json(s.config)},
            {"initial",
             {{"z1", enc(s.z(1))}, {"z2", enc(s.z(2))}, {"lattice2", enc(s.lattice_normal(2))}, {"rho1_sq", enc(Rational(1))}}},
            {"steps", steps},
            {"reports", reports}};
}

inline ConstructionState state_from_json(const json& doc) {
    using namespace codec;
    try {
        const json& ver = field(doc, "version");
        if (!ver.is_number_integer() || ver.get<int>() != kTraceVersion) corrupt("unsupported trace version");
        ConstructionState s;
        s.phi = phi_from_json(field(doc, "phi"));
        const json& cfg = field(doc, "config");
        s.config.cap = SinSq(dec_rat(field(cfg, "cap")));
        s.config.plane_angle = SinSq(dec_rat(field(cfg, "plane_angle")));
        s.config.plane_budget = dec_u64(field(cfg, "plane_budget"));
        s.config.layer_budget = dec_u64(field(cfg, "layer_budget"));
        s.config.sqrt_bits = field(cfg, "sqrt_bits").get<unsigned>();
        const json& ini = field(doc, "initial");
        if (dec_vec(field(ini, "z1")) != s.z(1) || dec_vec(field(ini, "z2")) != s.z(2) ||
            dec_vec(field(ini, "lattice2")) != s.lattice_normal(2) || dec_rat(field(ini, "rho1_sq")) != 1)
            corrupt("initial data differ from z1 = (1,0,0), z2 = (0,1,0)");
        int nu = 2;
        for (const auto& j : field(doc, "steps")) {
            StepRecord st;
            st.nu = field(j, "nu").get<int>();
            if (st.nu != nu++) corrupt("steps out of order");
            st.H = dec_int(field(j, "H"));
            st.C_size = field(j, "C_size").get<std::size_t>();
            st.C_planes = field(j, "C_planes").get<std::size_t>();
            st.E_size = field(j, "E_size").get<std::size_t>();
            st.delta = SinSq(dec_rat(field(j, "delta")));
            st.T = dec_int(field(j, "T"));
            st.normal = dec_vec(field(j, "normal"));
            st.z_next = dec_vec(field(j, "z_next"));
            st.rho_sq = dec_rat(field(j, "rho_sq"));
            st.k = dec_int(field(j, "k"));
            const json& stats = field(j, "search_stats");
            st.plane_candidates = dec_u64(field(stats, "plane_candidates"));
            st.layer_evaluations = dec_u64(field(stats, "layer_evaluations"));
            const json& cert = field(j, "certificate");
            StepCertificate c;
            auto flag = [&](const char* key) { return field(cert, key).get<bool>(); };
            c.cond_i = flag("i");
            c.cond_ii = flag("ii");
            c.cond_iii = flag("iii");
            c.cond_iv = flag("iv");
            c.cond_v = flag("v");
            c.daba = flag("daba");
            c.delta1 = flag("delta1");
            c.delta2 = flag("delta2");
            c.delta_halving = flag("delta_halving");
            c.ce = flag("ce");
            c.rho_halving = flag("rho_halving");
            c.rho_identity = flag("rho_identity");
            c.norm_growth = flag("norm_growth");
            c.q_positive = flag("q_positive");
            c.nesting = flag("nesting");
            c.recomputed = flag("recomputed");
            st.cert = c;
            s.steps.push_back(std::move(st));
        }
        return s;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::CorruptTrace) throw;
        corrupt(e.what());
    } catch (const json::exception& e) {
        corrupt(e.what());
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::CorruptTrace, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::CorruptTrace, path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
    out << text;
}

inline void write_trace(const std::string& path, const ConstructionState& s, const json& reports = json::array()) {
    write_text_file(path, dump(trace_document(s, reports)));
}

inline ConstructionState read_trace(const std::string& path) { return state_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// reports

inline json to_json(const TargetVector& t) {
    using namespace codec;
    json j = {{"xi1", enc(t.xi1)}, {"provenance", to_string(t.provenance)}, {"precision_bits", t.precision_bits}};
    if (t.xi2) j["xi2"] = enc(*t.xi2);
    return j;
}

inline json to_json(const BestApproxSeq& seq) {
    using namespace codec;
    json entries = json::array();
    for (const auto& e : seq.entries) entries.push_back({{"vector", enc(e.vector)}, {"residual", enc(e.residual)}});
    return {{"kind", "best_sequence"},
            {"horizon", enc(seq.horizon)},
            {"n", seq.dim},
            {"reached_zero", seq.reached_zero},
            {"entries", entries}};
}

inline json to_json(const WitnessSequence& ws) {
    using namespace codec;
    json recs = json::array();
    for (const auto& r : ws.records) {
        json cols = json::array();
        for (const auto& c : r.matrix.columns()) cols.push_back(enc(c));
        recs.push_back({{"nu", r.pair_index},
                        {"matrix", cols},
                        {"det", enc(r.matrix.det())},
                        {"e_norm_sq", enc(r.e_norm_sq)},
                        {"R", enc(r.R)},
                        {"R_bound", enc(r.R_bound)},
                        {"jarnik_product_sq", enc(r.jarnik_sq)},
                        {"added_z1", r.added_z1}});
    }
    json skipped = json::array();
    for (const auto& s : ws.skipped) skipped.push_back({{"nu", s.pair_index}, {"reason", s.reason}});
    return {{"kind", "witness_sequence"}, {"records", recs}, {"skipped", skipped}, {"sequence", to_json(ws.sequence)}};
}

inline json to_json(const Lemma5Report& r) {
    using namespace codec;
    json fails = json::array();
    for (const auto& q : r.failures) fails.push_back(enc(q));
    return {{"nu", r.nu},          {"left", enc(r.left)},     {"right", enc(r.right)}, {"scanned", r.scanned},
            {"exempt", r.exempt}, {"failures", fails},       {"pass", r.pass()}};
}

inline json to_json(const InvariantReport& r) {
    json steps = json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"nu", s.nu},
                         {"flags", to_json(s.cert)},
                         {"q_ratio_sq", codec::enc(s.q_ratio_sq)},
                         {"q_rho_bounded", s.q_rho_bounded},
                         {"pass", s.cert.all() && s.q_rho_bounded}});
    }
    return {{"kind", "invariant_suite"},
            {"steps", steps},
            {"enclosure_nested", r.enclosure_nested},
            {"failures", r.failures},
            {"pass", r.pass()}};
}

inline json to_json(const CertificationReport& r) {
    using namespace codec;
    auto cols = [](const std::vector<GoodColumn>& v) {
        json a = json::array();
        for (const auto& g : v) a.push_back({{"x", enc(g.x)}, {"residual", enc(g.residual)}});
        return a;
    };
    auto triples = [](const std::vector<TripleDet>& v) {
        json a = json::array();
        for (const auto& t : v) a.push_back({{"i", t.i}, {"j", t.j}, {"k", t.k}, {"det", enc(t.det)}});
        return a;
    };
    json grid = json::array();
    for (const auto& g : r.grid) grid.push_back({{"k", g.k}, {"good", g.good}, {"unimodular", g.unimodular}});
    json l5 = json::array();
    for (const auto& w : r.lemma5_windows) l5.push_back(to_json(w));
    json best = json::array();
    for (const auto& v : r.best_vectors) best.push_back(enc(v));
    return {{"kind", "certification"},
            {"Q", enc(r.Q)},
            {"epsilon", enc(r.epsilon)},
            {"epsilon_exponent", r.epsilon_exponent},
            {"good_points", cols(r.good_points)},
            {"good_at_one", cols(r.good_at_one)},
            {"triples_checked", r.triples_checked},
            {"unimodular_at_one", triples(r.unimodular_at_one)},
            {"grid", grid},
            {"monotone", r.monotone},
            {"lemma5_windows", l5},
            {"best_approximation_triples",
             {{"best_vectors", best},
              {"triples_checked", r.best_triples_checked},
              {"unimodular", triples(r.best_unimodular)},
              {"pass", r.best_unimodular.empty()}}},
            {"violations", r.violations},
            {"warnings", r.warnings},
            {"pass", r.pass()}};
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << detail::csv_field(r[i]);
        os << "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

inline std::string psi_csv(const BestApproxSeq& seq) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : seq.entries) {
        rows.push_back({e.vector[0].get_str(), to_decimal(e.residual.lo), to_decimal(e.residual.hi)});
    }
    return csv({"q", "residual_lo", "residual_hi"}, rows);
}

inline std::string witness_csv(const WitnessSequence& ws) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : ws.records) {
        rows.push_back({std::to_string(r.pair_index), r.matrix.column(0)[0].get_str(), to_decimal(r.R.hi)});
    }
    return csv({"nu", "q", "R_hi"}, rows);
}

inline std::string steps_csv(const ConstructionState& s) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& st : s.steps) {
        rows.push_back({std::to_string(st.nu), st.z_next[0].get_str(),
                        std::to_string(mpz_sizeinbase(st.z_next[0].get_mpz_t(), 10)), to_decimal(st.rho_sq),
                        to_decimal(st.delta.value()), st.H.get_str(), st.T.get_str(), st.cert.all() ? "1" : "0"});
    }
    return csv({"nu", "q_next", "q_next_digits", "rho_sq", "sin2_delta", "H", "T", "certified"}, rows);
}

}  // namespace diophant
