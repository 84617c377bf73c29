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

// Command-line driver. Exit codes: 0 success, 1 usage, 2 ambiguous rounding
// after the precision cap, 3 search budget exhausted, 4 corrupt trace,
// 5 certification violations.

#include "diophant/diophant.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace diophant;

enum Exit : int { kOk = 0, kUsage = 1, kAmbiguous = 2, kExhausted = 3, kCorrupt = 4, kViolation = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::AmbiguousRounding: return kAmbiguous;
    case ErrorKind::SearchExhausted: return kExhausted;
    case ErrorKind::CorruptTrace: return kCorrupt;
    case ErrorKind::CertificateFailure:
    case ErrorKind::TooFewSteps: return kViolation;
    default: return kUsage;
    }
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

Integer parse_integer(const std::string& s) {
    Integer z;
    if (s.empty() || z.set_str(s, 10) != 0) throw UsageError("not an integer: " + s);
    return z;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

// ---------------------------------------------------------------------------
// targets

struct TargetArgs {
    std::string xi1, xi2, from_trace;
    int n = 0;
    unsigned bits = 64;
    unsigned max_bits = 4096;
};

void add_target_options(CLI::App* cmd, TargetArgs& t) {
    cmd->add_option("--xi1", t.xi1, "first coordinate: p/q (exact) or a decimal literal");
    cmd->add_option("--xi2", t.xi2, "second coordinate, same forms");
    cmd->add_option("--n", t.n, "dimension of the target (1 or 2)")->check(CLI::IsMember({1, 2}));
    cmd->add_option("--bits", t.bits, "enclosure radius 2^-bits for decimal literals")
        ->check(CLI::Range(64u, 1u << 20));
    cmd->add_option("--max-bits", t.max_bits, "precision cap for automatic escalation")
        ->check(CLI::Range(64u, 1u << 20));
    cmd->add_option("--from-trace", t.from_trace, "use the enclosure of a construction trace");
}

bool exact_form(const std::string& s) {
    return s.find('/') != std::string::npos || s.find_first_of(".eE") == std::string::npos;
}

int target_dim(const TargetArgs& t) {
    if (!t.from_trace.empty()) {
        if (!t.xi1.empty() || !t.xi2.empty()) throw UsageError("--from-trace excludes --xi1/--xi2");
        if (t.n == 1) throw UsageError("a construction target has n = 2");
        return 2;
    }
    if (t.xi1.empty()) throw UsageError("missing target: give --xi1 [--xi2] or --from-trace");
    const int n = t.n ? t.n : (t.xi2.empty() ? 1 : 2);
    if (n == 2 && t.xi2.empty()) throw UsageError("--n 2 needs --xi2");
    if (n == 1 && !t.xi2.empty()) throw UsageError("--n 1 conflicts with --xi2");
    return n;
}

RatInterval coordinate(const std::string& s, unsigned bits) {
    const Rational v = parse_rational(s);
    if (exact_form(s)) return RatInterval(v);
    const Rational rad = make_rational(1, pow2(bits));
    return {v - rad, v + rad};
}

TargetVector build_target(const TargetArgs& t, unsigned bits) {
    if (!t.from_trace.empty()) return xi_enclosure(read_trace(t.from_trace));
    const int n = target_dim(t);
    const bool decimal = !exact_form(t.xi1) || (n == 2 && !exact_form(t.xi2));
    std::optional<RatInterval> b;
    if (n == 2) b = coordinate(t.xi2, bits);
    return TargetVector::enclosure(coordinate(t.xi1, bits), b,
                                   decimal ? Provenance::DecimalLiteral : Provenance::ExactRational, decimal ? bits : 0);
}

// Runs body on the target, doubling decimal precision on ambiguous rounding.
template <class F>
auto with_escalation(const TargetArgs& t, F body) {
    target_dim(t);
    const bool can_refine = t.from_trace.empty() && (!exact_form(t.xi1) || (!t.xi2.empty() && !exact_form(t.xi2)));
    for (unsigned bits = t.bits;; bits *= 2) {
        try {
            return body(build_target(t, bits));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AmbiguousRounding || !can_refine || bits * 2 > t.max_bits) throw;
            std::cerr << "note: " << e.what() << "; retrying at " << bits * 2 << " bits\n";
        }
    }
}

// ---------------------------------------------------------------------------
// bestapprox, witness

struct OutputArgs {
    std::string out, csv;
};

void add_output_options(CLI::App* cmd, OutputArgs& o) {
    cmd->add_option("--out", o.out, "JSON output path (default stdout)");
    cmd->add_option("--csv", o.csv, "CSV output path");
}

int cmd_bestapprox(const TargetArgs& t, const OutputArgs& o, const std::string& Q) {
    const Integer horizon = parse_integer(Q);
    return with_escalation(t, [&](const TargetVector& xi) {
        const BestApproxSeq seq = best_sequence(xi, horizon);
        json doc = to_json(seq);
        doc["target"] = to_json(xi);
        const MinkowskiReport mk = check_minkowski(seq, xi.dim());
        doc["minkowski"] = {
            {"pairs_checked", mk.pairs_checked}, {"violations", mk.violations}, {"dependent", mk.dependent}};
        if (xi.dim() == 2) {
            json jt = json::array();
            for (const auto& j : jarnik_triples(seq)) jt.push_back({{"index", j.index}, {"det", codec::enc(j.det)}});
            doc["jarnik_triples"] = jt;
        }
        emit(o.out, dump(doc));
        if (!o.csv.empty()) write_text_file(o.csv, psi_csv(seq));
        return int(kOk);
    });
}

int cmd_witness(const TargetArgs& t, const OutputArgs& o, const std::string& Q) {
    const Integer horizon = parse_integer(Q);
    if (target_dim(t) != 2) throw UsageError("witness needs a two-dimensional target");
    return with_escalation(t, [&](const TargetVector& xi) {
        const WitnessSequence ws = witness_sequence(xi, horizon);
        json doc = to_json(ws);
        doc["target"] = to_json(xi);
        emit(o.out, dump(doc));
        if (!o.csv.empty()) write_text_file(o.csv, witness_csv(ws));
        for (const auto& s : ws.skipped) std::cerr << "skipped pair " << s.pair_index << ": " << s.reason << "\n";
        return int(kOk);
    });
}

// ---------------------------------------------------------------------------
// construct

// "power:A:k" with A rational, k >= 1.
DecreasingFn parse_phi(const std::string& descriptor) {
    const auto a = descriptor.find(':');
    const auto b = descriptor.rfind(':');
    if (descriptor.substr(0, a) != "power" || a == std::string::npos || b == a)
        throw UsageError("phi must look like power:A:k, got " + descriptor);
    const Rational scale = parse_rational(descriptor.substr(a + 1, b - a - 1));
    const Integer k = parse_integer(descriptor.substr(b + 1));
    if (k < 1 || !k.fits_uint_p()) throw UsageError("phi exponent must be a positive integer");
    return DecreasingFn::power(scale, static_cast<unsigned>(k.get_ui()));
}

struct ConstructArgs {
    std::string phi = "power:1:1";
    std::string phi_json;
    std::string trace;
    int steps = 8;
    std::uint64_t plane_budget = 1000000;
    std::uint64_t layer_budget = 1000000;
    bool phi_given = false, plane_given = false, layer_given = false;
};

void print_step(const StepRecord& st) {
    std::cout << "step nu=" << st.nu << " q_next=";
    const std::string q = st.z_next[0].get_str();
    if (q.size() > 24)
        std::cout << q.substr(0, 12) << "...(" << q.size() << " digits)";
    else
        std::cout << q;
    std::cout << " H=" << st.H << " C=" << st.C_size << " E=" << st.E_size << " T=" << st.T
              << " plane_candidates=" << st.plane_candidates << " layer_evaluations=" << st.layer_evaluations
              << " certificate=" << (st.cert.all() ? "ok" : "FAILED") << "\n";
}

int cmd_construct(const ConstructArgs& a) {
    std::optional<DecreasingFn> phi;
    if (!a.phi_json.empty()) {
        if (a.phi_given) throw UsageError("--phi and --phi-json are exclusive");
        phi = phi_from_json(read_json_file(a.phi_json));
    } else if (a.phi_given || a.trace.empty() || !std::filesystem::exists(a.trace)) {
        phi = parse_phi(a.phi);
    }

    ConstructionState s;
    if (!a.trace.empty() && std::filesystem::exists(a.trace)) {
        s = read_trace(a.trace);
        if (phi && !(*phi == s.phi)) throw UsageError("phi differs from the one recorded in " + a.trace);
        const InvariantReport inv = invariant_suite(s);
        if (!inv.pass()) {
            for (const auto& f : inv.failures) std::cerr << "invalid trace: " << f << "\n";
            return kCorrupt;
        }
        std::cout << "resuming at nu=" << s.nu() << " from " << a.trace << "\n";
    } else {
        s = init(*phi);
    }
    if (a.plane_given || s.steps.empty()) s.config.plane_budget = a.plane_budget;
    if (a.layer_given || s.steps.empty()) s.config.layer_budget = a.layer_budget;

    for (int i = 0; i < a.steps; ++i) {
        try {
            step(s);
        } catch (const Error& e) {
            std::cerr << "step nu=" << s.nu() << " stopped: " << e.what() << "\n";
            if (!a.trace.empty()) write_trace(a.trace, s);
            return exit_for(e.kind());
        }
        print_step(s.steps.back());
        if (!a.trace.empty()) write_trace(a.trace, s);
    }
    if (a.trace.empty()) std::cout << dump(trace_document(s));
    return kOk;
}

// ---------------------------------------------------------------------------
// certify

struct CertifyArgs {
    std::string trace, out, Q = "10000";
    unsigned jobs = 1;
    int max_k = 40;
};

std::vector<GoodColumn> parallel_good_columns(const TargetVector& xi, const DecreasingFn& phi, const Integer& Q,
                                              unsigned jobs) {
    if (jobs <= 1 || Q < Integer(jobs)) return good_columns(xi, phi, Q);
    std::vector<std::vector<GoodColumn>> parts(jobs);
    std::vector<std::thread> pool;
    const Integer chunk = (Q + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
        const Integer lo = chunk * j + 1;
        const Integer hi = std::min(Integer(chunk * (j + 1)), Q);
        pool.emplace_back([&, j, lo, hi] {
            if (lo <= hi) parts[j] = good_columns(xi, phi, lo, hi);
        });
    }
    for (auto& th : pool) th.join();
    std::vector<GoodColumn> out;
    for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return out;
}

int cmd_certify(const CertifyArgs& a) {
    const Integer Q = parse_integer(a.Q);
    if (Q < 1) throw UsageError("--Q must be >= 1");
    const ConstructionState s = read_trace(a.trace);
    const InvariantReport inv = invariant_suite(s);
    std::vector<std::string> violations = inv.failures;
    TargetVector xi;
    try {
        xi = xi_enclosure(s);
    } catch (const Error& e) {
        // a trace without a valid enclosure still gets its invariant report
        if (e.kind() == ErrorKind::TooFewSteps) throw;
        violations.push_back(std::string("enclosure: ") + e.what());
        if (!a.out.empty())
            write_text_file(a.out, dump({{"kind", "certification"},
                                         {"invariants", to_json(inv)},
                                         {"violations", violations},
                                         {"pass", false}}));
        std::cout << "steps: " << s.steps.size() << "  invariants: " << (inv.pass() ? "pass" : "FAIL") << "\n";
        for (const auto& v : violations) std::cout << "violation: " << v << "\n";
        return kViolation;
    }

    json l5 = json::array();
    for (const int nu : lemma5_indices(xi, s, Q)) {
        const Lemma5Report r = lemma5_scan(xi, s, nu, Q);
        for (const auto& q : r.failures) violations.push_back("lemma window " + std::to_string(nu) + ": q = " + q.get_str());
        l5.push_back(to_json(r));
    }
    const CertificationReport rep = certify_counterexample(xi, s, Q, parallel_good_columns(xi, s.phi, Q, a.jobs), a.max_k);
    violations.insert(violations.end(), rep.violations.begin(), rep.violations.end());
    std::vector<std::string> warnings = rep.warnings;
    if (rep.good_at_one.size() < 3)
        warnings.push_back("fewer than three good columns up to Q; the triple search is vacuous at this horizon");
    if (l5.empty()) warnings.push_back("no lemma window meets [1, Q]");

    json doc = {{"kind", "certification"},
                {"target", to_json(xi)},
                {"invariants", to_json(inv)},
                {"lemma5", l5},
                {"certification", to_json(rep)},
                {"violations", violations},
                {"warnings", warnings},
                {"pass", violations.empty()}};
    if (!a.out.empty()) write_text_file(a.out, dump(doc));

    std::cout << "steps: " << s.steps.size() << "  invariants: " << (inv.pass() ? "pass" : "FAIL") << "\n";
    std::cout << "lemma windows scanned: " << l5.size() << "\n";
    std::cout << "good columns at eps=1: " << rep.good_at_one.size() << "  triples checked: " << rep.triples_checked
              << "  unimodular: " << rep.unimodular_at_one.size() << "\n";
    if (rep.epsilon_exponent >= 0)
        std::cout << "epsilon: 2^-" << rep.epsilon_exponent << "\n";
    else
        std::cout << "epsilon: none on the grid\n";
    for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    return violations.empty() ? kOk : kViolation;
}

// ---------------------------------------------------------------------------
// trace export | import | inspect

int cmd_trace_export(const std::string& trace, const std::string& csv_out, const std::string& enclosure_out) {
    const ConstructionState s = read_trace(trace);
    emit(csv_out, steps_csv(s));
    if (!enclosure_out.empty()) write_text_file(enclosure_out, dump(to_json(xi_enclosure(s))));
    return kOk;
}

int cmd_trace_import(const std::string& in, const std::string& trace) {
    const ConstructionState s = state_from_json(read_json_file(in));
    const InvariantReport inv = invariant_suite(s);
    if (!inv.pass()) {
        for (const auto& f : inv.failures) std::cerr << "rejected: " << f << "\n";
        return kViolation;
    }
    emit(trace, dump(trace_document(s)));
    return kOk;
}

int cmd_trace_inspect(const std::string& trace) {
    const ConstructionState s = read_trace(trace);
    const json phi = to_json(s.phi);
    std::cout << "phi: " << phi.dump() << "\n";
    std::cout << "steps: " << s.steps.size() << " (next nu = " << s.nu() << ")\n";
    for (const auto& st : s.steps) print_step(st);
    if (!enclosure_boxes(s).empty()) {
        const TargetVector xi = xi_enclosure(s);
        std::cout << "xi1 ~ " << to_decimal(xi.xi1.lo, 30) << "  width " << to_decimal(xi.xi1.width(), 3) << "\n";
        std::cout << "xi2 ~ " << to_decimal(xi.xi2->lo, 30) << "  width " << to_decimal(xi.xi2->width(), 3) << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Best approximations, unimodular witnesses and the phi-bad counterexample construction"};
    app.require_subcommand(1);

    TargetArgs bt;
    OutputArgs bo;
    std::string bQ = "1000";
    auto* best = app.add_subcommand("bestapprox", "best approximation sequence up to Q");
    add_target_options(best, bt);
    add_output_options(best, bo);
    best->add_option("--Q", bQ, "horizon");

    TargetArgs wt;
    OutputArgs wo;
    std::string wQ = "10000";
    auto* wit = app.add_subcommand("witness", "unimodular witness matrices along the best approximations");
    add_target_options(wit, wt);
    add_output_options(wit, wo);
    wit->add_option("--Q", wQ, "horizon");

    ConstructArgs ca;
    auto* con = app.add_subcommand("construct", "run steps of the construction");
    con->add_option("--phi", ca.phi, "phi descriptor power:A:k, phi(t) = A/(1+t)^k");
    con->add_option("--phi-json", ca.phi_json, "phi descriptor as JSON (power or table)");
    con->add_option("--N", ca.steps, "steps to run")->check(CLI::Range(1, 1000));
    con->add_option("--trace", ca.trace, "trace file; resumed when it exists, rewritten after each step");
    con->add_option("--plane-budget", ca.plane_budget, "plane candidates per step")->check(CLI::PositiveNumber);
    con->add_option("--layer-budget", ca.layer_budget, "layer values of k per step")->check(CLI::PositiveNumber);

    CertifyArgs cf;
    auto* cer = app.add_subcommand("certify", "invariant suite, lemma windows and the unimodular triple search");
    cer->add_option("--trace", cf.trace, "construction trace")->required();
    cer->add_option("--Q", cf.Q, "horizon");
    cer->add_option("--out", cf.out, "JSON report path");
    cer->add_option("--jobs", cf.jobs, "worker threads for the column scan")->check(CLI::Range(1u, 256u));
    cer->add_option("--max-k", cf.max_k, "epsilon grid 2^-k, k = 0..max-k")->check(CLI::Range(0, 200));

    auto* tr = app.add_subcommand("trace", "trace utilities");
    tr->require_subcommand(1);
    std::string ex_trace, ex_csv, ex_enc;
    auto* ex = tr->add_subcommand("export", "steps as CSV, optionally the enclosure as JSON");
    ex->add_option("--trace", ex_trace, "construction trace")->required();
    ex->add_option("--csv", ex_csv, "CSV path (default stdout)");
    ex->add_option("--enclosure", ex_enc, "enclosure JSON path");
    std::string im_in, im_trace;
    auto* im = tr->add_subcommand("import", "validate a trace document and write it in canonical form");
    im->add_option("--in", im_in, "input JSON")->required();
    im->add_option("--trace", im_trace, "output trace (default stdout)");
    std::string in_trace;
    auto* ins = tr->add_subcommand("inspect", "summarize a trace");
    ins->add_option("--trace", in_trace, "construction trace")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    ca.phi_given = con->count("--phi") > 0;
    ca.plane_given = con->count("--plane-budget") > 0;
    ca.layer_given = con->count("--layer-budget") > 0;

    if (*best) return guarded([&] { return cmd_bestapprox(bt, bo, bQ); });
    if (*wit) return guarded([&] { return cmd_witness(wt, wo, wQ); });
    if (*con) return guarded([&] { return cmd_construct(ca); });
    if (*cer) return guarded([&] { return cmd_certify(cf); });
    if (*ex) return guarded([&] { return cmd_trace_export(ex_trace, ex_csv, ex_enc); });
    if (*im) return guarded([&] { return cmd_trace_import(im_in, im_trace); });
    if (*ins) return guarded([&] { return cmd_trace_inspect(in_trace); });
    return kUsage;
}
