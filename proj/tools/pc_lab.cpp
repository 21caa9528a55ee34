#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pclab/cq.hpp"
#include "pclab/pc.hpp"
#include "pclab/policy.hpp"
#include "pclab/reductions.hpp"
#include "pclab/simulator.hpp"
#include "pclab/transfer.hpp"
#include "pclab/valuation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pclab;

namespace {

// Usage and input problems; reported with exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot write file");
    out << text;
}

template <class F>
auto parsing(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw InputError(path + ":" + e.what());
    } catch (const SchemaError& e) {
        throw InputError(path + ": " + e.what());
    }
}

// Queries loaded so far, by block name or file stem. Hypercube policies
// refer to queries through this map.
class Workspace {
public:
    // `spec` is a path, optionally suffixed with `:Name` to pick one query
    // out of a file with several blocks.
    Query load_query(const std::string& spec) {
        std::string path = spec, pick;
        if (auto colon = spec.rfind(':'); colon != std::string::npos && !fs::exists(spec)) {
            path = spec.substr(0, colon);
            pick = spec.substr(colon + 1);
        }
        auto qs = parsing(path, [&] { return parse_queries(read_file(path)); });
        std::string stem = fs::path(path).stem().string();
        for (auto& q : qs) {
            if (q.name.empty()) q.name = stem;
            queries_[q.name] = q;
        }
        if (!pick.empty()) {
            for (const auto& q : qs)
                if (q.name == pick) return q;
            throw InputError(path + ": no query named " + pick);
        }
        if (qs.size() != 1) throw InputError(path + ": file holds several queries; select one with " + path + ":<name>");
        return qs.front();
    }

    Instance load_instance(const std::string& path) {
        return parsing(path, [&] { return parse_instance(read_file(path)); });
    }

    Policy load_policy(const std::string& path) {
        return parsing(path, [&] { return parse_policy(read_file(path), queries_); });
    }

private:
    std::map<std::string, Query> queries_;
};

json to_json(const Fact& f) { return to_string(f); }
json to_json(const Instance& inst) {
    json a = json::array();
    for (const auto& f : inst) a.push_back(to_string(f));
    return a;
}
json to_json(const Valuation& v) {
    json o = json::object();
    for (const auto& [k, x] : v) o[k] = x;
    return o;
}

std::string instance_text(const Instance& inst) {
    std::string s;
    for (const auto& f : inst) s += to_string(f) + ".\n";
    return s;
}

struct Output {
    bool as_json = false;
    std::ostringstream text;
    json doc = json::object();
    std::optional<fs::path> emit_dir;

    void emit(const std::string& name, const std::string& content) {
        if (!emit_dir) return;
        fs::create_directories(*emit_dir);
        write_file(*emit_dir / name, content);
        if (!as_json) text << "wrote " << (*emit_dir / name).string() << "\n";
        doc["emitted"].push_back((*emit_dir / name).string());
    }

    void flush() {
        if (as_json)
            std::cout << doc.dump(2) << "\n";
        else
            std::cout << text.str();
        std::cout.flush();
    }
};

std::string indent(const std::string& s) {
    std::string out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out += "  " + line + "\n";
    return out;
}

int cmd_eval(Workspace& ws, Output& out, const std::string& qf, const std::string& inf) {
    auto q = ws.load_query(qf);
    auto inst = ws.load_instance(inf);
    auto res = parsing(inf, [&] { return evaluate(q, inst); });
    for (const auto& f : res) out.text << to_string(f) << "\n";
    out.text << "-- " << res.size() << " facts\n";
    out.doc["result"] = to_json(res);
    out.doc["count"] = res.size();
    return 0;
}

int report_pc(Output& out, const Query& q, const Policy& p, const PCVerdict& v, const std::string& what) {
    out.doc["holds"] = v.holds;
    if (v.holds) {
        out.text << what << "\n";
        return 0;
    }
    out.text << "NOT " << what << "\n";
    if (v.valuation) {
        out.text << "witness valuation: " << to_string(*v.valuation) << "\n";
        out.doc["witness"]["valuation"] = to_json(*v.valuation);
    }
    if (v.instance) {
        out.text << "witness instance:\n" << indent(instance_text(*v.instance));
        out.doc["witness"]["instance"] = to_json(*v.instance);
        auto run = one_round_evaluate(q, p, *v.instance);
        out.text << "missing on that instance:";
        for (const auto& f : run.missing) out.text << " " << to_string(f);
        out.text << "\n";
        out.doc["witness"]["missing"] = to_json(run.missing);
        out.emit("instance.facts", instance_text(*v.instance));
        out.emit("policy.pol", to_string(p));
        out.emit("query.cq", to_string(q) + "\n");
    }
    return 1;
}

int cmd_check_pc(Workspace& ws, Output& out, const std::string& qf, const std::string& pf) {
    auto q = ws.load_query(qf);
    auto p = ws.load_policy(pf);
    return report_pc(out, q, p, is_parallel_correct(q, p), "PARALLEL-CORRECT");
}

int cmd_check_pci(Workspace& ws, Output& out, const std::string& qf, const std::string& inf, const std::string& pf,
                  bool hereditary) {
    auto q = ws.load_query(qf);
    auto inst = ws.load_instance(inf);
    auto p = ws.load_policy(pf);
    auto v = is_parallel_correct_on_instance(q, inst, p, hereditary ? InstanceMode::Hereditary : InstanceMode::Single);
    out.doc["mode"] = hereditary ? "hereditary" : "single";
    return report_pc(out, q, p, v, hereditary ? "PARALLEL-CORRECT ON ALL SUBINSTANCES" : "PARALLEL-CORRECT ON INSTANCE");
}

int cmd_check_transfer(Workspace& ws, Output& out, const std::string& qf, const std::string& qpf, bool allow_skip) {
    auto q = ws.load_query(qf);
    auto qp = ws.load_query(qpf);
    auto v = parsing(qpf, [&] { return transfers(q, qp, allow_skip); });
    out.doc["holds"] = v.holds;
    out.doc["allow_skip"] = allow_skip;
    if (v.holds) {
        out.text << "TRANSFERS\n";
        return 0;
    }
    out.text << "DOES NOT TRANSFER\n";
    out.text << "uncovered minimal valuation: " << to_string(*v.c2_witness) << "\n";
    auto facts = apply_valuation(*v.c2_witness, qp).second;
    out.text << "its required facts:\n" << indent(instance_text(facts));
    out.text << "witness policy:\n" << indent(to_string(Policy{*v.policy_witness}));
    out.doc["witness"]["valuation"] = to_json(*v.c2_witness);
    out.doc["witness"]["instance"] = to_json(facts);
    out.doc["witness"]["policy"] = to_string(Policy{*v.policy_witness});
    out.emit("policy.pol", to_string(Policy{*v.policy_witness}));
    out.emit("instance.facts", instance_text(facts));
    out.emit("qprime.cq", to_string(qp) + "\n");
    return 1;
}

void report_certificate(Output& out, const C3Certificate& c) {
    out.text << "theta: " << to_string(c.theta) << "\n";
    out.text << "rho: " << to_string(c.rho) << "\n";
    out.doc["certificate"]["theta"] = to_json(c.theta);
    out.doc["certificate"]["rho"] = to_json(c.rho);
}

int cmd_check_c3(Workspace& ws, Output& out, const std::string& qf, const std::string& qpf) {
    auto q = ws.load_query(qf);
    auto qp = ws.load_query(qpf);
    auto c = parsing(qpf, [&] { return check_c3(q, qp); });
    out.doc["holds"] = c.has_value();
    if (!c) {
        out.text << "NO CERTIFICATE\n";
        return 1;
    }
    out.text << "CERTIFICATE\n";
    report_certificate(out, *c);
    return 0;
}

int cmd_check_strongmin(Workspace& ws, Output& out, const std::string& qf) {
    auto q = ws.load_query(qf);
    auto v = is_strongly_minimal(q);
    out.doc["holds"] = v.holds;
    if (v.holds) {
        out.text << "STRONGLY MINIMAL\n";
        return 0;
    }
    out.text << "NOT STRONGLY MINIMAL\n";
    out.text << "valuation: " << to_string(v.witness->larger) << "\n";
    out.text << "is beaten by: " << to_string(v.witness->smaller) << "\n";
    out.doc["witness"]["larger"] = to_json(v.witness->larger);
    out.doc["witness"]["smaller"] = to_json(v.witness->smaller);
    return 1;
}

int cmd_check_minimize(Workspace& ws, Output& out, const std::string& qf) {
    auto q = ws.load_query(qf);
    auto m = minimize_cq(q);
    bool minimal = m.query.body.size() == q.body.size();
    out.text << (minimal ? "MINIMAL\n" : "NOT MINIMAL\n");
    out.text << "core: " << to_string(m.query) << "\n";
    out.text << "folding: " << to_string(m.folding) << "\n";
    out.doc["holds"] = minimal;
    out.doc["core"] = to_string(m.query);
    out.doc["folding"] = to_json(m.folding);
    return minimal ? 0 : 1;
}

int cmd_check_hypercube(Workspace& ws, Output& out, const std::string& qf, const std::string& qpf) {
    auto q = ws.load_query(qf);
    auto qp = ws.load_query(qpf);
    auto v = parsing(qpf, [&] { return hypercube_family_pc(q, qp); });
    out.doc["holds"] = v.certificate.has_value();
    if (v.certificate) {
        out.text << "PARALLEL-CORRECT UNDER EVERY HYPERCUBE POLICY\n";
        report_certificate(out, *v.certificate);
        return 0;
    }
    Policy p{*v.refuting_policy};
    auto run = one_round_evaluate(qp, p, *v.refuting_instance);
    out.text << "NOT PARALLEL-CORRECT UNDER EVERY HYPERCUBE POLICY\n";
    out.text << "refuting policy:\n" << indent(to_string(p));
    out.text << "instance:\n" << indent(instance_text(*v.refuting_instance));
    out.text << "missing:";
    for (const auto& f : run.missing) out.text << " " << to_string(f);
    out.text << "\n";
    out.doc["witness"]["policy"] = to_string(p);
    out.doc["witness"]["instance"] = to_json(*v.refuting_instance);
    out.doc["witness"]["missing"] = to_json(run.missing);
    out.emit("policy.pol", to_string(p));
    out.emit("instance.facts", instance_text(*v.refuting_instance));
    out.emit("q.cq", to_string(q) + "\n");
    out.emit("qprime.cq", to_string(qp) + "\n");
    return 1;
}

void report_run(Output& out, const RunReport& r) {
    for (const auto& w : r.warnings) out.text << "warning: " << w << "\n";
    for (const auto& [node, chunk] : r.chunks) {
        out.text << "node " << node << ": " << chunk.size() << " facts -> ";
        const auto& res = r.per_node.at(node);
        bool first = true;
        for (const auto& f : res) {
            out.text << (first ? "" : ", ") << to_string(f);
            first = false;
        }
        if (res.empty()) out.text << "(nothing)";
        out.text << "\n";
        out.doc["nodes"][node]["chunk"] = to_json(chunk);
        out.doc["nodes"][node]["result"] = to_json(res);
    }
    out.text << "centralized: " << r.centralized.size() << " facts, distributed union: " << r.union_result.size()
             << " facts\n";
    if (r.equal) {
        out.text << "EQUAL\n";
    } else {
        out.text << "MISSING:";
        for (const auto& f : r.missing) out.text << " " << to_string(f);
        out.text << "\n";
    }
    out.doc["centralized"] = to_json(r.centralized);
    out.doc["union"] = to_json(r.union_result);
    out.doc["equal"] = r.equal;
    out.doc["missing"] = to_json(r.missing);
    out.doc["warnings"] = r.warnings;
}

int cmd_simulate(Workspace& ws, Output& out, const std::string& qf, const std::string& pf, const std::string& inf,
                 std::optional<std::size_t> random, std::uint64_t seed) {
    auto q = ws.load_query(qf);
    auto p = ws.load_policy(pf);
    if (random) {
        auto s = search_counterexample(q, p, *random, seed);
        out.text << "searched " << s.trials << " random instances over " << s.universe.facts.size() << " facts"
                 << (s.universe.capped ? " (universe capped)" : "") << ", seed " << seed << "\n";
        out.doc["trials"] = s.trials;
        out.doc["universe_size"] = s.universe.facts.size();
        out.doc["universe_capped"] = s.universe.capped;
        out.doc["seed"] = seed;
        out.doc["found"] = s.counterexample.has_value();
        if (!s.counterexample) {
            out.text << "NO COUNTEREXAMPLE\n";
            return 0;
        }
        out.text << "COUNTEREXAMPLE:\n" << indent(instance_text(*s.counterexample));
        out.doc["counterexample"] = to_json(*s.counterexample);
        report_run(out, one_round_evaluate(q, p, *s.counterexample));
        out.emit("instance.facts", instance_text(*s.counterexample));
        return 1;
    }
    if (inf.empty()) throw InputError("simulate needs an instance file or --random");
    auto inst = ws.load_instance(inf);
    auto r = parsing(inf, [&] { return one_round_evaluate(q, p, inst); });
    report_run(out, r);
    return r.equal ? 0 : 1;
}

int cmd_gen(Output& out, const std::string& name, const std::string& input, const std::string& dir) {
    std::string text = read_file(input);
    fs::path d(dir);
    fs::create_directories(d);
    std::vector<std::pair<std::string, std::string>> files;
    bool expected = false;
    auto qbf = [&] { return parsing(input, [&] { return parse_qbf(text); }); };
    auto graph = [&] { return parsing(input, [&] { return parse_graph(text); }); };
    try {
        if (name == "pi2-pci" || name == "pi2-pc") {
            auto phi = qbf();
            auto v = reduce_pi2qbf_to_pci(phi);
            files.push_back({"query.cq", to_string(v.query) + "\n"});
            if (name == "pi2-pci") files.push_back({"instance.facts", instance_text(v.instance)});
            files.push_back({"policy.pol", to_string(Policy{v.policy})});
            expected = brute_force_qbf(phi);
        } else if (name == "pi3-transfer") {
            auto phi = qbf();
            auto v = reduce_pi3qbf_to_transfer(phi);
            files.push_back({"q.cq", to_string(v.q) + "\n"});
            files.push_back({"qprime.cq", to_string(v.q_prime) + "\n"});
            expected = brute_force_qbf(phi);
        } else if (name == "3sat-strongmin") {
            auto phi = qbf();
            files.push_back({"query.cq", to_string(reduce_3sat_to_strongmin(phi)) + "\n"});
            expected = !brute_force_sat(phi);
        } else if (name == "3col-c3" || name == "3col-c3-v2") {
            auto g = graph();
            auto v = name == "3col-c3" ? reduce_3col_to_c3_variant1(g) : reduce_3col_to_c3_variant2(g);
            files.push_back({"q.cq", to_string(v.q) + "\n"});
            files.push_back({"qprime.cq", to_string(v.q_prime) + "\n"});
            expected = brute_force_3col(g);
        } else {
            throw InputError("unknown reduction '" + name +
                             "' (pi2-pci, pi2-pc, pi3-transfer, 3sat-strongmin, 3col-c3, 3col-c3-v2)");
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(input + ": " + e.what());
    } catch (const OracleCapExceeded& e) {
        throw InputError(input + ": " + e.what());
    }
    files.push_back({"expected", expected ? "yes\n" : "no\n"});
    for (const auto& [f, content] : files) {
        write_file(d / f, content);
        out.text << "wrote " << (d / f).string() << "\n";
        out.doc["files"].push_back((d / f).string());
    }
    out.text << "expected: " << (expected ? "yes" : "no") << "\n";
    out.doc["expected"] = expected;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pc-lab: parallel-correctness and transferability of conjunctive queries"};
    app.require_subcommand(1);
    std::string format = "text";
    std::string emit_dir;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--emit", emit_dir, "Directory for re-runnable witness files");

    std::string a1, a2, a3;
    auto* eval = app.add_subcommand("eval", "Evaluate a query on an instance");
    eval->add_option("query", a1)->required();
    eval->add_option("instance", a2)->required();

    auto* check = app.add_subcommand("check", "Run an analysis; exit 0 if the property holds, 1 if not");
    check->require_subcommand(1);
    auto* pc = check->add_subcommand("pc", "Parallel-correctness on all instances");
    pc->add_option("query", a1)->required();
    pc->add_option("policy", a2)->required();
    bool hereditary = false;
    auto* pci = check->add_subcommand("pci", "Parallel-correctness on one instance");
    pci->add_option("query", a1)->required();
    pci->add_option("instance", a2)->required();
    pci->add_option("policy", a3)->required();
    pci->add_flag("--hereditary", hereditary, "Check every subinstance");
    bool allow_skip = true;
    auto* tr = check->add_subcommand("transfer", "Does parallel-correctness transfer from q to q'?");
    tr->add_option("q", a1)->required();
    tr->add_option("qprime", a2)->required();
    tr->add_option("--allow-skip", allow_skip, "Policies may skip facts (true|false)")->default_val(true);
    auto* c3 = check->add_subcommand("c3", "Search a simplification/substitution certificate");
    c3->add_option("q", a1)->required();
    c3->add_option("qprime", a2)->required();
    auto* sm = check->add_subcommand("strongmin", "Are all valuations of the query minimal?");
    sm->add_option("query", a1)->required();
    auto* mn = check->add_subcommand("minimize", "Compute the core; exit 0 if already minimal");
    mn->add_option("query", a1)->required();
    auto* hc = check->add_subcommand("hypercube-pc", "Is q' parallel-correct under every hypercube policy for q?");
    hc->add_option("q", a1)->required();
    hc->add_option("qprime", a2)->required();

    auto* gen = app.add_subcommand("gen", "Generate a reduction test vector");
    gen->add_option("reduction", a1)->required();
    gen->add_option("input", a2)->required();
    gen->add_option("outdir", a3)->required();

    std::optional<std::size_t> random;
    std::uint64_t seed = 0;
    auto* sim = app.add_subcommand("simulate", "One-round distributed evaluation");
    sim->add_option("query", a1)->required();
    sim->add_option("policy", a2)->required();
    sim->add_option("instance", a3);
    sim->add_option("--random", random, "Search this many random instances");
    sim->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Output out;
    out.as_json = format == "json";
    if (!emit_dir.empty()) out.emit_dir = fs::path(emit_dir);
    Workspace ws;
    int code = 0;
    try {
        if (eval->parsed()) {
            out.doc["command"] = "eval";
            code = cmd_eval(ws, out, a1, a2);
        } else if (check->parsed()) {
            out.doc["command"] = "check";
            if (pc->parsed()) {
                out.doc["check"] = "pc";
                code = cmd_check_pc(ws, out, a1, a2);
            } else if (pci->parsed()) {
                out.doc["check"] = "pci";
                code = cmd_check_pci(ws, out, a1, a2, a3, hereditary);
            } else if (tr->parsed()) {
                out.doc["check"] = "transfer";
                code = cmd_check_transfer(ws, out, a1, a2, allow_skip);
            } else if (c3->parsed()) {
                out.doc["check"] = "c3";
                code = cmd_check_c3(ws, out, a1, a2);
            } else if (sm->parsed()) {
                out.doc["check"] = "strongmin";
                code = cmd_check_strongmin(ws, out, a1);
            } else if (mn->parsed()) {
                out.doc["check"] = "minimize";
                code = cmd_check_minimize(ws, out, a1);
            } else {
                out.doc["check"] = "hypercube-pc";
                code = cmd_check_hypercube(ws, out, a1, a2);
            }
        } else if (gen->parsed()) {
            out.doc["command"] = "gen";
            code = cmd_gen(out, a1, a2, a3);
        } else {
            out.doc["command"] = "simulate";
            code = cmd_simulate(ws, out, a1, a2, a3, random, seed);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    out.doc["exit"] = code;
    out.flush();
    return code;
}
