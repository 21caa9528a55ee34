// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cli_run.hpp"
#include "oracles.hpp"
#include "pclab/pc.hpp"
#include "pclab/reductions.hpp"
#include "pclab/simulator.hpp"
#include "pclab/transfer.hpp"
#include "pclab/valuation.hpp"

using namespace pclab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> problems;

    void fail(const std::string& why) {
        pass = false;
        if (problems.size() < 5) problems.push_back(why);
    }
    void expect(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string dimacs_line(const QBF& phi) {
    auto s = to_dimacs(phi);
    for (auto& c : s)
        if (c == '\n') c = ' ';
    return s;
}

Policy ex35_policy() { return parse_policy("network 1 2\ndefault @ 1 2\nR(a,b) @ 2\nR(b,a) @ 1\n"); }

// ---------------------------------------------------------------------------

Outcome pc_vs_exhaustive() {
    Outcome o;
    auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::vector<oracle::Rel> schema{{"R", 2}, {"S", 1}};
    int yes = 0, no = 0;
    for (int i = 0; i < 200; ++i) {
        auto q = oracle::random_query(rng, 4, 4, schema);
        auto p = oracle::random_explicit_policy(rng, schema, {"a", "b", "c"}, 6, 3);
        bool expect = oracle::exhaustive_pc(q, p);
        bool got = is_parallel_correct(q, Policy{p}).holds;
        (expect ? yes : no)++;
        o.expect(got == expect, "disagreement on " + to_string(q) + " under\n" + to_string(Policy{p}));
    }
    double secs = seconds_since(t0);
    o.expect(secs < 60, "took " + std::to_string(secs) + " s");
    o.expect(yes > 0 && no > 0, "verdicts are not mixed");
    o.detail = "200 pairs (" + std::to_string(yes) + " correct, " + std::to_string(no) + " not)";
    return o;
}

Outcome running_example() {
    Outcome o;
    auto q = parse_query("T(x,z) :- R(x,y), R(y,z), R(x,x).");
    auto chain = parse_query("T(x,z) :- R(x,y), R(y,z).");
    auto p = ex35_policy();
    o.expect(!check_c0(q, p, BoundedDomain{{"a", "b"}}), "C0 should fail");
    o.expect(is_parallel_correct(q, p).holds, "query should be parallel-correct");
    auto s = search_counterexample(q, p, 10000, 35);
    o.expect(!s.counterexample && s.trials == 10000, "random search found a counterexample");
    auto v = is_parallel_correct(chain, p);
    o.expect(!v.holds, "chain should not be parallel-correct");
    Instance predicted = parse_instance("R(a,b).\nR(b,a).");
    o.expect(v.valuation && *v.valuation == Valuation{{"x", "a"}, {"y", "b"}, {"z", "a"}}, "unexpected chain witness");
    o.expect(v.instance && oracle::subset(predicted, *v.instance), "witness instance lacks R(a,b), R(b,a)");
    auto run = one_round_evaluate(chain, p, predicted);
    o.expect(run.missing.count(Fact{"T", {"a", "a"}}) == 1, "T(a,a) not lost on the predicted instance");
    auto cs = search_counterexample(chain, p, 10000, 35);
    o.expect(cs.counterexample && !one_round_evaluate(chain, p, *cs.counterexample).equal,
             "random search missed the chain failure");
    o.detail = "C0 fails, exact check holds, 10^4 trials clean, chain loses T(a,a)";
    return o;
}

struct TransferCase {
    QBF phi;
    QueryPair pair;
    TransferVerdict verdict;
};

std::vector<TransferCase> negatives;

Outcome transfer_vs_qbf() {
    Outcome o;
    auto t0 = Clock::now();
    std::mt19937_64 rng(3003);
    std::vector<QBF> formulas;
    int want_true = 25, want_false = 25, tries = 0;
    while ((want_true > 0 || want_false > 0) && tries < 20000) {
        ++tries;
        std::uniform_int_distribution<int> size(1, 4), clauses(1, 4);
        int m = size(rng), n = size(rng), p = size(rng);
        if (m + n + p > 6) continue;
        auto phi = oracle::random_formula(rng, {{true, m}, {false, n}, {true, p}}, clauses(rng), QBF::Matrix::DNF, 3);
        bool truth = brute_force_qbf(phi);
        int& want = truth ? want_true : want_false;
        if (want == 0) continue;
        --want;
        formulas.push_back(phi);
    }
    formulas.push_back(parse_qbf("p dnf 4 2\na 1 0\ne 2 3 0\na 4 0\n1 2 4 0\n-1 3 4 0\n"));
    int yes = 0, no = 0;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        const auto& phi = formulas[i];
        bool truth = brute_force_qbf(phi);
        auto pair = reduce_pi3qbf_to_transfer(phi);
        auto v = transfers(pair.q, pair.q_prime);
        (truth ? yes : no)++;
        o.expect(v.holds == truth, "disagreement on " + dimacs_line(phi));
        if (!v.holds) negatives.push_back({phi, pair, v});
    }
    o.expect(yes + no >= 51, "too few formulas");
    o.expect(!negatives.empty() && !transfers(reduce_pi3qbf_to_transfer(formulas.back()).q,
                                              reduce_pi3qbf_to_transfer(formulas.back()).q_prime)
                                        .holds,
             "worked example should not transfer");
    o.detail = std::to_string(yes + no) + " formulas (" + std::to_string(yes) + " true, " + std::to_string(no) +
               " false, worked example included), " + std::to_string(seconds_since(t0)).substr(0, 5) + " s";
    return o;
}

Outcome witness_validity() {
    Outcome o;
    int checked = 0;
    for (const auto& c : negatives) {
        const auto& v = c.verdict;
        if (!v.c2_witness || !v.policy_witness) {
            o.fail("negative verdict without witness");
            continue;
        }
        Policy pol{*v.policy_witness};
        o.expect(is_parallel_correct(c.pair.q, pol).holds, "Q not parallel-correct under witness for " + dimacs_line(c.phi));
        o.expect(!is_parallel_correct(c.pair.q_prime, pol).holds, "Q' parallel-correct under witness for " + dimacs_line(c.phi));
        auto [head, body] = apply_valuation(*v.c2_witness, c.pair.q_prime);
        auto run = one_round_evaluate(c.pair.q_prime, pol, body);
        o.expect(run.missing.count(head) == 1, "simulator does not lose the head fact for " + dimacs_line(c.phi));
        ++checked;
    }
    o.expect(checked > 0, "no negatives to check");
    o.detail = std::to_string(checked) + "/" + std::to_string(negatives.size()) + " negatives confirmed";
    return o;
}

Outcome strong_minimality() {
    Outcome o;
    std::mt19937_64 rng(5005);
    int sat = 0, unsat = 0, tries = 0;
    int want_sat = 30, want_unsat = 30;
    while ((want_sat > 0 || want_unsat > 0) && tries < 50000) {
        ++tries;
        std::uniform_int_distribution<int> vars(1, 4), clauses(1, 16);
        int n = vars(rng);
        auto phi = oracle::random_formula(rng, {{false, n}}, clauses(rng), QBF::Matrix::CNF, 3);
        phi.blocks.clear();
        bool s = brute_force_sat(phi);
        int& want = s ? want_sat : want_unsat;
        if (want == 0) continue;
        --want;
        (s ? sat : unsat)++;
        bool sm = is_strongly_minimal(reduce_3sat_to_strongmin(phi)).holds;
        o.expect(sm == !s, "disagreement on " + dimacs_line(phi));
    }
    o.expect(sat + unsat >= 50, "too few formulas");

    o.expect(is_strongly_minimal(parse_query("T(x1,x2,x3,x4) :- R1(x1,x2), R2(x2,x3), R3(x3,x4).")).holds, "Q1 golden");
    o.expect(is_strongly_minimal(parse_query("T() :- R1(x1,x2), R2(x2,x3), R3(x3,x4).")).holds, "Q2 golden");
    o.expect(is_strongly_minimal(parse_query("T() :- R(x1,x2), R(x2,x1).")).holds, "symmetric pair golden");
    o.expect(!is_strongly_minimal(parse_query("T(x,z) :- R(x,y), R(y,z), R(x,x).")).holds, "running example golden");

    std::vector<oracle::Rel> schema{{"R", 2}, {"S", 1}, {"U", 3}};
    int sufficient = 0;
    for (int i = 0; i < 500; ++i) {
        auto q = oracle::random_query(rng, 5, 4, schema);
        if (!strong_minimality_sufficient(q)) continue;
        ++sufficient;
        o.expect(is_strongly_minimal(q).holds, "sufficient condition but not strongly minimal: " + to_string(q));
    }
    o.detail = std::to_string(sat + unsat) + " formulas (" + std::to_string(sat) + " sat, " + std::to_string(unsat) +
               " unsat), goldens, 500 CQs (" + std::to_string(sufficient) + " meet the sufficient condition)";
    return o;
}

Outcome transfer_vs_c3() {
    Outcome o;
    std::mt19937_64 rng(6006);
    std::vector<oracle::Rel> schema{{"R", 2}, {"S", 1}};
    int pairs = 0, yes = 0;
    while (pairs < 150) {
        auto q = oracle::random_query(rng, 5, 4, schema, 0.6);
        if (!is_strongly_minimal(q).holds) continue;
        // Alternate unrelated second queries with ones derived from q, which
        // transfer more often.
        Query qp = oracle::random_query(rng, 5, 4, schema, 0.3);
        if (pairs % 2 == 0) {
            std::vector<Atom> body(q.body.begin(), q.body.end());
            std::shuffle(body.begin(), body.end(), rng);
            body.resize(std::max<std::size_t>(1, body.size() / 2 + 1));
            std::set<Var> used;
            for (const auto& a : body) used.insert(a.args.begin(), a.args.end());
            std::vector<Var> head;
            for (const auto& v : q.head.args)
                if (used.count(v) && std::find(head.begin(), head.end(), v) == head.end()) head.push_back(v);
            qp = make_query(Atom{"T", head}, body);
        }
        ++pairs;
        bool t = transfers(q, qp).holds;
        auto cert = check_c3(q, qp);
        yes += t;
        o.expect(t == cert.has_value(), "disagreement on " + to_string(q) + " / " + to_string(qp));
        if (cert) o.expect(verify_c3(q, qp, *cert), "invalid certificate for " + to_string(q) + " / " + to_string(qp));
    }
    o.expect(yes > 0 && yes < pairs, "verdicts are not mixed");
    o.detail = std::to_string(pairs) + " pairs (" + std::to_string(yes) + " transfer)";
    return o;
}

HypercubePolicy random_hypercube(std::mt19937_64& rng, const Query& q, const std::vector<Value>& dom) {
    std::map<Var, std::map<Value, std::string>> tables;
    std::uniform_int_distribution<int> bucket(0, 2);
    for (const auto& v : q.vars())
        for (const auto& val : dom) tables[v][val] = std::to_string(bucket(rng));
    return HypercubePolicy::make(q, tables);
}

std::vector<std::string> coords(const NodeId& n) {
    std::vector<std::string> out;
    std::stringstream ss(n.substr(1, n.size() - 2));
    for (std::string s; std::getline(ss, s, ',');) out.push_back(s);
    return out;
}

Outcome hypercube_family() {
    Outcome o;
    std::mt19937_64 rng(7007);
    std::vector<oracle::Rel> schema{{"R", 2}, {"S", 1}};
    std::vector<Value> dom{"1", "2", "3"};
    for (int i = 0; i < 100; ++i) {
        auto q = oracle::random_query(rng, 4, 4, schema);
        auto h = random_hypercube(rng, q, dom);
        o.expect(is_generous_for(Policy{h}, q, BoundedDomain{dom}).holds, "hypercube not generous for " + to_string(q));
    }
    for (int i = 0; i < 100; ++i) {
        auto q = oracle::random_query(rng, 4, 4, schema);
        auto inst = oracle::random_instance(rng, schema, {"a", "b", "c"}, 0.35);
        if (inst.empty()) inst.insert(Fact{"S", {"a"}});
        auto sp = scattered_witness_policy(q, inst);
        for (const auto& [node, chunk] : distribute(Policy{sp}, inst)) {
            auto cs = coords(node);
            Valuation v;
            for (std::size_t k = 0; k < sp.vars.size(); ++k) v[sp.vars[k]] = cs[k];
            o.expect(oracle::subset(chunk, oracle::body_of(q, v)), "chunk at " + node + " is not inside one valuation");
        }
    }
    auto k3 = reduce_3col_to_c3_variant1(parse_graph("a b\nb c\nc a\n"));
    auto k4 = reduce_3col_to_c3_variant1(parse_graph("a b\na c\na d\nb c\nb d\nc d\n"));
    auto v3 = hypercube_family_pc(k3.q, k3.q_prime);
    auto v4 = hypercube_family_pc(k4.q, k4.q_prime);
    o.expect(v3.certificate.has_value() == brute_force_3col(parse_graph("a b\nb c\nc a\n")), "triangle verdict");
    o.expect(v4.certificate.has_value() == brute_force_3col(parse_graph("a b\na c\na d\nb c\nb d\nc d\n")), "K4 verdict");
    if (v4.refuting_policy && v4.refuting_instance) {
        auto run = one_round_evaluate(k4.q_prime, Policy{*v4.refuting_policy}, *v4.refuting_instance);
        o.expect(!run.equal, "K4 refuting policy does not break one-round evaluation");
        o.expect(one_round_evaluate(k4.q, Policy{*v4.refuting_policy}, *v4.refuting_instance).equal,
                 "refuting policy breaks the first query too");
    } else {
        o.fail("K4 has no refuting policy");
    }
    // Triangle: sampled hypercube policies for q never break q' on random inputs.
    int runs = 0;
    std::vector<oracle::Rel> gschema{{"E", 2}, {"Fix", 3}};
    for (int i = 0; i < 20; ++i) {
        auto h = random_hypercube(rng, k3.q, dom);
        for (int j = 0; j < 20; ++j) {
            auto inst = oracle::random_instance(rng, gschema, dom, 0.6);
            ++runs;
            o.expect(one_round_evaluate(k3.q_prime, Policy{h}, inst).equal, "triangle pair broken by a hypercube policy");
        }
    }
    o.detail = "100 generous, 100 scattered, K3/K4 match coloring, K4 refuted in simulation, " + std::to_string(runs) +
               " triangle runs clean";
    return o;
}

Outcome pci_pc_reductions() {
    Outcome o;
    auto t0 = Clock::now();
    std::mt19937_64 rng(8008);
    int want_true = 25, want_false = 25, tries = 0, yes = 0, no = 0;
    while ((want_true > 0 || want_false > 0) && tries < 20000) {
        ++tries;
        std::uniform_int_distribution<int> size(1, 5), clauses(1, 6);
        int m = size(rng), n = size(rng);
        if (m + n > 8) continue;
        auto phi = oracle::random_formula(rng, {{true, m}, {false, n}}, clauses(rng), QBF::Matrix::CNF, 3);
        bool truth = brute_force_qbf(phi);
        int& want = truth ? want_true : want_false;
        if (want == 0) continue;
        --want;
        (truth ? yes : no)++;
        auto v = reduce_pi2qbf_to_pci(phi);
        o.expect(is_parallel_correct_on_instance(v.query, v.instance, Policy{v.policy}).holds == truth,
                 "instance verdict disagrees on " + dimacs_line(phi));
        auto [q, p] = reduce_pi2qbf_to_pc(phi);
        o.expect(is_parallel_correct(q, Policy{p}).holds == truth, "general verdict disagrees on " + dimacs_line(phi));
    }
    double secs = seconds_since(t0);
    o.expect(yes + no >= 50, "too few formulas");
    o.expect(secs < 120, "took " + std::to_string(secs) + " s");
    o.detail = std::to_string(yes + no) + " formulas (" + std::to_string(yes) + " true, " + std::to_string(no) +
               " false) through both reductions";
    return o;
}

Outcome core_invariants() {
    Outcome o;
    std::mt19937_64 rng(9009);
    std::vector<oracle::Rel> schema{{"R", 2}, {"S", 1}};
    std::vector<Value> dom{"a", "b", "c", "d"};
    for (int i = 0; i < 1000; ++i) {
        auto q = oracle::random_query(rng, 4, 4, schema);
        auto inst = oracle::random_instance(rng, schema, dom, 0.35);
        // Random bijection onto fresh names.
        std::vector<Value> image{"p", "q", "r", "s"};
        std::shuffle(image.begin(), image.end(), rng);
        std::map<Value, Value> pi;
        for (std::size_t k = 0; k < dom.size(); ++k) pi[dom[k]] = image[k];
        auto rename = [&](const Instance& in) {
            Instance out;
            for (auto f : in) {
                for (auto& v : f.vals) v = pi.at(v);
                out.insert(f);
            }
            return out;
        };
        auto base = evaluate(q, inst);
        o.expect(evaluate(q, rename(inst)) == rename(base), "genericity fails for " + to_string(q));
        auto more = inst;
        auto extra = oracle::random_instance(rng, schema, dom, 0.2);
        more.insert(extra.begin(), extra.end());
        o.expect(oracle::subset(base, evaluate(q, more)), "monotonicity fails for " + to_string(q));
    }

    auto m1 = minimize_cq(parse_query("T(x) :- R(x,x), R(x,y), R(x,z)."));
    o.expect(m1.query.body == std::vector<Atom>{{"R", {"x", "x"}}}, "first fold");
    auto chain = parse_query("T(x) :- R(x,y), R(y,z).");
    o.expect(minimize_cq(chain).query.body == chain.body, "chain should stay");
    auto m3 = minimize_cq(parse_query("T(x) :- R(x,y), R(y,y), R(z,z), R(u,u)."));
    o.expect(m3.query.body.size() == 2 && is_idempotent(m3.folding), "loop fold");
    o.expect(oracle::simplifications(chain).size() == 1, "chain has only the identity simplification");

    // theta(q) and q agree on every instance over |vars(q)| values.
    int queries = 0, instances = 0;
    for (int i = 0; queries < 40 && i < 2000; ++i) {
        auto q = oracle::random_query(rng, 4, 4, {{"R", 2}});
        auto simps = oracle::simplifications(q);
        if (simps.size() < 2 && queries % 4 != 0) continue;
        ++queries;
        std::size_t n = q.vars().size();
        std::vector<Fact> all;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) all.push_back(Fact{"R", {std::to_string(a), std::to_string(b)}});
        std::vector<Query> images;
        for (const auto& th : simps) images.push_back(apply_substitution(th, q));
        for (std::size_t mask = 0; mask < (std::size_t{1} << all.size()); ++mask) {
            Instance inst;
            for (std::size_t k = 0; k < all.size(); ++k)
                if (mask >> k & 1) inst.insert(all[k]);
            auto ref = evaluate(q, inst);
            for (const auto& img : images) o.expect(evaluate(img, inst) == ref, "simplification changes " + to_string(q));
            ++instances;
        }
    }
    o.detail = "1000 renamings and extensions, folds reproduced, " + std::to_string(queries) +
               " queries checked on " + std::to_string(instances) + " instances";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dir_bytes(const fs::path& d) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(d))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string s;
    for (const auto& f : files) s += fs::relative(f, d).string() + "\n" + slurp(f);
    return s;
}

Outcome cli_determinism() {
    Outcome o;
    auto root = fs::temp_directory_path() / "pclab-acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    auto D = [](const char* n) { return data_file(n); };
    auto P = [](const fs::path& p) { return "\"" + p.string() + "\""; };

    // Generation first so later commands can use its files.
    std::vector<std::pair<std::string, std::string>> gens{{"pi2-pci", "xor.qbf"},     {"pi2-pc", "unit_false.qbf"},
                                                          {"pi3-transfer", "c7.qbf"}, {"3sat-strongmin", "sat1.cnf"},
                                                          {"3col-c3", "k3.graph"},    {"3col-c3-v2", "k4.graph"}};
    int commands = 0;
    for (const auto& [name, input] : gens) {
        std::string bytes[2];
        for (int run = 0; run < 2; ++run) {
            auto out = root / ("gen-" + name);
            fs::remove_all(out);
            auto r = run_cli("gen " + name + " " + D(input.c_str()) + " " + P(out));
            o.expect(r.code == 0, "gen " + name + " failed");
            bytes[run] = r.out + dir_bytes(out);
        }
        o.expect(bytes[0] == bytes[1], "gen " + name + " differs between runs");
        ++commands;
    }
    auto c7 = root / "gen-pi3-transfer";
    auto k3 = root / "gen-3col-c3";
    std::vector<std::string> cmds{
        "eval " + D("ex35.cq") + " " + D("ex35.facts"),
        "check pc " + D("ex35.cq") + " " + D("ex35.pol"),
        "check pc " + D("chain.cq") + " " + D("ex35.pol"),
        "check pci " + D("chain.cq") + " " + D("ex35.facts") + " " + D("ex35.pol"),
        "check pci --hereditary " + D("chain.cq") + " " + D("ex35.facts") + " " + D("ex35.pol"),
        "check transfer " + P(c7 / "q.cq") + " " + P(c7 / "qprime.cq"),
        "check transfer --allow-skip false " + D("ex49.cq") + " " + D("chain.cq"),
        "check c3 " + P(k3 / "q.cq") + " " + P(k3 / "qprime.cq"),
        "check strongmin " + D("ex35.cq"),
        "check minimize " + D("fold.cq"),
        "check hypercube-pc " + P(k3 / "q.cq") + " " + P(k3 / "qprime.cq"),
        "simulate " + D("ex35.cq") + " " + D("ex35.pol") + " " + D("ex35.facts"),
        "simulate --random 1000 --seed 7 " + D("chain.cq") + " " + D("ex35.pol"),
        "simulate --random 1000 --seed 7 " + D("ex35.cq") + " " + D("ex35.pol"),
    };
    for (const auto& c : cmds) {
        for (const auto* fmt : {"text", "json"}) {
            std::string bytes[2];
            for (int run = 0; run < 2; ++run) {
                auto emit = root / ("emit-" + std::to_string(commands));
                fs::remove_all(emit);
                auto r = run_cli(std::string("--format ") + fmt + " --emit " + P(emit) + " " + c);
                o.expect(r.code == 0 || r.code == 1, "unexpected exit " + std::to_string(r.code) + " for " + c);
                bytes[run] = std::to_string(r.code) + "\n" + r.out + (fs::exists(emit) ? dir_bytes(emit) : "");
            }
            o.expect(bytes[0] == bytes[1], std::string("output differs between runs: ") + fmt + " " + c);
            ++commands;
        }
    }
    fs::remove_all(root);
    o.detail = std::to_string(commands) + " invocations, each run twice";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "exact parallel-correctness matches exhaustive subinstance simulation", pc_vs_exhaustive},
        {2, "running example: C0 fails, exact check holds, chain variant fails", running_example},
        {3, "transfer verdicts match QBF truth on generated pairs", transfer_vs_qbf},
        {4, "non-transfer witness policies separate the two queries", witness_validity},
        {5, "strong minimality matches unsatisfiability; sufficient condition is sound", strong_minimality},
        {6, "for strongly minimal q, transfer equals certificate existence", transfer_vs_c3},
        {7, "hypercube policies are generous and scattered; family verdicts match coloring", hypercube_family},
        {8, "instance and general parallel-correctness reductions match QBF truth", pci_pc_reductions},
        {9, "evaluation is generic and monotone; minimization and simplification", core_invariants},
        {10, "CLI output is byte-identical across runs", cli_determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.2f s", seconds_since(t0));
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << " -- " << o.detail << " (" << secs
                  << ")\n";
        for (const auto& p : o.problems) std::cout << "       " << p << "\n";
        std::cout.flush();
        failed += !o.pass;
    }
    std::cout << (all.size() - static_cast<std::size_t>(failed)) << "/" << all.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
