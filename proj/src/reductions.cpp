#include "pclab/reductions.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

namespace pclab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<int> read_ints(std::istringstream& in, int lineno) {
    std::vector<int> out;
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        long v = std::strtol(tok.c_str(), &end, 10);
        if (*end != '\0') throw ParseError("expected an integer, got '" + tok + "'", lineno, 1);
        out.push_back(static_cast<int>(v));
    }
    if (out.empty() || out.back() != 0) throw ParseError("line must end with 0", lineno, 1);
    out.pop_back();
    return out;
}

}  // namespace

QBF parse_qbf(const std::string& text) {
    QBF phi;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool header = false;
    std::size_t declared_clauses = 0;
    std::set<int> quantified;
    for (; std::getline(in, raw);) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == 'c' || line[0] == '#') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, kind;
            long nv = -1, nc = -1;
            ls >> p >> kind >> nv >> nc;
            if (header) throw ParseError("duplicate header", lineno, 1);
            if ((kind != "cnf" && kind != "dnf") || nv < 0 || nc < 0)
                throw ParseError("expected 'p cnf|dnf <vars> <clauses>'", lineno, 1);
            phi.matrix = kind == "cnf" ? QBF::Matrix::CNF : QBF::Matrix::DNF;
            phi.num_vars = static_cast<int>(nv);
            declared_clauses = static_cast<std::size_t>(nc);
            header = true;
            continue;
        }
        if (!header) throw ParseError("missing 'p cnf|dnf' header", lineno, 1);
        if (line[0] == 'a' || line[0] == 'e') {
            if (!phi.clauses.empty()) throw ParseError("quantifier block after clauses", lineno, 1);
            char q;
            ls >> q;
            auto vars = read_ints(ls, lineno);
            bool uni = q == 'a';
            for (int v : vars) {
                if (v <= 0 || v > phi.num_vars) throw ParseError("variable out of range", lineno, 1);
                if (!quantified.insert(v).second) throw ParseError("variable quantified twice", lineno, 1);
            }
            if (!phi.blocks.empty() && phi.blocks.back().universal == uni)
                phi.blocks.back().vars.insert(phi.blocks.back().vars.end(), vars.begin(), vars.end());
            else
                phi.blocks.push_back({uni, vars});
            continue;
        }
        auto lits = read_ints(ls, lineno);
        for (int l : lits)
            if (l == 0 || std::abs(l) > phi.num_vars) throw ParseError("literal out of range", lineno, 1);
        phi.clauses.push_back(lits);
    }
    if (!header) throw ParseError("missing 'p cnf|dnf' header", lineno, 1);
    if (phi.clauses.size() != declared_clauses)
        throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                             std::to_string(phi.clauses.size()),
                         lineno, 1);
    return phi;
}

std::string to_dimacs(const QBF& phi) {
    std::ostringstream out;
    out << "p " << (phi.matrix == QBF::Matrix::CNF ? "cnf" : "dnf") << " " << phi.num_vars << " "
        << phi.clauses.size() << "\n";
    for (const auto& b : phi.blocks) {
        out << (b.universal ? "a" : "e");
        for (int v : b.vars) out << " " << v;
        out << " 0\n";
    }
    for (const auto& c : phi.clauses) {
        for (int l : c) out << l << " ";
        out << "0\n";
    }
    return out.str();
}

Graph parse_graph(const std::string& text) {
    Graph g;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::set<std::pair<std::string, std::string>> seen;
    for (; std::getline(in, raw);) {
        ++lineno;
        auto hash = raw.find('#');
        std::istringstream ls(hash == std::string::npos ? raw : raw.substr(0, hash));
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty()) continue;
        if (toks.size() > 2) throw ParseError("expected 'u v' or a single vertex", lineno, 1);
        for (const auto& v : toks)
            for (char ch : v)
                if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
                    throw ParseError("vertex names use letters, digits and '_'", lineno, 1);
        g.vertices.insert(toks.begin(), toks.end());
        if (toks.size() == 2) {
            if (seen.count({toks[1], toks[0]}) || !seen.insert({toks[0], toks[1]}).second) continue;
            g.edges.emplace_back(toks[0], toks[1]);
        }
    }
    return g;
}

namespace {

std::set<int> used_vars(const QBF& phi) {
    std::set<int> s;
    for (const auto& c : phi.clauses)
        for (int l : c) s.insert(std::abs(l));
    for (const auto& b : phi.blocks) s.insert(b.vars.begin(), b.vars.end());
    return s;
}

bool matrix_true(const QBF& phi, const std::vector<char>& val) {
    auto lit = [&](int l) { return l > 0 ? val[static_cast<std::size_t>(l)] != 0 : val[static_cast<std::size_t>(-l)] == 0; };
    if (phi.matrix == QBF::Matrix::CNF) {
        for (const auto& c : phi.clauses)
            if (std::none_of(c.begin(), c.end(), lit)) return false;
        return true;
    }
    for (const auto& c : phi.clauses)
        if (std::all_of(c.begin(), c.end(), lit)) return true;
    return false;
}

}  // namespace

bool brute_force_qbf(const QBF& phi, int cap) {
    auto used = used_vars(phi);
    if (static_cast<int>(used.size()) > cap)
        throw OracleCapExceeded("formula has " + std::to_string(used.size()) + " variables; cap is " + std::to_string(cap));
    // Order: free variables (existential), then blocks as written.
    std::set<int> quantified;
    for (const auto& b : phi.blocks) quantified.insert(b.vars.begin(), b.vars.end());
    std::vector<std::pair<bool, int>> order;
    for (int v : used)
        if (!quantified.count(v)) order.emplace_back(false, v);
    for (const auto& b : phi.blocks)
        for (int v : b.vars) order.emplace_back(b.universal, v);
    std::vector<char> val(static_cast<std::size_t>(phi.num_vars) + 1, 0);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == order.size()) return matrix_true(phi, val);
        auto [uni, v] = order[i];
        val[static_cast<std::size_t>(v)] = 0;
        bool a = rec(i + 1);
        if (uni ? !a : a) return a;
        val[static_cast<std::size_t>(v)] = 1;
        return rec(i + 1);
    };
    return rec(0);
}

bool brute_force_sat(const QBF& phi, int cap) {
    QBF plain = phi;
    plain.blocks.clear();
    return brute_force_qbf(plain, cap);
}

bool brute_force_3col(const Graph& g, int cap) {
    if (static_cast<int>(g.vertices.size()) > cap)
        throw OracleCapExceeded("graph has " + std::to_string(g.vertices.size()) + " vertices; cap is " +
                                std::to_string(cap));
    std::vector<std::string> vs(g.vertices.begin(), g.vertices.end());
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < vs.size(); ++i) idx[vs[i]] = i;
    std::vector<std::vector<std::size_t>> earlier(vs.size());
    for (const auto& [a, b] : g.edges) {
        auto i = idx.at(a), j = idx.at(b);
        if (i == j) return false;
        earlier[std::max(i, j)].push_back(std::min(i, j));
    }
    std::vector<int> color(vs.size(), -1);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == vs.size()) return true;
        for (int c = 0; c < 3; ++c) {
            bool ok = true;
            for (auto j : earlier[i]) ok = ok && color[j] != c;
            if (!ok) continue;
            color[i] = c;
            if (rec(i + 1)) return true;
        }
        color[i] = -1;
        return false;
    };
    return rec(0);
}

namespace {

// Quantifier layout expected by a reduction, e.g. {true,false} = forall-exists.
// Variables not occurring in the matrix are dropped; they do not affect truth.
struct Layout {
    std::vector<std::vector<int>> groups;  // one per expected block, possibly empty
    std::map<int, std::string> name;       // variable -> query variable
};

Layout layout(const QBF& phi, const std::vector<bool>& pattern, const std::string& letters, const char* what) {
    std::set<int> in_matrix;
    for (const auto& c : phi.clauses)
        for (int l : c) in_matrix.insert(std::abs(l));
    Layout out;
    out.groups.resize(pattern.size());
    std::size_t at = 0;
    std::set<int> quantified;
    for (const auto& b : phi.blocks) {
        while (at < pattern.size() && pattern[at] != b.universal) ++at;
        if (at == pattern.size()) throw std::invalid_argument(std::string("quantifier prefix does not fit ") + what);
        for (int v : b.vars) {
            quantified.insert(v);
            if (in_matrix.count(v)) out.groups[at].push_back(v);
        }
        ++at;
    }
    for (int v : in_matrix)
        if (!quantified.count(v)) throw std::invalid_argument("variable " + std::to_string(v) + " is not quantified");
    for (std::size_t g = 0; g < out.groups.size(); ++g)
        for (std::size_t i = 0; i < out.groups[g].size(); ++i)
            out.name[out.groups[g][i]] = std::string(1, letters[g]) + std::to_string(i + 1);
    return out;
}

std::vector<int> padded(const std::vector<int>& clause) {
    if (clause.empty() || clause.size() > 3) throw std::invalid_argument("clauses must have 1 to 3 literals");
    std::vector<int> c = clause;
    while (c.size() < 3) c.push_back(c.back());
    return c;
}

std::string lit_var(const Layout& lay, int l) {
    const auto& n = lay.name.at(std::abs(l));
    return l > 0 ? n : "n" + n;
}

Atom atom(std::string rel, std::vector<Var> args) { return Atom{std::move(rel), std::move(args)}; }

std::vector<std::vector<int>> nonzero_triples() {
    std::vector<std::vector<int>> out;
    for (int b = 1; b < 8; ++b) out.push_back({(b >> 2) & 1, (b >> 1) & 1, b & 1});
    return out;
}

Query pi2_query(const QBF& phi, const Layout& lay) {
    std::vector<Atom> body{atom("True", {"w1"}), atom("False", {"w0"}), atom("Neg", {"w1", "w0"}),
                           atom("Neg", {"w0", "w1"})};
    for (std::size_t j = 0; j < phi.clauses.size(); ++j) {
        std::string rel = "C" + std::to_string(j + 1);
        for (const auto& t : nonzero_triples()) {
            std::vector<Var> args;
            for (int b : t) args.push_back(b ? "w1" : "w0");
            body.push_back(atom(rel, args));
        }
        std::vector<Var> args;
        for (int l : padded(phi.clauses[j])) args.push_back(lit_var(lay, l));
        body.push_back(atom(rel, args));
    }
    std::vector<Var> head;
    for (const auto& g : lay.groups)
        for (int v : g) {
            body.push_back(atom("Neg", {lay.name.at(v), "n" + lay.name.at(v)}));
            if (&g == &lay.groups[0]) head.push_back(lay.name.at(v));
        }
    return make_query(atom("H", head), body);
}

}  // namespace

PCIVector reduce_pi2qbf_to_pci(const QBF& phi) {
    if (phi.matrix != QBF::Matrix::CNF) throw std::invalid_argument("expected a CNF matrix");
    if (phi.clauses.empty()) throw std::invalid_argument("formula needs at least one clause");
    auto lay = layout(phi, {true, false}, "xy", "forall-exists");
    PCIVector out;
    out.query = pi2_query(phi, lay);
    out.instance = {Fact{"True", {"1"}}, Fact{"False", {"0"}}, Fact{"Neg", {"1", "0"}}, Fact{"Neg", {"0", "1"}}};
    for (std::size_t j = 0; j < phi.clauses.size(); ++j)
        for (int b = 0; b < 8; ++b)
            out.instance.insert(Fact{"C" + std::to_string(j + 1),
                                     {std::to_string((b >> 2) & 1), std::to_string((b >> 1) & 1), std::to_string(b & 1)}});
    out.policy.network = {"kplus", "kminus"};
    for (const auto& f : out.instance) {
        bool minus = f.rel[0] == 'C' && f.vals == std::vector<Value>{"0", "0", "0"};
        out.policy.table[f] = {minus ? "kminus" : "kplus"};
    }
    return out;
}

std::pair<Query, ExplicitPolicy> reduce_pi2qbf_to_pc(const QBF& phi) {
    auto v = reduce_pi2qbf_to_pci(phi);
    return {v.query, v.policy};
}

QueryPair reduce_pi3qbf_to_transfer(const QBF& phi) {
    if (phi.matrix != QBF::Matrix::DNF) throw std::invalid_argument("expected a DNF matrix");
    if (phi.clauses.empty()) throw std::invalid_argument("formula needs at least one clause");
    auto lay = layout(phi, {true, false, true}, "xyz", "forall-exists-forall");
    const auto& xs = lay.groups[0];
    const auto& ys = lay.groups[1];
    const std::size_t k = phi.clauses.size();

    std::vector<Atom> fix;
    for (std::size_t i = 0; i < xs.size(); ++i) fix.push_back(atom("XVal" + std::to_string(i + 1), {lay.name.at(xs[i])}));
    fix.push_back(atom("True", {"w1"}));
    fix.push_back(atom("False", {"w0"}));

    std::vector<Atom> bp = fix, bq = fix;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        std::string rel = "YVal" + std::to_string(i + 1);
        const auto& y = lay.name.at(ys[i]);
        bp.push_back(atom(rel, {"w1"}));
        bp.push_back(atom(rel, {"w0"}));
        bq.push_back(atom(rel, {y}));
        bq.push_back(atom(rel, {"n" + y}));
    }
    bp.push_back(atom("Res", {"w1"}));
    bq.push_back(atom("Res", {"w0"}));
    bq.push_back(atom("Res", {"r" + std::to_string(k)}));

    // Gates: truth tables of negation, 3-way and, and the or-chain's 2-way or.
    bq.push_back(atom("Neg", {"w0", "w1"}));
    bq.push_back(atom("Neg", {"w1", "w0"}));
    for (int b = 0; b < 8; ++b) {
        int a1 = b & 1, a2 = (b >> 1) & 1, a3 = (b >> 2) & 1;
        auto w = [](int bit) { return bit ? std::string("w1") : std::string("w0"); };
        bq.push_back(atom("And", {w(a1), w(a2), w(a3), w(a1 & a2 & a3)}));
    }
    for (int b = 0; b < 4; ++b) {
        int a1 = b & 1, a2 = (b >> 1) & 1;
        auto w = [](int bit) { return bit ? std::string("w1") : std::string("w0"); };
        bq.push_back(atom("Or", {w(a1), w(a2), w(a1 | a2)}));
    }
    // Circuit.
    for (const auto& g : lay.groups)
        for (int v : g) bq.push_back(atom("Neg", {lay.name.at(v), "n" + lay.name.at(v)}));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Var> args;
        for (int l : padded(phi.clauses[j])) args.push_back(lit_var(lay, l));
        args.push_back("s" + std::to_string(j + 1));
        bq.push_back(atom("And", args));
        std::string prev = j == 0 ? "s1" : "r" + std::to_string(j);
        bq.push_back(atom("Or", {prev, "s" + std::to_string(j + 1), "r" + std::to_string(j + 1)}));
    }

    std::vector<Var> hp, hq;
    for (int x : xs) hp.push_back(lay.name.at(x));
    hq = hp;
    for (int y : ys) hq.push_back(lay.name.at(y));
    for (auto* h : {&hp, &hq}) {
        h->push_back("w1");
        h->push_back("w0");
    }
    return {make_query(atom("H", hq), bq, "Q"), make_query(atom("H", hp), bp, "Qprime")};
}

Query reduce_3sat_to_strongmin(const QBF& phi) {
    if (phi.matrix != QBF::Matrix::CNF) throw std::invalid_argument("expected a CNF matrix");
    if (phi.clauses.empty()) throw std::invalid_argument("formula needs at least one clause");
    QBF plain = phi;
    plain.blocks.clear();
    // All variables as one existential group named x1, x2, ...
    std::set<int> used;
    for (const auto& c : plain.clauses)
        for (int l : c) used.insert(std::abs(l));
    plain.blocks.push_back({false, std::vector<int>(used.begin(), used.end())});
    auto lay = layout(plain, {false}, "x", "a plain CNF");

    std::vector<Var> head{"w1", "w0"};
    for (int v : lay.groups[0]) {
        head.push_back(lay.name.at(v));
        head.push_back("n" + lay.name.at(v));
    }
    std::vector<Atom> body{atom("Val", {"r0", "r1"}), atom("Val", {"r1", "r0"})};
    auto rep = [&](int l) -> std::pair<Var, Var> {
        auto x = lay.name.at(std::abs(l));
        return l > 0 ? std::pair<Var, Var>{x, "n" + x} : std::pair<Var, Var>{"n" + x, x};
    };
    for (std::size_t j = 0; j < plain.clauses.size(); ++j) {
        std::string rel = "C" + std::to_string(j + 1);
        for (const auto& t : nonzero_triples()) {
            std::vector<Var> args{"w1", "w0"};
            for (int b : t) {
                args.push_back(b ? "w1" : "w0");
                args.push_back(b ? "w0" : "w1");
            }
            body.push_back(atom(rel, args));
        }
        std::vector<Var> args{"r1", "r0"};
        for (int l : padded(plain.clauses[j])) {
            auto [a, b] = rep(l);
            args.push_back(a);
            args.push_back(b);
        }
        body.push_back(atom(rel, args));
    }
    return make_query(atom("H", head), body, "Q");
}

namespace {

const std::vector<std::pair<std::string, std::string>>& color_pairs() {
    static const std::vector<std::pair<std::string, std::string>> pairs{{"r", "g"}, {"r", "b"}, {"g", "r"},
                                                                         {"g", "b"}, {"b", "r"}, {"b", "g"}};
    return pairs;
}

void check_loops(const Graph& g) {
    for (const auto& [a, b] : g.edges)
        if (a == b) throw std::invalid_argument("self-loop on vertex " + a + " can never be colored");
}

}  // namespace

QueryPair reduce_3col_to_c3_variant1(const Graph& g) {
    check_loops(g);
    std::vector<Atom> q, qp;
    for (const auto& [c, d] : color_pairs()) q.push_back(atom("E", {c, d}));
    q.push_back(atom("Fix", {"r", "g", "b"}));
    qp = q;
    for (const auto& [a, b] : g.edges) qp.push_back(atom("E", {"v" + a, "v" + b}));
    return {make_query(atom("H", {}), q, "Q"), make_query(atom("H", {}), qp, "Qprime")};
}

QueryPair reduce_3col_to_c3_variant2(const Graph& g) {
    check_loops(g);
    const std::size_t m = g.edges.size();
    if (m < 2) throw std::invalid_argument("variant 2 needs at least two edges");
    auto z = [](std::size_t i) { return "z" + std::to_string(i); };
    std::vector<Atom> q, qp;
    for (std::size_t i = 1; i < m; ++i) {
        auto f = atom("Fix", {z(i), z(i + 1), "r", "g", "b"});
        q.push_back(f);
        qp.push_back(f);
    }
    for (std::size_t i = 1; i <= m; ++i) {
        for (const auto& [c, d] : color_pairs()) qp.push_back(atom("E", {z(i), c, d}));
        const auto& [a, b] = g.edges[i - 1];
        q.push_back(atom("E", {z(i), "v" + a, "v" + b}));
        // Five free atoms per label; the w indices follow 1..10.
        for (int w = 1; w <= 9; w += 2)
            q.push_back(atom("E", {z(i), "wz" + std::to_string(i) + "_" + std::to_string(w),
                                   "wz" + std::to_string(i) + "_" + std::to_string(w + 1)}));
    }
    return {make_query(atom("H", {}), q, "Q"), make_query(atom("H", {}), qp, "Qprime")};
}

}  // namespace pclab
