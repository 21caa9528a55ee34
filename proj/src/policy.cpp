#include "pclab/policy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pclab {

HypercubePolicy HypercubePolicy::make(const Query& q, const std::map<Var, std::map<Value, std::string>>& tables) {
    HypercubePolicy p;
    p.query = q;
    p.vars = q.vars();
    for (const auto& v : p.vars) {
        auto it = tables.find(v);
        if (it == tables.end()) throw SchemaError("hypercube policy has no hash table for variable " + v);
        p.hash.push_back(it->second);
        std::set<std::string> image;
        for (const auto& [val, bucket] : it->second) image.insert(bucket);
        p.buckets.emplace_back(image.begin(), image.end());
    }
    for (const auto& [v, table] : tables)
        if (std::find(p.vars.begin(), p.vars.end(), v) == p.vars.end())
            throw SchemaError("hash table for " + v + ", which is not a variable of the query");
    return p;
}

std::size_t HypercubePolicy::address_count() const {
    std::size_t n = 1;
    for (const auto& b : buckets) n *= b.size();
    return n;
}

std::string address_name(const std::vector<std::string>& coords) {
    std::string s = "(";
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i) s += ",";
        s += coords[i];
    }
    return s + ")";
}

namespace {

void product(const std::vector<std::vector<std::string>>& choices, std::vector<std::string>& cur, std::size_t i,
             NodeSet& out) {
    if (i == choices.size()) {
        out.insert(address_name(cur));
        return;
    }
    for (const auto& c : choices[i]) {
        cur[i] = c;
        product(choices, cur, i + 1, out);
    }
}

NodeSet resolve_hypercube(const HypercubePolicy& p, const Fact& f, std::vector<std::string>* warnings) {
    NodeSet out;
    for (const auto& a : p.query.body) {
        if (a.rel != f.rel || a.args.size() != f.vals.size()) continue;
        std::map<Var, Value> bind;
        bool ok = true;
        for (std::size_t i = 0; i < a.args.size() && ok; ++i) {
            auto [it, fresh] = bind.emplace(a.args[i], f.vals[i]);
            if (!fresh && it->second != f.vals[i]) ok = false;
        }
        if (!ok) continue;
        std::vector<std::vector<std::string>> choices(p.vars.size());
        for (std::size_t c = 0; c < p.vars.size() && ok; ++c) {
            auto b = bind.find(p.vars[c]);
            if (b == bind.end()) {
                choices[c] = p.buckets[c];
                continue;
            }
            auto h = p.hash[c].find(b->second);
            if (h == p.hash[c].end()) {
                if (warnings)
                    warnings->push_back("value " + b->second + " is outside the hash domain of " + p.vars[c] +
                                        "; " + to_string(f) + " skipped by atom " + to_string(a));
                ok = false;
                break;
            }
            choices[c] = {h->second};
        }
        if (!ok) continue;
        std::vector<std::string> cur(p.vars.size());
        product(choices, cur, 0, out);
    }
    return out;
}

}  // namespace

NodeSet resolve(const Policy& p, const Fact& f, std::vector<std::string>* warnings) {
    if (auto e = std::get_if<ExplicitPolicy>(&p)) {
        auto it = e->table.find(f);
        return it == e->table.end() ? NodeSet{} : it->second;
    }
    if (auto c = std::get_if<CofinitePolicy>(&p)) {
        auto it = c->exceptions.find(f);
        return it == c->exceptions.end() ? c->default_nodes : it->second;
    }
    return resolve_hypercube(std::get<HypercubePolicy>(p), f, warnings);
}

std::vector<NodeId> network(const Policy& p) {
    if (auto e = std::get_if<ExplicitPolicy>(&p)) return e->network;
    if (auto c = std::get_if<CofinitePolicy>(&p)) return c->network;
    const auto& h = std::get<HypercubePolicy>(p);
    NodeSet all;
    std::vector<std::string> cur(h.vars.size());
    product(h.buckets, cur, 0, all);
    return {all.begin(), all.end()};
}

Chunking distribute(const Policy& p, const Instance& inst, std::vector<std::string>* warnings) {
    Chunking out;
    if (!std::holds_alternative<HypercubePolicy>(p))
        for (const auto& n : network(p)) out[n];
    for (const auto& f : inst)
        for (const auto& n : resolve(p, f, warnings)) out[n].insert(f);
    return out;
}

GenerosityVerdict is_generous_for(const Policy& p, const Query& q, const BoundedDomain& d) {
    GenerosityVerdict out;
    for (const auto& v : enumerate_valuations(q, d)) {
        auto body = apply_valuation(v, q).second;
        std::optional<NodeSet> meet;
        for (const auto& f : body) {
            auto nodes = resolve(p, f);
            if (!meet) {
                meet = std::move(nodes);
            } else {
                NodeSet both;
                std::set_intersection(meet->begin(), meet->end(), nodes.begin(), nodes.end(),
                                      std::inserter(both, both.begin()));
                meet = std::move(both);
            }
            if (meet->empty()) break;
        }
        if (!meet || meet->empty()) {
            out.holds = false;
            out.witness = v;
            return out;
        }
    }
    return out;
}

HypercubePolicy scattered_witness_policy(const Query& q, const Instance& inst) {
    if (inst.empty()) throw std::invalid_argument("scattered witness policy needs a nonempty instance");
    std::map<Value, std::string> identity;
    for (const auto& v : adom(inst)) identity[v] = v;
    std::map<Var, std::map<Value, std::string>> tables;
    for (const auto& v : q.vars()) tables[v] = identity;
    return HypercubePolicy::make(q, tables);
}

Instance facts_of(const ExplicitPolicy& p) {
    Instance out;
    for (const auto& [f, nodes] : p.table)
        if (!nodes.empty()) out.insert(f);
    return out;
}

ExplicitPolicy materialize(const HypercubePolicy& p) {
    ExplicitPolicy e;
    e.network = network(Policy{p});
    std::set<Value> domain;
    for (const auto& t : p.hash)
        for (const auto& [v, b] : t) domain.insert(v);
    std::vector<Value> dom(domain.begin(), domain.end());
    for (const auto& [rel, ar] : schema_of(p.query)) {
        std::vector<std::size_t> idx(ar, 0);
        if (ar > 0 && dom.empty()) continue;
        for (;;) {
            Fact f{rel, {}};
            for (auto i : idx) f.vals.push_back(dom[i]);
            auto nodes = resolve(Policy{p}, f);
            if (!nodes.empty()) e.table[f] = nodes;
            std::size_t k = ar;
            while (k > 0) {
                --k;
                if (++idx[k] < dom.size()) break;
                idx[k] = 0;
                if (k == 0) {
                    k = ar + 1;
                    break;
                }
            }
            if (ar == 0 || k == ar + 1) break;
        }
    }
    return e;
}

ExplicitPolicy expand(const CofinitePolicy& p, const Instance& universe) {
    ExplicitPolicy e;
    e.network = p.network;
    for (const auto& f : universe) {
        auto nodes = resolve(Policy{p}, f);
        if (!nodes.empty()) e.table[f] = nodes;
    }
    return e;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Policy parse_policy(const std::string& text, const std::map<std::string, Query>& queries) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::optional<std::vector<NodeId>> net;
    std::optional<NodeSet> deflt;
    std::map<Fact, NodeSet> table;
    std::optional<std::string> hyper_for;
    int hyper_line = 0;
    std::map<Var, std::map<Value, std::string>> tables;
    std::set<NodeId> used;

    for (; std::getline(in, raw); ) {
        ++lineno;
        auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        auto words = split_ws(line);
        const std::string& kw = words[0];
        if (kw == "network") {
            if (net) throw ParseError("network declared twice", lineno, 1);
            std::vector<NodeId> nodes(words.begin() + 1, words.end());
            if (nodes.empty()) throw ParseError("network must be nonempty", lineno, 1);
            std::set<NodeId> uniq(nodes.begin(), nodes.end());
            if (uniq.size() != nodes.size()) throw ParseError("duplicate node in network", lineno, 1);
            net = nodes;
            continue;
        }
        if (kw == "hypercube") {
            if (words.size() != 3 || words[1] != "for") throw ParseError("expected 'hypercube for <query>'", lineno, 1);
            hyper_for = words[2];
            hyper_line = lineno;
            continue;
        }
        if (kw == "hash") {
            // hash x : a->1 b->2
            if (words.size() < 3 || words[2] != ":") throw ParseError("expected 'hash <var> : v->bucket ...'", lineno, 1);
            auto& t = tables[words[1]];
            for (std::size_t i = 3; i < words.size(); ++i) {
                auto arrow = words[i].find("->");
                if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= words[i].size())
                    throw ParseError("bad hash entry '" + words[i] + "'", lineno, 1);
                if (!t.emplace(words[i].substr(0, arrow), words[i].substr(arrow + 2)).second)
                    throw ParseError("value hashed twice for " + words[1], lineno, 1);
            }
            continue;
        }
        auto at = line.find('@');
        if (at == std::string::npos) throw ParseError("expected '<fact> @ <nodes>'", lineno, 1);
        std::string lhs = trim(line.substr(0, at));
        auto rhs = split_ws(line.substr(at + 1));
        NodeSet nodes;
        if (!(rhs.size() == 1 && rhs[0] == "-")) {
            for (const auto& n : rhs) {
                if (n == "-") throw ParseError("'-' must stand alone", lineno, static_cast<int>(at) + 1);
                nodes.insert(n);
                used.insert(n);
            }
        }
        if (lhs == "default") {
            if (deflt) throw ParseError("default declared twice", lineno, 1);
            deflt = nodes;
            continue;
        }
        Instance one;
        try {
            one = parse_instance(lhs);
        } catch (const ParseError& e) {
            throw ParseError(std::string("bad fact: ") + e.what(), lineno, 1);
        }
        if (one.size() != 1) throw ParseError("expected exactly one fact before '@'", lineno, 1);
        if (!table.emplace(*one.begin(), nodes).second) throw ParseError("fact listed twice", lineno, 1);
    }

    if (hyper_for) {
        if (!table.empty() || deflt) throw ParseError("hypercube policies take only hash lines", hyper_line, 1);
        auto it = queries.find(*hyper_for);
        if (it == queries.end()) throw ParseError("unknown query '" + *hyper_for + "'", hyper_line, 1);
        try {
            return HypercubePolicy::make(it->second, tables);
        } catch (const SchemaError& e) {
            throw ParseError(e.what(), hyper_line, 1);
        }
    }
    if (!tables.empty()) throw ParseError("hash lines need a 'hypercube for' line", 1, 1);
    std::vector<NodeId> nodes;
    if (net) {
        nodes = *net;
        std::set<NodeId> known(nodes.begin(), nodes.end());
        for (const auto& n : used)
            if (!known.count(n)) throw ParseError("node " + n + " is not in the network", 1, 1);
    } else {
        nodes.assign(used.begin(), used.end());
        if (nodes.empty()) throw ParseError("policy has no nodes", 1, 1);
    }
    if (deflt) return CofinitePolicy{nodes, *deflt, table};
    ExplicitPolicy e{nodes, {}};
    for (auto& [f, ns] : table)
        if (!ns.empty()) e.table.emplace(f, ns);
    return e;
}

namespace {

std::string nodes_text(const NodeSet& ns) {
    if (ns.empty()) return "-";
    std::string s;
    for (const auto& n : ns) s += (s.empty() ? "" : " ") + n;
    return s;
}

std::string network_line(const std::vector<NodeId>& net) {
    std::string s = "network";
    for (const auto& n : net) s += " " + n;
    return s + "\n";
}

}  // namespace

std::string to_string(const Policy& p) {
    std::string s;
    if (auto e = std::get_if<ExplicitPolicy>(&p)) {
        s += network_line(e->network);
        for (const auto& [f, ns] : e->table) s += to_string(f) + " @ " + nodes_text(ns) + "\n";
        return s;
    }
    if (auto c = std::get_if<CofinitePolicy>(&p)) {
        s += network_line(c->network);
        s += "default @ " + nodes_text(c->default_nodes) + "\n";
        for (const auto& [f, ns] : c->exceptions) s += to_string(f) + " @ " + nodes_text(ns) + "\n";
        return s;
    }
    const auto& h = std::get<HypercubePolicy>(p);
    s += "hypercube for " + (h.query.name.empty() ? std::string("Q") : h.query.name) + "\n";
    for (std::size_t i = 0; i < h.vars.size(); ++i) {
        s += "hash " + h.vars[i] + " :";
        for (const auto& [v, b] : h.hash[i]) s += " " + v + "->" + b;
        s += "\n";
    }
    return s;
}

}  // namespace pclab
