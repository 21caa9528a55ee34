#include "pclab/pc.hpp"

#include <algorithm>
#include <stdexcept>

#include "engine.hpp"
#include "pclab/simulator.hpp"

namespace pclab {

using detail::CQuery;
using detail::GFact;

bool check_c0(const Query& q, const Policy& p, const BoundedDomain& d) { return is_generous_for(p, q, d).holds; }

namespace {

bool meets(const Policy& p, const Instance& facts) {
    std::optional<NodeSet> meet;
    for (const auto& f : facts) {
        auto nodes = resolve(p, f);
        if (!meet) {
            meet = std::move(nodes);
        } else {
            NodeSet both;
            std::set_intersection(meet->begin(), meet->end(), nodes.begin(), nodes.end(),
                                  std::inserter(both, both.begin()));
            meet = std::move(both);
        }
        if (meet->empty()) return false;
    }
    return meet.has_value();
}

struct Coded {
    detail::Interner rels, vals;
    CQuery cq;

    Valuation decode(const std::vector<int>& assign) const {
        Valuation v;
        for (std::size_t i = 0; i < cq.var_names.size(); ++i) v[cq.var_names[i]] = vals.name(assign[i]);
        return v;
    }
    Fact decode(const GFact& g) const {
        Fact f{rels.name(g.rel), {}};
        for (int x : g.vals) f.vals.push_back(vals.name(x));
        return f;
    }
    Instance decode(const std::vector<GFact>& gs) const {
        Instance out;
        for (const auto& g : gs) out.insert(decode(g));
        return out;
    }
    GFact encode(const Fact& f) {
        GFact g{rels.get(f.rel), {}};
        for (const auto& v : f.vals) g.vals.push_back(vals.get(v));
        return g;
    }
};

// First minimal valuation into `facts` (optionally with a fixed head) whose
// required facts do not meet.
std::optional<Valuation> failing_minimal_into(const Query& q, const Policy& p, const Instance& facts,
                                              const std::optional<Fact>& head = std::nullopt) {
    Coded c;
    c.cq = detail::compile(q, c.rels);
    auto schema = schema_of(q);
    std::vector<GFact> gs;
    for (const auto& f : facts) {
        auto it = schema.find(f.rel);
        if (it == schema.end() || it->second != f.vals.size()) continue;
        gs.push_back(c.encode(f));
    }
    detail::FactIndex idx(std::move(gs), c.rels.size());
    std::vector<int> assign(static_cast<std::size_t>(c.cq.nvars()), -1);
    if (head) {
        if (head->vals.size() != c.cq.head.args.size()) return std::nullopt;
        for (std::size_t i = 0; i < head->vals.size(); ++i) {
            int val = c.vals.get(head->vals[i]);
            int& slot = assign[static_cast<std::size_t>(c.cq.head.args[i])];
            if (slot >= 0 && slot != val) return std::nullopt;
            slot = val;
        }
    }
    std::optional<Valuation> out;
    detail::for_each_match(c.cq, idx, assign, [&](const std::vector<int>& a, const std::vector<int>&) {
        auto img = detail::image(c.cq, a);
        if (meets(p, c.decode(img))) return false;
        if (detail::smaller_valuation(c.cq, a)) return false;
        out = c.decode(a);
        return true;
    });
    return out;
}

PCVerdict failing(const Query& q, Valuation v) {
    PCVerdict r;
    r.holds = false;
    r.instance = apply_valuation(v, q).second;
    r.valuation = std::move(v);
    return r;
}

// Conflict sets: minimal sets of exception facts, optionally together with
// "some non-exception fact", whose node sets have an empty intersection. A
// valuation fails exactly when its facts contain one.
struct ConflictSet {
    std::vector<Fact> exceptions;
    bool with_default = false;
};

std::vector<ConflictSet> minimal_conflicts(const CofinitePolicy& p, const std::vector<Fact>& exc, std::size_t max_size) {
    std::vector<ConflictSet> out;
    std::vector<NodeSet> nodes;
    for (const auto& f : exc) nodes.push_back(p.exceptions.at(f));
    nodes.push_back(p.default_nodes);  // index exc.size() = the default
    std::size_t n = nodes.size();

    auto empty_meet = [&](const std::vector<std::size_t>& pick, std::size_t skip) {
        std::optional<NodeSet> m;
        for (std::size_t k = 0; k < pick.size(); ++k) {
            if (k == skip) continue;
            const auto& s = nodes[pick[k]];
            if (!m) {
                m = s;
            } else {
                NodeSet both;
                std::set_intersection(m->begin(), m->end(), s.begin(), s.end(), std::inserter(both, both.begin()));
                m = std::move(both);
            }
        }
        return m && m->empty();
    };

    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (!pick.empty() && empty_meet(pick, pick.size())) {
            for (std::size_t k = 0; k < pick.size(); ++k)
                if (pick.size() > 1 && empty_meet(pick, k)) return;
            ConflictSet cs;
            for (auto i : pick) {
                if (i == exc.size())
                    cs.with_default = true;
                else
                    cs.exceptions.push_back(exc[i]);
            }
            out.push_back(std::move(cs));
            return;
        }
        if (pick.size() == max_size) return;
        for (std::size_t i = from; i < n; ++i) {
            pick.push_back(i);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);
    return out;
}

PCVerdict pc_cofinite(const Query& q, const CofinitePolicy& p) {
    auto schema = schema_of(q);
    std::vector<Fact> exc;
    for (const auto& [f, ns] : p.exceptions) {
        auto it = schema.find(f.rel);
        if (it != schema.end() && it->second == f.vals.size()) exc.push_back(f);
    }
    Coded c;
    c.cq = detail::compile(q, c.rels);
    std::vector<int> pool;
    {
        Instance ex(exc.begin(), exc.end());
        for (const auto& v : adom(ex)) pool.push_back(c.vals.get(v));
    }
    const int fresh_base = c.vals.size();
    const int budget = c.cq.nvars();
    // Readable names for fresh values, avoiding clashes with the pool.
    std::vector<std::string> fresh_names;
    for (int n = 1; static_cast<int>(fresh_names.size()) < budget; ++n) {
        std::string s = "n" + std::to_string(n);
        if (c.vals.find(s) < 0) fresh_names.push_back(s);
    }
    for (const auto& s : fresh_names) c.vals.get(s);
    Policy pol{p};

    for (const auto& cs : minimal_conflicts(p, exc, c.cq.body.size())) {
        detail::CoverSpec spec;
        for (const auto& f : cs.exceptions) spec.must.push_back(c.encode(f));
        std::sort(spec.must.begin(), spec.must.end());
        spec.pool = pool;
        spec.fresh_base = fresh_base;
        spec.fresh_budget = budget;
        spec.accept = [&](const std::vector<int>&, const std::vector<GFact>& img) { return !meets(pol, c.decode(img)); };
        if (auto a = detail::find_minimal_cover(c.cq, spec)) return failing(q, c.decode(*a));
    }
    return {};
}

}  // namespace

PCVerdict is_parallel_correct(const Query& q, const Policy& p) {
    if (auto c = std::get_if<CofinitePolicy>(&p)) return pc_cofinite(q, *c);
    if (auto h = std::get_if<HypercubePolicy>(&p)) return is_parallel_correct(q, Policy{materialize(*h)});
    const auto& e = std::get<ExplicitPolicy>(p);
    if (auto v = failing_minimal_into(q, p, facts_of(e))) return failing(q, *v);
    return {};
}

PCVerdict is_parallel_correct_on_instance(const Query& q, const Instance& inst, const Policy& p, InstanceMode mode) {
    if (mode == InstanceMode::Hereditary) {
        if (auto v = failing_minimal_into(q, p, inst)) return failing(q, *v);
        return {};
    }
    auto run = one_round_evaluate(q, p, inst);
    if (run.equal) return {};
    PCVerdict r;
    r.holds = false;
    r.instance = inst;
    r.valuation = failing_minimal_into(q, p, inst, *run.missing.begin());
    return r;
}

}  // namespace pclab
