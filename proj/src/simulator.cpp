#include "pclab/simulator.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace pclab {

RunReport one_round_evaluate(const Query& q, const Policy& p, const Instance& inst) {
    RunReport r;
    r.centralized = evaluate(q, inst);
    r.chunks = distribute(p, inst, &r.warnings);
    for (const auto& [node, chunk] : r.chunks) {
        auto out = evaluate(q, chunk);
        r.union_result.insert(out.begin(), out.end());
        r.per_node.emplace(node, std::move(out));
    }
    std::set_difference(r.centralized.begin(), r.centralized.end(), r.union_result.begin(), r.union_result.end(),
                        std::inserter(r.missing, r.missing.begin()));
    r.equal = r.missing.empty() && r.union_result.size() == r.centralized.size();
    return r;
}

namespace {

// All facts over `dom` for the given relations; stops once past `cap`.
void all_facts(const std::map<std::string, std::size_t>& schema, const std::vector<Value>& dom, std::size_t cap,
               Universe& u) {
    for (const auto& [rel, ar] : schema) {
        if (ar > 0 && dom.empty()) continue;
        std::vector<std::size_t> idx(ar, 0);
        for (;;) {
            if (u.facts.size() >= cap) {
                u.capped = true;
                return;
            }
            Fact f{rel, {}};
            for (auto i : idx) f.vals.push_back(dom[i]);
            u.facts.insert(std::move(f));
            std::size_t k = ar;
            for (; k > 0; --k) {
                if (++idx[k - 1] < dom.size()) break;
                idx[k - 1] = 0;
            }
            if (k == 0) break;
        }
    }
}

}  // namespace

Universe sample_universe(const Query& q, const Policy& p, std::size_t cap) {
    Universe u;
    if (auto e = std::get_if<ExplicitPolicy>(&p)) {
        for (const auto& f : facts_of(*e)) {
            if (u.facts.size() >= cap) {
                u.capped = true;
                break;
            }
            u.facts.insert(f);
        }
        return u;
    }
    std::map<std::string, std::size_t> schema = schema_of(q);
    std::set<Value> dom;
    if (auto c = std::get_if<CofinitePolicy>(&p)) {
        Instance exc;
        for (const auto& [f, ns] : c->exceptions) exc.insert(f);
        dom = adom(exc);
        for (const auto& [rel, ar] : schema_of(exc)) schema.emplace(rel, ar);
        for (int made = 0, n = 1; made < 2; ++n) {
            std::string v = "fresh" + std::to_string(n);
            if (dom.insert(v).second) ++made;
        }
        for (const auto& f : exc) {
            if (u.facts.size() >= cap) {
                u.capped = true;
                return u;
            }
            u.facts.insert(f);
        }
    } else {
        const auto& h = std::get<HypercubePolicy>(p);
        for (const auto& [rel, ar] : schema_of(h.query)) schema.emplace(rel, ar);
        for (const auto& t : h.hash)
            for (const auto& [v, b] : t) dom.insert(v);
    }
    all_facts(schema, std::vector<Value>(dom.begin(), dom.end()), cap, u);
    return u;
}

SearchResult search_counterexample(const Query& q, const Policy& p, std::size_t budget, std::uint64_t seed) {
    SearchResult out;
    out.universe = sample_universe(q, p);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < budget; ++t) {
        ++out.trials;
        Instance inst;
        for (const auto& f : out.universe.facts)
            if (rng() >> 63) inst.insert(f);
        if (!one_round_evaluate(q, p, inst).equal) {
            out.counterexample = std::move(inst);
            break;
        }
    }
    return out;
}

}  // namespace pclab
