#include "pclab/valuation.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "engine.hpp"

namespace pclab {

using detail::CQuery;
using detail::GFact;

BoundedDomain BoundedDomain::of_size(std::size_t k) {
    BoundedDomain d;
    for (std::size_t i = 1; i <= k; ++i) d.values.push_back(std::to_string(i));
    return d;
}

bool leq_q(const Query& q, const Valuation& v1, const Valuation& v2) {
    auto [h1, b1] = apply_valuation(v1, q);
    auto [h2, b2] = apply_valuation(v2, q);
    return h1 == h2 && std::includes(b2.begin(), b2.end(), b1.begin(), b1.end());
}

bool lt_q(const Query& q, const Valuation& v1, const Valuation& v2) {
    auto [h1, b1] = apply_valuation(v1, q);
    auto [h2, b2] = apply_valuation(v2, q);
    return h1 == h2 && b1.size() < b2.size() && std::includes(b2.begin(), b2.end(), b1.begin(), b1.end());
}

MinimalityVerdict is_minimal_valuation(const Query& q, const Valuation& v) {
    detail::Interner rels, vals;
    CQuery cq = detail::compile(q, rels);
    std::vector<int> assign;
    for (const auto& name : cq.var_names) {
        auto it = v.find(name);
        if (it == v.end()) throw std::invalid_argument("valuation is not defined on variable " + name);
        assign.push_back(vals.get(it->second));
    }
    MinimalityVerdict out;
    if (auto w = detail::smaller_valuation(cq, assign)) {
        out.holds = false;
        Valuation smaller;
        for (std::size_t i = 0; i < cq.var_names.size(); ++i) smaller[cq.var_names[i]] = vals.name((*w)[i]);
        out.witness = ValuationOrderWitness{smaller, v};
    }
    return out;
}

std::vector<Valuation> enumerate_valuations(const Query& q, const BoundedDomain& d) {
    std::vector<Valuation> out;
    auto vars = q.vars();
    if (d.values.empty()) return out;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (;;) {
        Valuation v;
        for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = d.values[idx[i]];
        out.push_back(std::move(v));
        std::size_t p = vars.size();
        while (p > 0) {
            --p;
            if (++idx[p] < d.values.size()) break;
            idx[p] = 0;
            if (p == 0) return out;
        }
        if (vars.empty()) return out;
    }
}

std::vector<Valuation> enumerate_minimal_valuations(const Query& q, const BoundedDomain& d) {
    std::vector<Valuation> out;
    for (auto& v : enumerate_valuations(q, d))
        if (is_minimal_valuation(q, v).holds) out.push_back(std::move(v));
    return out;
}

namespace {

// Union-find with rollback over unification terms.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
        for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
    }
    int find(int x) const {
        while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        history_.push_back(b);
    }
    std::size_t mark() const { return history_.size(); }
    void rollback(std::size_t m) {
        while (history_.size() > m) {
            int b = history_.back();
            history_.pop_back();
            int a = parent_[static_cast<std::size_t>(b)];
            size_[static_cast<std::size_t>(a)] -= size_[static_cast<std::size_t>(b)];
            parent_[static_cast<std::size_t>(b)] = b;
        }
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<int> history_;
};

// Q is not strongly minimal iff there are V, W agreeing on the head with
// W(body) ⊊ V(body). Pick, for each atom A containing a non-head variable,
// an atom sigma(A) with W(A) = V(sigma(A)); the most general unifier of those
// equations is a solution iff some atom B* keeps V(B*) outside W(body).
// Head-only atoms satisfy W(A) = V(A) for free.
class StrongMinSearch {
public:
    explicit StrongMinSearch(const CQuery& q) : q_(q), n_(q.nvars()), uf_(2 * q.nvars()) {
        for (std::size_t i = 0; i < q_.body.size(); ++i) {
            bool has_free = false;
            for (int v : q_.body[i].args)
                if (!q_.is_head[static_cast<std::size_t>(v)]) has_free = true;
            (has_free ? free_atoms_ : head_atoms_).push_back(static_cast<int>(i));
        }
    }

    // Returns the class representative per term, or nothing if strongly minimal.
    std::optional<std::vector<int>> run() {
        for (int b : free_atoms_) {
            target_ = b;
            sigma_.assign(q_.body.size(), -1);
            if (dfs()) {
                std::vector<int> cls(static_cast<std::size_t>(2 * n_));
                for (int t = 0; t < 2 * n_; ++t) cls[static_cast<std::size_t>(t)] = uf_.find(t);
                return cls;
            }
        }
        return std::nullopt;
    }

    int n() const { return n_; }

private:
    const CQuery& q_;
    int n_;
    UnionFind uf_;
    std::vector<int> free_atoms_;
    std::vector<int> head_atoms_;
    std::vector<int> sigma_;
    int target_ = -1;

    int v_term(int var) const { return var; }
    int w_term(int var) const { return q_.is_head[static_cast<std::size_t>(var)] ? var : n_ + var; }

    bool v_equal(int a, int b) const {
        const auto& x = q_.body[static_cast<std::size_t>(a)];
        const auto& y = q_.body[static_cast<std::size_t>(b)];
        if (x.rel != y.rel) return false;
        for (std::size_t i = 0; i < x.args.size(); ++i)
            if (uf_.find(v_term(x.args[i])) != uf_.find(v_term(y.args[i]))) return false;
        return true;
    }

    bool target_hit() const {
        for (int a : head_atoms_)
            if (v_equal(target_, a)) return true;
        for (int a : free_atoms_) {
            int s = sigma_[static_cast<std::size_t>(a)];
            if (s >= 0 && v_equal(target_, s)) return true;
        }
        return false;
    }

    void bind(int a, int c) {
        const auto& x = q_.body[static_cast<std::size_t>(a)];
        const auto& y = q_.body[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < x.args.size(); ++i) uf_.unite(w_term(x.args[i]), v_term(y.args[i]));
        sigma_[static_cast<std::size_t>(a)] = c;
    }

    void unbind(int a, std::size_t mark) {
        uf_.rollback(mark);
        sigma_[static_cast<std::size_t>(a)] = -1;
    }

    std::vector<int> viable(int a) {
        std::vector<int> out;
        for (std::size_t c = 0; c < q_.body.size(); ++c) {
            if (q_.body[c].rel != q_.body[static_cast<std::size_t>(a)].rel) continue;
            std::size_t m = uf_.mark();
            bind(a, static_cast<int>(c));
            if (!target_hit()) out.push_back(static_cast<int>(c));
            unbind(a, m);
        }
        return out;
    }

    bool dfs() {
        if (target_hit()) return false;
        int pick = -1;
        std::vector<int> pick_opts;
        for (int a : free_atoms_) {
            if (sigma_[static_cast<std::size_t>(a)] >= 0) continue;
            auto opts = viable(a);
            if (opts.empty()) return false;
            if (pick < 0 || opts.size() < pick_opts.size()) {
                pick = a;
                pick_opts = std::move(opts);
            }
        }
        if (pick < 0) return true;
        for (int c : pick_opts) {
            std::size_t m = uf_.mark();
            bind(pick, c);
            if (dfs()) return true;
            unbind(pick, m);
        }
        return false;
    }
};

}  // namespace

MinimalityVerdict is_strongly_minimal(const Query& q) {
    detail::Interner rels;
    CQuery cq = detail::compile(q, rels);
    StrongMinSearch s(cq);
    MinimalityVerdict out;
    auto cls = s.run();
    if (!cls) return out;
    out.holds = false;
    int n = s.n();
    std::map<int, std::string> names;
    auto value_of = [&](int term) {
        int c = (*cls)[static_cast<std::size_t>(term)];
        auto it = names.find(c);
        if (it != names.end()) return it->second;
        std::string v = "c" + std::to_string(names.size() + 1);
        names.emplace(c, v);
        return v;
    };
    Valuation larger, smaller;
    for (int v = 0; v < n; ++v) larger[cq.var_names[static_cast<std::size_t>(v)]] = value_of(v);
    for (int v = 0; v < n; ++v)
        smaller[cq.var_names[static_cast<std::size_t>(v)]] = value_of(cq.is_head[static_cast<std::size_t>(v)] ? v : n + v);
    out.witness = ValuationOrderWitness{smaller, larger};
    return out;
}

bool strong_minimality_sufficient(const Query& q) {
    std::map<std::string, int> count;
    for (const auto& a : q.body) ++count[a.rel];
    std::vector<const Atom*> self_join;
    for (const auto& a : q.body)
        if (count[a.rel] > 1) self_join.push_back(&a);
    for (const Atom* a : self_join)
        for (std::size_t i = 0; i < a->args.size(); ++i) {
            const Var& x = a->args[i];
            if (q.is_head_var(x)) continue;
            for (const Atom* b : self_join)
                if (i >= b->args.size() || b->args[i] != x) return false;
        }
    return true;
}

namespace {

// A homomorphism from q into `target` (atoms over q's variables) with the
// variables in `fixed` mapped to themselves.
std::optional<Substitution> hom_into(const Query& q, const std::vector<Atom>& target, const std::set<Var>& fixed) {
    detail::Interner rels, names;
    CQuery cq = detail::compile(q, rels);
    std::vector<GFact> facts;
    for (const auto& a : target) {
        GFact f;
        f.rel = rels.get(a.rel);
        for (const auto& v : a.args) f.vals.push_back(names.get(v));
        facts.push_back(std::move(f));
    }
    detail::FactIndex idx(std::move(facts), rels.size());
    std::vector<int> assign(static_cast<std::size_t>(cq.nvars()), -1);
    for (std::size_t i = 0; i < cq.var_names.size(); ++i)
        if (fixed.count(cq.var_names[i])) assign[i] = names.get(cq.var_names[i]);
    std::optional<Substitution> out;
    detail::for_each_match(cq, idx, assign, [&](const std::vector<int>& a, const std::vector<int>&) {
        Substitution s;
        for (std::size_t i = 0; i < cq.var_names.size(); ++i) s[cq.var_names[i]] = names.name(a[i]);
        out = std::move(s);
        return true;
    });
    return out;
}

}  // namespace

Minimized minimize_cq(const Query& q) {
    Query cur = q;
    auto head = q.head_vars();
    std::set<Var> head_set(head.begin(), head.end());
    for (;;) {
        bool changed = false;
        // Single-variable merges in lexicographic order.
        auto vars = cur.vars();
        std::vector<Var> sorted(vars.begin(), vars.end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& x : sorted) {
            if (head_set.count(x)) continue;
            for (const auto& y : sorted) {
                if (y == x) continue;
                Substitution theta = identity_substitution(cur);
                theta[x] = y;
                if (is_simplification(theta, cur)) {
                    cur = apply_substitution(theta, cur);
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
        if (changed) continue;
        // Merges alone can get stuck above the core (e.g. a long cycle folding
        // onto a short one); look for any endomorphism that drops an atom.
        for (std::size_t i = 0; i < cur.body.size() && !changed; ++i) {
            std::vector<Atom> rest;
            for (std::size_t j = 0; j < cur.body.size(); ++j)
                if (j != i) rest.push_back(cur.body[j]);
            if (auto h = hom_into(cur, rest, head_set)) {
                cur = apply_substitution(*h, cur);
                changed = true;
            }
        }
        if (!changed) break;
    }
    Minimized out;
    out.query = cur;
    out.query.name = q.name;
    if (cur.body.size() == q.body.size()) {
        out.folding = identity_substitution(q);
        return out;
    }
    auto core_vars = cur.vars();
    std::set<Var> fixed(core_vars.begin(), core_vars.end());
    fixed.insert(head_set.begin(), head_set.end());
    auto theta = hom_into(q, cur.body, fixed);
    if (!theta) throw std::logic_error("no retraction onto the computed core");
    out.folding = *theta;
    return out;
}

Valuation injective_valuation(const Query& q) {
    Valuation v;
    for (const auto& x : q.vars()) v[x] = x;
    return v;
}

bool injective_valuation_minimality_bridge(const Query& q) {
    bool by_core = minimize_cq(q).query.body.size() == q.body.size();
    bool by_valuation = is_minimal_valuation(q, injective_valuation(q)).holds;
    if (by_core != by_valuation)
        throw std::logic_error("CQ minimality disagrees with minimality of the injective valuation for " + to_string(q));
    return by_core;
}

}  // namespace pclab
