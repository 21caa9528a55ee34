#include "engine.hpp"

#include <numeric>

namespace pclab::detail {

int Interner::get(const std::string& s) {
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    ids_.emplace(s, id);
    names_.push_back(s);
    return id;
}

int Interner::find(const std::string& s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? -1 : it->second;
}

CQuery compile(const Query& q, Interner& rels) {
    CQuery c;
    std::map<std::string, int> vid;
    auto var_id = [&](const std::string& v) {
        auto it = vid.find(v);
        if (it != vid.end()) return it->second;
        int id = static_cast<int>(c.var_names.size());
        vid.emplace(v, id);
        c.var_names.push_back(v);
        return id;
    };
    auto conv = [&](const Atom& a) {
        CAtom ca;
        ca.rel = rels.get(a.rel);
        for (const auto& v : a.args) ca.args.push_back(var_id(v));
        return ca;
    };
    c.head = conv(q.head);
    for (const auto& a : q.body) c.body.push_back(conv(a));
    c.is_head.assign(c.var_names.size(), 0);
    for (int v : c.head.args) c.is_head[static_cast<std::size_t>(v)] = 1;
    return c;
}

FactIndex::FactIndex(std::vector<GFact> fs, int nrels) : facts(std::move(fs)) {
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    int maxrel = nrels;
    for (const auto& f : facts) maxrel = std::max(maxrel, f.rel + 1);
    by_rel.assign(static_cast<std::size_t>(maxrel), {});
    for (std::size_t i = 0; i < facts.size(); ++i)
        by_rel[static_cast<std::size_t>(facts[i].rel)].push_back(static_cast<int>(i));
}

int FactIndex::id_of(const GFact& f) const {
    auto it = std::lower_bound(facts.begin(), facts.end(), f);
    if (it == facts.end() || *it != f) return -1;
    return static_cast<int>(it - facts.begin());
}

GFact ground(const CAtom& a, const std::vector<int>& assign) {
    GFact f;
    f.rel = a.rel;
    f.vals.reserve(a.args.size());
    for (int v : a.args) f.vals.push_back(assign[static_cast<std::size_t>(v)]);
    return f;
}

std::vector<GFact> image(const CQuery& q, const std::vector<int>& assign) {
    std::vector<GFact> out;
    out.reserve(q.body.size());
    for (const auto& a : q.body) out.push_back(ground(a, assign));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

struct Matcher {
    const CQuery& q;
    const FactIndex& idx;
    std::vector<int>& assign;
    const std::function<bool(const std::vector<int>&, const std::vector<int>&)>& cb;
    std::vector<int> matched;
    std::vector<char> done;
    std::vector<int> trail;

    bool run(std::size_t remaining) {
        if (remaining == 0) return cb(assign, matched);
        // Most bound arguments first, then the smaller relation.
        int best = -1;
        int best_free = 0;
        std::size_t best_size = 0;
        for (std::size_t i = 0; i < q.body.size(); ++i) {
            if (done[i]) continue;
            const auto& a = q.body[i];
            int free_args = 0;
            for (int v : a.args)
                if (assign[static_cast<std::size_t>(v)] < 0) ++free_args;
            std::size_t sz = static_cast<std::size_t>(a.rel) < idx.by_rel.size()
                                 ? idx.by_rel[static_cast<std::size_t>(a.rel)].size()
                                 : 0;
            if (sz == 0) return false;
            if (best < 0 || free_args < best_free || (free_args == best_free && sz < best_size)) {
                best = static_cast<int>(i);
                best_free = free_args;
                best_size = sz;
            }
        }
        const auto& a = q.body[static_cast<std::size_t>(best)];
        done[static_cast<std::size_t>(best)] = 1;
        for (int fid : idx.by_rel[static_cast<std::size_t>(a.rel)]) {
            const auto& f = idx.facts[static_cast<std::size_t>(fid)];
            if (f.vals.size() != a.args.size()) continue;
            std::size_t mark = trail.size();
            bool ok = true;
            for (std::size_t p = 0; p < a.args.size(); ++p) {
                int& slot = assign[static_cast<std::size_t>(a.args[p])];
                if (slot < 0) {
                    slot = f.vals[p];
                    trail.push_back(a.args[p]);
                } else if (slot != f.vals[p]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                matched[static_cast<std::size_t>(best)] = fid;
                if (run(remaining - 1)) {
                    for (std::size_t t = mark; t < trail.size(); ++t) assign[static_cast<std::size_t>(trail[t])] = -1;
                    trail.resize(mark);
                    done[static_cast<std::size_t>(best)] = 0;
                    return true;
                }
            }
            for (std::size_t t = mark; t < trail.size(); ++t) assign[static_cast<std::size_t>(trail[t])] = -1;
            trail.resize(mark);
        }
        done[static_cast<std::size_t>(best)] = 0;
        return false;
    }
};

}  // namespace

bool for_each_match(const CQuery& q, const FactIndex& idx, std::vector<int>& assign,
                    const std::function<bool(const std::vector<int>&, const std::vector<int>&)>& cb) {
    Matcher m{q, idx, assign, cb, std::vector<int>(q.body.size(), -1), std::vector<char>(q.body.size(), 0), {}};
    return m.run(q.body.size());
}

namespace {

// Finds W with W(head) fixed by `assign` and W(body) a strict subset of
// `facts`: some fact is left out, so try to match into facts minus one.
// Each attempt stops at its first match, which keeps the search shallow.
std::optional<std::vector<int>> strictly_inside(const CQuery& q, const std::vector<int>& assign,
                                                const std::vector<GFact>& facts) {
    std::vector<int> w(static_cast<std::size_t>(q.nvars()), -1);
    for (int v : q.head.args) w[static_cast<std::size_t>(v)] = assign[static_cast<std::size_t>(v)];
    std::optional<std::vector<int>> found;
    for (std::size_t skip = 0; skip < facts.size() && !found; ++skip) {
        std::vector<GFact> rest;
        rest.reserve(facts.size() - 1);
        for (std::size_t i = 0; i < facts.size(); ++i)
            if (i != skip) rest.push_back(facts[i]);
        FactIndex idx(std::move(rest), 0);
        for_each_match(q, idx, w, [&](const std::vector<int>& cur, const std::vector<int>&) {
            found = cur;
            return true;
        });
    }
    return found;
}

}  // namespace

std::optional<std::vector<int>> smaller_valuation(const CQuery& q, const std::vector<int>& assign) {
    auto img = image(q, assign);
    return strictly_inside(q, assign, img);
}

bool has_strictly_smaller(const CQuery& q, const std::vector<int>& assign, const std::vector<GFact>& facts) {
    return strictly_inside(q, assign, facts).has_value();
}

namespace {

struct CoverSearch {
    const CQuery& q;
    const CoverSpec& spec;
    std::vector<int> assign;
    int fresh_used = 0;
    std::vector<int> order;  // phase-two variable order
    std::optional<std::vector<int>> result;
    std::size_t last_checked_size = 0;

    bool head_assigned() const {
        for (int v : q.head.args)
            if (assign[static_cast<std::size_t>(v)] < 0) return false;
        return true;
    }

    std::vector<GFact> determined_facts() const {
        std::vector<GFact> d;
        for (const auto& a : q.body) {
            bool full = true;
            for (int v : a.args)
                if (assign[static_cast<std::size_t>(v)] < 0) {
                    full = false;
                    break;
                }
            if (full) d.push_back(ground(a, assign));
        }
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        return d;
    }

    bool covers_must(const std::vector<GFact>& img) const {
        for (const auto& f : spec.must)
            if (!std::binary_search(img.begin(), img.end(), f)) return false;
        return true;
    }

    // Walks down from w through strictly smaller valuations while they still
    // require every must fact; a minimal one at the bottom is an answer.
    bool descend(std::vector<int> w) {
        for (;;) {
            auto img = image(q, w);
            if (!covers_must(img)) return false;
            auto smaller = strictly_inside(q, w, img);
            if (!smaller) {
                if (spec.accept && !spec.accept(w, img)) return false;
                result = std::move(w);
                return true;
            }
            w = std::move(*smaller);
        }
    }

    // Cheap attempt before branching: set every open variable to one value
    // (each pool value, then a fresh one) and descend from there.
    bool probe() {
        std::vector<int> fills = spec.pool;
        if (fresh_used < spec.fresh_budget) fills.push_back(spec.fresh_base + fresh_used);
        for (int val : fills) {
            auto w = assign;
            for (auto& x : w)
                if (x < 0) x = val;
            if (descend(std::move(w))) return true;
        }
        return false;
    }

    enum class Check { Open, Pruned, Found };

    // Facts already forced by fully assigned atoms; if some W with the same
    // head needs a strict subset of them, no completion can be minimal. W
    // itself may still lead to an answer.
    Check check() {
        if (!head_assigned()) return Check::Open;
        auto d = determined_facts();
        if (d.empty()) return Check::Open;
        auto w = strictly_inside(q, assign, d);
        if (!w) return Check::Open;
        return descend(std::move(*w)) ? Check::Found : Check::Pruned;
    }

    bool step(const std::function<bool()>& next) {
        switch (check()) {
            case Check::Found: return true;
            case Check::Pruned: return false;
            default: return next();
        }
    }

    bool compatible(const CAtom& a, const GFact& f) const {
        if (a.rel != f.rel || a.args.size() != f.vals.size()) return false;
        std::vector<std::pair<int, int>> local;
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            int v = a.args[p];
            int cur = assign[static_cast<std::size_t>(v)];
            if (cur < 0) {
                for (auto& [lv, val] : local)
                    if (lv == v && val != f.vals[p]) return false;
                local.emplace_back(v, f.vals[p]);
            } else if (cur != f.vals[p]) {
                return false;
            }
        }
        return true;
    }

    bool covered(const GFact& f) const {
        for (const auto& a : q.body) {
            if (a.rel != f.rel) continue;
            bool eq = true;
            for (std::size_t p = 0; p < a.args.size(); ++p)
                if (assign[static_cast<std::size_t>(a.args[p])] != f.vals[p]) {
                    eq = false;
                    break;
                }
            if (eq) return true;
        }
        return false;
    }

    bool cover_phase(std::vector<char>& pending) {
        int pick = -1;
        std::size_t pick_count = 0;
        for (std::size_t i = 0; i < spec.must.size(); ++i) {
            if (!pending[i]) continue;
            if (covered(spec.must[i])) continue;
            std::size_t cnt = 0;
            for (const auto& a : q.body)
                if (compatible(a, spec.must[i])) ++cnt;
            if (cnt == 0) return false;
            if (pick < 0 || cnt < pick_count) {
                pick = static_cast<int>(i);
                pick_count = cnt;
            }
        }
        if (pick < 0) return probe() || step([&] { return assign_phase(0); });
        const GFact& f = spec.must[static_cast<std::size_t>(pick)];
        pending[static_cast<std::size_t>(pick)] = 0;
        for (const auto& a : q.body) {
            if (!compatible(a, f)) continue;
            std::vector<int> set_here;
            for (std::size_t p = 0; p < a.args.size(); ++p) {
                int& slot = assign[static_cast<std::size_t>(a.args[p])];
                if (slot < 0) {
                    slot = f.vals[p];
                    set_here.push_back(a.args[p]);
                }
            }
            bool stop = step([&] { return cover_phase(pending); });
            for (int v : set_here) assign[static_cast<std::size_t>(v)] = -1;
            if (stop) {
                pending[static_cast<std::size_t>(pick)] = 1;
                return true;
            }
        }
        pending[static_cast<std::size_t>(pick)] = 1;
        return false;
    }

    bool leaf() {
        auto img = image(q, assign);
        if (auto w = strictly_inside(q, assign, img)) return descend(std::move(*w));
        if (spec.accept && !spec.accept(assign, img)) return false;
        result = assign;
        return true;
    }

    bool assign_phase(std::size_t pos) {
        while (pos < order.size() && assign[static_cast<std::size_t>(order[pos])] >= 0) ++pos;
        if (pos == order.size()) return leaf();
        int v = order[pos];
        auto try_value = [&](int val) {
            assign[static_cast<std::size_t>(v)] = val;
            bool stop = step([&] { return assign_phase(pos + 1); });
            assign[static_cast<std::size_t>(v)] = -1;
            return stop;
        };
        for (int val : spec.pool)
            if (try_value(val)) return true;
        for (int i = 0; i < fresh_used; ++i)
            if (try_value(spec.fresh_base + i)) return true;
        if (fresh_used < spec.fresh_budget) {
            ++fresh_used;
            bool stop = try_value(spec.fresh_base + fresh_used - 1);
            --fresh_used;
            if (stop) return true;
        }
        return false;
    }
};

}  // namespace

std::optional<std::vector<int>> find_minimal_cover(const CQuery& q, const CoverSpec& spec) {
    CoverSearch s{q, spec, std::vector<int>(static_cast<std::size_t>(q.nvars()), -1), 0, {}, {}, 0};
    // Head variables first so the pruning test can run early, then variables
    // in atom order so atoms become fully determined quickly.
    std::vector<char> seen(static_cast<std::size_t>(q.nvars()), 0);
    for (int v : q.head.args)
        if (!seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            s.order.push_back(v);
        }
    for (const auto& a : q.body)
        for (int v : a.args)
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                s.order.push_back(v);
            }
    std::vector<char> pending(spec.must.size(), 1);
    s.cover_phase(pending);
    return s.result;
}

bool for_each_partition(int n, const std::function<bool(const std::vector<int>&)>& cb) {
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    std::function<bool(int, int)> rec = [&](int pos, int maxv) -> bool {
        if (pos == n) return cb(rgs);
        for (int v = 0; v <= maxv + 1; ++v) {
            rgs[static_cast<std::size_t>(pos)] = v;
            if (rec(pos + 1, std::max(maxv, v))) return true;
        }
        return false;
    };
    return rec(0, -1);
}

}  // namespace pclab::detail
