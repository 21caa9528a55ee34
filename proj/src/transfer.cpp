#include "pclab/transfer.hpp"

#include <algorithm>
#include <stdexcept>

#include "engine.hpp"
#include "pclab/valuation.hpp"

namespace pclab {

using detail::CAtom;
using detail::CQuery;
using detail::GFact;

namespace {

// Is there a minimal valuation of q requiring every fact in `must`? Values
// 0..pool_size-1 are the facts' values; `fresh` more are available.
bool covered(const CQuery& q, const std::vector<GFact>& must, int pool_size, int fresh) {
    detail::CoverSpec spec;
    spec.must = must;
    for (int i = 0; i < pool_size; ++i) spec.pool.push_back(i);
    spec.fresh_base = pool_size;
    spec.fresh_budget = fresh;
    return detail::find_minimal_cover(q, spec).has_value();
}

CofinitePolicy split_policy(const Instance& facts) {
    CofinitePolicy p;
    if (facts.size() == 1) {
        p.network = {"k1"};
        p.default_nodes = {"k1"};
        p.exceptions[*facts.begin()] = {};
        return p;
    }
    for (std::size_t i = 1; i <= facts.size(); ++i) p.network.push_back("k" + std::to_string(i));
    p.default_nodes = NodeSet(p.network.begin(), p.network.end());
    std::size_t i = 0;
    for (const auto& f : facts) {
        NodeSet all_but = p.default_nodes;
        all_but.erase(p.network[i++]);
        p.exceptions[f] = all_but;
    }
    return p;
}

}  // namespace

TransferVerdict transfers(const Query& q, const Query& q_prime, bool allow_skip) {
    check_same_schema(q, q_prime);
    detail::Interner rels;
    CQuery cq = detail::compile(q, rels);
    CQuery cp = detail::compile(q_prime, rels);
    const int k = cq.nvars() + cp.nvars();

    TransferVerdict out;
    // Every value of a valuation of q' occurs in its body (safe heads), so a
    // partition of vars(q') into classes 0..j-1 is a canonical valuation.
    detail::for_each_partition(cp.nvars(), [&](const std::vector<int>& classes) {
        if (detail::smaller_valuation(cp, classes)) return false;
        auto s = detail::image(cp, classes);
        if (!allow_skip && s.size() == 1) return false;
        int j = classes.empty() ? 0 : *std::max_element(classes.begin(), classes.end()) + 1;
        if (covered(cq, s, j, k - j)) return false;
        Valuation v;
        for (std::size_t i = 0; i < classes.size(); ++i) v[cp.var_names[i]] = std::to_string(classes[i] + 1);
        out.holds = false;
        out.c2_witness = v;
        out.policy_witness = split_policy(apply_valuation(v, q_prime).second);
        return true;
    });
    return out;
}

CofinitePolicy witness_policy_for_nontransfer(const Query& q, const Query& q_prime, const Valuation& v_prime) {
    check_same_schema(q, q_prime);
    if (!is_minimal_valuation(q_prime, v_prime).holds)
        throw std::invalid_argument("valuation is not minimal for the second query");
    auto facts = apply_valuation(v_prime, q_prime).second;
    detail::Interner rels, vals;
    CQuery cq = detail::compile(q, rels);
    for (const auto& v : adom(facts)) vals.get(v);
    std::vector<GFact> must;
    for (const auto& f : facts) {
        GFact g{rels.get(f.rel), {}};
        for (const auto& v : f.vals) g.vals.push_back(vals.find(v));
        must.push_back(std::move(g));
    }
    std::sort(must.begin(), must.end());
    if (covered(cq, must, vals.size(), cq.nvars()))
        throw std::invalid_argument("valuation is covered by a minimal valuation of the first query");
    return split_policy(facts);
}

namespace {

struct C3Search {
    const CQuery& q;   // rho: vars(q) -> vars(q')
    const CQuery& qp;  // theta: vars(q') -> vars(q')
    std::vector<int> theta, rho;
    std::vector<int> trail_theta, trail_rho;
    std::vector<char> done;
    // Two q atoms with the same shape agree on their shared variables and
    // differ only in variables private to each; while those private
    // variables are unbound, covering with either is the same choice.
    std::vector<std::vector<int>> shape;
    std::vector<std::vector<int>> private_vars;

    C3Search(const CQuery& q_, const CQuery& qp_) : q(q_), qp(qp_) {
        theta.assign(static_cast<std::size_t>(qp.nvars()), -1);
        rho.assign(static_cast<std::size_t>(q.nvars()), -1);
        for (int h : qp.head.args) theta[static_cast<std::size_t>(h)] = h;
        done.assign(qp.body.size(), 0);
        std::vector<int> atoms_of(static_cast<std::size_t>(q.nvars()), 0);
        for (const auto& a : q.body) {
            std::vector<int> vs = a.args;
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
            for (int v : vs) ++atoms_of[static_cast<std::size_t>(v)];
        }
        for (const auto& a : q.body) {
            std::vector<int> sh{a.rel};
            std::vector<int> pv;
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                int v = a.args[i];
                if (atoms_of[static_cast<std::size_t>(v)] == 1) {
                    sh.push_back(-1 - static_cast<int>(std::find(a.args.begin(), a.args.end(), v) - a.args.begin()));
                    pv.push_back(v);
                } else {
                    sh.push_back(v);
                }
            }
            shape.push_back(std::move(sh));
            private_vars.push_back(std::move(pv));
        }
    }

    static bool fits(const CAtom& a, const CAtom& target, const std::vector<int>& map) {
        if (a.rel != target.rel || a.args.size() != target.args.size()) return false;
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            int cur = map[static_cast<std::size_t>(a.args[p])];
            if (cur >= 0) {
                if (cur != target.args[p]) return false;
                continue;
            }
            for (std::size_t r = 0; r < p; ++r)
                if (a.args[r] == a.args[p] && target.args[r] != target.args[p]) return false;
        }
        return true;
    }

    static void bind(const CAtom& a, const CAtom& target, std::vector<int>& map, std::vector<int>& trail) {
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            int& slot = map[static_cast<std::size_t>(a.args[p])];
            if (slot < 0) {
                slot = target.args[p];
                trail.push_back(a.args[p]);
            }
        }
    }

    static void undo(std::vector<int>& map, std::vector<int>& trail, std::size_t mark) {
        while (trail.size() > mark) {
            map[static_cast<std::size_t>(trail.back())] = -1;
            trail.pop_back();
        }
    }

    bool already_covered(const CAtom& b) const {
        for (const auto& c : q.body) {
            if (c.rel != b.rel) continue;
            bool eq = true;
            for (std::size_t p = 0; p < c.args.size() && eq; ++p) eq = rho[static_cast<std::size_t>(c.args[p])] == b.args[p];
            if (eq) return true;
        }
        return false;
    }

    bool untouched(std::size_t ci) const {
        for (int v : private_vars[ci])
            if (rho[static_cast<std::size_t>(v)] >= 0) return false;
        return true;
    }

    // q atoms worth trying to cover b, one per class of interchangeable atoms.
    std::vector<std::size_t> choices(const CAtom& b) const {
        std::vector<std::size_t> out;
        std::vector<const std::vector<int>*> tried;
        for (std::size_t ci = 0; ci < q.body.size(); ++ci) {
            if (!fits(q.body[ci], b, rho)) continue;
            if (!private_vars[ci].empty() && untouched(ci)) {
                bool dup = false;
                for (auto* s : tried) dup = dup || *s == shape[ci];
                if (dup) continue;
                tried.push_back(&shape[ci]);
            }
            out.push_back(ci);
        }
        return out;
    }

    bool cover(const CAtom& b) {
        if (already_covered(b)) return run();
        for (std::size_t ci : choices(b)) {
            const auto& c = q.body[ci];
            std::size_t mark = trail_rho.size();
            bind(c, b, rho, trail_rho);
            if (run()) return true;  // keep bindings for extraction
            undo(rho, trail_rho, mark);
        }
        return false;
    }

    bool run() {
        int pick = -1;
        std::size_t best = 0;
        for (std::size_t i = 0; i < qp.body.size(); ++i) {
            if (done[i]) continue;
            // Branching factor of this atom: targets times ways to cover each.
            std::size_t cnt = 0;
            for (const auto& b : qp.body)
                if (fits(qp.body[i], b, theta)) cnt += already_covered(b) ? 1 : choices(b).size();
            if (cnt == 0) return false;
            if (pick < 0 || cnt < best) {
                pick = static_cast<int>(i);
                best = cnt;
            }
        }
        if (pick < 0) return true;
        const auto& a = qp.body[static_cast<std::size_t>(pick)];
        done[static_cast<std::size_t>(pick)] = 1;
        for (const auto& b : qp.body) {
            if (!fits(a, b, theta)) continue;
            std::size_t mark = trail_theta.size();
            bind(a, b, theta, trail_theta);
            if (cover(b)) return true;
            undo(theta, trail_theta, mark);
        }
        done[static_cast<std::size_t>(pick)] = 0;
        return false;
    }
};

}  // namespace

std::optional<C3Certificate> check_c3(const Query& q, const Query& q_prime) {
    check_same_schema(q, q_prime);
    detail::Interner rels;
    CQuery cq = detail::compile(q, rels);
    CQuery cp = detail::compile(q_prime, rels);
    C3Search s(cq, cp);
    if (!s.run()) return std::nullopt;
    C3Certificate cert;
    for (std::size_t i = 0; i < cp.var_names.size(); ++i) {
        int t = s.theta[i];
        // Variables outside every body atom cannot exist (safe heads), so theta is total.
        cert.theta[cp.var_names[i]] = cp.var_names[static_cast<std::size_t>(t < 0 ? static_cast<int>(i) : t)];
    }
    for (std::size_t i = 0; i < cq.var_names.size(); ++i) {
        int r = s.rho[i];
        cert.rho[cq.var_names[i]] = r < 0 ? cq.var_names[i] : cp.var_names[static_cast<std::size_t>(r)];
    }
    return cert;
}

bool verify_c3(const Query& q, const Query& q_prime, const C3Certificate& cert) {
    if (!is_simplification(cert.theta, q_prime)) return false;
    for (const auto& v : q.vars())
        if (!cert.rho.count(v)) return false;
    std::vector<Atom> img;
    for (const auto& a : q.body) img.push_back(substitute(cert.rho, a));
    std::sort(img.begin(), img.end());
    for (const auto& a : q_prime.body)
        if (!std::binary_search(img.begin(), img.end(), substitute(cert.theta, a))) return false;
    return true;
}

TransferVerdict transfers_strongly_minimal(const Query& q, const Query& q_prime) {
    if (!is_strongly_minimal(q).holds) throw std::invalid_argument("first query is not strongly minimal");
    TransferVerdict out;
    if (check_c3(q, q_prime)) return out;
    // Without a certificate the core of q' under an injective valuation is
    // minimal and uncovered.
    auto core = minimize_cq(q_prime);
    Valuation v;
    for (const auto& x : q_prime.vars()) v[x] = core.folding.at(x);
    out.holds = false;
    out.c2_witness = v;
    out.policy_witness = witness_policy_for_nontransfer(q, q_prime, v);
    return out;
}

HypercubeFamilyVerdict hypercube_family_pc(const Query& q, const Query& q_prime) {
    HypercubeFamilyVerdict out;
    out.certificate = check_c3(q, q_prime);
    if (out.certificate) return out;
    auto inst = apply_valuation(injective_valuation(q_prime), q_prime).second;
    out.refuting_policy = scattered_witness_policy(q, inst);
    out.refuting_instance = inst;
    return out;
}

}  // namespace pclab
