#pragma once
// Integer-coded query/fact representation and the backtracking searches that
// every analysis is built on. Private to the library.

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pclab/cq.hpp"

namespace pclab::detail {

class Interner {
public:
    int get(const std::string& s);
    int find(const std::string& s) const;  // -1 if absent
    const std::string& name(int id) const { return names_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(names_.size()); }

private:
    std::map<std::string, int> ids_;
    std::vector<std::string> names_;
};

struct CAtom {
    int rel = 0;
    std::vector<int> args;
};

struct CQuery {
    std::vector<std::string> var_names;  // index = variable id, first-occurrence order
    std::vector<char> is_head;
    CAtom head;
    std::vector<CAtom> body;
    int nvars() const { return static_cast<int>(var_names.size()); }
};

CQuery compile(const Query& q, Interner& rels);

struct GFact {
    int rel = 0;
    std::vector<int> vals;
    auto operator<=>(const GFact&) const = default;
};

struct FactIndex {
    std::vector<GFact> facts;            // sorted, unique
    std::vector<std::vector<int>> by_rel;

    FactIndex() = default;
    FactIndex(std::vector<GFact> fs, int nrels);
    int id_of(const GFact& f) const;  // -1 if absent
};

GFact ground(const CAtom& a, const std::vector<int>& assign);
std::vector<GFact> image(const CQuery& q, const std::vector<int>& assign);  // sorted, unique

// Extends `assign` (-1 = unassigned) so that every body atom lands in idx.
// cb(assign, matched) gets matched[i] = fact id hit by atom i and returns
// true to stop. Returns true iff stopped early. `assign` is restored.
bool for_each_match(const CQuery& q, const FactIndex& idx, std::vector<int>& assign,
                    const std::function<bool(const std::vector<int>&, const std::vector<int>&)>& cb);

// A valuation with the same head whose required facts are a strict subset,
// or nothing if `assign` is minimal.
std::optional<std::vector<int>> smaller_valuation(const CQuery& q, const std::vector<int>& assign);

// Same test against a partial picture: is there W with W(head) = head values
// in `assign` and W(body) a strict subset of `facts`?
bool has_strictly_smaller(const CQuery& q, const std::vector<int>& assign, const std::vector<GFact>& facts);

struct CoverSpec {
    std::vector<GFact> must;   // facts the valuation has to require
    std::vector<int> pool;     // values always available
    int fresh_base = 0;        // ids >= fresh_base are interchangeable fresh values
    int fresh_budget = 0;
    // Extra condition on a complete minimal candidate; empty = accept all.
    std::function<bool(const std::vector<int>&, const std::vector<GFact>&)> accept;
};

// Searches a minimal valuation V over pool + fresh values with must ⊆ V(body).
std::optional<std::vector<int>> find_minimal_cover(const CQuery& q, const CoverSpec& spec);

// Restricted growth strings: every equality pattern on n positions, in
// lexicographic order. cb returns true to stop.
bool for_each_partition(int n, const std::function<bool(const std::vector<int>&)>& cb);

}  // namespace pclab::detail
