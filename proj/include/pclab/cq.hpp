#pragma once

#include <compare>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pclab {

using Var = std::string;
using Value = std::string;

struct Atom {
    std::string rel;
    std::vector<Var> args;
    auto operator<=>(const Atom&) const = default;
};

struct Fact {
    std::string rel;
    std::vector<Value> vals;
    auto operator<=>(const Fact&) const = default;
};

using Instance = std::set<Fact>;
using Valuation = std::map<Var, Value>;
using Substitution = std::map<Var, Var>;

// Body is kept sorted and duplicate-free.
struct Query {
    std::string name;
    Atom head;
    std::vector<Atom> body;

    // Variables in first-occurrence order: head first, then body.
    std::vector<Var> vars() const;
    std::vector<Var> head_vars() const;
    bool is_head_var(const Var& v) const;
};

struct ParseError : std::runtime_error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int line_, int col_);
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Builds a query from parts, normalizing the body and checking safety/arity.
Query make_query(Atom head, std::vector<Atom> body, std::string name = "");

Query parse_query(const std::string& text);
// Accepts either a single query or a sequence of `query <name> { ... }` blocks.
std::vector<Query> parse_queries(const std::string& text);
Instance parse_instance(const std::string& text);

std::string to_string(const Atom& a);
std::string to_string(const Fact& f);
std::string to_string(const Query& q);
std::string to_string(const Valuation& v);  // also prints substitutions
std::string to_string(const Instance& inst);

std::set<Value> adom(const Instance& inst);

// Relation name -> arity over body atoms; throws SchemaError on conflicts.
std::map<std::string, std::size_t> schema_of(const Query& q);
std::map<std::string, std::size_t> schema_of(const Instance& inst);
void check_same_schema(const Query& a, const Query& b);

Instance evaluate(const Query& q, const Instance& inst);

Fact apply(const Valuation& v, const Atom& a);
// (V(head), V(body)); throws if v is not total on vars(q).
std::pair<Fact, Instance> apply_valuation(const Valuation& v, const Query& q);

Atom substitute(const Substitution& s, const Atom& a);
// theta(q): head and body rewritten; body re-normalized.
Query apply_substitution(const Substitution& s, const Query& q);

// (outer o inner)(x) = outer(inner(x)); inner's range must lie in outer's domain.
// Valuation and Substitution share a representation, so this serves both.
Substitution compose(const Substitution& outer, const Substitution& inner);

Substitution identity_substitution(const Query& q);
bool is_simplification(const Substitution& theta, const Query& q);
bool is_idempotent(const Substitution& s);

}  // namespace pclab
