#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pclab/cq.hpp"
#include "pclab/valuation.hpp"

namespace pclab {

using NodeId = std::string;
using NodeSet = std::set<NodeId>;

// Unlisted facts are skipped.
struct ExplicitPolicy {
    std::vector<NodeId> network;
    std::map<Fact, NodeSet> table;
};

// Facts without an exception go to default_nodes; an empty exception skips the fact.
struct CofinitePolicy {
    std::vector<NodeId> network;
    NodeSet default_nodes;
    std::map<Fact, NodeSet> exceptions;
};

// One hash table per query variable; nodes are addresses in the product of
// the bucket sets. A value outside a table's domain makes that atom's
// rule inapplicable to the fact.
struct HypercubePolicy {
    Query query;
    std::vector<Var> vars;                              // coordinate order = query.vars()
    std::vector<std::map<Value, std::string>> hash;     // per coordinate
    std::vector<std::vector<std::string>> buckets;      // image of each table, sorted

    static HypercubePolicy make(const Query& q, const std::map<Var, std::map<Value, std::string>>& tables);
    std::size_t address_count() const;
};

using Policy = std::variant<ExplicitPolicy, CofinitePolicy, HypercubePolicy>;

std::string address_name(const std::vector<std::string>& coords);

NodeSet resolve(const Policy& p, const Fact& f, std::vector<std::string>* warnings = nullptr);

// Hypercube networks are materialized as the full address space.
std::vector<NodeId> network(const Policy& p);

using Chunking = std::map<NodeId, Instance>;

// Explicit and co-finite policies list every node; hypercube policies list
// only nodes that receive at least one fact.
Chunking distribute(const Policy& p, const Instance& inst, std::vector<std::string>* warnings = nullptr);

struct GenerosityVerdict {
    bool holds = true;
    std::optional<Valuation> witness;  // its required facts share no node
};

GenerosityVerdict is_generous_for(const Policy& p, const Query& q, const BoundedDomain& d);

// Identity hashes with every bucket set equal to adom(inst).
HypercubePolicy scattered_witness_policy(const Query& q, const Instance& inst);

// facts(P) for an explicit table.
Instance facts_of(const ExplicitPolicy& p);
// Hypercube policies are finite in effect: only facts over hashed values are
// routed anywhere. Materializes that table for the query's relations.
ExplicitPolicy materialize(const HypercubePolicy& p);
ExplicitPolicy expand(const CofinitePolicy& p, const Instance& universe);

// `queries` resolves the name in `hypercube for <name>`.
Policy parse_policy(const std::string& text, const std::map<std::string, Query>& queries = {});
std::string to_string(const Policy& p);

}  // namespace pclab
