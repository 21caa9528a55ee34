#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pclab/cq.hpp"
#include "pclab/policy.hpp"

namespace pclab {

struct RunReport {
    Instance centralized;
    std::map<NodeId, Instance> chunks;
    std::map<NodeId, Instance> per_node;  // q evaluated on each chunk
    Instance union_result;
    bool equal = true;
    Instance missing;  // centralized \ union_result
    std::vector<std::string> warnings;
};

RunReport one_round_evaluate(const Query& q, const Policy& p, const Instance& inst);

// Facts a random search draws from: facts(P) for explicit policies; for
// co-finite ones the exceptions plus all facts of q's relations over
// adom(exceptions) and two fresh values; for hypercube ones all facts over
// the hashed values. Truncated to `cap` facts (in fact order) if larger.
struct Universe {
    Instance facts;
    bool capped = false;
};

Universe sample_universe(const Query& q, const Policy& p, std::size_t cap = 2048);

struct SearchResult {
    std::optional<Instance> counterexample;
    std::size_t trials = 0;
    Universe universe;
};

// Each trial keeps every universe fact with probability 1/2.
SearchResult search_counterexample(const Query& q, const Policy& p, std::size_t budget, std::uint64_t seed);

}  // namespace pclab
