#pragma once

#include <optional>

#include "pclab/cq.hpp"
#include "pclab/policy.hpp"
#include "pclab/valuation.hpp"

namespace pclab {

struct PCVerdict {
    bool holds = true;
    std::optional<Valuation> valuation;  // a minimal valuation whose facts never meet
    std::optional<Instance> instance;    // an input on which one-round evaluation loses a fact
};

// Every valuation over d meets at some node. Sufficient for parallel-correctness.
bool check_c0(const Query& q, const Policy& p, const BoundedDomain& d);

// Exact test over minimal valuations. Explicit policies range over
// instances inside facts(P); co-finite ones over adom(exceptions) plus
// |vars(q)| fresh values. Hypercube policies are materialized first.
PCVerdict is_parallel_correct(const Query& q, const Policy& p);

enum class InstanceMode { Single, Hereditary };

// Single: one-round evaluation on `inst` equals centralized evaluation.
// Hereditary: the same holds on every subinstance of `inst`.
PCVerdict is_parallel_correct_on_instance(const Query& q, const Instance& inst, const Policy& p,
                                          InstanceMode mode = InstanceMode::Single);

}  // namespace pclab
