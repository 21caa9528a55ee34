#pragma once

#include <optional>
#include <vector>

#include "pclab/cq.hpp"

namespace pclab {

// smaller <_Q larger: same head fact, strictly fewer required facts.
struct ValuationOrderWitness {
    Valuation smaller;
    Valuation larger;
};

struct BoundedDomain {
    std::vector<Value> values;
    static BoundedDomain of_size(std::size_t k);  // values "1".."k"
};

struct MinimalityVerdict {
    bool holds = true;
    std::optional<ValuationOrderWitness> witness;
};

bool leq_q(const Query& q, const Valuation& v1, const Valuation& v2);
bool lt_q(const Query& q, const Valuation& v1, const Valuation& v2);

MinimalityVerdict is_minimal_valuation(const Query& q, const Valuation& v);

// All total valuations vars(q) -> d, ordered by their value tuple in vars() order.
std::vector<Valuation> enumerate_valuations(const Query& q, const BoundedDomain& d);
std::vector<Valuation> enumerate_minimal_valuations(const Query& q, const BoundedDomain& d);

// Exact. On failure the witness pair shares the head fact and
// witness.smaller requires strictly fewer facts than witness.larger.
MinimalityVerdict is_strongly_minimal(const Query& q);

// The syntactic condition on self-join atoms; true implies strong minimality.
bool strong_minimality_sufficient(const Query& q);

struct Minimized {
    Query query;
    Substitution folding;  // idempotent, folding(q) == query
};

Minimized minimize_cq(const Query& q);

// Maps every variable to a distinct value (the variable's own name).
Valuation injective_valuation(const Query& q);

// Minimal-CQ test computed twice: by minimization and by the minimality of an
// injective valuation. Throws std::logic_error if the two disagree.
bool injective_valuation_minimality_bridge(const Query& q);

}  // namespace pclab
