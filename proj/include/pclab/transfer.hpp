#pragma once

#include <optional>

#include "pclab/cq.hpp"
#include "pclab/policy.hpp"

namespace pclab {

struct TransferVerdict {
    bool holds = true;
    std::optional<Valuation> c2_witness;           // minimal for q', not covered by any minimal valuation of q
    std::optional<CofinitePolicy> policy_witness;  // q parallel-correct under it, q' not
};

// Does parallel-correctness of q under a policy imply it for q'?
// allow_skip=false restricts to policies that skip no fact.
TransferVerdict transfers(const Query& q, const Query& q_prime, bool allow_skip = true);

// Throws std::invalid_argument if v_prime is not minimal for q_prime or is
// covered by a minimal valuation of q.
CofinitePolicy witness_policy_for_nontransfer(const Query& q, const Query& q_prime, const Valuation& v_prime);

// theta simplifies q'; theta(q') body lies inside rho(q) body.
struct C3Certificate {
    Substitution theta;
    Substitution rho;
};

std::optional<C3Certificate> check_c3(const Query& q, const Query& q_prime);
bool verify_c3(const Query& q, const Query& q_prime, const C3Certificate& cert);

// Requires q strongly minimal (std::invalid_argument otherwise).
TransferVerdict transfers_strongly_minimal(const Query& q, const Query& q_prime);

struct HypercubeFamilyVerdict {
    std::optional<C3Certificate> certificate;
    // Without a certificate: a hypercube policy for q and an instance on which
    // q' loses a fact under it.
    std::optional<HypercubePolicy> refuting_policy;
    std::optional<Instance> refuting_instance;
};

// Is q' parallel-correct under every hypercube policy for q?
HypercubeFamilyVerdict hypercube_family_pc(const Query& q, const Query& q_prime);

}  // namespace pclab
