#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pclab/cq.hpp"
#include "pclab/policy.hpp"

namespace pclab {

// Quantified propositional formula in DIMACS-like text:
//   p cnf <vars> <clauses>   (or p dnf)
//   a 1 2 0                  universal block
//   e 3 0                    existential block
//   1 -3 2 0                 clause
// Variables outside every block are existential and outermost.
struct QBF {
    enum class Matrix { CNF, DNF };
    struct Block {
        bool universal = true;
        std::vector<int> vars;
    };
    Matrix matrix = Matrix::CNF;
    int num_vars = 0;
    std::vector<Block> blocks;               // adjacent blocks of one kind are merged
    std::vector<std::vector<int>> clauses;   // literals +v / -v
};

QBF parse_qbf(const std::string& text);
std::string to_dimacs(const QBF& phi);

// Edge list: "u v" per line; a lone token declares an isolated vertex.
// An edge given in both directions is kept once, in its first direction.
struct Graph {
    std::set<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> edges;
};

Graph parse_graph(const std::string& text);

class OracleCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool brute_force_qbf(const QBF& phi, int cap = 16);
bool brute_force_sat(const QBF& phi, int cap = 16);  // quantifiers ignored
bool brute_force_3col(const Graph& g, int cap = 16);

struct PCIVector {
    Query query;
    Instance instance;
    ExplicitPolicy policy;
};

struct QueryPair {
    Query q;
    Query q_prime;
};

// forall-exists 3-CNF. Instance-relative parallel-correctness holds iff phi is true.
PCIVector reduce_pi2qbf_to_pci(const QBF& phi);
// Same query and policy; parallel-correctness on all instances holds iff phi is true.
std::pair<Query, ExplicitPolicy> reduce_pi2qbf_to_pc(const QBF& phi);
// forall-exists-forall 3-DNF. Transfer from q to q' holds iff phi is true.
QueryPair reduce_pi3qbf_to_transfer(const QBF& phi);
// 3-CNF. Strongly minimal iff phi is unsatisfiable.
Query reduce_3sat_to_strongmin(const QBF& phi);
// Boolean pairs where a C3 certificate exists iff g is 3-colorable.
// Variant 1 has an acyclic q, variant 2 an acyclic q' and needs >= 2 edges.
QueryPair reduce_3col_to_c3_variant1(const Graph& g);
QueryPair reduce_3col_to_c3_variant2(const Graph& g);

}  // namespace pclab
