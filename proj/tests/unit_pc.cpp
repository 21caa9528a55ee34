#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pclab/pc.hpp"
#include "pclab/reductions.hpp"

using namespace pclab;

namespace {
Policy ex35_policy() { return parse_policy("network 1 2\ndefault @ 1 2\nR(a,b) @ 2\nR(b,a) @ 1\n"); }
}

TEST_SUITE("pc") {

TEST_CASE("running example") {
    auto q = parse_query("T(x,z) :- R(x,y), R(y,z), R(x,x).");
    auto p = ex35_policy();
    CHECK_FALSE(check_c0(q, p, BoundedDomain{{"a", "b"}}));
    CHECK(is_parallel_correct(q, p).holds);
    CHECK(check_c0(q, parse_policy("network 1\ndefault @ 1\n"), BoundedDomain::of_size(3)));

    auto chain = parse_query("T(x,z) :- R(x,y), R(y,z).");
    auto v = is_parallel_correct(chain, p);
    CHECK_FALSE(v.holds);
    REQUIRE(v.valuation);
    CHECK(*v.valuation == Valuation{{"x", "a"}, {"y", "b"}, {"z", "a"}});
    CHECK(oracle::is_minimal(chain, *v.valuation));
    REQUIRE(v.instance);
    CHECK_FALSE(oracle::pc_on_instance(chain, p, *v.instance));
}

TEST_CASE("instance-relative checks") {
    auto q = parse_query("T(x,z) :- R(x,y), R(y,z), R(x,x).");
    auto chain = parse_query("T(x,z) :- R(x,y), R(y,z).");
    auto p = ex35_policy();
    auto inst = parse_instance("R(a,b).\nR(b,a).\nR(a,a).");
    CHECK(is_parallel_correct_on_instance(q, inst, p).holds);
    CHECK(is_parallel_correct_on_instance(q, {}, p).holds);
    CHECK(is_parallel_correct_on_instance(q, inst, p, InstanceMode::Hereditary).holds);
    auto bad = is_parallel_correct_on_instance(chain, inst, p);
    CHECK_FALSE(bad.holds);
    CHECK(is_parallel_correct_on_instance(chain, parse_instance("R(a,b).\nR(b,c)."), p).holds);
    auto her = is_parallel_correct_on_instance(chain, inst, p, InstanceMode::Hereditary);
    CHECK_FALSE(her.holds);
    REQUIRE(her.instance);
    CHECK(oracle::subset(*her.instance, inst));
    CHECK_FALSE(oracle::pc_on_instance(chain, p, *her.instance));
}

TEST_CASE("explicit policies against exhaustive subinstances") {
    std::mt19937_64 rng(21);
    std::vector<oracle::Rel> schema{{"R", 2}, {"S", 1}};
    int yes = 0;
    for (int i = 0; i < 80; ++i) {
        auto q = oracle::random_query(rng, 4, 3, schema);
        auto p = oracle::random_explicit_policy(rng, schema, {"a", "b"}, 6, 3);
        bool expect = oracle::exhaustive_pc(q, p);
        yes += expect;
        auto got = is_parallel_correct(q, Policy{p});
        CHECK(got.holds == expect);
        if (!got.holds && got.instance) CHECK_FALSE(oracle::pc_on_instance(q, Policy{p}, *got.instance));
    }
    CHECK(yes > 5);
    CHECK(yes < 75);
}

TEST_CASE("co-finite policies against their expansion") {
    std::mt19937_64 rng(4);
    std::vector<oracle::Rel> schema{{"R", 2}};
    for (int i = 0; i < 40; ++i) {
        auto q = oracle::random_query(rng, 3, 3, schema);
        CofinitePolicy c;
        c.network = {"1", "2"};
        c.default_nodes = {"1", "2"};
        auto ex = oracle::random_explicit_policy(rng, schema, {"a", "b"}, 2, 2);
        for (auto& [f, ns] : ex.table) {
            NodeSet mapped;
            for (const auto& n : ns) mapped.insert(n == "n1" ? "1" : "2");
            c.exceptions[f] = mapped;
        }
        Instance universe = oracle::random_instance(rng, schema, {"a", "b", "f1"}, 1.0);
        // One fresh value keeps the oracle small; it can only miss failures,
        // and any failure the library reports is replayed on its instance.
        bool found = !oracle::pc_on_all_subsets(q, Policy{c}, universe);
        auto got = is_parallel_correct(q, Policy{c});
        if (found) CHECK_FALSE(got.holds);
        if (!got.holds) {
            REQUIRE(got.instance);
            CHECK_FALSE(oracle::pc_on_instance(q, Policy{c}, *got.instance));
        }
    }
}

TEST_CASE("hypercube policies are parallel-correct for their own query") {
    auto q = parse_query("T(x,z) :- R(x,y), R(y,z).");
    auto h = HypercubePolicy::make(q, {{"x", {{"a", "0"}, {"b", "1"}}},
                                       {"y", {{"a", "0"}, {"b", "1"}}},
                                       {"z", {{"a", "1"}, {"b", "1"}}}});
    CHECK(is_parallel_correct(q, Policy{h}).holds);
}

TEST_CASE("reduction vectors") {
    // forall x exists y: (x | y) & (-x | -y) is true with y = -x.
    auto yes = parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n");
    REQUIRE(brute_force_qbf(yes));
    auto v = reduce_pi2qbf_to_pci(yes);
    CHECK(is_parallel_correct_on_instance(v.query, v.instance, Policy{v.policy}).holds);
    auto [q, p] = reduce_pi2qbf_to_pc(yes);
    CHECK(is_parallel_correct(q, Policy{p}).holds);

    auto no = parse_qbf("p cnf 1 1\na 1 0\n1 0\n");
    REQUIRE_FALSE(brute_force_qbf(no));
    auto w = reduce_pi2qbf_to_pci(no);
    CHECK_FALSE(is_parallel_correct_on_instance(w.query, w.instance, Policy{w.policy}).holds);
    auto [q2, p2] = reduce_pi2qbf_to_pc(no);
    auto r = is_parallel_correct(q2, Policy{p2});
    CHECK_FALSE(r.holds);
    REQUIRE(r.instance);
    CHECK(oracle::subset(*r.instance, w.instance));
}

}
