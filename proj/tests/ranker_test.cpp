#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles/dense_oracle.hpp"
#include "test_support.hpp"
#include "walkrec/error.hpp"
#include "walkrec/ranker.hpp"

using namespace walkrec;

namespace {

SolverConfig tight(double beta = 0.85) { return SolverConfig{beta, 1e-13, 1000}; }

double linf(std::span<const double> a, const Eigen::VectorXd& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
    return d;
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

RecGraph mixed_graph() {
    using K = NodeKind;
    // users 0..2, item 3, tag 4
    return RecGraph({K::User, K::User, K::User, K::Item, K::Tag}, {"u0", "u1", "u2", "i0", "t0"},
                    {{{NodeId{3}, 1.0}}, {{NodeId{3}, 2.0}}, {}, {{NodeId{0}, 1.0}, {NodeId{4}, 1.0}}, {}});
}

} // namespace

TEST_CASE("personalization for a user is a basis vector") {
    std::vector<oracle::WeightedEdge> none;
    auto g = testing::graph_from_edges(5, none);
    auto theta = PersonalizationVector::for_user(g, NodeId{3});
    std::vector<double> expected = {0, 0, 0, 1, 0};
    CHECK(std::vector<double>(theta.values().begin(), theta.values().end()) == expected);
    CHECK_THROWS_AS(PersonalizationVector::for_user(g, NodeId{5}), InvalidInput);
}

TEST_CASE("personalization rejects non-user nodes and empty groups") {
    auto g = mixed_graph();
    CHECK_THROWS_AS(PersonalizationVector::for_user(g, NodeId{3}), InvalidInput);
    CHECK_THROWS_AS(PersonalizationVector::for_group(g, std::span<const NodeId>{}), InvalidInput);
    NodeId with_tag[] = {NodeId{0}, NodeId{4}};
    CHECK_THROWS_AS(PersonalizationVector::for_group(g, with_tag), InvalidInput);
}

TEST_CASE("group personalization averages distinct members") {
    std::vector<oracle::WeightedEdge> none;
    auto g = testing::graph_from_edges(4, none);
    NodeId pair[] = {NodeId{0}, NodeId{2}};
    auto theta = PersonalizationVector::for_group(g, pair);
    CHECK(std::vector<double>(theta.values().begin(), theta.values().end()) == std::vector<double>{0.5, 0, 0.5, 0});

    NodeId dup[] = {NodeId{0}, NodeId{0}, NodeId{2}};
    auto theta_dup = PersonalizationVector::for_group(g, dup);
    CHECK(std::equal(theta.values().begin(), theta.values().end(), theta_dup.values().begin()));

    NodeId one[] = {NodeId{1}};
    auto single = PersonalizationVector::for_group(g, one);
    auto user = PersonalizationVector::for_user(g, NodeId{1});
    CHECK(std::equal(single.values().begin(), single.values().end(), user.values().begin()));

    auto mixed = mixed_graph();
    NodeId all[] = {NodeId{0}, NodeId{1}, NodeId{2}};
    auto everyone = PersonalizationVector::for_group(mixed, all);
    for (int i = 0; i < 3; ++i) CHECK(everyone[i] == doctest::Approx(1.0 / 3));
    CHECK(everyone[3] == 0.0);
    CHECK(everyone[4] == 0.0);
}

TEST_CASE("two mutually linked nodes have the closed-form fixed point") {
    std::vector<oracle::WeightedEdge> edges = {{0, 1, 1.0}, {1, 0, 1.0}};
    auto g = testing::graph_from_edges(2, edges);
    auto w = transition_matrix(g);
    auto rank = solve_rank(w, PersonalizationVector::for_user(g, NodeId{0}), tight(0.5));
    REQUIRE(rank.converged);
    CHECK(rank.scores[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(rank.scores[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("beta = 0 returns the personalization after one step") {
    std::mt19937_64 rng(3);
    auto edges = oracle::random_digraph(rng, 12, 0.3, true);
    auto g = testing::graph_from_edges(12, edges);
    auto w = transition_matrix(g);
    auto theta = PersonalizationVector::for_user(g, NodeId{4});
    auto rank = solve_rank(w, theta, SolverConfig{0.0, 1e-8, 50});
    CHECK(rank.converged);
    CHECK(rank.iterations == 2);  // step 1 lands on theta, step 2 confirms the zero delta
    for (std::size_t i = 0; i < 12; ++i) CHECK(rank.scores[i] == theta[i]);
    CHECK(rank.residual == 0.0);
}

TEST_CASE("solver matches the dense linear-solve oracle on a strongly connected graph") {
    std::mt19937_64 rng(30);
    auto edges = oracle::random_digraph(rng, 30, 0.12, true);
    auto g = testing::graph_from_edges(30, edges);
    auto w = transition_matrix(g);
    auto theta = PersonalizationVector::for_user(g, NodeId{7});
    auto rank = solve_rank(w, theta, tight());
    REQUIRE(rank.converged);
    auto expected = oracle::damped_walk_solve(oracle::row_normalized(30, edges), to_eigen(theta.values()), 0.85);
    CHECK(linf(rank.scores, expected) < 1e-8);
}

TEST_CASE("solver agrees with the oracle on graphs with dangling nodes") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 5 + trial % 40;
        auto edges = oracle::random_digraph(rng, n, 0.08, false);
        auto g = testing::graph_from_edges(n, edges);
        auto w = transition_matrix(g);
        NodeId group[] = {NodeId{0}, NodeId{static_cast<std::uint32_t>(n / 2)}};
        auto theta = PersonalizationVector::for_group(g, group);
        auto rank = solve_rank(w, theta, tight(0.9));
        REQUIRE(rank.converged);
        auto expected = oracle::damped_walk_solve(oracle::row_normalized(n, edges), to_eigen(theta.values()), 0.9);
        CHECK(linf(rank.scores, expected) < 1e-8);
    }
}

TEST_CASE("iteration invariants: normalization, contraction, teleport floor") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + trial;
        auto edges = oracle::random_digraph(rng, n, 0.1, trial % 3 != 0);
        auto g = testing::graph_from_edges(n, edges);
        auto w = transition_matrix(g);
        auto theta = PersonalizationVector::for_user(g, NodeId{static_cast<std::uint32_t>(trial % n)});
        const double beta = 0.85;

        // Step the iteration by hand with max_iter = t to observe the deltas.
        std::vector<double> previous_delta;
        std::vector<double> last;
        for (int t = 1; t <= 25; ++t) {
            auto r = solve_rank(w, theta, SolverConfig{beta, 1e-300, t});
            double sum = 0;
            for (double x : r.scores) sum += x;
            CHECK(std::abs(sum - 1.0) < 1e-12);
            for (std::size_t i = 0; i < n; ++i) CHECK(r.scores[i] >= (1 - beta) * theta[i] - 1e-15);
            if (!last.empty()) {
                double delta = 0;
                for (std::size_t i = 0; i < n; ++i) delta += std::abs(r.scores[i] - last[i]);
                if (!previous_delta.empty()) CHECK(delta <= (beta + 1e-9) * previous_delta.back() + 1e-15);
                previous_delta.push_back(delta);
            }
            last = r.scores;
        }
    }
}

TEST_CASE("scores are affine in the personalization") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 15;
        auto edges = oracle::random_digraph(rng, n, 0.2, true);
        auto g = testing::graph_from_edges(n, edges);
        auto w = transition_matrix(g);
        NodeId a[] = {NodeId{1}}, b[] = {NodeId{9}}, both[] = {NodeId{1}, NodeId{9}};
        auto sa = solve_rank(w, PersonalizationVector::for_group(g, a), tight()).scores;
        auto sb = solve_rank(w, PersonalizationVector::for_group(g, b), tight()).scores;
        auto sab = solve_rank(w, PersonalizationVector::for_group(g, both), tight()).scores;
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(sab[i] - 0.5 * (sa[i] + sb[i])) < 1e-8);
    }
}

TEST_CASE("non-convergence is reported with the last iterate") {
    std::mt19937_64 rng(1);
    auto edges = oracle::random_digraph(rng, 20, 0.2, true);
    auto g = testing::graph_from_edges(20, edges);
    auto w = transition_matrix(g);
    auto rank = solve_rank(w, PersonalizationVector::for_user(g, NodeId{0}), SolverConfig{0.85, 1e-12, 3});
    CHECK_FALSE(rank.converged);
    CHECK(rank.iterations == 3);
    CHECK(rank.scores.size() == 20);
    CHECK(rank.residual > 1e-12);
}

TEST_CASE("reported residual respects the stopping bound") {
    std::mt19937_64 rng(8);
    auto edges = oracle::random_digraph(rng, 40, 0.1, false);
    auto g = testing::graph_from_edges(40, edges);
    auto w = transition_matrix(g);
    SolverConfig cfg;
    auto rank = solve_rank(w, PersonalizationVector::for_user(g, NodeId{2}), cfg);
    REQUIRE(rank.converged);
    CHECK(rank.residual <= cfg.epsilon * (1 + cfg.beta) / (1 - cfg.beta));
}

TEST_CASE("batched solves agree with single solves") {
    std::mt19937_64 rng(21);
    auto edges = oracle::random_digraph(rng, 35, 0.1, false);
    auto g = testing::graph_from_edges(35, edges);
    auto w = transition_matrix(g);
    std::vector<PersonalizationVector> thetas;
    for (std::uint32_t u : {0u, 5u, 17u, 34u}) thetas.push_back(PersonalizationVector::for_user(g, NodeId{u}));
    auto batch = solve_rank_batch(w, thetas, tight());
    for (std::size_t c = 0; c < thetas.size(); ++c) {
        auto single = solve_rank(w, thetas[c], tight());
        REQUIRE(batch[c].converged);
        for (std::size_t i = 0; i < 35; ++i) CHECK(std::abs(batch[c].scores[i] - single.scores[i]) < 1e-11);
    }
}

TEST_CASE("solver config validation") {
    CHECK_THROWS_AS(SolverConfig({1.0, 1e-8, 10}).validate(), InvalidInput);
    CHECK_THROWS_AS(SolverConfig({-0.1, 1e-8, 10}).validate(), InvalidInput);
    CHECK_THROWS_AS(SolverConfig({0.5, 0.0, 10}).validate(), InvalidInput);
    CHECK_THROWS_AS(SolverConfig({0.5, 1e-8, 0}).validate(), InvalidInput);
    CHECK_NOTHROW(SolverConfig{}.validate());

    std::vector<oracle::WeightedEdge> none;
    auto g3 = testing::graph_from_edges(3, none);
    auto g4 = testing::graph_from_edges(4, none);
    CHECK_THROWS_AS(solve_rank(transition_matrix(g3), PersonalizationVector::for_user(g4, NodeId{0}), SolverConfig{}),
                    InvalidInput);
}
