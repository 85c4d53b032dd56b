#pragma once

// Test-only reference implementations. Everything here is dense, brute force
// and deliberately independent of the library's sparse code paths.

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct WeightedEdge {
    std::uint32_t from;
    std::uint32_t to;
    double weight;
};

/// Dense P with P(i, j) = w_ij / sum_k w_ik; zero rows for nodes without out-edges.
inline Eigen::MatrixXd row_normalized(std::size_t n, const std::vector<WeightedEdge>& edges) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& e : edges) p(e.from, e.to) += e.weight;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double s = p.row(i).sum();
        if (s > 0) p.row(i) /= s;
    }
    return p;
}

/// Stationary scores of the damped walk with teleport theta, by a direct
/// linear solve of (I - beta P^T) x = (1 - beta) theta. Mass lost through
/// dangling nodes is returned to theta, which only rescales x, so the result
/// is x normalized to sum one.
inline Eigen::VectorXd damped_walk_solve(const Eigen::MatrixXd& p, const Eigen::VectorXd& theta, double beta) {
    const auto n = p.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - beta * p.transpose();
    Eigen::VectorXd x = a.partialPivLu().solve((1.0 - beta) * theta);
    return x / x.sum();
}

/// Effective resistance between a and b in a unit-resistor network given by
/// an undirected edge list: ground b, inject unit current at a, read the
/// potential at a.
inline double effective_resistance(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                   std::uint32_t a, std::uint32_t b) {
    if (a == b) return 0.0;
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto [x, y] : edges) {
        lap(x, x) += 1;
        lap(y, y) += 1;
        lap(x, y) -= 1;
        lap(y, x) -= 1;
    }
    // Drop row/column b.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
        if (i != b) keep.push_back(i);
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd reduced(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c) reduced(r, c) = lap(keep[r], keep[c]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    Eigen::Index ai = 0;
    while (keep[ai] != a) ++ai;
    rhs(ai) = 1.0;
    Eigen::VectorXd potential = reduced.fullPivLu().solve(rhs);
    return potential(ai);
}

/// Random weighted digraph without self-loops or duplicate edges.
inline std::vector<WeightedEdge> random_digraph(std::mt19937_64& rng, std::size_t n, double density,
                                                bool strongly_connected) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    std::vector<WeightedEdge> edges;
    auto add = [&](std::uint32_t a, std::uint32_t b) {
        if (a != b && seen.emplace(a, b).second) edges.push_back({a, b, weight(rng)});
    };
    if (strongly_connected)
        for (std::uint32_t i = 0; i < n; ++i) add(i, static_cast<std::uint32_t>((i + 1) % n));
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
            if (unit(rng) < density) add(i, j);
    return edges;
}

} // namespace oracle
