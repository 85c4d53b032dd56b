#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "walkrec/graph.hpp"

namespace walkrec {

struct SolverConfig {
    static constexpr double kDefaultBeta = 0.85;
    static constexpr double kDefaultEpsilon = 1e-8;
    static constexpr int kDefaultMaxIter = 200;

    double beta = kDefaultBeta;        // probability of following an edge
    double epsilon = kDefaultEpsilon;  // stop when the L1 change of an iterate drops below this
    int max_iter = kDefaultMaxIter;

    /// Throws InvalidInput unless 0 <= beta < 1, epsilon > 0, max_iter > 0.
    void validate() const;

    bool operator==(const SolverConfig&) const = default;
};

/// Teleport distribution of the walk. Non-negative, sums to one.
class PersonalizationVector {
public:
    /// Basis vector at `user`; throws InvalidInput for non-user or out-of-range nodes.
    static PersonalizationVector for_user(const RecGraph& graph, NodeId user);
    /// Uniform over the distinct members; throws on an empty group or a non-user member.
    static PersonalizationVector for_group(const RecGraph& graph, std::span<const NodeId> members);
    /// Normalizes arbitrary non-negative weights with a positive sum.
    static PersonalizationVector from_weights(std::vector<double> weights);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    explicit PersonalizationVector(std::vector<double> v) : values_(std::move(v)) {}
    std::vector<double> values_;
};

struct RankVector {
    std::vector<double> scores;
    int iterations = 0;
    /// L1 norm of s - (beta W s + dangling correction + (1 - beta) theta) at the returned s.
    double residual = 0.0;
    bool converged = false;
};

/**
 * Damped personalized power iteration
 *
 *   s <- beta W s + (beta d(s) + 1 - beta) theta,   s0 = uniform,
 *
 * where d(s) is the mass currently sitting on dangling nodes. Stops once the
 * L1 change drops below epsilon; after max_iter the last iterate is returned
 * with `converged == false`.
 */
RankVector solve_rank(const TransitionMatrix& w, const PersonalizationVector& theta, const SolverConfig& config);

/// Solves several personalizations in one sweep over the matrix. Each result
/// satisfies the same stopping rule as solve_rank, though iterates may run a
/// few steps past their own convergence point while others finish.
std::vector<RankVector> solve_rank_batch(const TransitionMatrix& w, std::span<const PersonalizationVector> thetas,
                                         const SolverConfig& config);

} // namespace walkrec
