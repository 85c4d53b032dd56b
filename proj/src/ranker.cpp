#include "walkrec/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "walkrec/error.hpp"

namespace walkrec {

void SolverConfig::validate() const {
    if (!(beta >= 0.0 && beta < 1.0)) throw InvalidInput("beta must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    if (max_iter <= 0) throw InvalidInput("max_iter must be positive");
}

PersonalizationVector PersonalizationVector::for_user(const RecGraph& graph, NodeId user) {
    NodeId members[] = {user};
    return for_group(graph, members);
}

PersonalizationVector PersonalizationVector::for_group(const RecGraph& graph, std::span<const NodeId> members) {
    if (members.empty()) throw InvalidInput("personalization: empty group");
    std::vector<NodeId> distinct(members.begin(), members.end());
    for (auto n : distinct) {
        if (n.index >= graph.node_count())
            throw InvalidInput("personalization: node " + std::to_string(n.index) + " out of range");
        if (graph.kind(n) != NodeKind::User)
            throw InvalidInput("personalization: node " + std::to_string(n.index) + " is a " +
                               std::string(to_string(graph.kind(n))) + ", not a user");
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<double> v(graph.node_count(), 0.0);
    const double share = 1.0 / static_cast<double>(distinct.size());
    for (auto n : distinct) v[n.index] = share;
    return PersonalizationVector(std::move(v));
}

PersonalizationVector PersonalizationVector::from_weights(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("personalization: weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw InvalidInput("personalization: weights sum to zero");
    for (double& w : weights) w /= total;
    return PersonalizationVector(std::move(weights));
}

namespace {

// One application of the damped operator: out = beta W s + (beta d(s) + 1 - beta) theta.
void apply_operator(const TransitionMatrix& w, std::span<const double> theta, double beta,
                    std::span<const double> s, std::span<double> out) {
    w.multiply(s, out);
    double dangling_mass = 0.0;
    for (auto j : w.dangling_nodes()) dangling_mass += s[j];
    const double teleport = beta * dangling_mass + (1.0 - beta);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = beta * out[i] + teleport * theta[i];
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

} // namespace

RankVector solve_rank(const TransitionMatrix& w, const PersonalizationVector& theta, const SolverConfig& config) {
    config.validate();
    const std::size_t n = w.size();
    if (theta.size() != n) throw InvalidInput("solve_rank: personalization size does not match matrix");

    RankVector result;
    if (n == 0) {
        result.converged = true;
        return result;
    }
    std::vector<double> s(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (int t = 1; t <= config.max_iter; ++t) {
        apply_operator(w, theta.values(), config.beta, s, next);
        const double delta = l1_distance(next, s);
        s.swap(next);
        result.iterations = t;
        if (delta < config.epsilon) {
            result.converged = true;
            break;
        }
    }
    apply_operator(w, theta.values(), config.beta, s, next);
    result.residual = l1_distance(next, s);
    result.scores = std::move(s);
    return result;
}

std::vector<RankVector> solve_rank_batch(const TransitionMatrix& w, std::span<const PersonalizationVector> thetas,
                                         const SolverConfig& config) {
    config.validate();
    const std::size_t n = w.size();
    const std::size_t b = thetas.size();
    for (const auto& th : thetas)
        if (th.size() != n) throw InvalidInput("solve_rank_batch: personalization size does not match matrix");
    std::vector<RankVector> results(b);
    if (b == 0) return results;
    if (n == 0) {
        for (auto& r : results) r.converged = true;
        return results;
    }

    // Node-major interleaved layout: s[i * b + c] is column c's score at node i.
    std::vector<double> s(n * b, 1.0 / static_cast<double>(n));
    std::vector<double> next(n * b);
    std::vector<double> teleport(b), delta(b), dangling(b);
    std::vector<char> done(b, 0);
    const double beta = config.beta;

    auto sweep = [&](std::span<const double> in, std::span<double> out) {
        std::fill(dangling.begin(), dangling.end(), 0.0);
        for (auto j : w.dangling_nodes())
            for (std::size_t c = 0; c < b; ++c) dangling[c] += in[j * b + c];
        for (std::size_t c = 0; c < b; ++c) teleport[c] = beta * dangling[c] + (1.0 - beta);
        for (std::uint32_t r = 0; r < n; ++r) {
            double* acc = out.data() + static_cast<std::size_t>(r) * b;
            std::fill(acc, acc + b, 0.0);
            auto cols = w.row_columns(r);
            auto vals = w.row_values(r);
            for (std::size_t e = 0; e < cols.size(); ++e) {
                const double* src = in.data() + static_cast<std::size_t>(cols[e]) * b;
                const double v = vals[e];
                for (std::size_t c = 0; c < b; ++c) acc[c] += v * src[c];
            }
            for (std::size_t c = 0; c < b; ++c) acc[c] = beta * acc[c] + teleport[c] * thetas[c][r];
        }
    };
    auto column_deltas = [&](std::span<const double> x, std::span<const double> y) {
        std::fill(delta.begin(), delta.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < b; ++c) delta[c] += std::abs(x[i * b + c] - y[i * b + c]);
    };

    std::size_t remaining = b;
    for (int t = 1; t <= config.max_iter && remaining > 0; ++t) {
        sweep(s, next);
        column_deltas(next, s);
        s.swap(next);
        for (std::size_t c = 0; c < b; ++c) {
            if (done[c]) continue;
            results[c].iterations = t;
            if (delta[c] < config.epsilon) {
                results[c].converged = true;
                done[c] = 1;
                --remaining;
            }
        }
    }
    sweep(s, next);
    column_deltas(next, s);
    for (std::size_t c = 0; c < b; ++c) {
        results[c].residual = delta[c];
        results[c].scores.resize(n);
        for (std::size_t i = 0; i < n; ++i) results[c].scores[i] = s[i * b + c];
    }
    return results;
}

} // namespace walkrec
