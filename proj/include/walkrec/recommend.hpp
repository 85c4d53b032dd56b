#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "walkrec/dataset.hpp"
#include "walkrec/graph.hpp"
#include "walkrec/ranker.hpp"

namespace walkrec {

struct ScoredItem {
    ItemIndex item;
    double score;

    bool operator==(const ScoredItem&) const = default;
};

/// Items ordered by descending score, ties by ascending item index (which is
/// ascending external id).
struct RankedList {
    std::vector<UserIndex> target;     // one user, or the group members
    std::vector<ItemIndex> excluded;   // ascending
    std::vector<ScoredItem> entries;
};

enum class PredictionMethod { UserBased, ItemBased };

std::string_view to_string(PredictionMethod method);

struct Prediction {
    double value = 0.0;
    PredictionMethod method = PredictionMethod::UserBased;
    bool fallback_used = false;
};

/// A rater x of the item: their rank score s_x, rating r_xi and mean rating.
struct RaterContribution {
    double rank;
    double rating;
    double rater_mean;
};

/// An item j the target rated: its rank score s_j and the target's rating.
struct RatedItemContribution {
    double rank;
    double rating;
};

/// Rank scores of the item nodes, indexed by dense item index.
std::vector<double> item_scores(const RecGraph& graph, const RankVector& rank);

/// Top-k items outside `excluded` (ascending). k beyond the candidate count
/// returns every candidate.
RankedList top_items(std::span<const double> scores, std::span<const ItemIndex> excluded, std::size_t k);

/// Top-k recommendation straight from a rank vector of the recommendation graph.
RankedList direct_recommend(const RecGraph& graph, const RankVector& rank, std::span<const ItemIndex> excluded,
                            std::size_t k);

/**
 * Rank-weighted average of the raters' mean-centred ratings, shifted by the
 * target's mean. Falls back to `target_mean` when there are no raters or their
 * rank mass is zero. Clamped to `scale`.
 */
Prediction predict_user_based(std::span<const RaterContribution> raters, double target_mean, RatingScale scale);

/**
 * Rank-weighted average of the target's own ratings. Falls back to
 * `global_mean` when the target rated nothing or the rank mass on their items
 * is zero. Clamped to `scale`.
 */
Prediction predict_item_based(std::span<const RatedItemContribution> rated, double global_mean, RatingScale scale);

/**
 * Binds a dataset to its recommendation graph and transition matrix and
 * answers recommendation and prediction queries for users and groups.
 * Thread-safe for concurrent queries.
 */
class Recommender {
public:
    Recommender(const Dataset& data, const GraphConfig& graph_config, const SolverConfig& solver);

    const Dataset& dataset() const noexcept { return data_; }
    const RecGraph& graph() const noexcept { return graph_; }
    const TransitionMatrix& matrix() const noexcept { return matrix_; }
    const RatingIndex& ratings() const noexcept { return index_; }

    RankVector rank_for_user(UserIndex user) const;
    RankVector rank_for_group(std::span<const UserIndex> members) const;

    /// Items the user rated, ascending.
    std::vector<ItemIndex> rated_items(UserIndex user) const;

    RankedList recommend_user(UserIndex user, std::size_t k) const;
    /// Excludes the union of the members' rated items.
    RankedList recommend_group(std::span<const UserIndex> members, std::size_t k) const;

    /// Prediction for `user` on `item` from a precomputed rank vector of that user.
    Prediction predict(UserIndex user, ItemIndex item, PredictionMethod method, const RankVector& rank) const;

private:
    Dataset data_;
    RecGraph graph_;
    TransitionMatrix matrix_;
    RatingIndex index_;
    SolverConfig solver_;
};

} // namespace walkrec
