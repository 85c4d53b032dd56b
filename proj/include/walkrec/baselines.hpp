#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "walkrec/dataset.hpp"
#include "walkrec/graph.hpp"
#include "walkrec/ranker.hpp"

namespace walkrec {

// ---------------------------------------------------------------------------
// ItemRank: personalized PageRank over the item co-rating graph.

/// Undirected item graph; weight(i, j) is the number of users who rated both.
class ItemGraph {
public:
    struct Neighbor {
        ItemIndex item;
        std::uint32_t weight;
    };

    explicit ItemGraph(const Dataset& data);

    std::size_t item_count() const noexcept { return adjacency_.size(); }
    std::span<const Neighbor> neighbors(ItemIndex i) const { return adjacency_[i]; }
    std::uint32_t weight(ItemIndex a, ItemIndex b) const;

    /// All-item RecGraph carrying the co-rating counts as edge weights.
    RecGraph to_rec_graph(std::span<const ExternalId> item_ids) const;

private:
    std::vector<std::vector<Neighbor>> adjacency_;  // sorted by item
};

/// Personalization proportional to the user's ratings; uniform over all
/// items when the user has none.
PersonalizationVector itemrank_personalization(const RatingIndex& ratings, std::size_t item_count, UserIndex user);

/// ItemRank scores per item for `user`, solved with the shared ranker.
std::vector<double> itemrank_scores(const TransitionMatrix& item_matrix, const RatingIndex& ratings, UserIndex user,
                                    const SolverConfig& config);

// ---------------------------------------------------------------------------
// Average commute time from the pseudoinverse of the Laplacian of the
// unit-weight user-item bipartite graph.

/**
 * Dense Laplacian pseudoinverse, one block per connected component.
 * Node numbering: users 0..m-1, then items m..m+n-1.
 */
class CommuteKernel {
public:
    static constexpr std::size_t kDefaultMaxComponentSize = 6000;

    /// Throws InvalidInput when a component exceeds `max_component_size`.
    explicit CommuteKernel(const Dataset& data, std::size_t max_component_size = kDefaultMaxComponentSize);

    std::size_t node_count() const noexcept { return component_of_.size(); }
    std::size_t user_count() const noexcept { return users_; }
    std::uint32_t user_node(UserIndex u) const { return u; }
    std::uint32_t item_node(ItemIndex i) const { return static_cast<std::uint32_t>(users_ + i); }

    std::uint32_t component_of(std::uint32_t node) const { return component_of_[node]; }
    std::size_t component_size(std::uint32_t component) const { return components_[component].nodes.size(); }
    /// Sum of degrees (twice the edge count) of the component.
    double component_volume(std::uint32_t component) const { return components_[component].volume; }

    /// Entry of the pseudoinverse; zero across components.
    double pseudoinverse(std::uint32_t a, std::uint32_t b) const;
    const Eigen::MatrixXd& component_pseudoinverse(std::uint32_t component) const {
        return components_[component].lplus;
    }
    std::span<const std::uint32_t> component_nodes(std::uint32_t component) const {
        return components_[component].nodes;
    }

    /// vol * (l+_aa + l+_bb - 2 l+_ab); infinity across components.
    double commute_time(std::uint32_t a, std::uint32_t b) const;

private:
    struct Component {
        std::vector<std::uint32_t> nodes;
        double volume = 0.0;
        Eigen::MatrixXd lplus;
    };

    std::size_t users_ = 0;
    std::vector<std::uint32_t> component_of_;
    std::vector<std::uint32_t> local_index_;
    std::vector<Component> components_;
};

struct CommuteRanking {
    /// Unrated items in the target's component by ascending commute time, then
    /// unreachable unrated items by descending popularity.
    std::vector<ItemIndex> items;
    std::size_t unreachable = 0;     // items appended after the commute-ranked part
    bool popularity_fallback = false;  // target had no edges at all
};

/// Ties in commute time (and popularity) are broken by ascending item index.
CommuteRanking commute_rank(const CommuteKernel& kernel, const RatingIndex& ratings, UserIndex user);

} // namespace walkrec
