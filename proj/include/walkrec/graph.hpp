#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "walkrec/dataset.hpp"

namespace walkrec {

enum class NodeKind : std::uint8_t { User, Item, Tag, Profile };

std::string_view to_string(NodeKind kind);

struct NodeId {
    std::uint32_t index = 0;

    auto operator<=>(const NodeId&) const = default;
};

struct Edge {
    NodeId target;
    double weight;

    bool operator==(const Edge&) const = default;
};

/// Which side-information edge families are added on top of the user-item core.
struct GraphConfig {
    bool enable_tags = true;
    bool enable_profiles = true;
    bool enable_social = true;

    static GraphConfig collaborative_only() { return {false, false, false}; }
    static GraphConfig hybrid() { return {true, true, true}; }

    /// key=value lines; '#' starts a comment. Unknown keys are an error.
    static GraphConfig parse(std::istream& in, const std::string& source_name = "<stream>");
    static GraphConfig load(const std::filesystem::path& path);

    bool operator==(const GraphConfig&) const = default;
};

/**
 * Weighted directed graph whose nodes are users, items, tags and profile
 * categories. Immutable once constructed.
 *
 * Nodes are laid out by kind (users, items, tags, profiles) and within a kind
 * by ascending dataset index, so `node_of(kind, i)` is an offset computation.
 * Out-edge lists are sorted by target.
 */
class RecGraph {
public:
    /// Builds from explicit parts; throws InvalidInput when an edge list
    /// breaks an invariant (non-positive weight, self-loop, duplicate target,
    /// target out of range).
    RecGraph(std::vector<NodeKind> kinds, std::vector<std::string> labels,
             std::vector<std::vector<Edge>> out_edges);

    std::size_t node_count() const noexcept { return kinds_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    NodeKind kind(NodeId n) const { return kinds_[n.index]; }
    /// External id of the node: numeric id for users/items, category name for
    /// tags/profiles.
    const std::string& label(NodeId n) const { return labels_[n.index]; }
    std::span<const Edge> out_edges(NodeId n) const { return out_[n.index]; }

    /// First node of `kind` and number of nodes of that kind.
    std::uint32_t offset(NodeKind kind) const { return offsets_[static_cast<int>(kind)]; }
    std::uint32_t count(NodeKind kind) const { return counts_[static_cast<int>(kind)]; }
    NodeId node_of(NodeKind kind, std::uint32_t dense_index) const;
    /// Dense index of `n` within its kind.
    std::uint32_t dense_index(NodeId n) const { return n.index - offset(kind(n)); }

    bool has_edge(NodeId from, NodeId to) const;

    /// TSV rows `source_kind source_id target_kind target_id weight`.
    void write_tsv(std::ostream& out) const;

    bool operator==(const RecGraph&) const = default;

private:
    std::vector<NodeKind> kinds_;
    std::vector<std::string> labels_;
    std::vector<std::vector<Edge>> out_;
    std::uint32_t offsets_[4] = {0, 0, 0, 0};
    std::uint32_t counts_[4] = {0, 0, 0, 0};
    std::size_t edge_count_ = 0;
};

/**
 * Edge weight of a user-item rating edge:
 * exp((r - mean) / sqrt(sum of squared deviations of the user's ratings)).
 * Returns exactly 1 when all of the user's ratings are equal.
 * Throws InvalidInput on an empty rating list.
 */
double rating_edge_weight(double rating, std::span<const double> user_ratings);

/// Builds the recommendation graph for `data`. Every user and item of the
/// dataset becomes a node, rated or not.
RecGraph build_graph(const Dataset& data, const GraphConfig& config);

/**
 * Column-stochastic transition matrix W with W(i, j) = P(j -> i), stored as
 * compressed rows so that y = W x is a gather over each row.
 * Columns of dangling nodes (no out-edges) are all zero.
 */
class TransitionMatrix {
public:
    std::size_t size() const noexcept { return dangling_.size(); }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    bool dangling(std::uint32_t node) const { return dangling_[node] != 0; }
    std::span<const std::uint32_t> dangling_nodes() const { return dangling_list_; }

    /// Entry W(row, col); zero when absent.
    double at(std::uint32_t row, std::uint32_t col) const;

    /// y = W x.
    void multiply(std::span<const double> x, std::span<double> y) const;

    std::span<const std::uint32_t> row_columns(std::uint32_t row) const;
    std::span<const double> row_values(std::uint32_t row) const;

    friend TransitionMatrix transition_matrix(const RecGraph& graph);

private:
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> columns_;
    std::vector<double> values_;
    std::vector<char> dangling_;
    std::vector<std::uint32_t> dangling_list_;
};

TransitionMatrix transition_matrix(const RecGraph& graph);

} // namespace walkrec
