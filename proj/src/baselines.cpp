#include "walkrec/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "walkrec/error.hpp"

namespace walkrec {

ItemGraph::ItemGraph(const Dataset& data) : adjacency_(data.item_count()) {
    RatingIndex index(data);
    const auto n = data.item_count();
    std::vector<std::uint32_t> counts(n, 0);
    std::vector<ItemIndex> touched;
    for (ItemIndex i = 0; i < n; ++i) {
        touched.clear();
        for (const auto& rater : index.by_item(i)) {
            for (const auto& other : index.by_user(rater.other)) {
                if (other.other == i) continue;
                if (counts[other.other]++ == 0) touched.push_back(other.other);
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = adjacency_[i];
        row.reserve(touched.size());
        for (auto j : touched) {
            row.push_back({j, counts[j]});
            counts[j] = 0;
        }
    }
}

std::uint32_t ItemGraph::weight(ItemIndex a, ItemIndex b) const {
    const auto& row = adjacency_[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const Neighbor& n, ItemIndex key) { return n.item < key; });
    return (it != row.end() && it->item == b) ? it->weight : 0;
}

RecGraph ItemGraph::to_rec_graph(std::span<const ExternalId> item_ids) const {
    if (item_ids.size() != item_count()) throw InvalidInput("ItemGraph::to_rec_graph: id table size mismatch");
    std::vector<NodeKind> kinds(item_count(), NodeKind::Item);
    std::vector<std::string> labels;
    labels.reserve(item_count());
    for (auto id : item_ids) labels.push_back(std::to_string(id));
    std::vector<std::vector<Edge>> out(item_count());
    for (ItemIndex i = 0; i < item_count(); ++i) {
        out[i].reserve(adjacency_[i].size());
        for (const auto& nb : adjacency_[i]) out[i].push_back({NodeId{nb.item}, static_cast<double>(nb.weight)});
    }
    return RecGraph(std::move(kinds), std::move(labels), std::move(out));
}

PersonalizationVector itemrank_personalization(const RatingIndex& ratings, std::size_t item_count, UserIndex user) {
    std::vector<double> weights(item_count, 0.0);
    const auto& rated = ratings.by_user(user);
    if (rated.empty()) {
        std::fill(weights.begin(), weights.end(), 1.0);
    } else {
        for (const auto& e : rated) weights[e.other] = e.value;
    }
    return PersonalizationVector::from_weights(std::move(weights));
}

std::vector<double> itemrank_scores(const TransitionMatrix& item_matrix, const RatingIndex& ratings, UserIndex user,
                                    const SolverConfig& config) {
    auto theta = itemrank_personalization(ratings, item_matrix.size(), user);
    return solve_rank(item_matrix, theta, config).scores;
}

// ---------------------------------------------------------------------------

CommuteKernel::CommuteKernel(const Dataset& data, std::size_t max_component_size)
    : users_(data.user_count()) {
    const std::size_t total = data.user_count() + data.item_count();
    std::vector<std::vector<std::uint32_t>> adj(total);
    for (const auto& r : data.ratings) {
        auto u = user_node(r.user);
        auto i = item_node(r.item);
        adj[u].push_back(i);
        adj[i].push_back(u);
    }

    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    component_of_.assign(total, kUnset);
    local_index_.assign(total, 0);
    for (std::uint32_t start = 0; start < total; ++start) {
        if (component_of_[start] != kUnset) continue;
        const auto c = static_cast<std::uint32_t>(components_.size());
        Component comp;
        std::queue<std::uint32_t> frontier;
        frontier.push(start);
        component_of_[start] = c;
        while (!frontier.empty()) {
            auto x = frontier.front();
            frontier.pop();
            comp.nodes.push_back(x);
            for (auto y : adj[x])
                if (component_of_[y] == kUnset) {
                    component_of_[y] = c;
                    frontier.push(y);
                }
        }
        std::sort(comp.nodes.begin(), comp.nodes.end());
        components_.push_back(std::move(comp));
    }

    for (auto& comp : components_) {
        const auto size = comp.nodes.size();
        if (size > max_component_size)
            throw InvalidInput("CommuteKernel: component of " + std::to_string(size) +
                               " nodes exceeds the dense limit of " + std::to_string(max_component_size));
        for (std::size_t k = 0; k < size; ++k) local_index_[comp.nodes[k]] = static_cast<std::uint32_t>(k);
        if (size == 1) {
            comp.lplus = Eigen::MatrixXd::Zero(1, 1);
            continue;
        }
        Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
        for (std::size_t k = 0; k < size; ++k) {
            const auto x = comp.nodes[k];
            lap(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = static_cast<double>(adj[x].size());
            comp.volume += static_cast<double>(adj[x].size());
            for (auto y : adj[x]) lap(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(local_index_[y])) -= 1.0;
        }
        // For a connected graph L+ = (L + J/n)^-1 - J/n with J the all-ones matrix.
        const double shift = 1.0 / static_cast<double>(size);
        lap.array() += shift;
        Eigen::LLT<Eigen::MatrixXd> llt(lap);
        if (llt.info() != Eigen::Success) throw Error("CommuteKernel: shifted Laplacian is not positive definite");
        comp.lplus = llt.solve(Eigen::MatrixXd::Identity(lap.rows(), lap.cols()));
        comp.lplus.array() -= shift;
        comp.lplus = 0.5 * (comp.lplus + comp.lplus.transpose()).eval();
    }
}

double CommuteKernel::pseudoinverse(std::uint32_t a, std::uint32_t b) const {
    if (component_of_[a] != component_of_[b]) return 0.0;
    const auto& comp = components_[component_of_[a]];
    return comp.lplus(local_index_[a], local_index_[b]);
}

double CommuteKernel::commute_time(std::uint32_t a, std::uint32_t b) const {
    if (component_of_[a] != component_of_[b]) return std::numeric_limits<double>::infinity();
    if (a == b) return 0.0;
    const auto& comp = components_[component_of_[a]];
    const auto la = local_index_[a];
    const auto lb = local_index_[b];
    return comp.volume * (comp.lplus(la, la) + comp.lplus(lb, lb) - 2.0 * comp.lplus(la, lb));
}

CommuteRanking commute_rank(const CommuteKernel& kernel, const RatingIndex& ratings, UserIndex user) {
    if (user >= kernel.user_count()) throw InvalidInput("commute_rank: unknown user index");
    const std::size_t items = kernel.node_count() - kernel.user_count();
    std::vector<char> rated(items, 0);
    for (const auto& e : ratings.by_user(user)) rated[e.other] = 1;

    const auto u = kernel.user_node(user);
    const auto home = kernel.component_of(u);
    CommuteRanking out;
    out.popularity_fallback = kernel.component_size(home) == 1;

    struct Scored {
        ItemIndex item;
        double commute;
    };
    std::vector<Scored> reachable;
    std::vector<ItemIndex> unreachable;
    for (ItemIndex i = 0; i < items; ++i) {
        if (rated[i]) continue;
        const auto node = kernel.item_node(i);
        if (!out.popularity_fallback && kernel.component_of(node) == home)
            reachable.push_back({i, kernel.commute_time(u, node)});
        else
            unreachable.push_back(i);
    }
    std::sort(reachable.begin(), reachable.end(), [](const Scored& a, const Scored& b) {
        if (a.commute != b.commute) return a.commute < b.commute;
        return a.item < b.item;
    });
    std::stable_sort(unreachable.begin(), unreachable.end(), [&](ItemIndex a, ItemIndex b) {
        return ratings.item_popularity(a) > ratings.item_popularity(b);
    });
    out.items.reserve(reachable.size() + unreachable.size());
    for (const auto& s : reachable) out.items.push_back(s.item);
    out.items.insert(out.items.end(), unreachable.begin(), unreachable.end());
    out.unreachable = unreachable.size();
    return out;
}

} // namespace walkrec
