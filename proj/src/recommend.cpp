#include "walkrec/recommend.hpp"

#include <algorithm>

#include "walkrec/error.hpp"

namespace walkrec {

std::string_view to_string(PredictionMethod method) {
    return method == PredictionMethod::UserBased ? "user" : "item";
}

std::vector<double> item_scores(const RecGraph& graph, const RankVector& rank) {
    if (rank.scores.size() != graph.node_count()) throw InvalidInput("item_scores: rank vector does not match graph");
    const auto first = graph.offset(NodeKind::Item);
    const auto count = graph.count(NodeKind::Item);
    return {rank.scores.begin() + first, rank.scores.begin() + first + count};
}

RankedList top_items(std::span<const double> scores, std::span<const ItemIndex> excluded, std::size_t k) {
    RankedList list;
    list.excluded.assign(excluded.begin(), excluded.end());
    std::sort(list.excluded.begin(), list.excluded.end());
    list.excluded.erase(std::unique(list.excluded.begin(), list.excluded.end()), list.excluded.end());

    std::vector<ScoredItem> candidates;
    candidates.reserve(scores.size());
    auto ex = list.excluded.begin();
    for (ItemIndex i = 0; i < scores.size(); ++i) {
        while (ex != list.excluded.end() && *ex < i) ++ex;
        if (ex != list.excluded.end() && *ex == i) continue;
        candidates.push_back({i, scores[i]});
    }
    auto better = [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item < b.item;
    };
    if (k < candidates.size()) {
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                          better);
        candidates.resize(k);
    } else {
        std::sort(candidates.begin(), candidates.end(), better);
    }
    list.entries = std::move(candidates);
    return list;
}

RankedList direct_recommend(const RecGraph& graph, const RankVector& rank, std::span<const ItemIndex> excluded,
                            std::size_t k) {
    auto scores = item_scores(graph, rank);
    return top_items(scores, excluded, k);
}

Prediction predict_user_based(std::span<const RaterContribution> raters, double target_mean, RatingScale scale) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& x : raters) {
        num += x.rank * (x.rating - x.rater_mean);
        den += x.rank;
    }
    Prediction p;
    p.method = PredictionMethod::UserBased;
    if (raters.empty() || !(den > 0.0)) {
        p.value = target_mean;
        p.fallback_used = true;
    } else {
        p.value = num / den + target_mean;
    }
    p.value = std::clamp(p.value, scale.min, scale.max);
    return p;
}

Prediction predict_item_based(std::span<const RatedItemContribution> rated, double global_mean, RatingScale scale) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& j : rated) {
        num += j.rank * j.rating;
        den += j.rank;
    }
    Prediction p;
    p.method = PredictionMethod::ItemBased;
    if (rated.empty() || !(den > 0.0)) {
        p.value = global_mean;
        p.fallback_used = true;
    } else {
        p.value = num / den;
    }
    p.value = std::clamp(p.value, scale.min, scale.max);
    return p;
}

// ---------------------------------------------------------------------------

Recommender::Recommender(const Dataset& data, const GraphConfig& graph_config, const SolverConfig& solver)
    : data_(data),
      graph_(build_graph(data_, graph_config)),
      matrix_(transition_matrix(graph_)),
      index_(data_),
      solver_(solver) {
    solver_.validate();
}

RankVector Recommender::rank_for_user(UserIndex user) const {
    UserIndex members[] = {user};
    return rank_for_group(members);
}

RankVector Recommender::rank_for_group(std::span<const UserIndex> members) const {
    std::vector<NodeId> nodes;
    nodes.reserve(members.size());
    for (auto u : members) nodes.push_back(graph_.node_of(NodeKind::User, u));
    auto theta = PersonalizationVector::for_group(graph_, nodes);
    return solve_rank(matrix_, theta, solver_);
}

std::vector<ItemIndex> Recommender::rated_items(UserIndex user) const {
    std::vector<ItemIndex> items;
    for (const auto& e : index_.by_user(user)) items.push_back(e.other);
    return items;
}

RankedList Recommender::recommend_user(UserIndex user, std::size_t k) const {
    UserIndex members[] = {user};
    return recommend_group(members, k);
}

RankedList Recommender::recommend_group(std::span<const UserIndex> members, std::size_t k) const {
    if (members.empty()) throw InvalidInput("recommend_group: empty group");
    std::vector<ItemIndex> excluded;
    for (auto u : members) {
        if (u >= data_.user_count()) throw InvalidInput("recommend_group: unknown user index");
        auto rated = rated_items(u);
        excluded.insert(excluded.end(), rated.begin(), rated.end());
    }
    auto rank = rank_for_group(members);
    auto list = direct_recommend(graph_, rank, excluded, k);
    list.target.assign(members.begin(), members.end());
    std::sort(list.target.begin(), list.target.end());
    list.target.erase(std::unique(list.target.begin(), list.target.end()), list.target.end());
    return list;
}

Prediction Recommender::predict(UserIndex user, ItemIndex item, PredictionMethod method, const RankVector& rank) const {
    if (user >= data_.user_count() || item >= data_.item_count()) throw InvalidInput("predict: unknown user or item");
    if (rank.scores.size() != graph_.node_count()) throw InvalidInput("predict: rank vector does not match graph");
    if (method == PredictionMethod::UserBased) {
        std::vector<RaterContribution> raters;
        for (const auto& e : index_.by_item(item)) {
            const auto node = graph_.node_of(NodeKind::User, e.other);
            raters.push_back({rank.scores[node.index], e.value, *index_.user_mean(e.other)});
        }
        const double target_mean = index_.user_mean(user).value_or(index_.global_mean());
        return predict_user_based(raters, target_mean, data_.scale);
    }
    std::vector<RatedItemContribution> rated;
    for (const auto& e : index_.by_user(user)) {
        const auto node = graph_.node_of(NodeKind::Item, e.other);
        rated.push_back({rank.scores[node.index], e.value});
    }
    return predict_item_based(rated, index_.global_mean(), data_.scale);
}

} // namespace walkrec
