#include <algorithm>
#include <optional>

#include "walkrec/baselines.hpp"
#include "walkrec/error.hpp"
#include "walkrec/eval.hpp"
#include "walkrec/recommend.hpp"

namespace walkrec {

std::vector<UserRanking> RankingMethod::rank_many(std::span<const UserIndex> users) const {
    std::vector<UserRanking> out;
    out.reserve(users.size());
    for (auto u : users) out.push_back(rank(u));
    return out;
}

namespace {

constexpr std::size_t kBatch = 16;

std::vector<ItemIndex> rated_by(const RatingIndex& ratings, UserIndex user) {
    std::vector<ItemIndex> items;
    for (const auto& e : ratings.by_user(user)) items.push_back(e.other);
    return items;
}

// Nodes reachable from the personalization support along out-edges.
std::vector<char> reachable_from(const RecGraph& graph, std::span<const double> theta) {
    std::vector<char> seen(graph.node_count(), 0);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t i = 0; i < theta.size(); ++i)
        if (theta[i] > 0.0) {
            seen[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (const auto& e : graph.out_edges(NodeId{x}))
            if (!seen[e.target.index]) {
                seen[e.target.index] = 1;
                stack.push_back(e.target.index);
            }
    }
    return seen;
}

// Full ranking of unrated items from item scores; items the walk cannot reach
// have a stationary score of exactly zero.
std::vector<ItemIndex> rank_items(std::vector<double> scores, std::span<const char> item_reachable,
                                  std::span<const ItemIndex> excluded) {
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!item_reachable[i]) scores[i] = 0.0;
    auto list = top_items(scores, excluded, scores.size());
    std::vector<ItemIndex> out;
    out.reserve(list.entries.size());
    for (const auto& e : list.entries) out.push_back(e.item);
    return out;
}

class UserRankMethod final : public RankingMethod {
public:
    UserRankMethod(std::string name, GraphConfig graph_config, SolverConfig solver)
        : name_(std::move(name)), graph_config_(graph_config), solver_(solver) {}

    std::string_view name() const override { return name_; }

    void fit(const Dataset& train) override {
        recommender_.emplace(train, graph_config_, solver_);
    }

    UserRanking rank(UserIndex user) const override {
        UserIndex one[] = {user};
        return std::move(rank_many(one).front());
    }

    std::vector<UserRanking> rank_many(std::span<const UserIndex> users) const override {
        const auto& rec = *recommender_;
        const auto& graph = rec.graph();
        std::vector<UserRanking> out(users.size());
        for (std::size_t start = 0; start < users.size(); start += kBatch) {
            const auto stop = std::min(users.size(), start + kBatch);
            std::vector<PersonalizationVector> thetas;
            std::vector<std::size_t> slots;
            std::vector<std::vector<char>> reach;
            for (std::size_t k = start; k < stop; ++k) {
                auto theta = PersonalizationVector::for_user(graph, graph.node_of(NodeKind::User, users[k]));
                auto seen = reachable_from(graph, theta.values());
                const auto item0 = graph.offset(NodeKind::Item);
                std::vector<char> items(seen.begin() + item0, seen.begin() + item0 + graph.count(NodeKind::Item));
                const auto rated = rec.rated_items(users[k]);
                if (std::find(items.begin(), items.end(), 1) == items.end()) {
                    out[k].items = popularity_order(rec.ratings(), graph.count(NodeKind::Item), rated);
                    out[k].fallback = true;
                    continue;
                }
                thetas.push_back(std::move(theta));
                slots.push_back(k);
                reach.push_back(std::move(items));
            }
            if (thetas.empty()) continue;
            auto ranks = solve_rank_batch(rec.matrix(), thetas, solver_);
            for (std::size_t b = 0; b < slots.size(); ++b) {
                if (!ranks[b].converged) throw Error(name_ + ": rank iteration did not converge");
                const auto k = slots[b];
                out[k].items = rank_items(item_scores(graph, ranks[b]), reach[b], rec.rated_items(users[k]));
            }
        }
        return out;
    }

private:
    std::string name_;
    GraphConfig graph_config_;
    SolverConfig solver_;
    std::optional<Recommender> recommender_;
};

class ItemRankMethod final : public RankingMethod {
public:
    explicit ItemRankMethod(SolverConfig solver) : solver_(solver) {}

    std::string_view name() const override { return "itemrank"; }

    void fit(const Dataset& train) override {
        ratings_.emplace(train);
        graph_.emplace(ItemGraph(train).to_rec_graph(train.item_ids));
        matrix_.emplace(transition_matrix(*graph_));
    }

    UserRanking rank(UserIndex user) const override {
        UserIndex one[] = {user};
        return std::move(rank_many(one).front());
    }

    std::vector<UserRanking> rank_many(std::span<const UserIndex> users) const override {
        std::vector<UserRanking> out(users.size());
        const auto n = graph_->node_count();
        for (std::size_t start = 0; start < users.size(); start += kBatch) {
            const auto stop = std::min(users.size(), start + kBatch);
            std::vector<PersonalizationVector> thetas;
            for (std::size_t k = start; k < stop; ++k) thetas.push_back(itemrank_personalization(*ratings_, n, users[k]));
            auto ranks = solve_rank_batch(*matrix_, thetas, solver_);
            for (std::size_t b = 0; b < thetas.size(); ++b) {
                if (!ranks[b].converged) throw Error("itemrank: rank iteration did not converge");
                const auto k = start + b;
                auto reach = reachable_from(*graph_, thetas[b].values());
                out[k].items = rank_items(std::move(ranks[b].scores), reach, rated_by(*ratings_, users[k]));
                out[k].fallback = ratings_->by_user(users[k]).empty();
            }
        }
        return out;
    }

private:
    SolverConfig solver_;
    std::optional<RatingIndex> ratings_;
    std::optional<RecGraph> graph_;
    std::optional<TransitionMatrix> matrix_;
};

class CommuteTimeMethod final : public RankingMethod {
public:
    explicit CommuteTimeMethod(std::size_t max_nodes) : max_nodes_(max_nodes) {}

    std::string_view name() const override { return "lplus"; }

    void fit(const Dataset& train) override {
        ratings_.emplace(train);
        kernel_.emplace(train, max_nodes_);
    }

    UserRanking rank(UserIndex user) const override {
        auto r = commute_rank(*kernel_, *ratings_, user);
        return {std::move(r.items), r.popularity_fallback};
    }

private:
    std::size_t max_nodes_;
    std::optional<RatingIndex> ratings_;
    std::optional<CommuteKernel> kernel_;
};

} // namespace

std::vector<ItemIndex> popularity_order(const RatingIndex& ratings, std::size_t item_count,
                                        std::span<const ItemIndex> excluded) {
    std::vector<double> scores(item_count);
    for (ItemIndex i = 0; i < item_count; ++i) scores[i] = static_cast<double>(ratings.item_popularity(i));
    auto list = top_items(scores, excluded, item_count);
    std::vector<ItemIndex> out;
    out.reserve(list.entries.size());
    for (const auto& e : list.entries) out.push_back(e.item);
    return out;
}

const std::vector<std::string>& registered_methods() {
    static const std::vector<std::string> names = {"userrank-cf", "userrank-social", "itemrank", "lplus"};
    return names;
}

std::unique_ptr<RankingMethod> make_method(std::string_view name, const MethodOptions& options) {
    if (name == "userrank-cf")
        return std::make_unique<UserRankMethod>("userrank-cf", GraphConfig::collaborative_only(), options.solver);
    if (name == "userrank-social")
        return std::make_unique<UserRankMethod>("userrank-social", GraphConfig::hybrid(), options.solver);
    if (name == "itemrank") return std::make_unique<ItemRankMethod>(options.solver);
    if (name == "lplus") return std::make_unique<CommuteTimeMethod>(options.lplus_max_nodes);
    std::string known;
    for (const auto& n : registered_methods()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidInput("unknown method '" + std::string(name) + "'; registered methods: " + known);
}

bool method_supports(std::string_view name, SplitMode mode) {
    return !(name == "lplus" && mode == SplitMode::Cold);
}

} // namespace walkrec
