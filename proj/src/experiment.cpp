#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "walkrec/error.hpp"
#include "walkrec/eval.hpp"
#include "walkrec/parallel.hpp"

namespace walkrec {

std::string_view to_string(SplitMode mode) { return mode == SplitMode::Warm ? "warm" : "cold"; }

SplitMode parse_split_mode(std::string_view text) {
    if (text == "warm") return SplitMode::Warm;
    if (text == "cold") return SplitMode::Cold;
    throw InvalidInput("split mode must be 'warm' or 'cold', got '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kUsersPerTask = 32;

struct SplitScore {
    std::vector<double> recalls;          // aligned with the truncated k-grid
    double mean_percentile = 0.0;
    std::vector<double> user_percentiles;
    std::size_t test_size = 0;
    std::size_t disconnected = 0;
};

SplitScore score_split(const RankingMethod& method, const Split& split, std::span<const std::size_t> k_grid,
                       int threads) {
    const auto relevant = relevant_test_set(split);
    std::vector<UserIndex> users;
    std::vector<std::vector<ItemIndex>> relevant_items;
    for (const auto& [u, i] : relevant.pairs) {
        if (users.empty() || users.back() != u) {
            users.push_back(u);
            relevant_items.emplace_back();
        }
        relevant_items.back().push_back(i);
    }

    SplitScore out;
    out.test_size = relevant.pairs.size();
    if (users.empty()) return out;

    std::vector<UserRanking> rankings(users.size());
    const auto tasks = (users.size() + kUsersPerTask - 1) / kUsersPerTask;
    parallel_for(tasks, threads, [&](std::size_t t) {
        const auto begin = t * kUsersPerTask;
        const auto end = std::min(users.size(), begin + kUsersPerTask);
        auto part = method.rank_many(std::span<const UserIndex>(users).subspan(begin, end - begin));
        for (std::size_t k = begin; k < end; ++k) rankings[k] = std::move(part[k - begin]);
    });

    std::vector<std::vector<ItemIndex>> lists(users.size());
    out.user_percentiles.resize(users.size());
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& ranking = rankings[k].items;
        if (rankings[k].fallback) ++out.disconnected;
        std::vector<std::size_t> positions;
        for (auto item : relevant_items[k]) {
            auto it = std::find(ranking.begin(), ranking.end(), item);
            if (it == ranking.end())
                throw Error(std::string(method.name()) + ": relevant item missing from the candidate ranking");
            positions.push_back(static_cast<std::size_t>(it - ranking.begin()) + 1);
        }
        out.user_percentiles[k] = percentile_score(positions, ranking.size());
        lists[k] = ranking;
    }
    out.mean_percentile = std::accumulate(out.user_percentiles.begin(), out.user_percentiles.end(), 0.0) /
                          static_cast<double>(users.size());
    for (auto k : k_grid) out.recalls.push_back(recall_at_k(lists, relevant_items, k));
    return out;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(sorted.size() - 1, lo + 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void log_line(const ProtocolConfig& protocol, const std::string& line) {
    if (protocol.log) protocol.log(line);
}

} // namespace

std::vector<EvalReport> run_experiment(const Dataset& data, std::span<const std::string> methods,
                                       const ProtocolConfig& protocol) {
    if (methods.empty()) throw InvalidInput("run_experiment: no methods given");
    for (const auto& name : methods) make_method(name, protocol.methods);  // validates names
    protocol.methods.solver.validate();
    if (protocol.list_length == 0) throw InvalidInput("run_experiment: list length must be positive");

    std::vector<std::size_t> k_grid;
    for (auto k : protocol.k_grid) {
        if (k == 0) throw InvalidInput("run_experiment: k must be >= 1");
        if (k <= protocol.list_length) k_grid.push_back(k);
    }
    std::sort(k_grid.begin(), k_grid.end());
    k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());

    std::vector<Split> splits;
    if (protocol.mode == SplitMode::Warm) {
        splits = split_warm(data, protocol.folds, protocol.seed);
    } else {
        if (protocol.cold_splits < 1) throw InvalidInput("run_experiment: cold_splits must be >= 1");
        for (int s = 0; s < protocol.cold_splits; ++s)
            splits.push_back(split_cold(data, protocol.cold_fraction, protocol.seed + static_cast<std::uint64_t>(s)));
    }

    std::vector<EvalReport> reports(methods.size());
    std::vector<std::vector<double>> pooled(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        reports[m].method = methods[m];
        reports[m].mode = protocol.mode;
        if (!method_supports(methods[m], protocol.mode)) {
            reports[m].status = "skipped";
            reports[m].message = "method is not evaluated in " + std::string(to_string(protocol.mode)) + " mode";
        }
    }

    for (std::size_t s = 0; s < splits.size(); ++s) {
        const auto& split = splits[s];
        if (relevant_test_set(split).empty_warning)
            log_line(protocol, "warning: split " + std::to_string(s) + " has no top-rated test records");
        for (std::size_t m = 0; m < methods.size(); ++m) {
            auto& report = reports[m];
            if (report.status != "ok") continue;
            log_line(protocol, methods[m] + ": split " + std::to_string(s + 1) + "/" + std::to_string(splits.size()));
            try {
                auto method = make_method(methods[m], protocol.methods);
                method->fit(split.train);
                auto score = score_split(*method, split, k_grid, protocol.threads);
                report.split_percentiles.push_back(score.mean_percentile);
                report.split_recalls.push_back(std::move(score.recalls));
                report.test_size += score.test_size;
                report.evaluated_users += score.user_percentiles.size();
                report.disconnected_users += score.disconnected;
                pooled[m].insert(pooled[m].end(), score.user_percentiles.begin(), score.user_percentiles.end());
            } catch (const std::exception& e) {
                report.status = "failed";
                report.message = "split " + std::to_string(s) + ": " + e.what();
                log_line(protocol, methods[m] + " failed: " + e.what());
            }
        }
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
        auto& report = reports[m];
        if (report.status != "ok") continue;
        const auto n = static_cast<double>(report.split_percentiles.size());
        report.mean_percentile =
            std::accumulate(report.split_percentiles.begin(), report.split_percentiles.end(), 0.0) / n;
        double var = 0.0;
        for (double p : report.split_percentiles) var += (p - report.mean_percentile) * (p - report.mean_percentile);
        report.percentile_spread = std::sqrt(var / n);
        for (std::size_t k = 0; k < k_grid.size(); ++k) {
            double sum = 0.0;
            for (const auto& recalls : report.split_recalls) sum += recalls[k];
            report.recall_curve.emplace_back(k_grid[k], sum / n);
        }
        auto& values = pooled[m];
        std::sort(values.begin(), values.end());
        report.per_user.users = values.size();
        if (!values.empty()) {
            report.per_user.min = values.front();
            report.per_user.q1 = quantile(values, 0.25);
            report.per_user.median = quantile(values, 0.5);
            report.per_user.q3 = quantile(values, 0.75);
            report.per_user.max = values.back();
        }
    }
    return reports;
}

nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["method"] = r.method;
    j["mode"] = std::string(to_string(r.mode));
    j["status"] = r.status;
    if (!r.message.empty()) j["message"] = r.message;
    j["mean_percentile"] = r.mean_percentile;
    j["percentile_spread"] = r.percentile_spread;
    j["split_percentiles"] = r.split_percentiles;
    auto curve = nlohmann::json::array();
    for (const auto& [k, v] : r.recall_curve) curve.push_back({{"k", k}, {"recall", v}});
    j["recall_curve"] = curve;
    j["split_recalls"] = r.split_recalls;
    j["per_user_percentile"] = {{"users", r.per_user.users}, {"min", r.per_user.min},   {"q1", r.per_user.q1},
                                {"median", r.per_user.median}, {"q3", r.per_user.q3}, {"max", r.per_user.max}};
    j["test_size"] = r.test_size;
    j["evaluated_users"] = r.evaluated_users;
    j["disconnected_users"] = r.disconnected_users;
    return j;
}

void write_report_table(std::ostream& out, std::span<const EvalReport> reports) {
    std::vector<std::size_t> ks;
    for (const auto& r : reports)
        for (const auto& [k, v] : r.recall_curve)
            if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
    std::sort(ks.begin(), ks.end());

    out << "method\tmode\tstatus\tmean_percentile\tpercentile_spread\ttest_size\tdisconnected_users";
    for (auto k : ks) out << "\trecall@" << k;
    out << '\n';
    char buf[32];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        return std::string(buf);
    };
    for (const auto& r : reports) {
        out << r.method << '\t' << to_string(r.mode) << '\t' << r.status << '\t' << fmt(r.mean_percentile) << '\t'
            << fmt(r.percentile_spread) << '\t' << r.test_size << '\t' << r.disconnected_users;
        for (auto k : ks) {
            auto it = std::find_if(r.recall_curve.begin(), r.recall_curve.end(),
                                   [k](const auto& p) { return p.first == k; });
            out << '\t' << (it == r.recall_curve.end() ? std::string("-") : fmt(it->second));
        }
        out << '\n';
    }
}

} // namespace walkrec
