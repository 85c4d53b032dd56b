#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "walkrec/dataset.hpp"
#include "walkrec/ranker.hpp"

namespace walkrec {

// ---------------------------------------------------------------------------
// Metrics

struct RelevantSet {
    std::vector<std::pair<UserIndex, ItemIndex>> pairs;  // sorted
    bool empty_warning = false;
};

/// Test records carrying the top rating of the scale.
RelevantSet relevant_test_set(const Split& split);

/**
 * Hits within each user's top-k divided by the total number of relevant
 * records. `recommended[u]` and `relevant[u]` describe the same user.
 * Throws InvalidInput for k == 0 or mismatched spans, Error when there are no
 * relevant records.
 */
double recall_at_k(std::span<const std::vector<ItemIndex>> recommended,
                   std::span<const std::vector<ItemIndex>> relevant, std::size_t k);

/// Mean of position / list_length over 1-based positions. 0 for no positions.
double percentile_score(std::span<const std::size_t> positions, std::size_t list_length);

// ---------------------------------------------------------------------------
// Methods

struct UserRanking {
    std::vector<ItemIndex> items;  // every item the user did not rate in train, best first
    bool fallback = false;         // ranking came from a fallback rule rather than the method
};

class RankingMethod {
public:
    virtual ~RankingMethod() = default;

    virtual std::string_view name() const = 0;
    virtual void fit(const Dataset& train) = 0;
    virtual UserRanking rank(UserIndex user) const = 0;
    /// Default ranks users one by one; solvers may share matrix sweeps.
    virtual std::vector<UserRanking> rank_many(std::span<const UserIndex> users) const;
};

struct MethodOptions {
    SolverConfig solver;
    std::size_t lplus_max_nodes = 6000;
};

/// userrank-cf, userrank-social, itemrank, lplus.
const std::vector<std::string>& registered_methods();
/// Throws InvalidInput naming the registered methods for an unknown name.
std::unique_ptr<RankingMethod> make_method(std::string_view name, const MethodOptions& options);
/// lplus is not run on cold-start splits.
bool method_supports(std::string_view name, SplitMode mode);

/// Items ordered by descending training rating count, ties by index.
std::vector<ItemIndex> popularity_order(const RatingIndex& ratings, std::size_t item_count,
                                        std::span<const ItemIndex> excluded);

// ---------------------------------------------------------------------------
// Protocol

std::string_view to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view text);

struct ProtocolConfig {
    SplitMode mode = SplitMode::Warm;
    int folds = 5;
    double cold_fraction = 0.1;
    int cold_splits = 5;
    std::vector<std::size_t> k_grid = {10, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900};
    std::size_t list_length = 900;
    std::uint64_t seed = 42;
    MethodOptions methods;
    int threads = 1;
    std::function<void(const std::string&)> log;
};

struct PercentileSummary {
    std::size_t users = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct EvalReport {
    std::string method;
    SplitMode mode = SplitMode::Warm;
    std::string status = "ok";  // ok | failed | skipped
    std::string message;

    std::vector<std::pair<std::size_t, double>> recall_curve;  // mean over splits
    double mean_percentile = 0.0;                               // mean over splits
    double percentile_spread = 0.0;                             // population std over splits
    std::vector<double> split_percentiles;
    std::vector<std::vector<double>> split_recalls;             // per split, aligned with recall_curve
    PercentileSummary per_user;                                 // pooled over all splits
    std::size_t test_size = 0;                                  // relevant records, summed over splits
    std::size_t evaluated_users = 0;
    std::size_t disconnected_users = 0;
};

/// Runs every named method over the protocol's splits. A method that throws
/// on a split is reported as failed; the others continue.
std::vector<EvalReport> run_experiment(const Dataset& data, std::span<const std::string> methods,
                                       const ProtocolConfig& protocol);

nlohmann::json report_to_json(const EvalReport& report);
/// One row per report: method, mode, status, mean percentile, spread, recall at each k.
void write_report_table(std::ostream& out, std::span<const EvalReport> reports);

} // namespace walkrec
