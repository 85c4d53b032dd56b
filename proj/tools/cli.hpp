#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "walkrec/eval.hpp"
#include "walkrec/graph.hpp"
#include "walkrec/ranker.hpp"

namespace walkrec::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNotConverged = 3 };

/// Everything that determines a run's results. Echoed into evaluation reports.
struct RunConfig {
    std::string dataset = "movielens";  // movielens | epinions
    std::string data_dir;
    std::size_t subsample_users = 0;  // 0 keeps everything
    std::size_t subsample_items = 0;
    GraphConfig graph;
    SolverConfig solver;
    std::string mode = "warm";
    std::vector<std::string> methods = {"userrank-cf", "userrank-social", "itemrank", "lplus"};
    std::vector<std::size_t> k_grid = {10, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900};
    int folds = 5;
    double cold_fraction = 0.1;
    int cold_splits = 5;
    std::size_t list_length = 0;  // 0 picks the dataset default (900 MovieLens, 500 Epinions)
    std::uint64_t seed = 42;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

Dataset load_configured_dataset(const RunConfig& config, std::ostream& log);

/// Entry point of the `walkrec` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace walkrec::cli
