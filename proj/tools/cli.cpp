#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "walkrec/dataset.hpp"
#include "walkrec/error.hpp"
#include "walkrec/recommend.hpp"

namespace walkrec::cli {

namespace {

class NotConverged : public Error {
public:
    using Error::Error;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

ExternalId parse_id(const std::string& text) {
    try {
        std::size_t used = 0;
        auto v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("'" + text + "' is not a numeric id");
    }
}

UserIndex require_user(const Dataset& data, ExternalId id) {
    auto u = data.find_user(id);
    if (!u) throw InvalidInput("unknown user id " + std::to_string(id));
    return *u;
}

ItemIndex require_item(const Dataset& data, ExternalId id) {
    auto i = data.find_item(id);
    if (!i) throw InvalidInput("unknown item id " + std::to_string(id));
    return *i;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::size_t default_list_length(const RunConfig& cfg) {
    if (cfg.list_length > 0) return cfg.list_length;
    return cfg.dataset == "epinions" ? 500 : 900;
}

void write_rank_dump(const std::filesystem::path& path, const RecGraph& graph, const RankVector& rank) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out.precision(17);
    for (std::uint32_t i = 0; i < graph.node_count(); ++i)
        out << to_string(graph.kind(NodeId{i})) << '\t' << graph.label(NodeId{i}) << '\t' << rank.scores[i] << '\n';
}

// Shared option groups -------------------------------------------------------

void add_data_options(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--dataset", cfg.dataset, "Dataset layout")->check(CLI::IsMember({"movielens", "epinions"}));
    cmd.add_option("--data-dir", cfg.data_dir,
                   "Directory with u.data/u.item/u.user (movielens) or ratings_data.txt/trust_data.txt (epinions)")
        ->required();
    cmd.add_option("--subsample-users", cfg.subsample_users, "Keep at most this many random users (0 = all)");
    cmd.add_option("--subsample-items", cfg.subsample_items, "Keep at most this many random items (0 = all)");
    cmd.add_option("--seed", cfg.seed, "Seed for subsampling and splits");
}

void add_solver_options(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--beta", cfg.solver.beta, "Damping factor");
    cmd.add_option("--epsilon", cfg.solver.epsilon, "L1 convergence tolerance");
    cmd.add_option("--max-iter", cfg.solver.max_iter, "Iteration cap");
}

void add_graph_options(CLI::App& cmd, std::string& graph_config_path) {
    cmd.add_option("--graph-config", graph_config_path, "key=value file with enable_tags/enable_profiles/enable_social");
}

// Subcommands ---------------------------------------------------------------

struct Globals {
    int threads = 1;
    std::string format = "tsv";
    bool verbose = false;
};

int cmd_build(const RunConfig& cfg, const std::string& dump_path, const std::string& dataset_dump, std::ostream& out,
              std::ostream& err) {
    auto data = load_configured_dataset(cfg, err);
    if (!dataset_dump.empty()) {
        std::ofstream f(dataset_dump, std::ios::binary);
        if (!f) throw DataError("cannot write " + dataset_dump);
        write_dataset(f, data);
    }
    auto graph = build_graph(data, cfg.graph);
    auto matrix = transition_matrix(graph);
    out << "nodes\t" << graph.node_count() << '\n';
    for (auto kind : {NodeKind::User, NodeKind::Item, NodeKind::Tag, NodeKind::Profile})
        out << to_string(kind) << "s\t" << graph.count(kind) << '\n';
    out << "edges\t" << graph.edge_count() << '\n';
    out << "dangling\t" << matrix.dangling_nodes().size() << '\n';
    if (!dump_path.empty()) {
        if (dump_path == "-") {
            graph.write_tsv(out);
        } else {
            std::ofstream f(dump_path);
            if (!f) throw DataError("cannot write " + dump_path);
            graph.write_tsv(f);
        }
    }
    return kOk;
}

int cmd_recommend(const RunConfig& cfg, const std::optional<std::string>& user, const std::optional<std::string>& group,
                  std::size_t k, const std::string& rank_dump, const Globals& g, std::ostream& out, std::ostream& err) {
    auto data = load_configured_dataset(cfg, err);
    std::vector<UserIndex> members;
    if (user) members.push_back(require_user(data, parse_id(*user)));
    if (group) {
        auto ids = split_list(*group);
        if (ids.empty()) throw InvalidInput("--group needs at least one user id");
        for (const auto& id : ids) members.push_back(require_user(data, parse_id(id)));
    }
    Recommender rec(data, cfg.graph, cfg.solver);
    auto rank = rec.rank_for_group(members);
    if (!rank.converged)
        throw NotConverged("rank iteration did not converge in " + std::to_string(rank.iterations) +
                           " iterations (residual " + format_double(rank.residual) + ")");
    if (!rank_dump.empty()) write_rank_dump(rank_dump, rec.graph(), rank);

    std::vector<ItemIndex> excluded;
    for (auto u : members) {
        auto rated = rec.rated_items(u);
        excluded.insert(excluded.end(), rated.begin(), rated.end());
    }
    auto list = direct_recommend(rec.graph(), rank, excluded, k);

    if (g.format == "json") {
        nlohmann::json j;
        auto target = nlohmann::json::array();
        for (auto u : members) target.push_back(data.user_ids[u]);
        j["target"] = target;
        j["k"] = k;
        auto items = nlohmann::json::array();
        for (std::size_t r = 0; r < list.entries.size(); ++r)
            items.push_back({{"rank", r + 1},
                             {"item_id", data.item_ids[list.entries[r].item]},
                             {"score", list.entries[r].score}});
        j["items"] = items;
        out << j.dump(2) << '\n';
    } else {
        out << "rank\titem_id\tscore\n";
        for (std::size_t r = 0; r < list.entries.size(); ++r)
            out << r + 1 << '\t' << data.item_ids[list.entries[r].item] << '\t' << format_double(list.entries[r].score)
                << '\n';
    }
    return kOk;
}

int cmd_predict(const RunConfig& cfg, const std::string& user, const std::string& items, const std::string& method,
                const Globals& g, std::ostream& out, std::ostream& err) {
    auto data = load_configured_dataset(cfg, err);
    const auto u = require_user(data, parse_id(user));
    std::vector<ItemIndex> targets;
    for (const auto& id : split_list(items)) targets.push_back(require_item(data, parse_id(id)));
    if (targets.empty()) throw InvalidInput("--item needs at least one item id");
    std::vector<PredictionMethod> methods;
    if (method == "user" || method == "both") methods.push_back(PredictionMethod::UserBased);
    if (method == "item" || method == "both") methods.push_back(PredictionMethod::ItemBased);

    Recommender rec(data, cfg.graph, cfg.solver);
    auto rank = rec.rank_for_user(u);
    if (!rank.converged) throw NotConverged("rank iteration did not converge");

    auto rows = nlohmann::json::array();
    if (g.format != "json") out << "user_id\titem_id\tprediction\tmethod\tfallback\n";
    for (auto i : targets) {
        for (auto m : methods) {
            auto p = rec.predict(u, i, m, rank);
            if (g.format == "json") {
                rows.push_back({{"user_id", data.user_ids[u]},
                                {"item_id", data.item_ids[i]},
                                {"prediction", p.value},
                                {"method", std::string(to_string(m))},
                                {"fallback", p.fallback_used}});
            } else {
                out << data.user_ids[u] << '\t' << data.item_ids[i] << '\t' << format_double(p.value) << '\t'
                    << to_string(m) << '\t' << (p.fallback_used ? "true" : "false") << '\n';
            }
        }
    }
    if (g.format == "json") out << rows.dump(2) << '\n';
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& out_path, const Globals& g, std::ostream& out,
                 std::ostream& err) {
    auto data = load_configured_dataset(cfg, err);
    ProtocolConfig protocol;
    protocol.mode = parse_split_mode(cfg.mode);
    protocol.folds = cfg.folds;
    protocol.cold_fraction = cfg.cold_fraction;
    protocol.cold_splits = cfg.cold_splits;
    protocol.k_grid = cfg.k_grid;
    protocol.list_length = default_list_length(cfg);
    protocol.seed = cfg.seed;
    protocol.methods.solver = cfg.solver;
    protocol.threads = g.threads;
    if (g.verbose) protocol.log = [&err](const std::string& line) { err << line << '\n'; };

    auto reports = run_experiment(data, cfg.methods, protocol);

    nlohmann::json doc;
    doc["config"] = to_json(cfg);
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    doc["reports"] = arr;

    if (!out_path.empty()) {
        std::ofstream json_out(out_path, std::ios::binary);
        if (!json_out) throw DataError("cannot write " + out_path);
        json_out << doc.dump(2) << '\n';
        auto tsv_path = std::filesystem::path(out_path).replace_extension(".tsv");
        std::ofstream tsv_out(tsv_path, std::ios::binary);
        if (!tsv_out) throw DataError("cannot write " + tsv_path.string());
        write_report_table(tsv_out, reports);
    }
    if (g.format == "json") out << doc.dump(2) << '\n';
    else write_report_table(out, reports);

    bool failed = std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.status == "failed"; });
    return failed ? kNotConverged : kOk;
}

} // namespace

// ---------------------------------------------------------------------------

nlohmann::json to_json(const RunConfig& c) {
    return {
        {"dataset", c.dataset},
        {"data_dir", c.data_dir},
        {"subsample_users", c.subsample_users},
        {"subsample_items", c.subsample_items},
        {"graph", {{"enable_tags", c.graph.enable_tags},
                   {"enable_profiles", c.graph.enable_profiles},
                   {"enable_social", c.graph.enable_social}}},
        {"solver", {{"beta", c.solver.beta}, {"epsilon", c.solver.epsilon}, {"max_iter", c.solver.max_iter}}},
        {"mode", c.mode},
        {"methods", c.methods},
        {"k_grid", c.k_grid},
        {"folds", c.folds},
        {"cold_fraction", c.cold_fraction},
        {"cold_splits", c.cold_splits},
        {"list_length", c.list_length},
        {"seed", c.seed},
    };
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.dataset = j.at("dataset").get<std::string>();
        c.data_dir = j.at("data_dir").get<std::string>();
        c.subsample_users = j.at("subsample_users").get<std::size_t>();
        c.subsample_items = j.at("subsample_items").get<std::size_t>();
        const auto& gr = j.at("graph");
        c.graph.enable_tags = gr.at("enable_tags").get<bool>();
        c.graph.enable_profiles = gr.at("enable_profiles").get<bool>();
        c.graph.enable_social = gr.at("enable_social").get<bool>();
        const auto& so = j.at("solver");
        c.solver.beta = so.at("beta").get<double>();
        c.solver.epsilon = so.at("epsilon").get<double>();
        c.solver.max_iter = so.at("max_iter").get<int>();
        c.mode = j.at("mode").get<std::string>();
        c.methods = j.at("methods").get<std::vector<std::string>>();
        c.k_grid = j.at("k_grid").get<std::vector<std::size_t>>();
        c.folds = j.at("folds").get<int>();
        c.cold_fraction = j.at("cold_fraction").get<double>();
        c.cold_splits = j.at("cold_splits").get<int>();
        c.list_length = j.at("list_length").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed run config: ") + e.what());
    }
    return c;
}

Dataset load_configured_dataset(const RunConfig& config, std::ostream& log) {
    const std::filesystem::path dir(config.data_dir);
    Dataset data;
    if (config.dataset == "movielens") {
        data = load_movielens(dir);
    } else if (config.dataset == "epinions") {
        auto loaded = load_epinions(dir / "ratings_data.txt", dir / "trust_data.txt");
        if (loaded.dropped_trust_edges > 0)
            log << "warning: dropped " << loaded.dropped_trust_edges << " trust edges to users without ratings\n";
        data = std::move(loaded.dataset);
    } else {
        throw InvalidInput("unknown dataset kind '" + config.dataset + "'");
    }
    if (config.subsample_users > 0 || config.subsample_items > 0) {
        const auto users = config.subsample_users > 0 ? config.subsample_users : data.user_count();
        const auto items = config.subsample_items > 0 ? config.subsample_items : data.item_count();
        data = subsample(data, users, items, config.seed);
    }
    return data;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random-walk hybrid recommender: graphs, recommendations, predictions, evaluation"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads for evaluation")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
    app.add_flag("--verbose", g.verbose, "Progress messages on stderr");

    RunConfig cfg;
    std::string graph_config_path;

    auto* build = app.add_subcommand("build", "Build the recommendation graph and print a summary");
    std::string dump_path;
    add_data_options(*build, cfg);
    add_graph_options(*build, graph_config_path);
    build->add_option("--dump", dump_path, "Write the edge list as TSV ('-' for stdout)");
    std::string dataset_dump;
    build->add_option("--dataset-dump", dataset_dump, "Write the loaded dataset in the canonical text format");

    auto* recommend = app.add_subcommand("recommend", "Top-k items for a user or a group");
    std::optional<std::string> user_opt, group_opt;
    std::size_t k = 10;
    std::string rank_dump;
    add_data_options(*recommend, cfg);
    add_graph_options(*recommend, graph_config_path);
    add_solver_options(*recommend, cfg);
    auto* user_flag = recommend->add_option("--user", user_opt, "Target user id");
    auto* group_flag = recommend->add_option("--group", group_opt, "Comma-separated user ids");
    user_flag->excludes(group_flag);
    recommend->add_option("--k", k, "List length");
    recommend->add_option("--dump-rank", rank_dump, "Write the full rank vector as TSV");

    auto* predict = app.add_subcommand("predict", "Rating predictions for a user");
    std::string predict_user, predict_items, predict_method = "both";
    add_data_options(*predict, cfg);
    add_graph_options(*predict, graph_config_path);
    add_solver_options(*predict, cfg);
    predict->add_option("--user", predict_user, "Target user id")->required();
    predict->add_option("--item", predict_items, "Comma-separated item ids")->required();
    predict->add_option("--method", predict_method, "Prediction rule")->check(CLI::IsMember({"user", "item", "both"}));

    auto* evaluate = app.add_subcommand("evaluate", "Recall and percentile over warm or cold splits");
    std::string methods_arg, k_grid_arg, out_path, config_path;
    add_data_options(*evaluate, cfg);
    add_solver_options(*evaluate, cfg);
    evaluate->get_option("--data-dir")->required(false);
    evaluate->add_option("--methods", methods_arg, "Comma-separated method names");
    evaluate->add_option("--mode", cfg.mode, "Split protocol")->check(CLI::IsMember({"warm", "cold"}));
    evaluate->add_option("--k-grid", k_grid_arg, "Comma-separated k values for recall");
    evaluate->add_option("--folds", cfg.folds, "Warm cross-validation folds");
    evaluate->add_option("--cold-fraction", cfg.cold_fraction, "Fraction of users made cold");
    evaluate->add_option("--cold-splits", cfg.cold_splits, "Number of seeded cold splits");
    evaluate->add_option("--list-length", cfg.list_length, "Recall curve cap (default 900 MovieLens, 500 Epinions)");
    evaluate->add_option("--out", out_path, "Write JSON report here and a TSV table next to it");
    evaluate->add_option("--config", config_path, "Re-run the configuration embedded in a report (or a bare config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (!graph_config_path.empty()) cfg.graph = GraphConfig::load(graph_config_path);
        cfg.solver.validate();

        if (*build) return cmd_build(cfg, dump_path, dataset_dump, out, err);
        if (*recommend) {
            if (!user_opt && !group_opt) throw InvalidInput("recommend needs --user or --group");
            return cmd_recommend(cfg, user_opt, group_opt, k, rank_dump, g, out, err);
        }
        if (*predict) return cmd_predict(cfg, predict_user, predict_items, predict_method, g, out, err);
        if (*evaluate) {
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw DataError("cannot open " + config_path);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(in);
                } catch (const nlohmann::json::exception& e) {
                    throw DataError(config_path + ": " + e.what());
                }
                cfg = run_config_from_json(j.contains("config") ? j.at("config") : j);
            } else {
                if (cfg.data_dir.empty()) throw InvalidInput("evaluate needs --data-dir or --config");
                if (!methods_arg.empty()) cfg.methods = split_list(methods_arg);
                if (!k_grid_arg.empty()) {
                    cfg.k_grid.clear();
                    for (const auto& v : split_list(k_grid_arg)) cfg.k_grid.push_back(static_cast<std::size_t>(parse_id(v)));
                }
            }
            cfg.solver.validate();
            return cmd_evaluate(cfg, out_path, g, out, err);
        }
    } catch (const NotConverged& e) {
        err << "error: " << e.what() << '\n';
        return kNotConverged;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

} // namespace walkrec::cli
