#include "walkrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "walkrec/error.hpp"

namespace walkrec {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::User: return "user";
    case NodeKind::Item: return "item";
    case NodeKind::Tag: return "tag";
    case NodeKind::Profile: return "profile";
    }
    return "?";
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no" || v == "off") { out = false; return true; }
    return false;
}

// Exponent of the rating edge weight from a user's rating statistics.
double weight_from_stats(double rating, double mean, double sum_sq_dev) {
    if (!(sum_sq_dev > 0.0)) return 1.0;
    return std::exp((rating - mean) / std::sqrt(sum_sq_dev));
}

} // namespace

GraphConfig GraphConfig::parse(std::istream& in, const std::string& source_name) {
    GraphConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto content = trim(line);
        if (content.empty()) continue;
        auto eq = content.find('=');
        if (eq == std::string::npos) throw DataError(source_name, line_no, "expected key=value");
        auto key = trim(std::string_view(content).substr(0, eq));
        auto value = trim(std::string_view(content).substr(eq + 1));
        bool* slot = nullptr;
        if (key == "enable_tags") slot = &cfg.enable_tags;
        else if (key == "enable_profiles") slot = &cfg.enable_profiles;
        else if (key == "enable_social") slot = &cfg.enable_social;
        else throw DataError(source_name, line_no, "unknown key '" + key + "'");
        if (!parse_bool(value, *slot)) throw DataError(source_name, line_no, "bad boolean '" + value + "'");
    }
    return cfg;
}

GraphConfig GraphConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse(in, path.string());
}

// ---------------------------------------------------------------------------

RecGraph::RecGraph(std::vector<NodeKind> kinds, std::vector<std::string> labels,
                   std::vector<std::vector<Edge>> out_edges)
    : kinds_(std::move(kinds)), labels_(std::move(labels)), out_(std::move(out_edges)) {
    const auto n = kinds_.size();
    if (labels_.size() != n || out_.size() != n) throw InvalidInput("RecGraph: part sizes disagree");
    if (!std::is_sorted(kinds_.begin(), kinds_.end()))
        throw InvalidInput("RecGraph: nodes must be grouped by kind (user, item, tag, profile)");
    for (std::size_t i = 0; i < n; ++i) ++counts_[static_cast<int>(kinds_[i])];
    for (int k = 1; k < 4; ++k) offsets_[k] = offsets_[k - 1] + counts_[k - 1];

    for (std::size_t i = 0; i < n; ++i) {
        auto& edges = out_[i];
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& a, const Edge& b) { return a.target < b.target; });
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& edge = edges[e];
            if (edge.target.index >= n) throw InvalidInput("RecGraph: edge target out of range");
            if (edge.target.index == i) throw InvalidInput("RecGraph: self-loop at node " + labels_[i]);
            if (!(edge.weight > 0.0) || !std::isfinite(edge.weight))
                throw InvalidInput("RecGraph: non-positive weight on edge from " + labels_[i]);
            if (e > 0 && edges[e - 1].target == edge.target)
                throw InvalidInput("RecGraph: duplicate edge from " + labels_[i]);
        }
        edge_count_ += edges.size();
    }
}

NodeId RecGraph::node_of(NodeKind kind, std::uint32_t dense_index) const {
    if (dense_index >= count(kind))
        throw InvalidInput(std::string(to_string(kind)) + " index " + std::to_string(dense_index) + " out of range");
    return NodeId{offset(kind) + dense_index};
}

bool RecGraph::has_edge(NodeId from, NodeId to) const {
    const auto& edges = out_[from.index];
    return std::binary_search(edges.begin(), edges.end(), Edge{to, 0.0},
                              [](const Edge& a, const Edge& b) { return a.target < b.target; });
}

void RecGraph::write_tsv(std::ostream& out) const {
    auto old_precision = out.precision(17);
    for (std::uint32_t i = 0; i < node_count(); ++i) {
        for (const auto& e : out_[i]) {
            out << to_string(kinds_[i]) << '\t' << labels_[i] << '\t' << to_string(kinds_[e.target.index]) << '\t'
                << labels_[e.target.index] << '\t' << e.weight << '\n';
        }
    }
    out.precision(old_precision);
}

// ---------------------------------------------------------------------------

double rating_edge_weight(double rating, std::span<const double> user_ratings) {
    if (user_ratings.empty()) throw InvalidInput("rating_edge_weight: user has no ratings");
    if (std::find(user_ratings.begin(), user_ratings.end(), rating) == user_ratings.end())
        throw InvalidInput("rating_edge_weight: rating is not one of the user's ratings");
    double mean = 0.0;
    for (double r : user_ratings) mean += r;
    mean /= static_cast<double>(user_ratings.size());
    double ss = 0.0;
    for (double r : user_ratings) ss += (r - mean) * (r - mean);
    return weight_from_stats(rating, mean, ss);
}

RecGraph build_graph(const Dataset& data, const GraphConfig& config) {
    data.validate();
    const auto m = static_cast<std::uint32_t>(data.user_count());
    const auto n = static_cast<std::uint32_t>(data.item_count());
    const auto k = static_cast<std::uint32_t>(data.tag_count());
    const auto l = static_cast<std::uint32_t>(data.profile_count());
    const std::uint32_t item0 = m, tag0 = m + n, profile0 = m + n + k;
    const std::size_t v = static_cast<std::size_t>(m) + n + k + l;

    std::vector<NodeKind> kinds;
    std::vector<std::string> labels;
    kinds.reserve(v);
    labels.reserve(v);
    for (auto id : data.user_ids) { kinds.push_back(NodeKind::User); labels.push_back(std::to_string(id)); }
    for (auto id : data.item_ids) { kinds.push_back(NodeKind::Item); labels.push_back(std::to_string(id)); }
    for (const auto& t : data.tag_names) { kinds.push_back(NodeKind::Tag); labels.push_back(t); }
    for (const auto& p : data.profile_names) { kinds.push_back(NodeKind::Profile); labels.push_back(p); }

    std::vector<std::vector<Edge>> out(v);

    RatingIndex index(data);
    for (UserIndex u = 0; u < m; ++u) {
        const auto& rated = index.by_user(u);
        if (rated.empty()) continue;
        double mean = *index.user_mean(u);
        double ss = 0.0;
        for (const auto& e : rated) ss += (e.value - mean) * (e.value - mean);
        for (const auto& e : rated) {
            double w = weight_from_stats(e.value, mean, ss);
            out[u].push_back({NodeId{item0 + e.other}, w});
            out[item0 + e.other].push_back({NodeId{u}, w});
        }
    }
    if (config.enable_tags) {
        for (ItemIndex i = 0; i < n; ++i)
            for (auto t : data.item_tags[i]) {
                out[item0 + i].push_back({NodeId{tag0 + t}, 1.0});
                out[tag0 + t].push_back({NodeId{item0 + i}, 1.0});
            }
    }
    if (config.enable_profiles) {
        for (UserIndex u = 0; u < m; ++u)
            for (auto p : data.user_profiles[u]) {
                out[u].push_back({NodeId{profile0 + p}, 1.0});
                out[profile0 + p].push_back({NodeId{u}, 1.0});
            }
    }
    if (config.enable_social) {
        for (const auto& [a, b] : data.social) out[a].push_back({NodeId{b}, 1.0});
    }
    return RecGraph(std::move(kinds), std::move(labels), std::move(out));
}

// ---------------------------------------------------------------------------

double TransitionMatrix::at(std::uint32_t row, std::uint32_t col) const {
    auto cols = row_columns(row);
    auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) return 0.0;
    return values_[row_start_[row] + static_cast<std::size_t>(it - cols.begin())];
}

std::span<const std::uint32_t> TransitionMatrix::row_columns(std::uint32_t row) const {
    return {columns_.data() + row_start_[row], row_start_[row + 1] - row_start_[row]};
}

std::span<const double> TransitionMatrix::row_values(std::uint32_t row) const {
    return {values_.data() + row_start_[row], row_start_[row + 1] - row_start_[row]};
}

void TransitionMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) throw InvalidInput("TransitionMatrix::multiply: size mismatch");
    const std::size_t n = size();
    for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e) acc += values_[e] * x[columns_[e]];
        y[r] = acc;
    }
}

TransitionMatrix transition_matrix(const RecGraph& graph) {
    const std::size_t n = graph.node_count();
    TransitionMatrix w;
    w.dangling_.assign(n, 0);

    // Transpose the out-adjacency: row i of W collects edges j -> i.
    std::vector<std::size_t> in_degree(n, 0);
    for (std::uint32_t j = 0; j < n; ++j)
        for (const auto& e : graph.out_edges(NodeId{j})) ++in_degree[e.target.index];
    w.row_start_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) w.row_start_[i + 1] = w.row_start_[i] + in_degree[i];
    w.columns_.resize(w.row_start_[n]);
    w.values_.resize(w.row_start_[n]);

    std::vector<std::size_t> fill(w.row_start_.begin(), w.row_start_.end() - 1);
    for (std::uint32_t j = 0; j < n; ++j) {
        auto edges = graph.out_edges(NodeId{j});
        if (edges.empty()) {
            w.dangling_[j] = 1;
            w.dangling_list_.push_back(j);
            continue;
        }
        double total = 0.0;
        for (const auto& e : edges) total += e.weight;
        for (const auto& e : edges) {
            auto slot = fill[e.target.index]++;
            w.columns_[slot] = j;
            w.values_[slot] = e.weight / total;
        }
    }
    // Sources are visited in ascending order, so each row's columns are sorted.
    return w;
}

} // namespace walkrec
