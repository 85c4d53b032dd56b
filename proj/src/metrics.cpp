#include <algorithm>

#include "walkrec/error.hpp"
#include "walkrec/eval.hpp"

namespace walkrec {

RelevantSet relevant_test_set(const Split& split) {
    RelevantSet out;
    const double top = split.train.scale.max;
    for (const auto& r : split.test)
        if (r.value == top) out.pairs.emplace_back(r.user, r.item);
    std::sort(out.pairs.begin(), out.pairs.end());
    out.empty_warning = out.pairs.empty();
    return out;
}

double recall_at_k(std::span<const std::vector<ItemIndex>> recommended,
                   std::span<const std::vector<ItemIndex>> relevant, std::size_t k) {
    if (k == 0) throw InvalidInput("recall_at_k: k must be >= 1");
    if (recommended.size() != relevant.size()) throw InvalidInput("recall_at_k: per-user inputs differ in length");
    std::size_t total = 0;
    std::size_t hits = 0;
    for (std::size_t u = 0; u < relevant.size(); ++u) {
        total += relevant[u].size();
        const auto& list = recommended[u];
        const auto depth = std::min(k, list.size());
        for (std::size_t p = 0; p < depth; ++p)
            if (std::find(relevant[u].begin(), relevant[u].end(), list[p]) != relevant[u].end()) ++hits;
    }
    if (total == 0) throw Error("recall_at_k: no relevant records, recall is undefined");
    return static_cast<double>(hits) / static_cast<double>(total);
}

double percentile_score(std::span<const std::size_t> positions, std::size_t list_length) {
    if (positions.empty()) return 0.0;
    if (list_length == 0) throw InvalidInput("percentile_score: empty list");
    double sum = 0.0;
    for (auto p : positions) {
        if (p < 1 || p > list_length) throw InvalidInput("percentile_score: position outside the list");
        sum += static_cast<double>(p) / static_cast<double>(list_length);
    }
    return sum / static_cast<double>(positions.size());
}

} // namespace walkrec
