#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace walkrec {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;
using ExternalId = std::int64_t;

struct RatingScale {
    double min = 1.0;
    double max = 5.0;

    bool contains(double r) const noexcept { return r >= min && r <= max; }
    bool operator==(const RatingScale&) const = default;
};

/// One rating record. `user` and `item` are dense indices into the owning
/// Dataset's id tables.
struct Rating {
    UserIndex user;
    ItemIndex item;
    double value;

    bool operator==(const Rating&) const = default;
};

/**
 * Ratings, item tags, user profile categories and a directed social graph.
 *
 * Users and items are addressed by dense indices; `user_ids` / `item_ids` are
 * sorted ascending, so index order equals external id order. Tags and profile
 * categories are indices into `tag_names` / `profile_names`.
 */
struct Dataset {
    RatingScale scale;
    std::vector<ExternalId> user_ids;
    std::vector<ExternalId> item_ids;
    std::vector<Rating> ratings;

    std::vector<std::string> tag_names;
    std::vector<std::vector<std::uint32_t>> item_tags;      // per item, ascending
    std::vector<std::string> profile_names;
    std::vector<std::vector<std::uint32_t>> user_profiles;  // per user, ascending
    std::vector<std::pair<UserIndex, UserIndex>> social;    // directed (from, to)

    std::size_t user_count() const noexcept { return user_ids.size(); }
    std::size_t item_count() const noexcept { return item_ids.size(); }
    std::size_t tag_count() const noexcept { return tag_names.size(); }
    std::size_t profile_count() const noexcept { return profile_names.size(); }

    std::optional<UserIndex> find_user(ExternalId id) const;
    std::optional<ItemIndex> find_item(ExternalId id) const;

    /// Throws DataError describing the first few violated invariants.
    void validate() const;

    /// Same universes and side information, ratings replaced.
    Dataset with_ratings(std::vector<Rating> replacement) const;

    bool operator==(const Dataset&) const = default;
};

/// Per-user and per-item views over a Dataset's ratings.
class RatingIndex {
public:
    struct Entry {
        std::uint32_t other;  // item for by_user, user for by_item
        double value;
    };

    explicit RatingIndex(const Dataset& data);

    const std::vector<Entry>& by_user(UserIndex u) const { return by_user_[u]; }
    const std::vector<Entry>& by_item(ItemIndex i) const { return by_item_[i]; }
    /// Mean rating of user u; nullopt for users with no ratings.
    std::optional<double> user_mean(UserIndex u) const;
    double global_mean() const noexcept { return global_mean_; }
    std::size_t item_popularity(ItemIndex i) const { return by_item_[i].size(); }

private:
    std::vector<std::vector<Entry>> by_user_;
    std::vector<std::vector<Entry>> by_item_;
    std::vector<double> user_mean_;
    double global_mean_ = 0.0;
};

/**
 * Accumulates records keyed by external ids and produces a validated Dataset.
 * Users and items are registered implicitly by ratings, or explicitly.
 */
class DatasetBuilder {
public:
    explicit DatasetBuilder(RatingScale scale = {});

    void add_user(ExternalId user);
    void add_item(ExternalId item);
    /// Duplicate (user, item) pairs are rejected by build().
    void add_rating(ExternalId user, ExternalId item, double value);
    void set_tag_universe(std::vector<std::string> names);
    void set_profile_universe(std::vector<std::string> names);
    void add_item_tag(ExternalId item, std::uint32_t tag);
    void add_user_profile(ExternalId user, std::uint32_t profile);
    void add_social_edge(ExternalId from, ExternalId to);

    /// Throws DataError listing unknown ids referenced by side information.
    Dataset build() const;

private:
    struct RawRating {
        ExternalId user;
        ExternalId item;
        double value;
    };

    RatingScale scale_;
    std::vector<ExternalId> users_;
    std::vector<ExternalId> items_;
    std::vector<RawRating> ratings_;
    std::vector<std::string> tag_names_;
    std::vector<std::string> profile_names_;
    std::vector<std::pair<ExternalId, std::uint32_t>> item_tags_;
    std::vector<std::pair<ExternalId, std::uint32_t>> user_profiles_;
    std::vector<std::pair<ExternalId, ExternalId>> social_;
};

// ---------------------------------------------------------------------------
// Loaders

/// MovieLens age buckets used for profile binarization.
std::string movielens_age_bucket(int age);

/**
 * Reads the MovieLens 100k layout from `directory`: u.data (tab separated
 * user, item, rating, timestamp), u.item (pipe separated, 19 trailing genre
 * flags) and u.user (pipe separated id, age, gender, occupation, zip).
 */
Dataset load_movielens(const std::filesystem::path& directory);

struct EpinionsLoadResult {
    Dataset dataset;
    std::size_t dropped_trust_edges = 0;
};

/**
 * Reads whitespace-separated rating records (user item rating [extra...]) and
 * trust records (truster trustee [extra...]). Trust edges that reference users
 * without ratings are dropped and counted; self-trust and duplicates are
 * dropped silently.
 */
EpinionsLoadResult load_epinions(const std::filesystem::path& ratings_path,
                                 const std::filesystem::path& trust_path);

/// Keeps at most `max_users` random users (among those with ratings), then at
/// most `max_items` random items among the ones they rated, and the trust
/// edges internal to the kept users.
Dataset subsample(const Dataset& data, std::size_t max_users, std::size_t max_items,
                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Canonical TSV dump

void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in, const std::string& source_name = "<stream>");

// ---------------------------------------------------------------------------
// Splits

enum class SplitMode { Warm, Cold };

struct Split {
    Dataset train;
    std::vector<Rating> test;
    SplitMode mode = SplitMode::Warm;
    int fold = 0;  // warm fold index; 0 for cold splits
    std::uint64_t seed = 0;
    std::vector<UserIndex> cold_users;  // ascending; empty for warm splits
};

/// Random partition of the rating records into `folds` parts; split f tests
/// on part f and trains on the rest.
std::vector<Split> split_warm(const Dataset& data, int folds, std::uint64_t seed);

/// max(1, floor(fraction * m)) random users with ratings lose all of them to
/// the test set; their profile and social edges stay in train.
Split split_cold(const Dataset& data, double fraction, std::uint64_t seed);

} // namespace walkrec
