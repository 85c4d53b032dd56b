#include "walkrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

#include "walkrec/error.hpp"

namespace walkrec {

namespace {

template <typename T>
std::optional<std::uint32_t> dense_index(const std::vector<T>& sorted, const T& key) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), key);
    if (it == sorted.end() || *it != key) return std::nullopt;
    return static_cast<std::uint32_t>(it - sorted.begin());
}

template <typename T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string_view trim_cr(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
    return s;
}

struct LineReader {
    LineReader(std::istream& stream, std::string source) : in(stream), name(std::move(source)) {}

    std::istream& in;
    std::string name;
    std::size_t line_no = 0;
    std::string buf;

    bool next(std::string_view& line) {
        if (!std::getline(in, buf)) return false;
        ++line_no;
        line = trim_cr(buf);
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw DataError(name, line_no, msg); }

    std::int64_t to_int(std::string_view field, const char* what) const {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || p != field.data() + field.size())
            fail(std::string("bad ") + what + " '" + std::string(field) + "'");
        return v;
    }

    double to_double(std::string_view field, const char* what) const {
        double v = 0;
        auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || p != field.data() + field.size())
            fail(std::string("bad ") + what + " '" + std::string(field) + "'");
        return v;
    }
};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::string format_rating(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

} // namespace

// ---------------------------------------------------------------------------

std::optional<UserIndex> Dataset::find_user(ExternalId id) const { return dense_index(user_ids, id); }
std::optional<ItemIndex> Dataset::find_item(ExternalId id) const { return dense_index(item_ids, id); }

void Dataset::validate() const {
    std::vector<std::string> problems;
    auto report = [&](std::string msg) {
        if (problems.size() < 10) problems.push_back(std::move(msg));
    };
    if (!std::is_sorted(user_ids.begin(), user_ids.end()) ||
        std::adjacent_find(user_ids.begin(), user_ids.end()) != user_ids.end())
        report("user ids not strictly ascending");
    if (!std::is_sorted(item_ids.begin(), item_ids.end()) ||
        std::adjacent_find(item_ids.begin(), item_ids.end()) != item_ids.end())
        report("item ids not strictly ascending");
    if (item_tags.size() != item_ids.size()) report("item_tags size mismatch");
    if (user_profiles.size() != user_ids.size()) report("user_profiles size mismatch");

    std::set<std::pair<UserIndex, ItemIndex>> pairs;
    for (const auto& r : ratings) {
        if (r.user >= user_count() || r.item >= item_count()) {
            report("rating references unknown user/item index");
            continue;
        }
        if (!scale.contains(r.value)) report("rating " + format_rating(r.value) + " outside scale");
        if (!pairs.emplace(r.user, r.item).second)
            report("duplicate rating for user " + std::to_string(user_ids[r.user]) + " item " +
                   std::to_string(item_ids[r.item]));
    }
    for (const auto& [a, b] : social) {
        if (a >= user_count() || b >= user_count()) report("social edge references unknown user");
        else if (a == b) report("social self-loop on user " + std::to_string(user_ids[a]));
    }
    for (const auto& tags : item_tags)
        for (auto t : tags)
            if (t >= tag_count()) report("tag index out of range");
    for (const auto& profs : user_profiles)
        for (auto p : profs)
            if (p >= profile_count()) report("profile index out of range");

    if (!problems.empty()) {
        std::string msg = "invalid dataset:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DataError(msg);
    }
}

Dataset Dataset::with_ratings(std::vector<Rating> replacement) const {
    Dataset out;
    out.scale = scale;
    out.user_ids = user_ids;
    out.item_ids = item_ids;
    out.ratings = std::move(replacement);
    out.tag_names = tag_names;
    out.item_tags = item_tags;
    out.profile_names = profile_names;
    out.user_profiles = user_profiles;
    out.social = social;
    return out;
}

// ---------------------------------------------------------------------------

RatingIndex::RatingIndex(const Dataset& data)
    : by_user_(data.user_count()), by_item_(data.item_count()), user_mean_(data.user_count(), 0.0) {
    double total = 0.0;
    for (const auto& r : data.ratings) {
        by_user_[r.user].push_back({r.item, r.value});
        by_item_[r.item].push_back({r.user, r.value});
        total += r.value;
    }
    auto by_other = [](const Entry& a, const Entry& b) { return a.other < b.other; };
    for (auto& v : by_user_) std::sort(v.begin(), v.end(), by_other);
    for (auto& v : by_item_) std::sort(v.begin(), v.end(), by_other);
    for (std::size_t u = 0; u < by_user_.size(); ++u) {
        double sum = 0.0;
        for (const auto& e : by_user_[u]) sum += e.value;
        if (!by_user_[u].empty()) user_mean_[u] = sum / static_cast<double>(by_user_[u].size());
    }
    global_mean_ = data.ratings.empty() ? 0.5 * (data.scale.min + data.scale.max)
                                        : total / static_cast<double>(data.ratings.size());
}

std::optional<double> RatingIndex::user_mean(UserIndex u) const {
    if (by_user_[u].empty()) return std::nullopt;
    return user_mean_[u];
}

// ---------------------------------------------------------------------------

DatasetBuilder::DatasetBuilder(RatingScale scale) : scale_(scale) {}

void DatasetBuilder::add_user(ExternalId user) { users_.push_back(user); }
void DatasetBuilder::add_item(ExternalId item) { items_.push_back(item); }

void DatasetBuilder::add_rating(ExternalId user, ExternalId item, double value) {
    ratings_.push_back({user, item, value});
    users_.push_back(user);
    items_.push_back(item);
}

void DatasetBuilder::set_tag_universe(std::vector<std::string> names) { tag_names_ = std::move(names); }
void DatasetBuilder::set_profile_universe(std::vector<std::string> names) {
    profile_names_ = std::move(names);
}
void DatasetBuilder::add_item_tag(ExternalId item, std::uint32_t tag) { item_tags_.emplace_back(item, tag); }
void DatasetBuilder::add_user_profile(ExternalId user, std::uint32_t profile) {
    user_profiles_.emplace_back(user, profile);
}
void DatasetBuilder::add_social_edge(ExternalId from, ExternalId to) { social_.emplace_back(from, to); }

Dataset DatasetBuilder::build() const {
    Dataset d;
    d.scale = scale_;
    d.user_ids = users_;
    d.item_ids = items_;
    sort_unique(d.user_ids);
    sort_unique(d.item_ids);
    d.tag_names = tag_names_;
    d.profile_names = profile_names_;
    d.item_tags.resize(d.item_ids.size());
    d.user_profiles.resize(d.user_ids.size());

    std::vector<std::string> unknown;
    auto note = [&](const std::string& what) {
        if (unknown.size() < 20) unknown.push_back(what);
    };

    d.ratings.reserve(ratings_.size());
    for (const auto& r : ratings_) {
        d.ratings.push_back({*d.find_user(r.user), *d.find_item(r.item), r.value});
    }
    std::sort(d.ratings.begin(), d.ratings.end(), [](const Rating& a, const Rating& b) {
        return std::tie(a.user, a.item) < std::tie(b.user, b.item);
    });

    for (const auto& [item, tag] : item_tags_) {
        auto i = d.find_item(item);
        if (!i) { note("item " + std::to_string(item)); continue; }
        d.item_tags[*i].push_back(tag);
    }
    for (const auto& [user, prof] : user_profiles_) {
        auto u = d.find_user(user);
        if (!u) { note("user " + std::to_string(user)); continue; }
        d.user_profiles[*u].push_back(prof);
    }
    for (const auto& [a, b] : social_) {
        auto ua = d.find_user(a);
        auto ub = d.find_user(b);
        if (!ua) note("user " + std::to_string(a));
        if (!ub) note("user " + std::to_string(b));
        if (ua && ub) d.social.emplace_back(*ua, *ub);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown external ids referenced:";
        for (const auto& u : unknown) msg += " " + u;
        throw DataError(msg);
    }
    for (auto& v : d.item_tags) sort_unique(v);
    for (auto& v : d.user_profiles) sort_unique(v);
    sort_unique(d.social);
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------

std::string movielens_age_bucket(int age) {
    if (age < 18) return "age:<18";
    if (age <= 24) return "age:18-24";
    if (age <= 34) return "age:25-34";
    if (age <= 44) return "age:35-44";
    if (age <= 49) return "age:45-49";
    if (age <= 55) return "age:50-55";
    return "age:56+";
}

Dataset load_movielens(const std::filesystem::path& directory) {
    static const std::vector<std::string> kGenres = {
        "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
        "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
        "Romance", "Sci-Fi", "Thriller", "War", "Western"};
    static const std::vector<std::string> kAgeBuckets = {
        "age:<18", "age:18-24", "age:25-34", "age:35-44", "age:45-49", "age:50-55", "age:56+"};

    DatasetBuilder builder(RatingScale{1.0, 5.0});
    std::set<std::pair<ExternalId, ExternalId>> seen;

    {
        auto path = directory / "u.data";
        auto in = open_input(path);
        LineReader reader(in, path.string());
        std::string_view line;
        std::size_t count = 0;
        while (reader.next(line)) {
            if (line.empty()) continue;
            auto f = split_on(line, '\t');
            if (f.size() != 4) reader.fail("expected 4 tab-separated fields, got " + std::to_string(f.size()));
            auto user = reader.to_int(f[0], "user id");
            auto item = reader.to_int(f[1], "item id");
            auto rating = reader.to_double(f[2], "rating");
            reader.to_int(f[3], "timestamp");
            if (!(rating >= 1.0 && rating <= 5.0)) reader.fail("rating " + std::string(f[2]) + " outside [1,5]");
            if (!seen.emplace(user, item).second)
                reader.fail("duplicate rating for user " + std::to_string(user) + " item " + std::to_string(item));
            builder.add_rating(user, item, rating);
            ++count;
        }
        if (count == 0) throw DataError(path.string() + ": no ratings");
    }

    builder.set_tag_universe(kGenres);
    {
        auto path = directory / "u.item";
        auto in = open_input(path);
        LineReader reader(in, path.string());
        std::string_view line;
        while (reader.next(line)) {
            if (line.empty()) continue;
            auto f = split_on(line, '|');
            if (f.size() < 1 + kGenres.size()) reader.fail("too few pipe-separated fields");
            auto item = reader.to_int(f[0], "item id");
            builder.add_item(item);
            std::size_t first_flag = f.size() - kGenres.size();
            for (std::size_t g = 0; g < kGenres.size(); ++g) {
                auto flag = f[first_flag + g];
                if (flag == "1") builder.add_item_tag(item, static_cast<std::uint32_t>(g));
                else if (flag != "0") reader.fail("genre flag must be 0 or 1");
            }
        }
    }

    {
        auto path = directory / "u.user";
        auto in = open_input(path);
        LineReader reader(in, path.string());
        std::string_view line;
        struct UserRow {
            ExternalId id;
            int age;
            std::string gender;
            std::string occupation;
        };
        std::vector<UserRow> rows;
        std::set<std::string> genders;
        std::set<std::string> occupations;
        while (reader.next(line)) {
            if (line.empty()) continue;
            auto f = split_on(line, '|');
            if (f.size() != 5) reader.fail("expected 5 pipe-separated fields");
            UserRow row{reader.to_int(f[0], "user id"), static_cast<int>(reader.to_int(f[1], "age")),
                        std::string(f[2]), std::string(f[3])};
            if (row.gender.empty() || row.occupation.empty()) reader.fail("empty gender/occupation");
            genders.insert(row.gender);
            occupations.insert(row.occupation);
            rows.push_back(std::move(row));
        }
        std::vector<std::string> universe = kAgeBuckets;
        for (const auto& g : genders) universe.push_back("gender:" + g);
        for (const auto& o : occupations) universe.push_back("occupation:" + o);
        auto index_of = [&](const std::string& name) {
            return static_cast<std::uint32_t>(std::find(universe.begin(), universe.end(), name) - universe.begin());
        };
        for (const auto& row : rows) {
            builder.add_user(row.id);
            builder.add_user_profile(row.id, index_of(movielens_age_bucket(row.age)));
            builder.add_user_profile(row.id, index_of("gender:" + row.gender));
            builder.add_user_profile(row.id, index_of("occupation:" + row.occupation));
        }
        builder.set_profile_universe(std::move(universe));
    }
    return builder.build();
}

EpinionsLoadResult load_epinions(const std::filesystem::path& ratings_path,
                                 const std::filesystem::path& trust_path) {
    DatasetBuilder builder(RatingScale{1.0, 5.0});
    std::set<std::pair<ExternalId, ExternalId>> seen;
    std::set<ExternalId> users;
    {
        auto in = open_input(ratings_path);
        LineReader reader(in, ratings_path.string());
        std::string_view line;
        while (reader.next(line)) {
            auto f = split_whitespace(line);
            if (f.empty() || f[0].front() == '#') continue;
            if (f.size() < 3) reader.fail("expected user item rating");
            auto user = reader.to_int(f[0], "user id");
            auto item = reader.to_int(f[1], "item id");
            auto rating = reader.to_double(f[2], "rating");
            if (!(rating >= 1.0 && rating <= 5.0)) reader.fail("rating " + std::string(f[2]) + " outside [1,5]");
            if (!seen.emplace(user, item).second)
                reader.fail("duplicate rating for user " + std::to_string(user) + " item " + std::to_string(item));
            builder.add_rating(user, item, rating);
            users.insert(user);
        }
        if (seen.empty()) throw DataError(ratings_path.string() + ": no ratings");
    }
    EpinionsLoadResult result;
    {
        auto in = open_input(trust_path);
        LineReader reader(in, trust_path.string());
        std::string_view line;
        std::set<std::pair<ExternalId, ExternalId>> edges;
        while (reader.next(line)) {
            auto f = split_whitespace(line);
            if (f.empty() || f[0].front() == '#') continue;
            if (f.size() < 2) reader.fail("expected truster trustee");
            auto from = reader.to_int(f[0], "truster id");
            auto to = reader.to_int(f[1], "trustee id");
            if (!users.count(from) || !users.count(to)) {
                ++result.dropped_trust_edges;
                continue;
            }
            if (from == to || !edges.emplace(from, to).second) continue;
            builder.add_social_edge(from, to);
        }
    }
    result.dataset = builder.build();
    return result;
}

Dataset subsample(const Dataset& data, std::size_t max_users, std::size_t max_items, std::uint64_t seed) {
    if (max_users == 0 || max_items == 0) throw InvalidInput("subsample sizes must be positive");
    RatingIndex index(data);
    std::mt19937_64 rng(seed);

    std::vector<UserIndex> raters;
    for (UserIndex u = 0; u < data.user_count(); ++u)
        if (!index.by_user(u).empty()) raters.push_back(u);
    std::shuffle(raters.begin(), raters.end(), rng);
    if (raters.size() > max_users) raters.resize(max_users);
    std::sort(raters.begin(), raters.end());

    std::vector<ItemIndex> items;
    for (auto u : raters)
        for (const auto& e : index.by_user(u)) items.push_back(e.other);
    sort_unique(items);
    std::shuffle(items.begin(), items.end(), rng);
    if (items.size() > max_items) items.resize(max_items);
    std::sort(items.begin(), items.end());

    std::vector<char> keep_user(data.user_count(), 0), keep_item(data.item_count(), 0);
    for (auto u : raters) keep_user[u] = 1;
    for (auto i : items) keep_item[i] = 1;

    DatasetBuilder builder(data.scale);
    builder.set_tag_universe(data.tag_names);
    builder.set_profile_universe(data.profile_names);
    for (auto u : raters) {
        builder.add_user(data.user_ids[u]);
        for (auto p : data.user_profiles[u]) builder.add_user_profile(data.user_ids[u], p);
    }
    for (auto i : items) {
        builder.add_item(data.item_ids[i]);
        for (auto t : data.item_tags[i]) builder.add_item_tag(data.item_ids[i], t);
    }
    for (const auto& r : data.ratings)
        if (keep_user[r.user] && keep_item[r.item])
            builder.add_rating(data.user_ids[r.user], data.item_ids[r.item], r.value);
    for (const auto& [a, b] : data.social)
        if (keep_user[a] && keep_user[b]) builder.add_social_edge(data.user_ids[a], data.user_ids[b]);
    return builder.build();
}

// ---------------------------------------------------------------------------

void write_dataset(std::ostream& out, const Dataset& data) {
    out << "# walkrec dataset v1\n";
    out << "scale\t" << format_rating(data.scale.min) << '\t' << format_rating(data.scale.max) << '\n';
    for (auto id : data.user_ids) out << "user\t" << id << '\n';
    for (auto id : data.item_ids) out << "item\t" << id << '\n';
    for (const auto& t : data.tag_names) out << "tag\t" << t << '\n';
    for (const auto& p : data.profile_names) out << "profile\t" << p << '\n';
    for (const auto& r : data.ratings)
        out << "rating\t" << data.user_ids[r.user] << '\t' << data.item_ids[r.item] << '\t'
            << format_rating(r.value) << '\n';
    for (std::size_t i = 0; i < data.item_count(); ++i)
        for (auto t : data.item_tags[i]) out << "item_tag\t" << data.item_ids[i] << '\t' << t << '\n';
    for (std::size_t u = 0; u < data.user_count(); ++u)
        for (auto p : data.user_profiles[u]) out << "user_profile\t" << data.user_ids[u] << '\t' << p << '\n';
    for (const auto& [a, b] : data.social)
        out << "social\t" << data.user_ids[a] << '\t' << data.user_ids[b] << '\n';
}

Dataset read_dataset(std::istream& in, const std::string& source_name) {
    LineReader reader(in, source_name);
    std::string_view line;
    RatingScale scale;
    std::vector<std::string> tags, profiles;
    struct Pending {
        std::vector<ExternalId> users, items;
        std::vector<std::tuple<ExternalId, ExternalId, double>> ratings;
        std::vector<std::pair<ExternalId, std::uint32_t>> item_tags, user_profiles;
        std::vector<std::pair<ExternalId, ExternalId>> social;
    } p;
    while (reader.next(line)) {
        if (line.empty() || line.front() == '#') continue;
        auto f = split_on(line, '\t');
        auto need = [&](std::size_t n) {
            if (f.size() != n) reader.fail("record '" + std::string(f[0]) + "' expects " + std::to_string(n) + " fields");
        };
        const auto kind = f[0];
        if (kind == "scale") {
            need(3);
            scale = {reader.to_double(f[1], "scale min"), reader.to_double(f[2], "scale max")};
        } else if (kind == "user") {
            need(2);
            p.users.push_back(reader.to_int(f[1], "user id"));
        } else if (kind == "item") {
            need(2);
            p.items.push_back(reader.to_int(f[1], "item id"));
        } else if (kind == "tag") {
            need(2);
            tags.emplace_back(f[1]);
        } else if (kind == "profile") {
            need(2);
            profiles.emplace_back(f[1]);
        } else if (kind == "rating") {
            need(4);
            p.ratings.emplace_back(reader.to_int(f[1], "user id"), reader.to_int(f[2], "item id"),
                                   reader.to_double(f[3], "rating"));
        } else if (kind == "item_tag") {
            need(3);
            p.item_tags.emplace_back(reader.to_int(f[1], "item id"),
                                     static_cast<std::uint32_t>(reader.to_int(f[2], "tag index")));
        } else if (kind == "user_profile") {
            need(3);
            p.user_profiles.emplace_back(reader.to_int(f[1], "user id"),
                                         static_cast<std::uint32_t>(reader.to_int(f[2], "profile index")));
        } else if (kind == "social") {
            need(3);
            p.social.emplace_back(reader.to_int(f[1], "user id"), reader.to_int(f[2], "user id"));
        } else {
            reader.fail("unknown record kind '" + std::string(kind) + "'");
        }
    }

    // Ratings must only reference declared ids in the canonical form.
    std::vector<ExternalId> users = p.users, items = p.items;
    sort_unique(users);
    sort_unique(items);
    DatasetBuilder builder(scale);
    for (auto u : users) builder.add_user(u);
    for (auto i : items) builder.add_item(i);
    std::set<std::pair<ExternalId, ExternalId>> seen;
    for (const auto& [u, i, v] : p.ratings) {
        if (!std::binary_search(users.begin(), users.end(), u) || !std::binary_search(items.begin(), items.end(), i))
            throw DataError(source_name + ": rating references undeclared user/item");
        if (!seen.emplace(u, i).second) throw DataError(source_name + ": duplicate rating");
        builder.add_rating(u, i, v);
    }
    builder.set_tag_universe(std::move(tags));
    builder.set_profile_universe(std::move(profiles));
    for (const auto& [i, t] : p.item_tags) builder.add_item_tag(i, t);
    for (const auto& [u, pr] : p.user_profiles) builder.add_user_profile(u, pr);
    for (const auto& [a, b] : p.social) builder.add_social_edge(a, b);
    return builder.build();
}

// ---------------------------------------------------------------------------

std::vector<Split> split_warm(const Dataset& data, int folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidInput("split_warm: folds must be >= 2");
    if (static_cast<std::size_t>(folds) > data.ratings.size())
        throw InvalidInput("split_warm: more folds than ratings");

    std::vector<std::size_t> order(data.ratings.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<int> fold_of(data.ratings.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));

    std::vector<Split> splits;
    splits.reserve(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<Rating> train, test;
        for (std::size_t r = 0; r < data.ratings.size(); ++r)
            (fold_of[r] == f ? test : train).push_back(data.ratings[r]);
        Split s;
        s.train = data.with_ratings(std::move(train));
        s.test = std::move(test);
        s.mode = SplitMode::Warm;
        s.fold = f;
        s.seed = seed;
        splits.push_back(std::move(s));
    }
    return splits;
}

Split split_cold(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidInput("split_cold: fraction must be in (0,1)");
    std::vector<char> has_rating(data.user_count(), 0);
    for (const auto& r : data.ratings) has_rating[r.user] = 1;
    std::vector<UserIndex> raters;
    for (UserIndex u = 0; u < data.user_count(); ++u)
        if (has_rating[u]) raters.push_back(u);
    if (raters.empty()) throw InvalidInput("split_cold: dataset has no ratings");

    auto wanted = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(raters.size())));
    wanted = std::max<std::size_t>(1, wanted);

    std::mt19937_64 rng(seed);
    std::shuffle(raters.begin(), raters.end(), rng);
    raters.resize(wanted);
    std::sort(raters.begin(), raters.end());

    std::vector<char> cold(data.user_count(), 0);
    for (auto u : raters) cold[u] = 1;
    std::vector<Rating> train, test;
    for (const auto& r : data.ratings) (cold[r.user] ? test : train).push_back(r);

    Split s;
    s.train = data.with_ratings(std::move(train));
    s.test = std::move(test);
    s.mode = SplitMode::Cold;
    s.seed = seed;
    s.cold_users = std::move(raters);
    return s;
}

} // namespace walkrec
