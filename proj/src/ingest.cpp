// Copyright 2026 The causerec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "causerec/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace causerec {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + sep.size();
    }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

const char* partition_name(int p) {
    static const char* names[] = {"s_c", "s_t", "validation", "test"};
    return names[p];
}

}  // namespace

RatingFormat parse_rating_format(const std::string& s) {
    if (s == "comma" || s == "csv") return RatingFormat::CommaSep;
    if (s == "doublecolon" || s == "::") return RatingFormat::DoubleColonSep;
    throw Error(ErrorKind::Config, "unknown rating format '" + s + "'");
}

std::vector<RatingRecord> parse_ratings(std::istream& in, RatingFormat format) {
    const std::string_view sep = format == RatingFormat::CommaSep ? "," : "::";
    std::vector<RatingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        auto fields = split_fields(view, sep);
        auto fail = [&](const std::string& why) {
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": " + why + " in '" + line + "'");
        };
        if (fields.size() != 4) fail("expected 4 fields, got " + std::to_string(fields.size()));
        RatingRecord r;
        r.user_id = std::string(trim(fields[0]));
        r.item_id = std::string(trim(fields[1]));
        if (r.user_id.empty() || r.item_id.empty()) fail("empty id");
        if (!parse_number(trim(fields[2]), r.rating)) fail("bad rating");
        if (r.rating < 1 || r.rating > 5) fail("rating out of range 1-5");
        if (!parse_number(trim(fields[3]), r.timestamp)) fail("bad timestamp");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RatingRecord> parse_ratings(const std::filesystem::path& path, RatingFormat format) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Data, "cannot open ratings file " + path.string());
    return parse_ratings(in, format);
}

int binarize(int rating) {
    if (rating < 1 || rating > 5) {
        throw Error(ErrorKind::Domain, "rating " + std::to_string(rating) + " outside 1-5");
    }
    return rating == 5 ? 1 : 0;
}

std::size_t IdMap::add(const std::string& id) {
    auto [it, inserted] = index_.try_emplace(id, ids_.size());
    if (inserted) ids_.push_back(id);
    return it->second;
}

IndexedLog index_ratings(const std::vector<RatingRecord>& records) {
    // (user, item) -> position of the record that wins.
    std::map<std::pair<std::string, std::string>, std::size_t> latest;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto key = std::make_pair(records[i].user_id, records[i].item_id);
        auto [it, inserted] = latest.try_emplace(key, i);
        if (!inserted && records[i].timestamp >= records[it->second].timestamp) it->second = i;
    }
    std::vector<std::size_t> keep;
    keep.reserve(latest.size());
    for (const auto& [key, pos] : latest) keep.push_back(pos);
    std::sort(keep.begin(), keep.end());

    IndexedLog log;
    log.events.reserve(keep.size());
    for (std::size_t pos : keep) {
        const auto& r = records[pos];
        Interaction e;
        e.user = log.users.add(r.user_id);
        e.item = log.items.add(r.item_id);
        e.reward = binarize(r.rating);
        e.event_id = log.events.size();
        log.events.push_back(e);
    }
    return log;
}

void SplitFractions::validate() const {
    if (!(train > 0.0) || !(validation >= 0.0) || !(test > 0.0)) {
        throw Error(ErrorKind::Config, "split fractions must be positive");
    }
    if (std::abs(train + validation + test - 1.0) > 1e-9) {
        throw Error(ErrorKind::Config, "split fractions must sum to 1");
    }
}

SplitDataset make_skew_split(const std::vector<Interaction>& events, std::size_t num_users,
                             std::size_t num_items, const SkewParams& params) {
    if (events.empty()) throw Error(ErrorKind::Data, "make_skew_split: no events");
    params.fractions.validate();
    if (!(params.s_t_injection >= 0.0 && params.s_t_injection <= 1.0)) {
        throw Error(ErrorKind::Config, "s_t_injection must be in [0, 1]");
    }
    for (const auto& e : events) {
        if (e.user >= num_users || e.item >= num_items) {
            throw Error(ErrorKind::Index, "event references an id outside the dataset bounds");
        }
    }

    std::vector<double> counts(num_items, 1.0);  // add-one smoothing
    for (const auto& e : events) counts[e.item] += 1.0;

    const double uniform_share = params.fractions.validation + params.fractions.test;
    const auto pool_size = static_cast<std::size_t>(
        std::llround(uniform_share * static_cast<double>(events.size())));

    // Weighted sampling without replacement: the pool_size largest keys
    // log(u) / w are a draw with inclusion proportional to w = 1 / popularity.
    Rng rng(params.seed);
    std::vector<std::pair<double, std::size_t>> keys(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        double u = 1.0 - rng.uniform();  // (0, 1]
        keys[i] = {std::log(u) * counts[events[i].item], i};
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });

    std::vector<char> in_pool(events.size(), 0);
    std::vector<std::size_t> pool;
    pool.reserve(pool_size);
    for (std::size_t k = 0; k < pool_size; ++k) {
        in_pool[keys[k].second] = 1;
        pool.push_back(keys[k].second);
    }
    std::sort(pool.begin(), pool.end());
    rng.shuffle(std::span<std::size_t>(pool));

    SplitDataset split;
    split.num_users = num_users;
    split.num_items = num_items;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (in_pool[i]) continue;
        Interaction e = events[i];
        e.origin = Origin::Control;
        split.s_c.push_back(e);
    }

    const auto n_val = static_cast<std::size_t>(std::llround(
        static_cast<double>(pool.size()) * params.fractions.validation / uniform_share));
    const std::size_t n_test_pool = pool.size() - n_val;
    const auto n_inject = static_cast<std::size_t>(
        std::llround(params.s_t_injection * static_cast<double>(n_test_pool)));
    for (std::size_t k = 0; k < pool.size(); ++k) {
        Interaction e = events[pool[k]];
        if (k < n_val) {
            split.validation.push_back(e);
        } else if (k < n_val + n_inject) {
            e.origin = Origin::Treatment;
            split.s_t.push_back(e);
        } else {
            split.test.push_back(e);
        }
    }
    return split;
}

double chi_square_to_uniform(const std::vector<Interaction>& events, std::size_t num_items) {
    if (events.empty() || num_items == 0) {
        throw Error(ErrorKind::Data, "chi_square_to_uniform: empty input");
    }
    std::vector<double> counts(num_items, 0.0);
    for (const auto& e : events) counts.at(e.item) += 1.0;
    const double n = static_cast<double>(events.size());
    const double expected = 1.0 / static_cast<double>(num_items);
    double chi = 0.0;
    for (double c : counts) {
        double d = c / n - expected;
        chi += d * d / expected;
    }
    return chi;
}

std::vector<double> zipf_probabilities(std::size_t m, double exponent) {
    if (m == 0) throw Error(ErrorKind::Domain, "zipf over zero items");
    if (!(exponent >= 0.0)) throw Error(ErrorKind::Domain, "zipf exponent must be >= 0");
    std::vector<double> p(m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        p[j] = std::pow(static_cast<double>(j + 1), -exponent);
        total += p[j];
    }
    for (double& v : p) v /= total;
    return p;
}

std::pair<SplitDataset, SyntheticGroundTruth> gen_synthetic(const SyntheticParams& params) {
    if (params.num_users == 0 || params.num_items == 0 || params.latent_dim == 0 ||
        params.events_per_user == 0) {
        throw Error(ErrorKind::Config, "gen_synthetic: sizes must be positive");
    }
    params.fractions.validate();
    if (!(params.s_t_injection >= 0.0 && params.s_t_injection <= 1.0)) {
        throw Error(ErrorKind::Config, "s_t_injection must be in [0, 1]");
    }

    Rng rng(params.seed);
    SyntheticGroundTruth truth;
    // Entry variance 1/sqrt(d) gives <u*, v*> unit variance.
    const double sd = params.factor_scale /
                      std::pow(static_cast<double>(params.latent_dim), 0.25);
    truth.true_user_factors = Matrix(params.num_users, params.latent_dim);
    truth.true_item_factors = Matrix(params.num_items, params.latent_dim);
    for (double& v : truth.true_user_factors.values()) v = rng.normal(0.0, sd);
    for (double& v : truth.true_item_factors.values()) v = rng.normal(0.0, sd);
    truth.true_bias = params.true_bias;
    truth.reward_matrix = Matrix(params.num_users, params.num_items);
    for (std::size_t i = 0; i < params.num_users; ++i) {
        for (std::size_t j = 0; j < params.num_items; ++j) {
            truth.reward_matrix(i, j) =
                sigmoid(inner_product(truth.true_user_factors.row(i),
                                      truth.true_item_factors.row(j)) +
                        params.true_bias);
        }
    }
    truth.logging_exposure = zipf_probabilities(params.num_items, params.zipf_exponent);
    std::vector<double> cdf(params.num_items);
    std::partial_sum(truth.logging_exposure.begin(), truth.logging_exposure.end(), cdf.begin());

    auto draw_logged_item = [&]() {
        double u = rng.uniform() * cdf.back();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                                     params.num_items - 1);
    };

    const auto n_logged = static_cast<std::size_t>(std::llround(
        params.fractions.train * static_cast<double>(params.events_per_user)));
    SplitDataset split;
    split.num_users = params.num_users;
    split.num_items = params.num_items;
    for (std::size_t i = 0; i < params.num_users; ++i) split.user_ids.add(std::to_string(i));
    for (std::size_t j = 0; j < params.num_items; ++j) split.item_ids.add(std::to_string(j));

    std::vector<Interaction> uniform_pool;
    std::size_t next_id = 0;
    for (std::size_t i = 0; i < params.num_users; ++i) {
        for (std::size_t k = 0; k < params.events_per_user; ++k) {
            Interaction e;
            e.user = i;
            e.item = k < n_logged ? draw_logged_item() : rng.below(params.num_items);
            e.reward = rng.uniform() < truth.reward_matrix(i, e.item) ? 1 : 0;
            e.event_id = next_id++;
            if (k < n_logged) {
                split.s_c.push_back(e);
            } else {
                uniform_pool.push_back(e);
            }
        }
    }

    rng.shuffle(std::span<Interaction>(uniform_pool));
    const double uniform_share = params.fractions.validation + params.fractions.test;
    const auto n_val = static_cast<std::size_t>(std::llround(
        static_cast<double>(uniform_pool.size()) * params.fractions.validation / uniform_share));
    const std::size_t n_test_pool = uniform_pool.size() - n_val;
    const auto n_inject = static_cast<std::size_t>(
        std::llround(params.s_t_injection * static_cast<double>(n_test_pool)));
    for (std::size_t k = 0; k < uniform_pool.size(); ++k) {
        Interaction e = uniform_pool[k];
        if (k < n_val) {
            split.validation.push_back(e);
        } else if (k < n_val + n_inject) {
            e.origin = Origin::Treatment;
            split.s_t.push_back(e);
        } else {
            split.test.push_back(e);
        }
    }
    return {std::move(split), std::move(truth)};
}

void write_manifest(const std::filesystem::path& path, const SplitDataset& split,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Data, "cannot write manifest " + path.string());
    const std::vector<Interaction>* parts[] = {&split.s_c, &split.s_t, &split.validation,
                                               &split.test};
    for (int p = 0; p < 4; ++p) {
        for (const auto& e : *parts[p]) {
            out << e.user << ',' << e.item << ',' << e.reward << ',' << partition_name(p) << '\n';
        }
    }
    std::ofstream meta(path.string() + ".meta");
    if (!meta) throw Error(ErrorKind::Data, "cannot write manifest metadata");
    meta << "num_users=" << split.num_users << '\n'
         << "num_items=" << split.num_items << '\n'
         << "n_s_c=" << split.s_c.size() << '\n'
         << "n_s_t=" << split.s_t.size() << '\n'
         << "n_validation=" << split.validation.size() << '\n'
         << "n_test=" << split.test.size() << '\n';
    for (const auto& [k, v] : metadata) meta << k << '=' << v << '\n';
}

SplitDataset read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Data, "cannot open manifest " + path.string());
    SplitDataset split;
    std::string line;
    std::size_t line_no = 0;
    std::size_t max_user = 0, max_item = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        auto fields = split_fields(view, ",");
        auto fail = [&]() {
            throw Error(ErrorKind::Parse, "manifest line " + std::to_string(line_no) +
                                              ": malformed '" + line + "'");
        };
        if (fields.size() != 4) fail();
        Interaction e;
        if (!parse_number(fields[0], e.user) || !parse_number(fields[1], e.item) ||
            !parse_number(fields[2], e.reward) || (e.reward != 0 && e.reward != 1)) {
            fail();
        }
        e.event_id = line_no - 1;
        max_user = std::max(max_user, e.user + 1);
        max_item = std::max(max_item, e.item + 1);
        if (fields[3] == "s_c") {
            split.s_c.push_back(e);
        } else if (fields[3] == "s_t") {
            e.origin = Origin::Treatment;
            split.s_t.push_back(e);
        } else if (fields[3] == "validation") {
            split.validation.push_back(e);
        } else if (fields[3] == "test") {
            split.test.push_back(e);
        } else {
            fail();
        }
    }
    split.num_users = max_user;
    split.num_items = max_item;

    std::ifstream meta(path.string() + ".meta");
    while (meta && std::getline(meta, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::size_t value = 0;
        if (!parse_number(std::string_view(line).substr(eq + 1), value)) continue;
        if (key == "num_users") split.num_users = std::max(split.num_users, value);
        if (key == "num_items") split.num_items = std::max(split.num_items, value);
    }
    for (std::size_t i = 0; i < split.num_users; ++i) split.user_ids.add(std::to_string(i));
    for (std::size_t j = 0; j < split.num_items; ++j) split.item_ids.add(std::to_string(j));
    return split;
}

}  // namespace causerec
