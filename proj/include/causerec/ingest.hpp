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

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "causerec/datamodel.hpp"

namespace causerec {

struct RatingRecord {
    std::string user_id;
    std::string item_id;
    int rating = 0;
    std::int64_t timestamp = 0;
};

enum class RatingFormat { CommaSep, DoubleColonSep };

RatingFormat parse_rating_format(const std::string& s);

/// Reads `user,item,rating,timestamp` (or `::`-separated) lines. Blank lines
/// are skipped; anything else that does not parse raises a Parse error naming
/// the 1-based line number.
std::vector<RatingRecord> parse_ratings(std::istream& in, RatingFormat format);
std::vector<RatingRecord> parse_ratings(const std::filesystem::path& path, RatingFormat format);

/// 1 for a 5-star rating, 0 otherwise.
int binarize(int rating);

/// Dense index <-> external id, in first-appearance order.
class IdMap {
public:
    std::size_t add(const std::string& id);
    const std::string& external(std::size_t index) const { return ids_.at(index); }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }

private:
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> ids_;
};

struct IndexedLog {
    std::vector<Interaction> events;  // event_id is the position in this vector
    IdMap users;
    IdMap items;
};

/// Binarizes and indexes parsed ratings. Duplicate (user, item) pairs keep the
/// record with the latest timestamp (the later line on ties).
IndexedLog index_ratings(const std::vector<RatingRecord>& records);

struct SplitFractions {
    double train = 0.7;
    double validation = 0.1;
    double test = 0.2;

    void validate() const;
};

struct SplitDataset {
    std::vector<Interaction> s_c;
    std::vector<Interaction> s_t;
    std::vector<Interaction> validation;
    std::vector<Interaction> test;
    std::size_t num_users = 0;
    std::size_t num_items = 0;
    IdMap user_ids;
    IdMap item_ids;
};

struct SkewParams {
    SplitFractions fractions;
    double s_t_injection = 0.0;
    std::uint64_t seed = 1;
};

/// Builds the skewed split. A uniform-exposure pool holding
/// (validation + test) of the events is drawn without replacement with
/// inclusion weight 1 / (count(item) + 1) (Efraimidis-Spirakis keys); the
/// rest is S_c. The pool is shuffled, its first validation/(validation+test)
/// share becomes the validation set, and `s_t_injection` of the remainder is
/// moved from test into S_t.
SplitDataset make_skew_split(const std::vector<Interaction>& events, std::size_t num_users,
                             std::size_t num_items, const SkewParams& params);

/// Chi-square divergence of an empirical item marginal from uniform,
/// sum_j (f_j - 1/m)^2 / (1/m) with f_j = count_j / n. Normalized by n so that
/// samples of different sizes compare.
double chi_square_to_uniform(const std::vector<Interaction>& events, std::size_t num_items);

struct SyntheticParams {
    std::size_t num_users = 200;
    std::size_t num_items = 100;
    std::size_t latent_dim = 8;
    double zipf_exponent = 1.0;
    std::size_t events_per_user = 300;
    double true_bias = -1.0;
    // Scales the true factors; 0 gives constant rewards sigmoid(true_bias).
    double factor_scale = 1.0;
    SplitFractions fractions;
    double s_t_injection = 0.05;
    std::uint64_t seed = 1;
};

struct SyntheticGroundTruth {
    Matrix true_user_factors;
    Matrix true_item_factors;
    double true_bias = 0.0;
    Matrix reward_matrix;                  // r_ij
    std::vector<double> logging_exposure;  // pi_c(j), Zipf over items
};

/// Zipf(s) probabilities over m ranks, p_j proportional to (j + 1)^-s.
std::vector<double> zipf_probabilities(std::size_t m, double exponent);

/// Simulated log with known rewards. Per user, round(train * events_per_user)
/// events have items drawn from the Zipf logging policy (S_c) and the rest
/// from uniform exposure; the uniform events are split into validation/test and
/// `s_t_injection` of the test share is moved into S_t.
std::pair<SplitDataset, SyntheticGroundTruth> gen_synthetic(const SyntheticParams& params);

/// Split manifest: one `user_idx,item_idx,reward,partition` line per event,
/// plus `<path>.meta` with key=value metadata.
void write_manifest(const std::filesystem::path& path, const SplitDataset& split,
                    const std::vector<std::pair<std::string, std::string>>& metadata);
SplitDataset read_manifest(const std::filesystem::path& path);

}  // namespace causerec
