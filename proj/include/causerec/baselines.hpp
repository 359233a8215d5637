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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "causerec/cause.hpp"
#include "causerec/datamodel.hpp"
#include "causerec/ingest.hpp"
#include "causerec/propensity.hpp"

namespace causerec {

/// Which samples a baseline trains on: S_c only, S_c and S_t, or S_t only.
enum class AdaptationMode { No, Blend, Test };

AdaptationMode parse_adaptation_mode(const std::string& s);
const char* to_string(AdaptationMode mode);

std::vector<Interaction> assemble_training_set(const SplitDataset& split, AdaptationMode mode);

/// Weighted logistic factorization, sigmoid(s * <u_i, p_j> + b), trained with
/// the same update rule as the CausE trainer. lambda_c regularizes both the
/// user and the item row. Empty `weights` means unit weights.
TrainResult train_sp2v_detailed(const std::vector<Interaction>& events, std::size_t num_users,
                                std::size_t num_items, const Hyperparams& hyper,
                                std::span<const double> weights = {},
                                bool normalize_weights = false);

EmbeddingSet train_sp2v(const std::vector<Interaction>& events, std::size_t num_users,
                        std::size_t num_items, const Hyperparams& hyper,
                        std::span<const double> weights = {});

/// Per-event SP2V loss and gradient (user row, item row, calibration).
double sp2v_sample_loss(const EmbeddingSet& model, const Interaction& e, double weight,
                        const Hyperparams& hyper);
SampleGradient sp2v_sample_gradient(const EmbeddingSet& model, const Interaction& e,
                                    double weight, const Hyperparams& hyper);

/// min(1 / pi_c(item), cap) per event.
std::vector<double> ips_weights(const std::vector<Interaction>& events,
                                const PropensityModel& propensities,
                                double cap = kDefaultIpsCap);

EmbeddingSet train_wsp2v(const std::vector<Interaction>& events, std::size_t num_users,
                         std::size_t num_items, const Hyperparams& hyper,
                         const PropensityModel& propensities, double cap = kDefaultIpsCap,
                         bool normalize = false);

/// -ln sigmoid(score_diff).
double bpr_pair_loss(double score_diff);

struct BprGradient {
    std::vector<double> user;
    std::vector<double> positive;
    std::vector<double> negative;
};

/// Pairwise loss of one (user, positive, negative) triple with lambda_c
/// regularization of the three rows, and its gradient.
double bpr_triple_loss(const EmbeddingSet& model, std::size_t user, std::size_t positive,
                       std::size_t negative, const Hyperparams& hyper);
BprGradient bpr_triple_gradient(const EmbeddingSet& model, std::size_t user,
                                std::size_t positive, std::size_t negative,
                                const Hyperparams& hyper);

struct BprResult {
    EmbeddingSet model;
    std::vector<std::size_t> skipped_users;  // positives covered every item
};

BprResult train_bpr_detailed(const std::vector<Interaction>& events, std::size_t num_users,
                             std::size_t num_items, const Hyperparams& hyper,
                             std::size_t negatives_per_positive = 1);

EmbeddingSet train_bpr(const std::vector<Interaction>& events, std::size_t num_users,
                       std::size_t num_items, const Hyperparams& hyper,
                       std::size_t negatives_per_positive = 1);

}  // namespace causerec
