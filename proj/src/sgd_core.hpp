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

// Objective and update rule shared by the CausE trainer and the SP2V-family
// baselines. Not part of the public headers.

#pragma once

#include <span>
#include <vector>

#include "causerec/cause.hpp"
#include "causerec/datamodel.hpp"

namespace causerec::detail {

struct Objective {
    double lambda_c = 0.0;
    double lambda_t = 0.0;
    double lambda_dist = 0.0;
    // Single-matrix baselines regularize the user row; CausE with a shared
    // user matrix does not.
    bool regularize_shared_users = false;
};

Objective cause_objective(const Hyperparams& hyper);

double sample_loss(const TrainState& state, const Objective& obj, const Interaction& e,
                   double weight);
SampleGradient sample_gradient(const TrainState& state, const Objective& obj,
                               const Interaction& e, double weight);

/// Momentum step on the data term, then the exact proximal step of the
/// sample's quadratic penalties. The discrepancy term involves the partner row
/// too, so both rows move: with o = 2 lr lambda and c = 2 lr lambda_dist,
///   x <- (a (1 + c) + c b) / ((1 + o)(1 + c) + c),  y <- (b + c x) / (1 + c).
/// Stable for any penalty strength, and as lambda_dist grows the pair moves as
/// one shared row. With lambda_dist = 0 the partner is left untouched. The
/// own row's velocity is then reset to its realised displacement (proximal
/// heavy ball); without penalties this is exactly classical momentum.
void apply_update(TrainState& state, const Objective& obj, const Interaction& e, double weight,
                  double lr, const Hyperparams& hyper);

void prox_penalty(std::span<double> x, std::span<double> partner, double lr, double lambda,
                  double lambda_dist);

/// Throws Divergence if any value is non-finite or beyond kDivergenceLimit.
void guard(std::span<const double> values, std::size_t step);
void guard(double value, std::size_t step);

std::uint64_t shuffle_seed(std::uint64_t seed);
void next_epoch_order(Rng& rng, std::vector<std::size_t>& order);

void check_indices(const std::vector<Interaction>& events, std::size_t num_users,
                   std::size_t num_items);

/// Runs `hyper.epochs` shuffled passes. Empty `weights` means unit weights;
/// with `normalize_weights` every mini-batch's weights are rescaled to mean 1.
TrainResult run_sgd(TrainState& state, const std::vector<Interaction>& events,
                    std::span<const double> weights, bool normalize_weights,
                    const Objective& obj, const Hyperparams& hyper);

}  // namespace causerec::detail
