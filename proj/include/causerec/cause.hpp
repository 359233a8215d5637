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

// The CausE trainer: joint factorization of the logged sample S_c and the
// uniform-exposure sample S_t with a discrepancy penalty between the
// treatment and control embeddings.
//
// Per-sample objective, for a sample of origin o in {c, t} with user i and
// item j:
//
//   bce(sigmoid(s * <gamma^o_i, theta^o_j> + b), y)
//     + lambda_o * |theta^o_j|^2 + lambda_dist * |theta^t_j - theta^c_j|^2
//     [+ lambda_o * |gamma^o_i|^2 + lambda_dist * |gamma^t_i - gamma^c_i|^2
//        when the user matrix is duplicated]
//
// A sample only updates its own side: control samples move theta^c_j (and
// gamma^c_i), treatment samples move theta^t_j (and gamma^t_i).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causerec/datamodel.hpp"

namespace causerec {

enum class CauseVariant { ProdC, ProdT, Avg };

CauseVariant parse_cause_variant(const std::string& s);
const char* to_string(CauseVariant v);
ModelTag model_tag(CauseVariant v);

/// Parameter blocks of an EmbeddingSet. Aliased blocks resolve to the same
/// storage (GammaT is GammaC in ProdOnly mode).
enum class Block { GammaC, GammaT, ThetaC, ThetaT };

Matrix& block_matrix(EmbeddingSet& set, Block block);
const Matrix& block_matrix(const EmbeddingSet& set, Block block);

struct RowGradient {
    Block block = Block::ThetaC;
    std::size_t row = 0;
    std::vector<double> grad;
    // False for the derivative of the discrepancy penalty with respect to the
    // other side's row. Those entries complete the gradient of the loss but are
    // not applied by the trainer.
    bool own_side = true;
};

struct SampleGradient {
    std::vector<RowGradient> rows;
    double calib_scale = 0.0;
    double calib_bias = 0.0;
};

struct TrainState {
    TrainState(EmbeddingSet init, std::uint64_t seed, bool pooled_treatment = false);

    EmbeddingSet embeddings;
    EmbeddingSet velocities;  // same shape and aliasing as `embeddings`
    std::size_t step = 0;
    Rng rng;
    // CausE-avg: every item shares treatment row 0 during training.
    bool pooled_treatment = false;

    std::size_t treatment_row(std::size_t item) const { return pooled_treatment ? 0 : item; }
};

/// Uniform in [-init_scale, init_scale], drawn from `hyper.seed`.
EmbeddingSet init_embeddings(EmbeddingMode mode, std::size_t num_users, std::size_t num_items,
                             const Hyperparams& hyper);

double sample_loss(const TrainState& state, const Interaction& e, const Hyperparams& hyper);
SampleGradient sample_gradients(const TrainState& state, const Interaction& e,
                                const Hyperparams& hyper);

/// Sum of sample losses over a batch, and its full gradient (own-side and
/// partner terms) as a dense, EmbeddingSet-shaped container.
double batch_loss(const TrainState& state, std::span<const Interaction> batch,
                  const Hyperparams& hyper);
EmbeddingSet batch_gradient(const TrainState& state, std::span<const Interaction> batch,
                            const Hyperparams& hyper);

/// Classical momentum: v' = mu * v - lr * g; p' = p + v'.
void momentum_step(std::span<double> param, std::span<const double> grad,
                   std::span<double> velocity, double lr, double momentum);
void momentum_step(double& param, double grad, double& velocity, double lr, double momentum);

/// Linear decay from lr_start at step 0 to lr_end at total_steps.
double lr_at(std::size_t step, std::size_t total_steps, double lr_start, double lr_end);

std::size_t batches_per_epoch(std::size_t num_events, std::size_t batch_size);

/// Event order of every epoch, as used by the trainers for `num_events`
/// events under `hyper.seed`.
std::vector<std::vector<std::size_t>> epoch_orders(std::size_t num_events,
                                                   const Hyperparams& hyper);

inline constexpr double kDivergenceLimit = 1e6;

struct TrainResult {
    EmbeddingSet model;
    std::vector<double> epoch_loss;  // mean pre-update sample loss per epoch
};

/// Trains over the shuffled union of S_c followed by S_t. S_t may be empty.
TrainResult train_cause_detailed(const std::vector<Interaction>& s_c,
                                 const std::vector<Interaction>& s_t, std::size_t num_users,
                                 std::size_t num_items, const Hyperparams& hyper,
                                 EmbeddingMode mode, CauseVariant variant);

EmbeddingSet train_cause(const std::vector<Interaction>& s_c,
                         const std::vector<Interaction>& s_t, std::size_t num_users,
                         std::size_t num_items, const Hyperparams& hyper, EmbeddingMode mode,
                         CauseVariant variant);

/// s * <gamma_i, theta_j> + b, with theta from the control matrix (ProdC, Avg)
/// or the treatment matrix (ProdT) and the user row from the matching side.
double raw_score(const EmbeddingSet& model, CauseVariant variant, std::size_t user,
                 std::size_t item);
double predict(const EmbeddingSet& model, CauseVariant variant, std::size_t user,
               std::size_t item);

/// Scores through the control side for every tag except CauseProdT.
double raw_score(const EmbeddingSet& model, std::size_t user, std::size_t item);
double predict(const EmbeddingSet& model, std::size_t user, std::size_t item);

}  // namespace causerec
