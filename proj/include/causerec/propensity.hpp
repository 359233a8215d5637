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
#include <filesystem>
#include <vector>

#include "causerec/datamodel.hpp"

namespace causerec {

/// User-independent logging propensities pi_c(j).
struct PropensityModel {
    std::vector<double> probs;
    double smoothing_alpha = 1.0;
    std::size_t total_events = 0;
};

inline constexpr double kDefaultIpsCap = 100.0;

/// pi_c(j) = (count_j + alpha) / (N + alpha * num_items).
PropensityModel estimate_propensity(const std::vector<Interaction>& events,
                                    std::size_t num_items, double smoothing_alpha = 1.0);

/// min(y / pi, cap).
double ips_reward(int y, double pi_c_j, double cap = kDefaultIpsCap);

/// One probability per line, 17 significant digits.
void write_propensities(const std::filesystem::path& path, const PropensityModel& model);

/// <theta_t[j], gamma_t[i]> - <theta_c[j], gamma_c[i]> on raw scores. With a
/// shared user matrix this is <w^delta_j, u_i>.
double ite_pair(const EmbeddingSet& model, std::size_t user, std::size_t item);

/// Probability-scale counterpart of ite_pair: the difference of the calibrated
/// treatment and control predictions.
double ite_pair_probability(const EmbeddingSet& model, std::size_t user, std::size_t item);

/// 1 + <u_i, w^delta_j> / <u_i, theta_c[j]>, with u_i the control-side user.
/// Throws Singularity when the denominator is zero.
double ips_from_embeddings(const EmbeddingSet& model, std::size_t user, std::size_t item);

/// Per-row argmax, ties to the lowest item index.
std::vector<std::size_t> optimal_policy(const Matrix& scores);

/// A stochastic policy: row i is pi(. | u_i); user_marginal is p(u_i).
struct PolicyEvaluation {
    Matrix policy;
    std::vector<double> user_marginal;  // empty means uniform
    double reward_estimate = 0.0;
};

/// One-hot rows for a deterministic choice per user.
Matrix deterministic_policy(const std::vector<std::size_t>& choices, std::size_t num_items);

/// Uniform exposure over all items.
Matrix uniform_policy(std::size_t num_users, std::size_t num_items);

/// R^pi = sum_ij r_ij pi(j|i) p(u_i). Fills `reward_estimate` and returns it.
double policy_reward(const Matrix& reward_matrix, PolicyEvaluation& policy);

/// Per-pair ITE_ij = R_ij^pi - R_ij^control.
Matrix policy_ite_pairs(const Matrix& reward_matrix, const PolicyEvaluation& policy,
                        const PolicyEvaluation& control);

/// ITE^pi = sum_ij ITE_ij.
double policy_ite(const Matrix& reward_matrix, const PolicyEvaluation& policy,
                  const PolicyEvaluation& control);

}  // namespace causerec
