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

#include "causerec/propensity.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "causerec/cause.hpp"

namespace causerec {

PropensityModel estimate_propensity(const std::vector<Interaction>& events,
                                    std::size_t num_items, double smoothing_alpha) {
    if (num_items == 0) throw Error(ErrorKind::Domain, "estimate_propensity: no items");
    if (!(smoothing_alpha >= 0.0)) {
        throw Error(ErrorKind::Domain, "smoothing alpha must be non-negative");
    }
    std::vector<double> counts(num_items, 0.0);
    for (const auto& e : events) {
        if (e.item >= num_items) {
            throw Error(ErrorKind::Index, "item " + std::to_string(e.item) + " out of range");
        }
        counts[e.item] += 1.0;
    }
    const double denom =
        static_cast<double>(events.size()) + smoothing_alpha * static_cast<double>(num_items);
    if (!(denom > 0.0)) {
        throw Error(ErrorKind::Domain, "no events and zero smoothing: propensities undefined");
    }
    PropensityModel model;
    model.smoothing_alpha = smoothing_alpha;
    model.total_events = events.size();
    model.probs.resize(num_items);
    for (std::size_t j = 0; j < num_items; ++j) {
        model.probs[j] = (counts[j] + smoothing_alpha) / denom;
    }
    return model;
}

double ips_reward(int y, double pi_c_j, double cap) {
    if (!(pi_c_j > 0.0)) throw Error(ErrorKind::Domain, "ips_reward: propensity must be > 0");
    if (!(cap > 0.0)) throw Error(ErrorKind::Domain, "ips_reward: cap must be > 0");
    return std::min(static_cast<double>(y) / pi_c_j, cap);
}

void write_propensities(const std::filesystem::path& path, const PropensityModel& model) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw Error(ErrorKind::Data, "cannot write " + path.string());
    for (double p : model.probs) std::fprintf(f, "%.17g\n", p);
    std::fclose(f);
}

double ite_pair(const EmbeddingSet& model, std::size_t user, std::size_t item) {
    if (user >= model.num_users() || item >= model.num_items()) {
        throw Error(ErrorKind::Index, "ite_pair: index out of range");
    }
    return inner_product(model.theta_t().row(item), model.gamma_t().row(user)) -
           inner_product(model.theta_c().row(item), model.gamma_c().row(user));
}

double ite_pair_probability(const EmbeddingSet& model, std::size_t user, std::size_t item) {
    return predict(model, CauseVariant::ProdT, user, item) -
           predict(model, CauseVariant::ProdC, user, item);
}

double ips_from_embeddings(const EmbeddingSet& model, std::size_t user, std::size_t item) {
    if (user >= model.num_users() || item >= model.num_items()) {
        throw Error(ErrorKind::Index, "ips_from_embeddings: index out of range");
    }
    auto u = model.gamma_c().row(user);
    const double denom = inner_product(u, model.theta_c().row(item));
    if (denom == 0.0) {
        throw Error(ErrorKind::Singularity, "ips_from_embeddings: <u, theta_c> is zero");
    }
    return 1.0 + inner_product(u, model.item_delta(item)) / denom;
}

std::vector<std::size_t> optimal_policy(const Matrix& scores) {
    if (scores.cols() == 0) throw Error(ErrorKind::Domain, "optimal_policy: empty rows");
    std::vector<std::size_t> choice(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto row = scores.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < row.size(); ++j) {
            if (!std::isfinite(row[j])) throw Error(ErrorKind::Domain, "non-finite score");
            if (row[j] > row[best]) best = j;
        }
        if (!std::isfinite(row[0])) throw Error(ErrorKind::Domain, "non-finite score");
        choice[i] = best;
    }
    return choice;
}

Matrix deterministic_policy(const std::vector<std::size_t>& choices, std::size_t num_items) {
    Matrix p(choices.size(), num_items);
    for (std::size_t i = 0; i < choices.size(); ++i) p(i, choices.at(i)) = 1.0;
    return p;
}

Matrix uniform_policy(std::size_t num_users, std::size_t num_items) {
    return Matrix(num_users, num_items, 1.0 / static_cast<double>(num_items));
}

namespace {

std::vector<double> user_weights(const PolicyEvaluation& policy, std::size_t num_users) {
    if (policy.user_marginal.empty()) {
        return std::vector<double>(num_users, 1.0 / static_cast<double>(num_users));
    }
    if (policy.user_marginal.size() != num_users) {
        throw Error(ErrorKind::Dimension, "user marginal length differs from the user count");
    }
    return policy.user_marginal;
}

void check_policy(const Matrix& reward_matrix, const PolicyEvaluation& policy) {
    if (policy.policy.rows() != reward_matrix.rows() ||
        policy.policy.cols() != reward_matrix.cols()) {
        throw Error(ErrorKind::Dimension, "policy and reward matrix shapes differ");
    }
    for (std::size_t i = 0; i < policy.policy.rows(); ++i) {
        double sum = 0.0;
        for (double p : policy.policy.row(i)) {
            if (p < 0.0) throw Error(ErrorKind::Domain, "negative policy probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw Error(ErrorKind::Domain,
                        "policy row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

}  // namespace

double policy_reward(const Matrix& reward_matrix, PolicyEvaluation& policy) {
    check_policy(reward_matrix, policy);
    const auto pu = user_weights(policy, reward_matrix.rows());
    double total = 0.0;
    for (std::size_t i = 0; i < reward_matrix.rows(); ++i) {
        for (std::size_t j = 0; j < reward_matrix.cols(); ++j) {
            total += reward_matrix(i, j) * policy.policy(i, j) * pu[i];
        }
    }
    policy.reward_estimate = total;
    return total;
}

Matrix policy_ite_pairs(const Matrix& reward_matrix, const PolicyEvaluation& policy,
                        const PolicyEvaluation& control) {
    check_policy(reward_matrix, policy);
    check_policy(reward_matrix, control);
    const auto pu = user_weights(policy, reward_matrix.rows());
    const auto pc = user_weights(control, reward_matrix.rows());
    Matrix ite(reward_matrix.rows(), reward_matrix.cols());
    for (std::size_t i = 0; i < reward_matrix.rows(); ++i) {
        for (std::size_t j = 0; j < reward_matrix.cols(); ++j) {
            ite(i, j) = reward_matrix(i, j) * policy.policy(i, j) * pu[i] -
                        reward_matrix(i, j) * control.policy(i, j) * pc[i];
        }
    }
    return ite;
}

double policy_ite(const Matrix& reward_matrix, const PolicyEvaluation& policy,
                  const PolicyEvaluation& control) {
    Matrix ite = policy_ite_pairs(reward_matrix, policy, control);
    double total = 0.0;
    for (double v : ite.values()) total += v;
    return total;
}

}  // namespace causerec
