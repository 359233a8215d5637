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

#include "causerec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <unordered_set>

#include "sgd_core.hpp"

namespace causerec {

namespace {

detail::Objective sp2v_objective(const Hyperparams& hyper) {
    return {hyper.lambda_c, hyper.lambda_c, 0.0, true};
}

TrainState single_state(std::size_t num_users, std::size_t num_items, const Hyperparams& hyper,
                        ModelTag tag) {
    TrainState state(init_embeddings(EmbeddingMode::Single, num_users, num_items, hyper),
                     detail::shuffle_seed(hyper.seed));
    state.embeddings.tag = tag;
    return state;
}

TrainResult train_weighted(const std::vector<Interaction>& events, std::size_t num_users,
                           std::size_t num_items, const Hyperparams& hyper,
                           std::span<const double> weights, bool normalize, ModelTag tag) {
    hyper.validate();
    if (events.empty()) throw Error(ErrorKind::Data, "no training events");
    if (!weights.empty() && weights.size() != events.size()) {
        throw Error(ErrorKind::Dimension, "weights and events differ in length");
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw Error(ErrorKind::Domain, "event weights must be positive and finite");
        }
    }
    detail::check_indices(events, num_users, num_items);
    TrainState state = single_state(num_users, num_items, hyper, tag);
    // IPS weights average about the number of items. Dividing the step by the
    // mean weight scales the whole objective by a constant, so the minimiser is
    // unchanged but the per-sample steps stay in the range the defaults are
    // tuned for.
    Hyperparams stepped = hyper;
    if (!weights.empty() && !normalize) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double mean = total / static_cast<double>(weights.size());
        stepped.lr_start /= mean;
        stepped.lr_end = std::min(stepped.lr_end / mean, stepped.lr_start);
    }
    return detail::run_sgd(state, events, weights, normalize, sp2v_objective(hyper), stepped);
}

}  // namespace

AdaptationMode parse_adaptation_mode(const std::string& s) {
    if (s == "no") return AdaptationMode::No;
    if (s == "blend") return AdaptationMode::Blend;
    if (s == "test") return AdaptationMode::Test;
    throw Error(ErrorKind::Config, "unknown adaptation mode '" + s + "'");
}

const char* to_string(AdaptationMode mode) {
    switch (mode) {
        case AdaptationMode::No: return "no";
        case AdaptationMode::Blend: return "blend";
        case AdaptationMode::Test: return "test";
    }
    return "?";
}

std::vector<Interaction> assemble_training_set(const SplitDataset& split, AdaptationMode mode) {
    std::vector<Interaction> out;
    switch (mode) {
        case AdaptationMode::No:
            out = split.s_c;
            break;
        case AdaptationMode::Blend:
            out = split.s_c;
            out.insert(out.end(), split.s_t.begin(), split.s_t.end());
            break;
        case AdaptationMode::Test:
            if (split.s_t.empty()) {
                throw Error(ErrorKind::Data, "test adaptation requested but S_t is empty");
            }
            out = split.s_t;
            break;
    }
    return out;
}

TrainResult train_sp2v_detailed(const std::vector<Interaction>& events, std::size_t num_users,
                                std::size_t num_items, const Hyperparams& hyper,
                                std::span<const double> weights, bool normalize_weights) {
    return train_weighted(events, num_users, num_items, hyper, weights, normalize_weights,
                          ModelTag::Sp2v);
}

EmbeddingSet train_sp2v(const std::vector<Interaction>& events, std::size_t num_users,
                        std::size_t num_items, const Hyperparams& hyper,
                        std::span<const double> weights) {
    return train_sp2v_detailed(events, num_users, num_items, hyper, weights, false).model;
}

double sp2v_sample_loss(const EmbeddingSet& model, const Interaction& e, double weight,
                        const Hyperparams& hyper) {
    TrainState state(model, 0);
    return detail::sample_loss(state, sp2v_objective(hyper), e, weight);
}

SampleGradient sp2v_sample_gradient(const EmbeddingSet& model, const Interaction& e,
                                    double weight, const Hyperparams& hyper) {
    TrainState state(model, 0);
    return detail::sample_gradient(state, sp2v_objective(hyper), e, weight);
}

std::vector<double> ips_weights(const std::vector<Interaction>& events,
                                const PropensityModel& propensities, double cap) {
    std::vector<double> w;
    w.reserve(events.size());
    for (const auto& e : events) {
        if (e.item >= propensities.probs.size()) {
            throw Error(ErrorKind::Index, "propensities do not cover item " +
                                              std::to_string(e.item));
        }
        w.push_back(ips_reward(1, propensities.probs[e.item], cap));
    }
    return w;
}

EmbeddingSet train_wsp2v(const std::vector<Interaction>& events, std::size_t num_users,
                         std::size_t num_items, const Hyperparams& hyper,
                         const PropensityModel& propensities, double cap, bool normalize) {
    if (propensities.probs.size() < num_items) {
        throw Error(ErrorKind::Data, "propensities do not cover all items");
    }
    std::vector<double> w = ips_weights(events, propensities, cap);
    return train_weighted(events, num_users, num_items, hyper, w, normalize, ModelTag::Wsp2v)
        .model;
}

double bpr_pair_loss(double score_diff) {
    // -ln sigmoid(x) = ln(1 + e^-x), evaluated stably.
    if (score_diff >= 0.0) return std::log1p(std::exp(-score_diff));
    return -score_diff + std::log1p(std::exp(score_diff));
}

namespace {

double score_diff(const EmbeddingSet& model, std::size_t user, std::size_t positive,
                  std::size_t negative) {
    if (user >= model.num_users() || positive >= model.num_items() ||
        negative >= model.num_items()) {
        throw Error(ErrorKind::Index, "BPR triple out of range");
    }
    auto u = model.gamma_c().row(user);
    return inner_product(u, model.theta_c().row(positive)) -
           inner_product(u, model.theta_c().row(negative));
}

}  // namespace

double bpr_triple_loss(const EmbeddingSet& model, std::size_t user, std::size_t positive,
                       std::size_t negative, const Hyperparams& hyper) {
    const double x = score_diff(model, user, positive, negative);
    const auto& items = model.theta_c();
    auto u = model.gamma_c().row(user);
    return bpr_pair_loss(x) +
           hyper.lambda_c * (inner_product(u, u) +
                             inner_product(items.row(positive), items.row(positive)) +
                             inner_product(items.row(negative), items.row(negative)));
}

BprGradient bpr_triple_gradient(const EmbeddingSet& model, std::size_t user,
                                std::size_t positive, std::size_t negative,
                                const Hyperparams& hyper) {
    const double x = score_diff(model, user, positive, negative);
    const double d = -sigmoid(-x);  // d/dx of -ln sigmoid(x)
    auto u = model.gamma_c().row(user);
    auto p = model.theta_c().row(positive);
    auto n = model.theta_c().row(negative);
    const std::size_t dim = u.size();
    BprGradient g{std::vector<double>(dim), std::vector<double>(dim), std::vector<double>(dim)};
    const double two_lambda = 2.0 * hyper.lambda_c;
    for (std::size_t k = 0; k < dim; ++k) {
        g.user[k] = d * (p[k] - n[k]) + two_lambda * u[k];
        g.positive[k] = d * u[k] + two_lambda * p[k];
        g.negative[k] = -d * u[k] + two_lambda * n[k];
    }
    return g;
}

BprResult train_bpr_detailed(const std::vector<Interaction>& events, std::size_t num_users,
                             std::size_t num_items, const Hyperparams& hyper,
                             std::size_t negatives_per_positive) {
    hyper.validate();
    if (negatives_per_positive == 0) {
        throw Error(ErrorKind::Config, "negatives_per_positive must be positive");
    }
    detail::check_indices(events, num_users, num_items);

    std::vector<std::unordered_set<std::size_t>> positives_of(num_users);
    std::vector<Interaction> positives;
    for (const auto& e : events) {
        if (e.reward == 1) {
            positives_of[e.user].insert(e.item);
            positives.push_back(e);
        }
    }
    if (positives.empty()) throw Error(ErrorKind::Data, "BPR needs at least one positive event");

    BprResult result;
    for (std::size_t i = 0; i < num_users; ++i) {
        if (!positives_of[i].empty() && positives_of[i].size() >= num_items) {
            std::cerr << "warning: user " << i
                      << " has positives on every item; skipped by BPR\n";
            result.skipped_users.push_back(i);
        }
    }
    std::erase_if(positives, [&](const Interaction& e) {
        return positives_of[e.user].size() >= num_items;
    });

    TrainState state = single_state(num_users, num_items, hyper, ModelTag::Bpr);
    Rng negative_rng(hyper.seed + 0x632be59bd9b4e019ULL);
    auto& m = state.embeddings;
    auto& vel = state.velocities;

    const std::size_t n = positives.size();
    const std::size_t per_epoch = batches_per_epoch(n, hyper.batch_size);
    const std::size_t total_steps = hyper.epochs * per_epoch;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < hyper.epochs && n > 0; ++epoch) {
        detail::next_epoch_order(state.rng, order);
        for (std::size_t b = 0; b < per_epoch; ++b) {
            const double lr = lr_at(state.step, total_steps, hyper.lr_start, hyper.lr_end);
            const std::size_t end = std::min(n, (b + 1) * hyper.batch_size);
            for (std::size_t k = b * hyper.batch_size; k < end; ++k) {
                const Interaction& e = positives[order[k]];
                for (std::size_t s = 0; s < negatives_per_positive; ++s) {
                    std::size_t neg;
                    do {
                        neg = negative_rng.below(num_items);
                    } while (positives_of[e.user].count(neg) != 0);

                    Hyperparams data_only = hyper;
                    data_only.lambda_c = 0.0;
                    BprGradient g = bpr_triple_gradient(m, e.user, e.item, neg, data_only);
                    auto u = m.gamma_c().row(e.user);
                    auto p = m.theta_c().row(e.item);
                    auto q = m.theta_c().row(neg);
                    auto step_row = [&](std::span<double> x, const std::vector<double>& grad,
                                        std::span<double> v) {
                        const std::vector<double> before(x.begin(), x.end());
                        momentum_step(x, grad, v, lr, hyper.momentum);
                        detail::prox_penalty(x, {}, lr, hyper.lambda_c, 0.0);
                        for (std::size_t k = 0; k < x.size(); ++k) v[k] = x[k] - before[k];
                    };
                    step_row(u, g.user, vel.gamma_c().row(e.user));
                    step_row(p, g.positive, vel.theta_c().row(e.item));
                    step_row(q, g.negative, vel.theta_c().row(neg));
                    detail::guard(u, state.step);
                    detail::guard(p, state.step);
                    detail::guard(q, state.step);
                }
            }
            ++state.step;
        }
    }
    m.check_finite();
    result.model = m;
    return result;
}

EmbeddingSet train_bpr(const std::vector<Interaction>& events, std::size_t num_users,
                       std::size_t num_items, const Hyperparams& hyper,
                       std::size_t negatives_per_positive) {
    return train_bpr_detailed(events, num_users, num_items, hyper, negatives_per_positive).model;
}

}  // namespace causerec
