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

#include "causerec/cause.hpp"

#include <cmath>
#include <numeric>

#include "sgd_core.hpp"

namespace causerec {

namespace detail {

namespace {

// The rows a sample reads: its own user/item rows and, when that side has a
// twin, the twin's rows for the discrepancy penalty.
struct Touched {
    Block user_block;
    Block item_block;
    std::size_t user;
    std::size_t item;
    bool has_item_partner;
    Block item_partner_block;
    std::size_t item_partner;
    bool has_user_partner;
    Block user_partner_block;
    double lambda;
};

Touched touched_rows(const TrainState& state, const Objective& obj, const Interaction& e) {
    const auto& m = state.embeddings;
    if (e.user >= m.num_users() || e.item >= m.num_items()) {
        throw Error(ErrorKind::Index, "interaction (" + std::to_string(e.user) + ", " +
                                          std::to_string(e.item) + ") out of range");
    }
    const bool control = e.origin == Origin::Control;
    Touched t{};
    t.user_block = control ? Block::GammaC : Block::GammaT;
    t.item_block = control ? Block::ThetaC : Block::ThetaT;
    t.user = e.user;
    t.item = control ? e.item : state.treatment_row(e.item);
    t.has_item_partner = m.items_duplicated();
    t.item_partner_block = control ? Block::ThetaT : Block::ThetaC;
    t.item_partner = control ? state.treatment_row(e.item) : e.item;
    t.has_user_partner = m.users_duplicated();
    t.user_partner_block = control ? Block::GammaT : Block::GammaC;
    t.lambda = control ? obj.lambda_c : obj.lambda_t;
    return t;
}

double squared_norm(std::span<const double> x) { return inner_product(x, x); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        sum += d * d;
    }
    return sum;
}

}  // namespace

Objective cause_objective(const Hyperparams& hyper) {
    return {hyper.lambda_c, hyper.lambda_t, hyper.lambda_dist, false};
}

double sample_loss(const TrainState& state, const Objective& obj, const Interaction& e,
                   double weight) {
    const auto& m = state.embeddings;
    const Touched t = touched_rows(state, obj, e);
    auto u = block_matrix(m, t.user_block).row(t.user);
    auto v = block_matrix(m, t.item_block).row(t.item);
    const double z = m.calib_scale * inner_product(u, v) + m.calib_bias;
    double loss = weight * bce_loss(sigmoid(z), e.reward);

    loss += t.lambda * squared_norm(v);
    if (t.has_item_partner) {
        loss += obj.lambda_dist *
                squared_distance(v, block_matrix(m, t.item_partner_block).row(t.item_partner));
    }
    if (t.has_user_partner) {
        loss += t.lambda * squared_norm(u);
        loss += obj.lambda_dist *
                squared_distance(u, block_matrix(m, t.user_partner_block).row(t.user));
    } else if (obj.regularize_shared_users) {
        loss += t.lambda * squared_norm(u);
    }
    return loss;
}

SampleGradient sample_gradient(const TrainState& state, const Objective& obj,
                               const Interaction& e, double weight) {
    const auto& m = state.embeddings;
    const Touched t = touched_rows(state, obj, e);
    auto u = block_matrix(m, t.user_block).row(t.user);
    auto v = block_matrix(m, t.item_block).row(t.item);
    const double dot = inner_product(u, v);
    const double z = m.calib_scale * dot + m.calib_bias;
    const double dz = weight * (sigmoid(z) - e.reward);
    const std::size_t dim = v.size();

    SampleGradient g;
    g.calib_scale = dz * dot;
    g.calib_bias = dz;

    RowGradient item{t.item_block, t.item, std::vector<double>(dim), true};
    RowGradient user{t.user_block, t.user, std::vector<double>(dim), true};
    for (std::size_t k = 0; k < dim; ++k) {
        item.grad[k] = dz * m.calib_scale * u[k] + 2.0 * t.lambda * v[k];
        user.grad[k] = dz * m.calib_scale * v[k];
    }
    if (t.has_item_partner) {
        auto p = block_matrix(m, t.item_partner_block).row(t.item_partner);
        RowGradient partner{t.item_partner_block, t.item_partner, std::vector<double>(dim),
                            false};
        for (std::size_t k = 0; k < dim; ++k) {
            item.grad[k] += 2.0 * obj.lambda_dist * (v[k] - p[k]);
            partner.grad[k] = -2.0 * obj.lambda_dist * (v[k] - p[k]);
        }
        g.rows.push_back(std::move(partner));
    }
    if (t.has_user_partner) {
        auto q = block_matrix(m, t.user_partner_block).row(t.user);
        RowGradient partner{t.user_partner_block, t.user, std::vector<double>(dim), false};
        for (std::size_t k = 0; k < dim; ++k) {
            user.grad[k] += 2.0 * t.lambda * u[k] + 2.0 * obj.lambda_dist * (u[k] - q[k]);
            partner.grad[k] = -2.0 * obj.lambda_dist * (u[k] - q[k]);
        }
        g.rows.push_back(std::move(partner));
    } else if (obj.regularize_shared_users) {
        for (std::size_t k = 0; k < dim; ++k) user.grad[k] += 2.0 * t.lambda * u[k];
    }
    g.rows.insert(g.rows.begin(), std::move(user));
    g.rows.insert(g.rows.begin(), std::move(item));
    return g;
}

void prox_penalty(std::span<double> x, std::span<double> partner, double lr, double lambda,
                  double lambda_dist) {
    const double o = 2.0 * lr * lambda;
    const double c = partner.empty() ? 0.0 : 2.0 * lr * lambda_dist;
    if (c == 0.0) {
        for (double& xk : x) xk /= 1.0 + o;
        return;
    }
    // Joint minimiser of |x - a|^2 + |y - b|^2 + o |x|^2 + c |x - y|^2.
    const double denom = (1.0 + o) * (1.0 + c) + c;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = x[k], b = partner[k];
        x[k] = (a * (1.0 + c) + c * b) / denom;
        partner[k] = (b + c * x[k]) / (1.0 + c);
    }
}

void guard(std::span<const double> values, std::size_t step) {
    for (double v : values) guard(v, step);
}

void guard(double value, std::size_t step) {
    if (!std::isfinite(value) || std::abs(value) > kDivergenceLimit) {
        throw Error(ErrorKind::Divergence,
                    "training diverged at step " + std::to_string(step) + " (parameter value " +
                        std::to_string(value) + ")");
    }
}

void apply_update(TrainState& state, const Objective& obj, const Interaction& e, double weight,
                  double lr, const Hyperparams& hyper) {
    auto& m = state.embeddings;
    auto& vel = state.velocities;
    const Touched t = touched_rows(state, obj, e);
    auto u = block_matrix(m, t.user_block).row(t.user);
    auto v = block_matrix(m, t.item_block).row(t.item);
    const std::size_t dim = v.size();

    const double dot = inner_product(u, v);
    const double z = m.calib_scale * dot + m.calib_bias;
    const double dz = weight * (sigmoid(z) - e.reward);

    const std::vector<double> u_old(u.begin(), u.end()), v_old(v.begin(), v.end());
    std::vector<double> g_item(dim), g_user(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        g_item[k] = dz * m.calib_scale * u[k];
        g_user[k] = dz * m.calib_scale * v[k];
    }
    momentum_step(v, g_item, block_matrix(vel, t.item_block).row(t.item), lr, hyper.momentum);
    momentum_step(u, g_user, block_matrix(vel, t.user_block).row(t.user), lr, hyper.momentum);
    if (hyper.learn_calibration) {
        momentum_step(m.calib_scale, dz * dot, vel.calib_scale, lr, hyper.momentum);
        momentum_step(m.calib_bias, dz, vel.calib_bias, lr, hyper.momentum);
    }

    std::span<double> item_partner;
    if (t.has_item_partner) item_partner = block_matrix(m, t.item_partner_block).row(t.item_partner);
    prox_penalty(v, item_partner, lr, t.lambda, obj.lambda_dist);
    if (t.has_user_partner) {
        prox_penalty(u, block_matrix(m, t.user_partner_block).row(t.user), lr, t.lambda,
                     obj.lambda_dist);
    } else if (obj.regularize_shared_users) {
        prox_penalty(u, {}, lr, t.lambda, 0.0);
    }
    // The velocity carries the realised displacement, penalty included, so
    // momentum never keeps pushing against the proximal pull.
    auto v_vel = block_matrix(vel, t.item_block).row(t.item);
    auto u_vel = block_matrix(vel, t.user_block).row(t.user);
    for (std::size_t k = 0; k < dim; ++k) {
        v_vel[k] = v[k] - v_old[k];
        u_vel[k] = u[k] - u_old[k];
    }

    guard(v, state.step);
    guard(u, state.step);
    guard(m.calib_scale, state.step);
    guard(m.calib_bias, state.step);
}

std::uint64_t shuffle_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

void next_epoch_order(Rng& rng, std::vector<std::size_t>& order) {
    rng.shuffle(std::span<std::size_t>(order));
}

void check_indices(const std::vector<Interaction>& events, std::size_t num_users,
                   std::size_t num_items) {
    for (const auto& e : events) {
        if (e.user >= num_users || e.item >= num_items) {
            throw Error(ErrorKind::Index, "interaction (" + std::to_string(e.user) + ", " +
                                              std::to_string(e.item) + ") out of range");
        }
    }
}

TrainResult run_sgd(TrainState& state, const std::vector<Interaction>& events,
                    std::span<const double> weights, bool normalize_weights,
                    const Objective& obj, const Hyperparams& hyper) {
    const std::size_t n = events.size();
    const std::size_t per_epoch = batches_per_epoch(n, hyper.batch_size);
    const std::size_t total_steps = hyper.epochs * per_epoch;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> batch_weights;

    TrainResult result;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        next_epoch_order(state.rng, order);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < per_epoch; ++b) {
            const double lr = lr_at(state.step, total_steps, hyper.lr_start, hyper.lr_end);
            const std::size_t begin = b * hyper.batch_size;
            const std::size_t end = std::min(n, begin + hyper.batch_size);

            batch_weights.assign(end - begin, 1.0);
            if (!weights.empty()) {
                for (std::size_t k = begin; k < end; ++k) batch_weights[k - begin] = weights[order[k]];
                if (normalize_weights) {
                    // Mean taken relative to the minimum, so equal weights map
                    // to exactly 1.
                    double lo = batch_weights.front();
                    for (double w : batch_weights) lo = std::min(lo, w);
                    double excess = 0.0;
                    for (double w : batch_weights) excess += w - lo;
                    const double mean = lo + excess / static_cast<double>(batch_weights.size());
                    for (double& w : batch_weights) w /= mean;
                }
            }
            for (std::size_t k = begin; k < end; ++k) {
                const Interaction& e = events[order[k]];
                const double w = batch_weights[k - begin];
                loss_sum += sample_loss(state, obj, e, w);
                apply_update(state, obj, e, w, lr, hyper);
            }
            ++state.step;
        }
        result.epoch_loss.push_back(loss_sum / static_cast<double>(n));
    }

    if (state.pooled_treatment) {
        Matrix& theta_t = state.embeddings.theta_t();
        for (std::size_t j = 1; j < theta_t.rows(); ++j) {
            auto src = theta_t.row(0);
            std::copy(src.begin(), src.end(), theta_t.row(j).begin());
        }
    }
    state.embeddings.check_finite();
    result.model = state.embeddings;
    return result;
}

}  // namespace detail

CauseVariant parse_cause_variant(const std::string& s) {
    if (s == "prodc" || s == "prod-c") return CauseVariant::ProdC;
    if (s == "prodt" || s == "prod-t") return CauseVariant::ProdT;
    if (s == "avg") return CauseVariant::Avg;
    throw Error(ErrorKind::Config, "unknown CausE variant '" + s + "'");
}

const char* to_string(CauseVariant v) {
    switch (v) {
        case CauseVariant::ProdC: return "prodc";
        case CauseVariant::ProdT: return "prodt";
        case CauseVariant::Avg: return "avg";
    }
    return "?";
}

ModelTag model_tag(CauseVariant v) {
    switch (v) {
        case CauseVariant::ProdC: return ModelTag::CauseProdC;
        case CauseVariant::ProdT: return ModelTag::CauseProdT;
        case CauseVariant::Avg: return ModelTag::CauseAvg;
    }
    return ModelTag::CauseProdC;
}

Matrix& block_matrix(EmbeddingSet& set, Block block) {
    switch (block) {
        case Block::GammaC: return set.gamma_c();
        case Block::GammaT: return set.gamma_t();
        case Block::ThetaC: return set.theta_c();
        case Block::ThetaT: return set.theta_t();
    }
    return set.theta_c();
}

const Matrix& block_matrix(const EmbeddingSet& set, Block block) {
    switch (block) {
        case Block::GammaC: return set.gamma_c();
        case Block::GammaT: return set.gamma_t();
        case Block::ThetaC: return set.theta_c();
        case Block::ThetaT: return set.theta_t();
    }
    return set.theta_c();
}

TrainState::TrainState(EmbeddingSet init, std::uint64_t seed, bool pooled)
    : embeddings(std::move(init)),
      velocities(embeddings.mode(), embeddings.num_users(), embeddings.num_items(),
                 embeddings.dim()),
      rng(seed),
      pooled_treatment(pooled) {
    velocities.calib_scale = 0.0;
    velocities.calib_bias = 0.0;
    if (pooled && !embeddings.items_duplicated()) {
        throw Error(ErrorKind::Config, "a pooled treatment vector needs duplicated item matrices");
    }
}

EmbeddingSet init_embeddings(EmbeddingMode mode, std::size_t num_users, std::size_t num_items,
                             const Hyperparams& hyper) {
    EmbeddingSet set(mode, num_users, num_items, hyper.dim);
    Rng rng(hyper.seed);
    auto fill = [&](Matrix& m) {
        for (double& v : m.values()) v = rng.uniform(-hyper.init_scale, hyper.init_scale);
    };
    fill(set.gamma_c());
    if (set.users_duplicated()) fill(set.gamma_t());
    fill(set.theta_c());
    if (set.items_duplicated()) fill(set.theta_t());
    return set;
}

double sample_loss(const TrainState& state, const Interaction& e, const Hyperparams& hyper) {
    return detail::sample_loss(state, detail::cause_objective(hyper), e, 1.0);
}

SampleGradient sample_gradients(const TrainState& state, const Interaction& e,
                                const Hyperparams& hyper) {
    return detail::sample_gradient(state, detail::cause_objective(hyper), e, 1.0);
}

double batch_loss(const TrainState& state, std::span<const Interaction> batch,
                  const Hyperparams& hyper) {
    double total = 0.0;
    for (const auto& e : batch) total += sample_loss(state, e, hyper);
    return total;
}

EmbeddingSet batch_gradient(const TrainState& state, std::span<const Interaction> batch,
                            const Hyperparams& hyper) {
    const auto& m = state.embeddings;
    EmbeddingSet grad(m.mode(), m.num_users(), m.num_items(), m.dim());
    grad.calib_scale = 0.0;
    grad.calib_bias = 0.0;
    for (const auto& e : batch) {
        SampleGradient g = sample_gradients(state, e, hyper);
        for (const auto& r : g.rows) {
            auto dst = block_matrix(grad, r.block).row(r.row);
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += r.grad[k];
        }
        grad.calib_scale += g.calib_scale;
        grad.calib_bias += g.calib_bias;
    }
    return grad;
}

void momentum_step(std::span<double> param, std::span<const double> grad,
                   std::span<double> velocity, double lr, double momentum) {
    if (param.size() != grad.size() || param.size() != velocity.size()) {
        throw Error(ErrorKind::Dimension, "momentum_step: shape mismatch");
    }
    for (std::size_t k = 0; k < param.size(); ++k) {
        velocity[k] = momentum * velocity[k] - lr * grad[k];
        param[k] += velocity[k];
    }
}

void momentum_step(double& param, double grad, double& velocity, double lr, double momentum) {
    velocity = momentum * velocity - lr * grad;
    param += velocity;
}

double lr_at(std::size_t step, std::size_t total_steps, double lr_start, double lr_end) {
    if (total_steps == 0 || step > total_steps) {
        throw Error(ErrorKind::Domain, "lr_at: step " + std::to_string(step) + " outside [0, " +
                                           std::to_string(total_steps) + "]");
    }
    return lr_start +
           (lr_end - lr_start) * static_cast<double>(step) / static_cast<double>(total_steps);
}

std::size_t batches_per_epoch(std::size_t num_events, std::size_t batch_size) {
    return (num_events + batch_size - 1) / batch_size;
}

std::vector<std::vector<std::size_t>> epoch_orders(std::size_t num_events,
                                                   const Hyperparams& hyper) {
    Rng rng(detail::shuffle_seed(hyper.seed));
    std::vector<std::size_t> order(num_events);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        detail::next_epoch_order(rng, order);
        out.push_back(order);
    }
    return out;
}

TrainResult train_cause_detailed(const std::vector<Interaction>& s_c,
                                 const std::vector<Interaction>& s_t, std::size_t num_users,
                                 std::size_t num_items, const Hyperparams& hyper,
                                 EmbeddingMode mode, CauseVariant variant) {
    hyper.validate();
    if (s_c.empty()) throw Error(ErrorKind::Data, "train_cause: S_c is empty");
    if (mode == EmbeddingMode::Single) {
        throw Error(ErrorKind::Config, "train_cause needs duplicated user or item matrices");
    }
    const bool pooled = variant == CauseVariant::Avg;
    if (pooled && mode == EmbeddingMode::UserOnly) {
        throw Error(ErrorKind::Config, "CausE-avg needs duplicated item matrices");
    }
    std::vector<Interaction> events;
    events.reserve(s_c.size() + s_t.size());
    for (auto e : s_c) {
        e.origin = Origin::Control;
        events.push_back(e);
    }
    for (auto e : s_t) {
        e.origin = Origin::Treatment;
        events.push_back(e);
    }
    detail::check_indices(events, num_users, num_items);

    TrainState state(init_embeddings(mode, num_users, num_items, hyper),
                     detail::shuffle_seed(hyper.seed), pooled);
    state.embeddings.tag = model_tag(variant);
    return detail::run_sgd(state, events, {}, false, detail::cause_objective(hyper), hyper);
}

EmbeddingSet train_cause(const std::vector<Interaction>& s_c,
                         const std::vector<Interaction>& s_t, std::size_t num_users,
                         std::size_t num_items, const Hyperparams& hyper, EmbeddingMode mode,
                         CauseVariant variant) {
    return train_cause_detailed(s_c, s_t, num_users, num_items, hyper, mode, variant).model;
}

namespace {

struct Side {
    const Matrix& users;
    const Matrix& items;
};

Side scoring_side(const EmbeddingSet& model, CauseVariant variant) {
    if (variant == CauseVariant::ProdT) return {model.gamma_t(), model.theta_t()};
    return {model.gamma_c(), model.theta_c()};
}

CauseVariant variant_for(ModelTag tag) {
    return tag == ModelTag::CauseProdT ? CauseVariant::ProdT : CauseVariant::ProdC;
}

}  // namespace

double raw_score(const EmbeddingSet& model, CauseVariant variant, std::size_t user,
                 std::size_t item) {
    if (user >= model.num_users() || item >= model.num_items()) {
        throw Error(ErrorKind::Index, "predict: (" + std::to_string(user) + ", " +
                                          std::to_string(item) + ") out of range");
    }
    Side side = scoring_side(model, variant);
    return model.calib_scale * inner_product(side.users.row(user), side.items.row(item)) +
           model.calib_bias;
}

double predict(const EmbeddingSet& model, CauseVariant variant, std::size_t user,
               std::size_t item) {
    return sigmoid(raw_score(model, variant, user, item));
}

double raw_score(const EmbeddingSet& model, std::size_t user, std::size_t item) {
    return raw_score(model, variant_for(model.tag), user, item);
}

double predict(const EmbeddingSet& model, std::size_t user, std::size_t item) {
    return sigmoid(raw_score(model, user, item));
}

}  // namespace causerec
