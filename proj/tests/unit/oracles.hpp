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

// Reference computations for the CausE objective and for the decoupled
// (lambda_dist = 0) training limit. Written from the model definition, not
// from the trainer.

#pragma once

#include <vector>

#include "causerec/cause.hpp"
#include "support.hpp"

namespace testing {

inline double row_sq(const causerec::Matrix& m, std::size_t r) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) s += m(r, k) * m(r, k);
    return s;
}

inline double row_dist_sq(const causerec::Matrix& a, const causerec::Matrix& b, std::size_t r) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += (a(r, k) - b(r, k)) * (a(r, k) - b(r, k));
    return s;
}

/// One sample's loss, straight from the per-task objective. No pooling.
inline double ref_sample_loss(const causerec::EmbeddingSet& m, const causerec::Interaction& e,
                              const causerec::Hyperparams& h) {
    using causerec::Origin;
    const bool control = e.origin == Origin::Control;
    const auto& users = control ? m.gamma_c() : m.gamma_t();
    const auto& items = control ? m.theta_c() : m.theta_t();
    double dot = 0.0;
    for (std::size_t k = 0; k < m.dim(); ++k) dot += users(e.user, k) * items(e.item, k);
    const double lam = control ? h.lambda_c : h.lambda_t;
    double loss = ref_bce(ref_sigmoid(m.calib_scale * dot + m.calib_bias), e.reward);
    loss += lam * row_sq(items, e.item);
    if (m.items_duplicated()) loss += h.lambda_dist * row_dist_sq(m.theta_t(), m.theta_c(), e.item);
    if (m.users_duplicated()) {
        loss += lam * row_sq(users, e.user);
        loss += h.lambda_dist * row_dist_sq(m.gamma_t(), m.gamma_c(), e.user);
    }
    return loss;
}

/// Two single-task factorizations trained one after the other, each seeing
/// its own events in the order they hold within the shared shuffle and the
/// learning rate of the mini-batch they fall in. Calibration is frozen at
/// (1, 0). Update per event: heavy-ball step on the data term, shrinkage
/// x / (1 + 2 lr lambda) for the task's L2 penalty, and the velocity set to
/// the realised displacement.
inline causerec::EmbeddingSet decoupled_reference(const std::vector<causerec::Interaction>& s_c,
                                                  const std::vector<causerec::Interaction>& s_t,
                                                  std::size_t num_users, std::size_t num_items,
                                                  const causerec::Hyperparams& h) {
    using namespace causerec;
    EmbeddingSet out = init_embeddings(EmbeddingMode::Both, num_users, num_items, h);
    const std::size_t n = s_c.size() + s_t.size();
    const auto orders = epoch_orders(n, h);
    const std::size_t per_epoch = (n + h.batch_size - 1) / h.batch_size;
    const double total = static_cast<double>(h.epochs * per_epoch);

    for (int task = 0; task < 2; ++task) {
        const bool control = task == 0;
        Matrix& users = control ? out.gamma_c() : out.gamma_t();
        Matrix& items = control ? out.theta_c() : out.theta_t();
        Matrix vu(num_users, h.dim), vi(num_items, h.dim);
        const double lam = control ? h.lambda_c : h.lambda_t;
        for (std::size_t epoch = 0; epoch < h.epochs; ++epoch) {
            for (std::size_t pos = 0; pos < n; ++pos) {
                const std::size_t idx = orders[epoch][pos];
                const bool is_control = idx < s_c.size();
                if (is_control != control) continue;
                const Interaction& e = is_control ? s_c[idx] : s_t[idx - s_c.size()];
                const double step = static_cast<double>(epoch * per_epoch + pos / h.batch_size);
                const double lr = h.lr_start + (h.lr_end - h.lr_start) * step / total;

                std::vector<double> u(h.dim), v(h.dim);
                for (std::size_t k = 0; k < h.dim; ++k) {
                    u[k] = users(e.user, k);
                    v[k] = items(e.item, k);
                }
                const double r = ref_sigmoid(ref_dot(u, v)) - e.reward;
                for (std::size_t k = 0; k < h.dim; ++k) {
                    vi(e.item, k) = h.momentum * vi(e.item, k) - lr * r * u[k];
                    vu(e.user, k) = h.momentum * vu(e.user, k) - lr * r * v[k];
                    double nv = (v[k] + vi(e.item, k)) / (1.0 + 2.0 * lr * lam);
                    double nu = (u[k] + vu(e.user, k)) / (1.0 + 2.0 * lr * lam);
                    items(e.item, k) = nv;
                    users(e.user, k) = nu;
                    vi(e.item, k) = nv - v[k];
                    vu(e.user, k) = nu - u[k];
                }
            }
        }
    }
    return out;
}

/// Largest absolute entrywise difference over all four matrices.
inline double max_abs_difference(const causerec::EmbeddingSet& a, const causerec::EmbeddingSet& b) {
    double worst = 0.0;
    auto cmp = [&](const causerec::Matrix& x, const causerec::Matrix& y) {
        for (std::size_t i = 0; i < x.values().size(); ++i) {
            worst = std::max(worst, std::abs(x.values()[i] - y.values()[i]));
        }
    };
    cmp(a.gamma_c(), b.gamma_c());
    cmp(a.gamma_t(), b.gamma_t());
    cmp(a.theta_c(), b.theta_c());
    cmp(a.theta_t(), b.theta_t());
    return worst;
}

}  // namespace testing
