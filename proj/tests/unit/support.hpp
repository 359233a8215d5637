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

// Helpers shared by the unit and acceptance tests: random instances and
// reference computations written independently of the library code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "causerec/datamodel.hpp"

namespace testing {

/// Reference logistic function, written directly from the definition.
inline double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double ref_bce(double p, int y) {
    const double eps = 1e-7;
    p = std::min(std::max(p, eps), 1.0 - eps);
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

inline double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

/// Fills every parameter (and the calibration pair) with N(0, sd) draws.
inline void randomize(causerec::EmbeddingSet& m, std::mt19937_64& gen, double sd = 0.5) {
    std::normal_distribution<double> nd(0.0, sd);
    for (double& v : m.gamma_c().values()) v = nd(gen);
    if (m.users_duplicated()) {
        for (double& v : m.gamma_t().values()) v = nd(gen);
    }
    for (double& v : m.theta_c().values()) v = nd(gen);
    if (m.items_duplicated()) {
        for (double& v : m.theta_t().values()) v = nd(gen);
    }
    m.calib_scale = 1.0 + 0.3 * nd(gen);
    m.calib_bias = 0.3 * nd(gen);
}

/// Central difference of f with respect to *x.
inline double central_difference(const std::function<double()>& f, double* x, double h = 1e-6) {
    const double saved = *x;
    *x = saved + h;
    const double up = f();
    *x = saved - h;
    const double down = f();
    *x = saved;
    return (up - down) / (2.0 * h);
}

/// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    const double scale = std::sqrt(std::max(na, nb));
    return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

/// Brute-force Mann-Whitney: (pairs ranked correctly + half the ties) / pairs.
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double twice_wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) twice_wins += 2.0;
            else if (scores[i] == scores[j]) twice_wins += 1.0;
        }
    }
    return twice_wins / (2.0 * pairs);
}

/// Chi-square divergence of the item marginal from uniform, by counting.
inline double brute_force_chi_square(const std::vector<std::size_t>& items, std::size_t m) {
    std::vector<double> counts(m, 0.0);
    for (auto j : items) counts[j] += 1.0;
    const double n = static_cast<double>(items.size());
    double chi = 0.0;
    for (double c : counts) {
        const double f = c / n;
        chi += (f - 1.0 / m) * (f - 1.0 / m) * m;
    }
    return chi;
}

/// Average-rank Spearman correlation.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0.0, equal = 0.0;
            for (double w : v) {
                if (w < v[i]) less += 1.0;
                else if (w == v[i]) equal += 1.0;
            }
            r[i] = less + (equal + 1.0) / 2.0;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i] / n;
        mb += rb[i] / n;
    }
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace testing
