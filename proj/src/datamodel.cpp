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

#include "causerec/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace causerec {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Index: return "index error";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Config: return "config error";
        case ErrorKind::Data: return "data error";
        case ErrorKind::Format: return "format error";
        case ErrorKind::Singularity: return "singularity error";
        case ErrorKind::UndefinedMetric: return "undefined metric";
        case ErrorKind::Divergence: return "divergence";
    }
    return "error";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Divergence: return 4;
        default: return 3;
    }
}

double inner_product(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::Dimension, "inner_product: length mismatch (" +
                                              std::to_string(a.size()) + " vs " +
                                              std::to_string(b.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    return sum;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double clamp_probability(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

double bce_loss(double p_hat, int y) {
    double p = clamp_probability(p_hat);
    return y != 0 ? -std::log(p) : -std::log1p(-p);
}

double frobenius_norm(const Matrix& m) {
    double sum = 0.0;
    for (double v : m.values()) sum += v * v;
    return std::sqrt(sum);
}

const char* to_string(EmbeddingMode mode) {
    switch (mode) {
        case EmbeddingMode::ProdOnly: return "prod";
        case EmbeddingMode::UserOnly: return "user";
        case EmbeddingMode::Both: return "both";
        case EmbeddingMode::Single: return "single";
    }
    return "?";
}

const char* to_string(ModelTag tag) {
    switch (tag) {
        case ModelTag::CauseProdC: return "prodc";
        case ModelTag::CauseProdT: return "prodt";
        case ModelTag::CauseAvg: return "avg";
        case ModelTag::Sp2v: return "sp2v";
        case ModelTag::Wsp2v: return "wsp2v";
        case ModelTag::Bpr: return "bpr";
    }
    return "?";
}

EmbeddingMode parse_embedding_mode(const std::string& s) {
    for (auto m : {EmbeddingMode::ProdOnly, EmbeddingMode::UserOnly, EmbeddingMode::Both,
                   EmbeddingMode::Single}) {
        if (s == to_string(m)) return m;
    }
    throw Error(ErrorKind::Format, "unknown embedding mode '" + s + "'");
}

ModelTag parse_model_tag(const std::string& s) {
    for (auto t : {ModelTag::CauseProdC, ModelTag::CauseProdT, ModelTag::CauseAvg,
                   ModelTag::Sp2v, ModelTag::Wsp2v, ModelTag::Bpr}) {
        if (s == to_string(t)) return t;
    }
    throw Error(ErrorKind::Format, "unknown model variant '" + s + "'");
}

EmbeddingSet::EmbeddingSet(EmbeddingMode mode, std::size_t num_users, std::size_t num_items,
                           std::size_t dim)
    : mode_(mode), gamma_c_(num_users, dim), theta_c_(num_items, dim) {
    if (users_duplicated()) gamma_t_ = Matrix(num_users, dim);
    if (items_duplicated()) theta_t_ = Matrix(num_items, dim);
}

std::vector<double> EmbeddingSet::item_delta(std::size_t j) const {
    if (j >= num_items()) {
        throw Error(ErrorKind::Index, "item index " + std::to_string(j) + " out of range");
    }
    auto t = theta_t().row(j);
    auto c = theta_c().row(j);
    std::vector<double> out(dim());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = t[k] - c[k];
    return out;
}

void EmbeddingSet::check_finite() const {
    auto finite = [](const Matrix& m) {
        return std::all_of(m.values().begin(), m.values().end(),
                           [](double v) { return std::isfinite(v); });
    };
    if (!finite(gamma_c_) || !finite(gamma_t_) || !finite(theta_c_) || !finite(theta_t_) ||
        !std::isfinite(calib_scale) || !std::isfinite(calib_bias)) {
        throw Error(ErrorKind::Divergence, "embedding set contains non-finite values");
    }
}

Hyperparams Hyperparams::for_dim(std::size_t dim) {
    Hyperparams h;
    h.dim = dim;
    h.init_scale = 0.1 / std::sqrt(static_cast<double>(dim));
    return h;
}

void Hyperparams::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
    if (dim == 0) fail("dim must be positive");
    if (!(lambda_t >= 0.0) || !(lambda_c >= 0.0) || !(lambda_dist >= 0.0)) {
        fail("regularizers must be non-negative");
    }
    if (!(lr_start > 0.0) || !(lr_end > 0.0)) fail("learning rates must be positive");
    if (lr_end > lr_start) fail("lr_end must not exceed lr_start");
    if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must be in [0, 1)");
    if (epochs == 0) fail("epochs must be positive");
    if (batch_size == 0) fail("batch_size must be positive");
    if (!(init_scale > 0.0)) fail("init_scale must be positive");
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::Domain, "Rng::below(0)");
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

double Rng::normal(double mean, double stddev) {
    // Box-Muller; one draw per call keeps the stream position simple.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace causerec
