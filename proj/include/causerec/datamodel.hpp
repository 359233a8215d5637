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

// Numeric primitives and the domain types shared by every trainer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "causerec/error.hpp"

namespace causerec {

/// Probabilities are clamped to [kProbEps, 1 - kProbEps] before any log.
inline constexpr double kProbEps = 1e-7;

/// Sum of a[k] * b[k], accumulated strictly left to right.
double inner_product(std::span<const double> a, std::span<const double> b);

/// Logistic function, evaluated without overflow for any finite x.
double sigmoid(double x);

double clamp_probability(double p);

/// Binary cross-entropy of a (clamped) probability against a 0/1 label.
double bce_loss(double p_hat, int y);

/// Dense row-major matrix. Only what the trainers need.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double frobenius_norm(const Matrix& m);

/// Which sample an observation belongs to: the large logged sample S_c or the
/// small uniform-exposure sample S_t.
enum class Origin : std::uint8_t { Control, Treatment };

struct Interaction {
    std::size_t user = 0;
    std::size_t item = 0;
    int reward = 0;
    Origin origin = Origin::Control;
    // Position of the event in the source log; used to audit that training
    // never sees held-out events.
    std::size_t event_id = 0;

    bool operator==(const Interaction&) const = default;
};

/// Which of the user/item matrices get separate treatment and control copies.
/// `Single` is the plain one-user-matrix/one-item-matrix factorization used by
/// the baselines.
enum class EmbeddingMode { ProdOnly, UserOnly, Both, Single };

/// What produced a model; recorded in the persisted header.
enum class ModelTag { CauseProdC, CauseProdT, CauseAvg, Sp2v, Wsp2v, Bpr };

const char* to_string(EmbeddingMode mode);
const char* to_string(ModelTag tag);
EmbeddingMode parse_embedding_mode(const std::string& s);
ModelTag parse_model_tag(const std::string& s);

/// Treatment and control user/item embeddings plus the scalar calibration of
/// the score. Matrices that are not duplicated under the current mode are
/// aliased: gamma_t() and gamma_c() return the same storage in ProdOnly mode,
/// so the two can never drift apart.
class EmbeddingSet {
public:
    EmbeddingSet() = default;
    EmbeddingSet(EmbeddingMode mode, std::size_t num_users, std::size_t num_items,
                 std::size_t dim);

    EmbeddingMode mode() const { return mode_; }
    std::size_t num_users() const { return gamma_c_.rows(); }
    std::size_t num_items() const { return theta_c_.rows(); }
    std::size_t dim() const { return theta_c_.cols(); }

    bool users_duplicated() const {
        return mode_ == EmbeddingMode::UserOnly || mode_ == EmbeddingMode::Both;
    }
    bool items_duplicated() const {
        return mode_ == EmbeddingMode::ProdOnly || mode_ == EmbeddingMode::Both;
    }

    Matrix& gamma_c() { return gamma_c_; }
    const Matrix& gamma_c() const { return gamma_c_; }
    Matrix& gamma_t() { return users_duplicated() ? gamma_t_ : gamma_c_; }
    const Matrix& gamma_t() const { return users_duplicated() ? gamma_t_ : gamma_c_; }

    Matrix& theta_c() { return theta_c_; }
    const Matrix& theta_c() const { return theta_c_; }
    Matrix& theta_t() { return items_duplicated() ? theta_t_ : theta_c_; }
    const Matrix& theta_t() const { return items_duplicated() ? theta_t_ : theta_c_; }

    Matrix& users(Origin o) { return o == Origin::Control ? gamma_c() : gamma_t(); }
    const Matrix& users(Origin o) const { return o == Origin::Control ? gamma_c() : gamma_t(); }
    Matrix& items(Origin o) { return o == Origin::Control ? theta_c() : theta_t(); }
    const Matrix& items(Origin o) const { return o == Origin::Control ? theta_c() : theta_t(); }

    /// w^delta_j = theta_t[j] - theta_c[j]; derived, never stored.
    std::vector<double> item_delta(std::size_t j) const;

    /// Throws Divergence if any parameter is NaN or infinite.
    void check_finite() const;

    bool operator==(const EmbeddingSet&) const = default;

    double calib_scale = 1.0;
    double calib_bias = 0.0;
    ModelTag tag = ModelTag::CauseProdC;

private:
    EmbeddingMode mode_ = EmbeddingMode::ProdOnly;
    Matrix gamma_t_;
    Matrix gamma_c_;
    Matrix theta_t_;
    Matrix theta_c_;
};

struct Hyperparams {
    std::size_t dim = 8;
    // S_t is small, so the treatment task gets the stronger penalty.
    double lambda_t = 0.3;
    double lambda_c = 0.003;
    double lambda_dist = 1.0;
    double lr_start = 0.01;
    double lr_end = 0.0001;
    double momentum = 0.9;
    std::size_t epochs = 20;
    std::size_t batch_size = 512;
    std::uint64_t seed = 1;
    double init_scale = 0.035355339059327376;  // 0.1 / sqrt(dim)
    bool learn_calibration = true;

    /// Defaults with init_scale = 0.1 / sqrt(dim).
    static Hyperparams for_dim(std::size_t dim);

    void validate() const;
};

/// Seeded generator over std::mt19937_64. The derived draws are written out
/// here instead of using <random> distributions, whose output differs between
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);
    double normal(double mean, double stddev);

    template <typename T>
    void shuffle(std::span<T> v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace causerec
