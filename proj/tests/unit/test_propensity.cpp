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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "causerec/cause.hpp"
#include "causerec/propensity.hpp"
#include "support.hpp"

using namespace causerec;

namespace {

std::vector<Interaction> with_counts(const std::vector<std::size_t>& counts) {
    std::vector<Interaction> out;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        for (std::size_t k = 0; k < counts[j]; ++k) out.push_back({0, j, 1, Origin::Control, out.size()});
    }
    return out;
}

// Random row-stochastic matrix with Dirichlet(1) rows.
Matrix random_policy(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
    std::exponential_distribution<double> ex(1.0);
    Matrix p(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < cols; ++j) total += p(i, j) = ex(gen);
        for (std::size_t j = 0; j < cols; ++j) p(i, j) /= total;
    }
    return p;
}

EmbeddingSet one_pair(std::vector<double> u, std::vector<double> tt, std::vector<double> tc) {
    EmbeddingSet m(EmbeddingMode::ProdOnly, 1, 1, u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        m.gamma_c()(0, k) = u[k];
        m.theta_t()(0, k) = tt[k];
        m.theta_c()(0, k) = tc[k];
    }
    return m;
}

}  // namespace

TEST_CASE("estimate_propensity examples") {
    auto a = estimate_propensity(with_counts({3, 1}), 2, 0.0);
    CHECK(a.probs == std::vector<double>{0.75, 0.25});
    auto b = estimate_propensity(with_counts({3, 1, 0}), 3, 1.0);
    CHECK(b.probs[0] == doctest::Approx(4.0 / 7).epsilon(1e-15));
    CHECK(b.probs[1] == doctest::Approx(2.0 / 7).epsilon(1e-15));
    CHECK(b.probs[2] == doctest::Approx(1.0 / 7).epsilon(1e-15));
    CHECK(b.total_events == 4);
    auto c = estimate_propensity({}, 4, 1.0);
    for (double p : c.probs) CHECK(p == 0.25);
    CHECK_THROWS_AS(estimate_propensity({}, 4, -1.0), Error);
}

TEST_CASE("estimate_propensity sums to one and is scale free without smoothing") {
    std::mt19937_64 gen(12);
    std::uniform_int_distribution<std::size_t> cnt(0, 30);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> counts(1 + trial % 17);
        for (auto& c : counts) c = cnt(gen);
        counts[0] += 1;
        for (double alpha : {0.0, 0.5, 1.0}) {
            auto m = estimate_propensity(with_counts(counts), counts.size(), alpha);
            double total = 0.0;
            for (double p : m.probs) {
                total += p;
                if (alpha > 0) CHECK(p > 0.0);
            }
            CHECK(std::abs(total - 1.0) <= 1e-9);
        }
        auto scaled = counts;
        for (auto& c : scaled) c *= 3;
        auto base = estimate_propensity(with_counts(counts), counts.size(), 0.0);
        auto big = estimate_propensity(with_counts(scaled), counts.size(), 0.0);
        for (std::size_t j = 0; j < counts.size(); ++j) {
            CHECK(std::abs(base.probs[j] - big.probs[j]) <= 1e-15);
        }
    }
}

TEST_CASE("ips_reward") {
    CHECK(ips_reward(1, 0.25, 100) == 4.0);
    CHECK(ips_reward(0, 0.25, 100) == 0.0);
    CHECK(ips_reward(0, 0.001, 100) == 0.0);
    CHECK(ips_reward(1, 0.001, 100) == 100.0);
    try {
        ips_reward(1, 0.0, 100);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
    double prev = ips_reward(1, 0.001);
    for (double pi = 0.002; pi <= 1.0; pi += 0.001) {
        const double w = ips_reward(1, pi);
        CHECK(w <= prev);
        prev = w;
    }
}

TEST_CASE("write_propensities writes one value per line") {
    auto m = estimate_propensity(with_counts({3, 1, 0}), 3, 1.0);
    auto path = std::filesystem::temp_directory_path() / "causerec_test_props.txt";
    write_propensities(path, m);
    std::ifstream in(path);
    std::vector<double> back;
    double v;
    while (in >> v) back.push_back(v);
    CHECK(back == m.probs);
    std::filesystem::remove(path);
}

TEST_CASE("ite_pair examples") {
    CHECK(ite_pair(one_pair({1, 1}, {1, 0}, {0, 1}), 0, 0) == 0.0);
    CHECK(ite_pair(one_pair({2, 0}, {1, 0}, {0, 1}), 0, 0) == 2.0);
    CHECK(ite_pair(one_pair({0.3, -1}, {0.5, 2}, {0.5, 2}), 0, 0) == 0.0);
    CHECK_THROWS_AS(ite_pair(one_pair({1}, {1}, {1}), 1, 0), Error);
}

TEST_CASE("ite_pair equals <w_delta, u> with a shared user matrix") {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> u(8), tt(8), tc(8);
        for (int k = 0; k < 8; ++k) {
            u[k] = nd(gen);
            tt[k] = nd(gen);
            tc[k] = nd(gen);
        }
        auto m = one_pair(u, tt, tc);
        std::vector<double> delta(8);
        for (int k = 0; k < 8; ++k) delta[k] = tt[k] - tc[k];
        CHECK(std::abs(ite_pair(m, 0, 0) - testing::ref_dot(delta, u)) <= 1e-12);
        const double p = testing::ref_sigmoid(testing::ref_dot(u, tt)) -
                         testing::ref_sigmoid(testing::ref_dot(u, tc));
        CHECK(std::abs(ite_pair_probability(m, 0, 0) - p) <= 1e-14);
    }
}

TEST_CASE("ips_from_embeddings examples") {
    CHECK(ips_from_embeddings(one_pair({1, 2}, {0.5, 0.5}, {0.5, 0.5}), 0, 0) == 1.0);
    CHECK(ips_from_embeddings(one_pair({1}, {3}, {2}), 0, 0) == 1.5);
    try {
        ips_from_embeddings(one_pair({1, 0}, {1, 1}, {0, 1}), 0, 0);
        FAIL("expected a singularity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Singularity);
    }
}

TEST_CASE("optimal_policy argmax and ties") {
    Matrix s(2, 3);
    s(0, 0) = 0.1;
    s(0, 1) = 0.9;
    s(0, 2) = 0.3;
    s(1, 0) = 0.5;
    s(1, 1) = 0.5;
    s(1, 2) = 0.2;
    auto c = optimal_policy(s);
    CHECK(c == std::vector<std::size_t>{1, 0});
    CHECK_THROWS_AS(optimal_policy(Matrix(2, 0)), Error);
}

TEST_CASE("optimal_policy is invariant to positive affine maps") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix s(6, 9);
        for (double& v : s.values()) v = std::round(ud(gen) * 4) / 4;  // ties happen
        const double a = 0.5 + std::abs(ud(gen)) * 4, b = ud(gen) * 10;
        Matrix t = s;
        for (double& v : t.values()) v = a * v + b;
        Matrix shifted = s;
        for (std::size_t j = 0; j < 9; ++j) shifted(2, j) += 0.25;
        CHECK(optimal_policy(t) == optimal_policy(s));
        CHECK(optimal_policy(shifted) == optimal_policy(s));
    }
}

TEST_CASE("policy_reward closed forms") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Matrix r(5, 4);
    for (double& v : r.values()) v = ud(gen);
    PolicyEvaluation uni{uniform_policy(5, 4), {}, 0.0};
    double mean = 0.0;
    for (double v : r.values()) mean += v;
    mean /= 20.0;
    CHECK(std::abs(policy_reward(r, uni) - mean) <= 1e-15);
    CHECK(uni.reward_estimate == policy_reward(r, uni));

    PolicyEvaluation best{deterministic_policy(optimal_policy(r), 4), {}, 0.0};
    double row_max = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < 4; ++j) m = std::max(m, r(i, j));
        row_max += m;
    }
    CHECK(std::abs(policy_reward(r, best) - row_max / 5.0) <= 1e-15);

    PolicyEvaluation weighted{uniform_policy(5, 4), {0.5, 0.5, 0.0, 0.0, 0.0}, 0.0};
    double expect = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 4; ++j) expect += 0.5 * r(i, j) * 0.25;
    }
    CHECK(std::abs(policy_reward(r, weighted) - expect) <= 1e-15);
}

TEST_CASE("policy_reward rejects rows that do not sum to one") {
    Matrix r(2, 2, 0.5);
    PolicyEvaluation bad{Matrix(2, 2, 0.3), {}, 0.0};
    CHECK_THROWS_AS(policy_reward(r, bad), Error);
    PolicyEvaluation shape{Matrix(3, 2, 0.5), {}, 0.0};
    CHECK_THROWS_AS(policy_reward(r, shape), Error);
}

TEST_CASE("policy ITE against itself is zero and antisymmetric") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix r(20, 15);
        for (double& v : r.values()) v = ud(gen);
        PolicyEvaluation p{random_policy(gen, 20, 15), {}, 0.0};
        PolicyEvaluation q{random_policy(gen, 20, 15), {}, 0.0};
        CHECK(policy_ite(r, p, p) == 0.0);
        for (double v : policy_ite_pairs(r, p, p).values()) CHECK(v == 0.0);
        const double pq = policy_ite(r, p, q), qp = policy_ite(r, q, p);
        CHECK(std::abs(pq + qp) <= 1e-14);
        CHECK(std::abs(pq - (policy_reward(r, p) - policy_reward(r, q))) <= 1e-13);
    }
}
