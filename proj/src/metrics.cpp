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

#include "causerec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "causerec/datamodel.hpp"

namespace causerec {

namespace {

template <typename T>
void check_pairs(std::span<const T> values, std::span<const int> labels, const char* what) {
    if (values.size() != labels.size()) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": length mismatch");
    }
    if (values.empty()) throw Error(ErrorKind::UndefinedMetric, std::string(what) + ": empty");
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

}  // namespace

double mse(std::span<const double> preds, std::span<const int> labels) {
    check_pairs(preds, labels, "mse");
    double sum = 0.0;
    for (std::size_t k = 0; k < preds.size(); ++k) {
        double d = preds[k] - labels[k];
        sum += d * d;
    }
    return sum / static_cast<double>(preds.size());
}

double nll(std::span<const double> preds, std::span<const int> labels) {
    check_pairs(preds, labels, "nll");
    double sum = 0.0;
    for (std::size_t k = 0; k < preds.size(); ++k) sum += bce_loss(preds[k], labels[k]);
    return sum / static_cast<double>(preds.size());
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_pairs(scores, labels, "auc");
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based, tie-averaged) ranks of the positives. Ranks are kept
    // doubled so tied averages stay integral and the result is exact.
    double doubled_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start;
        while (end < n && scores[idx[end]] == scores[idx[start]]) ++end;
        const double doubled_avg = static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k) {
            if (labels[idx[k]] == 1) {
                doubled_rank_sum += doubled_avg;
                ++positives;
            }
        }
        start = end;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw Error(ErrorKind::UndefinedMetric, "auc needs both positive and negative labels");
    }
    const double np = static_cast<double>(positives);
    const double u2 = doubled_rank_sum - np * (np + 1.0);
    return u2 / (2.0 * np * static_cast<double>(negatives));
}

double lift(double metric_value, double baseline_value, LiftKind) {
    if (baseline_value == 0.0) throw Error(ErrorKind::Domain, "lift: zero baseline");
    return (baseline_value - metric_value) / baseline_value;
}

double average_conversion_rate(std::span<const int> labels) {
    if (labels.empty()) throw Error(ErrorKind::UndefinedMetric, "avg_cr of no labels");
    double sum = 0.0;
    for (int y : labels) sum += y;
    return sum / static_cast<double>(labels.size());
}

MetricReport evaluate_predictions(std::span<const double> probabilities,
                                  std::span<const double> scores, std::span<const int> labels,
                                  std::string method_name, std::string dataset_name,
                                  std::uint64_t seed) {
    MetricReport r;
    r.method_name = std::move(method_name);
    r.dataset_name = std::move(dataset_name);
    r.seed = seed;
    r.n_events = labels.size();
    r.avg_cr = average_conversion_rate(labels);
    if (!probabilities.empty()) {
        std::vector<double> constant(labels.size(), r.avg_cr);
        const double base_mse = mse(constant, labels);
        const double base_nll = nll(constant, labels);
        r.mse = mse(probabilities, labels);
        r.nll = nll(probabilities, labels);
        r.mse_lift = lift(*r.mse, base_mse);
        r.nll_lift = lift(*r.nll, base_nll);
    }
    r.auc = auc(scores.empty() ? probabilities : scores, labels);
    return r;
}

std::string to_csv_row(const MetricReport& r) {
    std::string row = r.method_name + ',' + r.dataset_name + ',' + std::to_string(r.seed) + ',' +
                      std::to_string(r.n_events) + ',' + format_number(r.avg_cr) + ',';
    row += format_optional(r.mse) + ',' + format_optional(r.mse_lift) + ',';
    row += format_optional(r.nll) + ',' + format_optional(r.nll_lift) + ',';
    row += format_number(r.auc);
    return row;
}

}  // namespace causerec
