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

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace causerec {

double mse(std::span<const double> preds, std::span<const int> labels);

/// Mean binary cross-entropy, predictions clamped to [1e-7, 1 - 1e-7].
double nll(std::span<const double> preds, std::span<const int> labels);

/// Mann-Whitney AUC with average ranks for ties. Throws UndefinedMetric when
/// only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

enum class LiftKind { LossLowerBetter };

/// (baseline - metric) / baseline: positive when the model beats the
/// baseline.
double lift(double metric_value, double baseline_value,
            LiftKind kind = LiftKind::LossLowerBetter);

/// Mean of the labels; the constant predictor every lift is measured against.
double average_conversion_rate(std::span<const int> labels);

struct MetricReport {
    std::string method_name;
    std::string dataset_name;
    std::uint64_t seed = 0;
    std::size_t n_events = 0;
    double avg_cr = 0.0;
    std::optional<double> mse;
    std::optional<double> mse_lift;
    std::optional<double> nll;
    std::optional<double> nll_lift;
    double auc = 0.5;
};

/// Full report against the labels' own AvgCR baseline. `probabilities` may be
/// empty for ranking-only models (BPR): MSE/NLL and their lifts stay unset and
/// AUC is computed from `scores`.
MetricReport evaluate_predictions(std::span<const double> probabilities,
                                  std::span<const double> scores, std::span<const int> labels,
                                  std::string method_name, std::string dataset_name,
                                  std::uint64_t seed);

inline constexpr const char* kReportCsvHeader =
    "method,dataset,seed,n_events,avg_cr,mse,mse_lift,nll,nll_lift,auc";

std::string to_csv_row(const MetricReport& report);

}  // namespace causerec
