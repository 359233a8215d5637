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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causerec/baselines.hpp"
#include "causerec/cause.hpp"
#include "causerec/datamodel.hpp"
#include "causerec/ingest.hpp"
#include "causerec/metrics.hpp"

namespace causerec {

enum class Method { CauseProdC, CauseProdT, CauseAvg, Sp2v, Wsp2v, Bpr };

struct MethodSpec {
    Method method = Method::CauseProdC;
    AdaptationMode adaptation = AdaptationMode::Blend;  // baselines only

    bool is_cause() const;
    /// e.g. "cause-prodc", "sp2v-blend".
    std::string name() const;
    bool operator==(const MethodSpec&) const = default;
};

/// Accepts "cause-prodc" / "cause-prodt" / "cause-avg" and
/// "<sp2v|wsp2v|bpr>[-<no|blend|test>]"; a bare baseline name uses
/// `default_adaptation`.
MethodSpec parse_method(const std::string& s,
                        AdaptationMode default_adaptation = AdaptationMode::Blend);

struct ExperimentConfig {
    // "synthetic" or a ratings file path; ignored when `manifest` is set.
    std::string dataset = "synthetic";
    RatingFormat format = RatingFormat::DoubleColonSep;
    std::string manifest;
    std::string dataset_name;  // defaults to "synthetic" or the file stem
    SyntheticParams synth;
    SplitFractions fractions;
    double s_t_injection = 0.05;
    std::uint64_t seed = 1;

    MethodSpec method;
    std::vector<MethodSpec> methods;  // sweeps; defaults to {method}
    EmbeddingMode cause_mode = EmbeddingMode::ProdOnly;
    Hyperparams hyper;
    bool init_scale_explicit = false;  // otherwise 0.1 / sqrt(dim)

    double propensity_alpha = 1.0;
    double ips_cap = 100.0;
    bool ips_normalize = false;
    std::size_t bpr_negatives = 1;

    std::string output_dir = "out";
    std::size_t seeds = 10;
    std::vector<double> injection_fractions{0.01, 0.10, 0.25};
    std::size_t threads = 1;

    std::string resolved_dataset_name() const;
    /// `hyper` with the derived init scale and the training seed stream.
    Hyperparams training_hyperparams() const;
    /// Cross-field checks (method/mode combinations, split fractions).
    void validate() const;
    std::vector<MethodSpec> sweep_methods() const;
};

struct ConfigKey {
    const char* key;
    const char* help;
};

/// Every recognised key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Applies one key=value setting; unknown keys and bad values raise Config
/// errors naming the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// key=value lines, '#' starts a comment. Missing keys keep their defaults.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Independent seed stream for a purpose (data, training, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Builds the split: manifest, ratings file + skew split, or synthetic data.
SplitDataset load_split(const ExperimentConfig& config);

/// Trains `config.method` on `split` and returns the model.
EmbeddingSet train_method(const ExperimentConfig& config, const SplitDataset& split);

/// Scores `events` with `model` and builds the report against their AvgCR.
MetricReport evaluate_model(const EmbeddingSet& model, const std::vector<Interaction>& events,
                            const std::string& method_name, const std::string& dataset_name,
                            std::uint64_t seed);

/// Throws Data if any training event id also appears in validation or test.
void audit_training_events(const std::vector<Interaction>& training, const SplitDataset& split);

struct ExperimentResult {
    MetricReport test;
    MetricReport validation;
    EmbeddingSet model;
    std::filesystem::path model_path;
    std::filesystem::path report_path;
};

struct RunOptions {
    bool write_outputs = true;
};

/// split -> propensities -> train -> evaluate on test. Writes the model file
/// and upserts the CSV row keyed by (method, dataset, seed).
ExperimentResult run_experiment(const ExperimentConfig& config, RunOptions options = {});

/// Replaces the row with the same (method, dataset, seed) or appends it, so
/// re-runs leave the file unchanged.
void upsert_report_row(const std::filesystem::path& path, const MetricReport& report);

struct SummaryRow {
    std::string method;
    std::size_t n = 0;
    bool has_loss_metrics = true;  // false for BPR
    double mse_lift_mean = 0.0, mse_lift_std = 0.0;
    double nll_lift_mean = 0.0, nll_lift_std = 0.0;
    double auc_mean = 0.0, auc_std = 0.0;
};

/// Mean and sample standard deviation; std is 0 for fewer than two values.
std::pair<double, double> mean_std(const std::vector<double>& values);

struct SweepResult {
    std::vector<MetricReport> runs;  // method-major, then seed
    std::vector<SummaryRow> summary;
};

/// Every method of `config.sweep_methods()` over seeds seed .. seed + seeds - 1.
SweepResult run_sweep(const ExperimentConfig& config, RunOptions options = {});

struct InjectionRow {
    double fraction = 0.0;
    std::string method;
    double mse_lift_mean = 0.0;
    double mse_lift_std = 0.0;
    std::size_t n_seeds = 0;
};

/// Rebuilds the split for each injection fraction and sweeps methods x seeds.
/// Fractions must be strictly increasing within [0, 0.5].
std::vector<InjectionRow> run_injection_sweep(const ExperimentConfig& config,
                                              const std::vector<double>& fractions,
                                              RunOptions options = {});

}  // namespace causerec
