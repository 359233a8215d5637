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

// causerec command line: dataset preparation, training, evaluation and sweeps.
//
// Every config-file key is also a flag (`lambda_dist` -> `--lambda-dist`);
// flags override the file given with --config.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "causerec/error.hpp"
#include "causerec/experiment.hpp"
#include "causerec/ingest.hpp"
#include "causerec/model_io.hpp"

namespace {

using causerec::ExperimentConfig;

struct CommonOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

std::string flag_name(const std::string& key) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return "--" + flag;
}

void add_config_flags(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    for (const auto& key : causerec::config_keys()) {
        std::string k = key.key;
        cmd->add_option_function<std::string>(
            flag_name(k), [&opts, k](const std::string& v) { opts.overrides[k] = v; }, key.help);
    }
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
    ExperimentConfig config = opts.config_path.empty()
                                  ? ExperimentConfig{}
                                  : causerec::parse_config(opts.config_path);
    // Keys are applied in table order so that, e.g., `adaptation` follows `method`.
    for (const auto& key : causerec::config_keys()) {
        auto it = opts.overrides.find(key.key);
        if (it != opts.overrides.end()) causerec::apply_setting(config, it->first, it->second);
    }
    return config;
}

std::vector<std::pair<std::string, std::string>> split_metadata(const ExperimentConfig& c,
                                                                const std::string& source) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    return {
        {"source", source},
        {"seed", std::to_string(c.seed)},
        {"split_train", num(c.fractions.train)},
        {"split_validation", num(c.fractions.validation)},
        {"split_test", num(c.fractions.test)},
        {"s_t_injection", num(c.s_t_injection)},
    };
}

void print_report(const causerec::MetricReport& r) {
    std::cout << causerec::kReportCsvHeader << '\n' << causerec::to_csv_row(r) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal embeddings for recommendation: training and evaluation harness"};
    app.require_subcommand(1);
    CommonOptions opts;
    std::string out_path;
    std::string model_path;

    auto* skew = app.add_subcommand("skew", "build a skewed split from a ratings file");
    add_config_flags(skew, opts);
    skew->add_option("--out", out_path, "manifest path")->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic split with known rewards");
    add_config_flags(synth, opts);
    synth->add_option("--out", out_path, "manifest path")->required();

    auto* train = app.add_subcommand("train", "train one method and evaluate it on test");
    add_config_flags(train, opts);

    auto* eval = app.add_subcommand("eval", "evaluate a saved model on the test partition");
    add_config_flags(eval, opts);
    eval->add_option("--model", model_path, "model file")->required();

    auto* sweep = app.add_subcommand("sweep", "methods x seeds, with a summary table");
    add_config_flags(sweep, opts);

    auto* inject = app.add_subcommand("inject-sweep", "sweep the S_t injection fraction");
    add_config_flags(inject, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig config = resolve_config(opts);

        if (skew->parsed()) {
            if (config.dataset == "synthetic") {
                throw causerec::Error(causerec::ErrorKind::Config,
                                      "skew needs --dataset pointing at a ratings file");
            }
            config.validate();
            auto split = causerec::load_split(config);
            causerec::write_manifest(out_path, split, split_metadata(config, config.dataset));
            std::cout << "s_c=" << split.s_c.size() << " s_t=" << split.s_t.size()
                      << " validation=" << split.validation.size()
                      << " test=" << split.test.size() << '\n';
        } else if (synth->parsed()) {
            config.dataset = "synthetic";
            config.manifest.clear();
            config.validate();
            auto split = causerec::load_split(config);
            causerec::write_manifest(out_path, split, split_metadata(config, "synthetic"));
            std::cout << "s_c=" << split.s_c.size() << " s_t=" << split.s_t.size()
                      << " validation=" << split.validation.size()
                      << " test=" << split.test.size() << '\n';
        } else if (train->parsed()) {
            auto result = causerec::run_experiment(config);
            print_report(result.test);
            std::cerr << "model: " << result.model_path.string() << '\n';
        } else if (eval->parsed()) {
            config.validate();
            auto model = causerec::load_model(model_path);
            auto split = causerec::load_split(config);
            if (model.num_users() != split.num_users || model.num_items() != split.num_items) {
                throw causerec::Error(causerec::ErrorKind::Data,
                                      "model shape does not match the split");
            }
            auto report = causerec::evaluate_model(model, split.test, config.method.name(),
                                                   config.resolved_dataset_name(), config.seed);
            causerec::upsert_report_row(std::filesystem::path(config.output_dir) / "report.csv",
                                        report);
            print_report(report);
        } else if (sweep->parsed()) {
            auto result = causerec::run_sweep(config);
            for (const auto& s : result.summary) {
                std::printf("%s n=%zu auc=%.4f+-%.4f", s.method.c_str(), s.n, s.auc_mean,
                            s.auc_std);
                if (s.has_loss_metrics) {
                    std::printf(" mse_lift=%.4f+-%.4f nll_lift=%.4f+-%.4f", s.mse_lift_mean,
                                s.mse_lift_std, s.nll_lift_mean, s.nll_lift_std);
                }
                std::printf("\n");
            }
        } else if (inject->parsed()) {
            auto rows = causerec::run_injection_sweep(config, config.injection_fractions);
            for (const auto& r : rows) {
                std::printf("%.4g %s mse_lift=%.4f+-%.4f\n", r.fraction, r.method.c_str(),
                            r.mse_lift_mean, r.mse_lift_std);
            }
        }
    } catch (const causerec::Error& e) {
        std::cerr << "error (" << causerec::to_string(e.kind()) << "): " << e.what() << '\n';
        return causerec::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
