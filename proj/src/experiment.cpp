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

#include "causerec/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "causerec/model_io.hpp"
#include "causerec/propensity.hpp"

namespace causerec {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
    throw Error(ErrorKind::Config, "invalid value '" + value + "' for key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
        bad_value(key, value, "expected a number");
    }
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        bad_value(key, value, "expected a non-negative integer");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "off" || value == "no") return false;
    bad_value(key, value, "expected true/false");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const char* method_stem(Method m) {
    switch (m) {
        case Method::CauseProdC: return "cause-prodc";
        case Method::CauseProdT: return "cause-prodt";
        case Method::CauseAvg: return "cause-avg";
        case Method::Sp2v: return "sp2v";
        case Method::Wsp2v: return "wsp2v";
        case Method::Bpr: return "bpr";
    }
    return "?";
}

// Runs jobs 0..n-1 on up to `threads` workers; results land in index order.
template <typename Result, typename Fn>
std::vector<Result> run_jobs(std::size_t n, std::size_t threads, Fn fn) {
    std::vector<Result> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&]() {
        while (true) {
            std::size_t job;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= n) return;
                job = next++;
            }
            try {
                results[job] = fn(job);
            } catch (...) {
                errors[job] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorKind::Data, "cannot write " + tmp.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

bool MethodSpec::is_cause() const {
    return method == Method::CauseProdC || method == Method::CauseProdT ||
           method == Method::CauseAvg;
}

std::string MethodSpec::name() const {
    if (is_cause()) return method_stem(method);
    return std::string(method_stem(method)) + "-" + to_string(adaptation);
}

MethodSpec parse_method(const std::string& s, AdaptationMode default_adaptation) {
    for (auto m : {Method::CauseProdC, Method::CauseProdT, Method::CauseAvg}) {
        if (s == method_stem(m)) return {m, default_adaptation};
    }
    for (auto m : {Method::Sp2v, Method::Wsp2v, Method::Bpr}) {
        const std::string stem = method_stem(m);
        if (s == stem) return {m, default_adaptation};
        if (s.rfind(stem + "-", 0) == 0) {
            const std::string suffix = s.substr(stem.size() + 1);
            try {
                return {m, parse_adaptation_mode(suffix)};
            } catch (const Error&) {
                break;
            }
        }
    }
    throw Error(ErrorKind::Config, "unsupported method '" + s + "'");
}

std::string ExperimentConfig::resolved_dataset_name() const {
    if (!dataset_name.empty()) return dataset_name;
    if (!manifest.empty()) return std::filesystem::path(manifest).stem().string();
    if (dataset == "synthetic") return "synthetic";
    return std::filesystem::path(dataset).stem().string();
}

std::vector<MethodSpec> ExperimentConfig::sweep_methods() const {
    return methods.empty() ? std::vector<MethodSpec>{method} : methods;
}

Hyperparams ExperimentConfig::training_hyperparams() const {
    Hyperparams h = hyper;
    if (!init_scale_explicit) h.init_scale = 0.1 / std::sqrt(static_cast<double>(h.dim));
    h.seed = derive_seed(seed, 2);
    return h;
}

void ExperimentConfig::validate() const {
    fractions.validate();
    training_hyperparams().validate();
    if (!(s_t_injection >= 0.0 && s_t_injection <= 1.0)) {
        throw Error(ErrorKind::Config, "s_t_injection must be in [0, 1]");
    }
    for (const auto& m : sweep_methods()) {
        if (m.method == Method::CauseAvg && cause_mode == EmbeddingMode::UserOnly) {
            throw Error(ErrorKind::Config, "cause-avg needs cause_mode prod or both");
        }
    }
    if (cause_mode == EmbeddingMode::Single) {
        throw Error(ErrorKind::Config, "cause_mode must be prod, user or both");
    }
    if (seeds == 0) throw Error(ErrorKind::Config, "seeds must be positive");
    if (threads == 0) throw Error(ErrorKind::Config, "threads must be positive");
    if (!(ips_cap > 0.0)) throw Error(ErrorKind::Config, "ips_cap must be positive");
    if (!(propensity_alpha >= 0.0)) {
        throw Error(ErrorKind::Config, "propensity_alpha must be non-negative");
    }
    if (bpr_negatives == 0) throw Error(ErrorKind::Config, "bpr_negatives must be positive");
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"dataset", "'synthetic' or a ratings file path"},
        {"format", "ratings format: comma | doublecolon"},
        {"manifest", "load the split from a manifest instead of building it"},
        {"dataset_name", "label used in reports"},
        {"synth_users", "synthetic: number of users"},
        {"synth_items", "synthetic: number of items"},
        {"synth_latent_dim", "synthetic: true latent dimension"},
        {"synth_zipf", "synthetic: Zipf exponent of the logging policy"},
        {"synth_events_per_user", "synthetic: events per user"},
        {"synth_true_bias", "synthetic: logit offset of the true rewards"},
        {"synth_factor_scale", "synthetic: scale of the true factors"},
        {"split_train", "train fraction"},
        {"split_validation", "validation fraction"},
        {"split_test", "test fraction"},
        {"s_t_injection", "fraction of the test pool moved into S_t"},
        {"seed", "base seed"},
        {"method", "cause-prodc | cause-prodt | cause-avg | sp2v | wsp2v | bpr [-no|-blend|-test]"},
        {"adaptation", "baseline training set: no | blend | test"},
        {"methods", "comma-separated methods for sweeps"},
        {"cause_mode", "duplicated CausE matrices: prod | user | both"},
        {"dim", "embedding dimension"},
        {"lambda_t", "treatment regularizer"},
        {"lambda_c", "control (and baseline) regularizer"},
        {"lambda_dist", "treatment/control discrepancy regularizer"},
        {"lr_start", "initial learning rate"},
        {"lr_end", "final learning rate"},
        {"momentum", "momentum coefficient"},
        {"epochs", "training epochs"},
        {"batch_size", "mini-batch size"},
        {"init_scale", "initialization half-width (default 0.1/sqrt(dim))"},
        {"learn_calibration", "learn the score scale and bias"},
        {"propensity_alpha", "additive smoothing of item propensities"},
        {"ips_cap", "cap on inverse-propensity weights"},
        {"ips_normalize", "self-normalize IPS weights per mini-batch"},
        {"bpr_negatives", "negatives sampled per BPR positive"},
        {"output_dir", "directory for models and CSV reports"},
        {"seeds", "number of seeds in sweeps"},
        {"injection_fractions", "comma-separated fractions for inject-sweep"},
        {"threads", "worker threads for sweeps"},
    };
    return keys;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    auto positive = [&](std::uint64_t v) {
        if (v == 0) bad_value(key, value, "must be positive");
        return static_cast<std::size_t>(v);
    };
    try {
        if (key == "dataset") c.dataset = value;
        else if (key == "format") c.format = parse_rating_format(value);
        else if (key == "manifest") c.manifest = value;
        else if (key == "dataset_name") c.dataset_name = value;
        else if (key == "synth_users") c.synth.num_users = positive(to_uint(key, value));
        else if (key == "synth_items") c.synth.num_items = positive(to_uint(key, value));
        else if (key == "synth_latent_dim") c.synth.latent_dim = positive(to_uint(key, value));
        else if (key == "synth_zipf") c.synth.zipf_exponent = to_double(key, value);
        else if (key == "synth_events_per_user") c.synth.events_per_user = positive(to_uint(key, value));
        else if (key == "synth_true_bias") c.synth.true_bias = to_double(key, value);
        else if (key == "synth_factor_scale") c.synth.factor_scale = to_double(key, value);
        else if (key == "split_train") c.fractions.train = to_double(key, value);
        else if (key == "split_validation") c.fractions.validation = to_double(key, value);
        else if (key == "split_test") c.fractions.test = to_double(key, value);
        else if (key == "s_t_injection") c.s_t_injection = to_double(key, value);
        else if (key == "seed") c.seed = to_uint(key, value);
        else if (key == "method") c.method = parse_method(value, c.method.adaptation);
        else if (key == "adaptation") c.method.adaptation = parse_adaptation_mode(value);
        else if (key == "methods") {
            c.methods.clear();
            for (const auto& m : split_list(value)) c.methods.push_back(parse_method(m, c.method.adaptation));
            if (c.methods.empty()) bad_value(key, value, "empty list");
        }
        else if (key == "cause_mode") c.cause_mode = parse_embedding_mode(value);
        else if (key == "dim") c.hyper.dim = positive(to_uint(key, value));
        else if (key == "lambda_t") c.hyper.lambda_t = to_double(key, value);
        else if (key == "lambda_c") c.hyper.lambda_c = to_double(key, value);
        else if (key == "lambda_dist") c.hyper.lambda_dist = to_double(key, value);
        else if (key == "lr_start") c.hyper.lr_start = to_double(key, value);
        else if (key == "lr_end") c.hyper.lr_end = to_double(key, value);
        else if (key == "momentum") c.hyper.momentum = to_double(key, value);
        else if (key == "epochs") c.hyper.epochs = positive(to_uint(key, value));
        else if (key == "batch_size") c.hyper.batch_size = positive(to_uint(key, value));
        else if (key == "init_scale") {
            c.hyper.init_scale = to_double(key, value);
            c.init_scale_explicit = true;
        }
        else if (key == "learn_calibration") c.hyper.learn_calibration = to_bool(key, value);
        else if (key == "propensity_alpha") c.propensity_alpha = to_double(key, value);
        else if (key == "ips_cap") c.ips_cap = to_double(key, value);
        else if (key == "ips_normalize") c.ips_normalize = to_bool(key, value);
        else if (key == "bpr_negatives") c.bpr_negatives = positive(to_uint(key, value));
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "seeds") c.seeds = positive(to_uint(key, value));
        else if (key == "injection_fractions") {
            c.injection_fractions.clear();
            for (const auto& f : split_list(value)) c.injection_fractions.push_back(to_double(key, f));
        }
        else if (key == "threads") c.threads = positive(to_uint(key, value));
        else throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config &&
            std::string(e.what()).find(key) != std::string::npos) {
            throw;
        }
        throw Error(ErrorKind::Config, "key '" + key + "': " + e.what());
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    std::stringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config,
                        "config line " + std::to_string(line_no) + ": expected key=value");
        }
        apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream).
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SplitDataset load_split(const ExperimentConfig& config) {
    if (!config.manifest.empty()) return read_manifest(config.manifest);
    if (config.dataset == "synthetic") {
        SyntheticParams p = config.synth;
        p.fractions = config.fractions;
        p.s_t_injection = config.s_t_injection;
        p.seed = derive_seed(config.seed, 1);
        return gen_synthetic(p).first;
    }
    IndexedLog log = index_ratings(parse_ratings(config.dataset, config.format));
    SkewParams skew{config.fractions, config.s_t_injection, derive_seed(config.seed, 1)};
    SplitDataset split = make_skew_split(log.events, log.users.size(), log.items.size(), skew);
    split.user_ids = std::move(log.users);
    split.item_ids = std::move(log.items);
    return split;
}

EmbeddingSet train_method(const ExperimentConfig& config, const SplitDataset& split) {
    const Hyperparams hyper = config.training_hyperparams();
    const MethodSpec& m = config.method;
    switch (m.method) {
        case Method::CauseProdC:
            return train_cause(split.s_c, split.s_t, split.num_users, split.num_items, hyper,
                               config.cause_mode, CauseVariant::ProdC);
        case Method::CauseProdT:
            return train_cause(split.s_c, split.s_t, split.num_users, split.num_items, hyper,
                               config.cause_mode, CauseVariant::ProdT);
        case Method::CauseAvg:
            return train_cause(split.s_c, split.s_t, split.num_users, split.num_items, hyper,
                               config.cause_mode, CauseVariant::Avg);
        case Method::Sp2v:
            return train_sp2v(assemble_training_set(split, m.adaptation), split.num_users,
                              split.num_items, hyper);
        case Method::Wsp2v: {
            auto events = assemble_training_set(split, m.adaptation);
            auto propensities =
                estimate_propensity(events, split.num_items, config.propensity_alpha);
            return train_wsp2v(events, split.num_users, split.num_items, hyper, propensities,
                               config.ips_cap, config.ips_normalize);
        }
        case Method::Bpr:
            return train_bpr(assemble_training_set(split, m.adaptation), split.num_users,
                             split.num_items, hyper, config.bpr_negatives);
    }
    throw Error(ErrorKind::Config, "unsupported method");
}

MetricReport evaluate_model(const EmbeddingSet& model, const std::vector<Interaction>& events,
                            const std::string& method_name, const std::string& dataset_name,
                            std::uint64_t seed) {
    if (events.empty()) throw Error(ErrorKind::Data, "no events to evaluate");
    std::vector<double> scores, probs;
    std::vector<int> labels;
    scores.reserve(events.size());
    labels.reserve(events.size());
    for (const auto& e : events) {
        scores.push_back(raw_score(model, e.user, e.item));
        labels.push_back(e.reward);
    }
    if (model.tag != ModelTag::Bpr) {
        probs.reserve(scores.size());
        for (double s : scores) probs.push_back(sigmoid(s));
    }
    return evaluate_predictions(probs, scores, labels, method_name, dataset_name, seed);
}

void audit_training_events(const std::vector<Interaction>& training, const SplitDataset& split) {
    std::unordered_set<std::size_t> held_out;
    for (const auto& e : split.validation) held_out.insert(e.event_id);
    for (const auto& e : split.test) held_out.insert(e.event_id);
    for (const auto& e : training) {
        if (held_out.count(e.event_id) != 0) {
            throw Error(ErrorKind::Data, "training set contains held-out event " +
                                             std::to_string(e.event_id));
        }
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config, RunOptions options) {
    config.validate();
    const std::string dataset = config.resolved_dataset_name();
    const std::string method = config.method.name();

    SplitDataset split = load_split(config);
    std::vector<Interaction> training;
    if (config.method.is_cause()) {
        training = split.s_c;
        training.insert(training.end(), split.s_t.begin(), split.s_t.end());
    } else {
        training = assemble_training_set(split, config.method.adaptation);
    }
    audit_training_events(training, split);

    ExperimentResult result;
    result.model = train_method(config, split);
    result.test = evaluate_model(result.model, split.test, method, dataset, config.seed);
    if (!split.validation.empty()) {
        result.validation =
            evaluate_model(result.model, split.validation, method, dataset, config.seed);
    }

    if (options.write_outputs) {
        std::filesystem::path dir(config.output_dir);
        std::filesystem::create_directories(dir);
        result.model_path =
            dir / (method + "_" + dataset + "_seed" + std::to_string(config.seed) + ".model");
        save_model(result.model_path, result.model);
        result.report_path = dir / "report.csv";
        upsert_report_row(result.report_path, result.test);
    }
    return result;
}

void upsert_report_row(const std::filesystem::path& path, const MetricReport& report) {
    const std::string row = to_csv_row(report);
    const std::string key = report.method_name + ',' + report.dataset_name + ',' +
                            std::to_string(report.seed) + ',';
    std::vector<std::string> lines;
    if (std::ifstream in(path); in) {
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) lines.push_back(line);
        }
    }
    if (lines.empty() || lines.front() != kReportCsvHeader) {
        lines.insert(lines.begin(), kReportCsvHeader);
    }
    bool replaced = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].rfind(key, 0) == 0) {
            lines[k] = row;
            replaced = true;
        }
    }
    if (!replaced) lines.push_back(row);
    std::string text;
    for (const auto& l : lines) text += l + '\n';
    write_text_atomically(path, text);
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

SweepResult run_sweep(const ExperimentConfig& config, RunOptions options) {
    config.validate();
    const auto methods = config.sweep_methods();
    const std::size_t jobs = methods.size() * config.seeds;

    SweepResult result;
    result.runs = run_jobs<MetricReport>(jobs, config.threads, [&](std::size_t job) {
        ExperimentConfig c = config;
        c.method = methods[job / config.seeds];
        c.methods.clear();
        c.seed = config.seed + job % config.seeds;
        return run_experiment(c, {false}).test;
    });

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        SummaryRow row;
        row.method = methods[mi].name();
        row.n = config.seeds;
        std::vector<double> mse_l, nll_l, aucs;
        for (std::size_t s = 0; s < config.seeds; ++s) {
            const auto& r = result.runs[mi * config.seeds + s];
            if (r.mse_lift) mse_l.push_back(*r.mse_lift);
            if (r.nll_lift) nll_l.push_back(*r.nll_lift);
            aucs.push_back(r.auc);
        }
        row.has_loss_metrics = !mse_l.empty();
        std::tie(row.mse_lift_mean, row.mse_lift_std) = mean_std(mse_l);
        std::tie(row.nll_lift_mean, row.nll_lift_std) = mean_std(nll_l);
        std::tie(row.auc_mean, row.auc_std) = mean_std(aucs);
        result.summary.push_back(row);
    }

    if (options.write_outputs) {
        std::filesystem::path dir(config.output_dir);
        for (const auto& r : result.runs) upsert_report_row(dir / "report.csv", r);
        std::string text =
            "method,n_seeds,mse_lift_mean,mse_lift_std,nll_lift_mean,nll_lift_std,auc_mean,"
            "auc_std\n";
        for (const auto& s : result.summary) {
            text += s.method + ',' + std::to_string(s.n) + ',';
            if (s.has_loss_metrics) {
                text += format_number(s.mse_lift_mean) + ',' + format_number(s.mse_lift_std) +
                        ',' + format_number(s.nll_lift_mean) + ',' +
                        format_number(s.nll_lift_std) + ',';
            } else {
                text += ",,,,";
            }
            text += format_number(s.auc_mean) + ',' + format_number(s.auc_std) + '\n';
        }
        write_text_atomically(dir / "summary.csv", text);
    }
    return result;
}

std::vector<InjectionRow> run_injection_sweep(const ExperimentConfig& config,
                                              const std::vector<double>& fractions,
                                              RunOptions options) {
    if (fractions.empty()) throw Error(ErrorKind::Config, "injection sweep: no fractions");
    for (std::size_t k = 0; k < fractions.size(); ++k) {
        if (!(fractions[k] >= 0.0 && fractions[k] <= 0.5)) {
            throw Error(ErrorKind::Config, "injection fractions must lie in [0, 0.5]");
        }
        if (k > 0 && !(fractions[k] > fractions[k - 1])) {
            throw Error(ErrorKind::Config, "injection fractions must be strictly increasing");
        }
    }
    for (const auto& m : config.sweep_methods()) {
        if (m.method == Method::Bpr) {
            throw Error(ErrorKind::Config, "injection sweep reports MSE lift; bpr has none");
        }
    }

    std::vector<InjectionRow> rows;
    for (double f : fractions) {
        ExperimentConfig c = config;
        c.s_t_injection = f;
        SweepResult sweep = run_sweep(c, {false});
        for (const auto& s : sweep.summary) {
            rows.push_back({f, s.method, s.mse_lift_mean, s.mse_lift_std, s.n});
        }
    }

    if (options.write_outputs) {
        std::string text = "fraction,method,mse_lift_mean,mse_lift_std,n_seeds\n";
        for (const auto& r : rows) {
            text += format_number(r.fraction) + ',' + r.method + ',' +
                    format_number(r.mse_lift_mean) + ',' + format_number(r.mse_lift_std) + ',' +
                    std::to_string(r.n_seeds) + '\n';
        }
        write_text_atomically(std::filesystem::path(config.output_dir) / "inject_sweep.csv",
                              text);
    }
    return rows;
}

}  // namespace causerec
