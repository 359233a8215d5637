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
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>

#include "causerec/experiment.hpp"
#include "causerec/model_io.hpp"

using namespace causerec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const char* root = std::getenv("CAUSEREC_TEST_TMP");
    fs::path base = root != nullptr ? fs::path(root) : fs::temp_directory_path() / "causerec_tests";
    fs::path p = base / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

// A small synthetic problem that trains in well under a second.
ExperimentConfig small_config(const fs::path& out) {
    ExperimentConfig c;
    c.synth.num_users = 40;
    c.synth.num_items = 25;
    c.synth.events_per_user = 60;
    c.hyper.epochs = 3;
    c.seeds = 2;
    c.output_dir = out.string();
    return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Config;
}

}  // namespace

TEST_CASE("method names parse and print") {
    CHECK(parse_method("cause-prodc").method == Method::CauseProdC);
    CHECK(parse_method("cause-avg").method == Method::CauseAvg);
    MethodSpec s = parse_method("sp2v-no");
    CHECK(s.method == Method::Sp2v);
    CHECK(s.adaptation == AdaptationMode::No);
    CHECK(s.name() == "sp2v-no");
    CHECK(parse_method("wsp2v", AdaptationMode::Test).name() == "wsp2v-test");
    CHECK(parse_method("bpr").name() == "bpr-blend");
    CHECK(MethodSpec{}.name() == "cause-prodc");
    try {
        parse_method("BanditNet");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("unsupported method") != std::string::npos);
    }
}

TEST_CASE("minimal config keeps the documented defaults") {
    ExperimentConfig c = parse_config_text("dataset=ratings.dat\n");
    ExperimentConfig d;
    CHECK(c.dataset == "ratings.dat");
    CHECK(c.hyper.dim == d.hyper.dim);
    CHECK(c.hyper.lambda_dist == d.hyper.lambda_dist);
    CHECK(c.hyper.lr_start == d.hyper.lr_start);
    CHECK(c.s_t_injection == 0.05);
    CHECK(c.fractions.train == 0.7);
    CHECK(c.method == MethodSpec{});
    CHECK(c.seeds == 10);
    CHECK(c.injection_fractions == std::vector<double>{0.01, 0.10, 0.25});
    CHECK(c.resolved_dataset_name() == "ratings");
    CHECK(ExperimentConfig{}.resolved_dataset_name() == "synthetic");
}

TEST_CASE("config values parse with comments and whitespace") {
    ExperimentConfig c = parse_config_text(
        "# experiment\n"
        "lambda_dist=0.01\n"
        "  dim = 4   # inline\n"
        "method=sp2v\n"
        "adaptation=test\n"
        "methods=cause-prodc, sp2v-blend\n"
        "injection_fractions=0.0,0.2\n"
        "learn_calibration=false\n"
        "\n");
    CHECK(c.hyper.lambda_dist == 0.01);
    CHECK(c.hyper.dim == 4);
    CHECK(c.method.name() == "sp2v-test");
    REQUIRE(c.methods.size() == 2);
    CHECK(c.methods[1].name() == "sp2v-blend");
    CHECK(c.injection_fractions == std::vector<double>{0.0, 0.2});
    CHECK_FALSE(c.hyper.learn_calibration);
    CHECK(c.training_hyperparams().init_scale == doctest::Approx(0.05));

    ExperimentConfig e = parse_config_text("init_scale=0.2\ndim=4\n");
    CHECK(e.training_hyperparams().init_scale == 0.2);
    CHECK(e.training_hyperparams().seed == derive_seed(e.seed, 2));
}

TEST_CASE("config errors name the key") {
    try {
        parse_config_text("lambda_dist=abc\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("lambda_dist") != std::string::npos);
    }
    try {
        parse_config_text("colour=blue\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("unknown config key") != std::string::npos);
    }
    try {
        parse_config_text("method=BanditNet\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("unsupported method") != std::string::npos);
    }
    CHECK(kind_of([] { parse_config_text("just words\n"); }) == ErrorKind::Config);
    CHECK(kind_of([] { parse_config(fs::path("/nonexistent/cfg.txt")); }) == ErrorKind::Config);
}

TEST_CASE("every documented key is accepted") {
    for (const auto& k : config_keys()) {
        CHECK(std::string(k.help).size() > 0);
    }
    CHECK(config_keys().size() >= 30);
}

TEST_CASE("cross-field validation") {
    ExperimentConfig c;
    c.method = parse_method("cause-avg");
    c.cause_mode = EmbeddingMode::UserOnly;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);
    ExperimentConfig f;
    f.fractions = {0.6, 0.1, 0.1};
    CHECK(kind_of([&] { f.validate(); }) == ErrorKind::Config);
    ExperimentConfig s;
    s.s_t_injection = 1.5;
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::Config);
    ExperimentConfig m;
    m.cause_mode = EmbeddingMode::Single;
    CHECK(kind_of([&] { m.validate(); }) == ErrorKind::Config);
}

TEST_CASE("derived seeds differ by stream") {
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("run_experiment is deterministic and writes its outputs") {
    fs::path dir = scratch("determinism");
    ExperimentConfig c = small_config(dir);
    ExperimentResult a = run_experiment(c);
    const std::string model_a = slurp(a.model_path);
    const std::string report_a = slurp(a.report_path);
    CHECK(a.model_path.filename() == "cause-prodc_synthetic_seed1.model");
    CHECK(a.report_path.filename() == "report.csv");
    ExperimentResult b = run_experiment(c);
    CHECK(slurp(b.model_path) == model_a);
    CHECK(slurp(b.report_path) == report_a);
    CHECK(to_csv_row(a.test) == to_csv_row(b.test));
    CHECK(load_model(a.model_path) == a.model);

    auto rows = lines_of(report_a);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == kReportCsvHeader);
    CHECK(rows[1] == to_csv_row(a.test));
    CHECK(a.test.n_events > 0);
    CHECK(a.validation.n_events > 0);
}

TEST_CASE("report rows are upserted by method, dataset and seed") {
    fs::path dir = scratch("upsert");
    ExperimentConfig c = small_config(dir);
    run_experiment(c);
    c.seed = 2;
    run_experiment(c);
    c.method = parse_method("sp2v-no");
    run_experiment(c);
    const std::string first = slurp(dir / "report.csv");
    CHECK(lines_of(first).size() == 4);
    c.seed = 1;
    c.method = MethodSpec{};
    run_experiment(c);
    CHECK(slurp(dir / "report.csv") == first);
}

TEST_CASE("bpr rows have no loss metrics") {
    fs::path dir = scratch("bpr");
    ExperimentConfig c = small_config(dir);
    c.method = parse_method("bpr-no");
    ExperimentResult r = run_experiment(c);
    CHECK_FALSE(r.test.mse.has_value());
    CHECK_FALSE(r.test.nll.has_value());
    const std::string row = to_csv_row(r.test);
    CHECK(row.find(",,,,") != std::string::npos);
    CHECK(r.test.auc > 0.0);
    CHECK(lines_of(slurp(dir / "report.csv"))[1] == row);
}

TEST_CASE("every method runs end to end") {
    fs::path dir = scratch("methods");
    for (const char* m : {"cause-prodc", "cause-prodt", "cause-avg", "sp2v-no", "sp2v-blend",
                          "sp2v-test", "wsp2v-blend", "bpr-blend"}) {
        ExperimentConfig c = small_config(dir);
        c.method = parse_method(m);
        ExperimentResult r = run_experiment(c, {false});
        CHECK(r.test.method_name == m);
        CHECK(std::isfinite(r.test.auc));
    }
    ExperimentConfig both = small_config(dir);
    both.cause_mode = EmbeddingMode::Both;
    CHECK(run_experiment(both, {false}).model.mode() == EmbeddingMode::Both);
}

TEST_CASE("manifest datasets give the same result as the generated split") {
    fs::path dir = scratch("manifest");
    ExperimentConfig c = small_config(dir);
    SplitDataset split = load_split(c);
    write_manifest(dir / "split.csv", split, {});
    ExperimentConfig m = c;
    m.manifest = (dir / "split.csv").string();
    m.dataset_name = "synthetic";
    CHECK(to_csv_row(run_experiment(m, {false}).test) == to_csv_row(run_experiment(c, {false}).test));
}

TEST_CASE("ratings files go through the skew split") {
    fs::path dir = scratch("ratings");
    {
        std::ofstream out(dir / "tiny.dat");
        std::mt19937_64 gen(1);
        for (int u = 0; u < 60; ++u) {
            for (int i = 0; i < 30; ++i) {
                if ((u * 7 + i * 3) % 4 == 0) continue;
                out << u << "::" << i << "::" << 1 + static_cast<int>(gen() % 5) << "::" << u * 100 + i
                    << "\n";
            }
        }
    }
    ExperimentConfig c = small_config(dir);
    c.dataset = (dir / "tiny.dat").string();
    ExperimentResult r = run_experiment(c);
    CHECK(r.test.dataset_name == "tiny");
    CHECK(r.model_path.filename() == "cause-prodc_tiny_seed1.model");
}

TEST_CASE("training never sees held-out events") {
    ExperimentConfig c = small_config(scratch("audit"));
    SplitDataset split = load_split(c);
    std::vector<Interaction> training = split.s_c;
    training.insert(training.end(), split.s_t.begin(), split.s_t.end());
    CHECK_NOTHROW(audit_training_events(training, split));
    training.push_back(split.test.front());
    CHECK(kind_of([&] { audit_training_events(training, split); }) == ErrorKind::Data);
}

TEST_CASE("sweep writes report and summary") {
    fs::path dir = scratch("sweep");
    ExperimentConfig c = small_config(dir);
    c.methods = {parse_method("cause-prodc"), parse_method("sp2v-blend"), parse_method("bpr-blend")};
    SweepResult s = run_sweep(c);
    REQUIRE(s.runs.size() == 6);
    CHECK(s.runs[0].method_name == "cause-prodc");
    CHECK(s.runs[0].seed == 1);
    CHECK(s.runs[1].seed == 2);
    REQUIRE(s.summary.size() == 3);
    CHECK(s.summary[2].method == "bpr-blend");
    CHECK_FALSE(s.summary[2].has_loss_metrics);
    std::vector<double> lifts{*s.runs[0].mse_lift, *s.runs[1].mse_lift};
    auto [mean, sd] = mean_std(lifts);
    CHECK(s.summary[0].mse_lift_mean == mean);
    CHECK(s.summary[0].mse_lift_std == sd);
    CHECK(lines_of(slurp(dir / "report.csv")).size() == 7);
    auto summary = lines_of(slurp(dir / "summary.csv"));
    REQUIRE(summary.size() == 4);
    CHECK(summary[0] == "method,n_seeds,mse_lift_mean,mse_lift_std,nll_lift_mean,nll_lift_std,"
                        "auc_mean,auc_std");

    const std::string before = slurp(dir / "summary.csv");
    c.threads = 3;
    run_sweep(c);
    CHECK(slurp(dir / "summary.csv") == before);
}

TEST_CASE("mean_std uses the sample deviation") {
    auto [m, s] = mean_std({1.0, 2.0, 3.0, 4.0});
    CHECK(m == 2.5);
    CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
    auto [m1, s1] = mean_std({7.0});
    CHECK(m1 == 7.0);
    CHECK(s1 == 0.0);
}

TEST_CASE("injection sweep rows and errors") {
    fs::path dir = scratch("inject");
    ExperimentConfig c = small_config(dir);
    c.methods = {parse_method("cause-prodc"), parse_method("sp2v-blend")};
    auto rows = run_injection_sweep(c, {0.05, 0.2});
    CHECK(rows.size() == 4);
    CHECK(rows[0].fraction == 0.05);
    CHECK(rows[3].method == "sp2v-blend");
    CHECK(rows[3].n_seeds == 2);
    auto file = lines_of(slurp(dir / "inject_sweep.csv"));
    REQUIRE(file.size() == 5);
    CHECK(file[0] == "fraction,method,mse_lift_mean,mse_lift_std,n_seeds");

    CHECK(kind_of([&] { run_injection_sweep(c, {}, {false}); }) == ErrorKind::Config);
    CHECK(kind_of([&] { run_injection_sweep(c, {0.2, 0.1}, {false}); }) == ErrorKind::Config);
    CHECK(kind_of([&] { run_injection_sweep(c, {0.6}, {false}); }) == ErrorKind::Config);
    ExperimentConfig b = c;
    b.methods = {parse_method("bpr-blend")};
    CHECK(kind_of([&] { run_injection_sweep(b, {0.1}, {false}); }) == ErrorKind::Config);
    ExperimentConfig t = c;
    t.methods = {parse_method("sp2v-test")};
    CHECK_THROWS_AS(run_injection_sweep(t, {0.0, 0.1}, {false}), Error);
}
