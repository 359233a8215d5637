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


// Python bindings: datasets, trainers, scoring, metrics and the experiment
// driver. Matrices come back as numpy copies.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "causerec/baselines.hpp"
#include "causerec/cause.hpp"
#include "causerec/datamodel.hpp"
#include "causerec/error.hpp"
#include "causerec/experiment.hpp"
#include "causerec/ingest.hpp"
#include "causerec/metrics.hpp"
#include "causerec/model_io.hpp"
#include "causerec/propensity.hpp"

namespace py = pybind11;
using namespace causerec;

namespace {

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto v = m.values();
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Matrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw Error(ErrorKind::Dimension, "expected a 2-d array");
    Matrix m(a.shape(0), a.shape(1));
    std::copy(a.data(), a.data() + a.size(), m.values().begin());
    return m;
}

std::vector<double> predict_many(const EmbeddingSet& model, const std::vector<std::size_t>& users,
                                 const std::vector<std::size_t>& items) {
    if (users.size() != items.size())
        throw Error(ErrorKind::Dimension, "users and items differ in length");
    std::vector<double> out(users.size());
    for (std::size_t k = 0; k < users.size(); ++k) out[k] = predict(model, users[k], items[k]);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Causal embeddings for recommendation";

    static py::exception<Error> error_type(m, "CauseRecError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
            py::set_error(error_type, msg.c_str());
        }
    });

    py::enum_<Origin>(m, "Origin")
        .value("Control", Origin::Control)
        .value("Treatment", Origin::Treatment);
    py::enum_<EmbeddingMode>(m, "EmbeddingMode")
        .value("ProdOnly", EmbeddingMode::ProdOnly)
        .value("UserOnly", EmbeddingMode::UserOnly)
        .value("Both", EmbeddingMode::Both)
        .value("Single", EmbeddingMode::Single);
    py::enum_<CauseVariant>(m, "CauseVariant")
        .value("ProdC", CauseVariant::ProdC)
        .value("ProdT", CauseVariant::ProdT)
        .value("Avg", CauseVariant::Avg);
    py::enum_<AdaptationMode>(m, "AdaptationMode")
        .value("No", AdaptationMode::No)
        .value("Blend", AdaptationMode::Blend)
        .value("Test", AdaptationMode::Test);

    py::class_<Interaction>(m, "Interaction")
        .def(py::init([](std::size_t u, std::size_t i, int y, Origin o, std::size_t id) {
                 return Interaction{u, i, y, o, id};
             }),
             py::arg("user"), py::arg("item"), py::arg("reward"),
             py::arg("origin") = Origin::Control, py::arg("event_id") = 0)
        .def_readwrite("user", &Interaction::user)
        .def_readwrite("item", &Interaction::item)
        .def_readwrite("reward", &Interaction::reward)
        .def_readwrite("origin", &Interaction::origin)
        .def_readwrite("event_id", &Interaction::event_id)
        .def("__repr__", [](const Interaction& e) {
            std::ostringstream s;
            s << "Interaction(user=" << e.user << ", item=" << e.item << ", reward=" << e.reward
              << ")";
            return s.str();
        });

    py::class_<Hyperparams>(m, "Hyperparams")
        .def(py::init<>())
        .def_static("for_dim", &Hyperparams::for_dim)
        .def_readwrite("dim", &Hyperparams::dim)
        .def_readwrite("lambda_t", &Hyperparams::lambda_t)
        .def_readwrite("lambda_c", &Hyperparams::lambda_c)
        .def_readwrite("lambda_dist", &Hyperparams::lambda_dist)
        .def_readwrite("lr_start", &Hyperparams::lr_start)
        .def_readwrite("lr_end", &Hyperparams::lr_end)
        .def_readwrite("momentum", &Hyperparams::momentum)
        .def_readwrite("epochs", &Hyperparams::epochs)
        .def_readwrite("batch_size", &Hyperparams::batch_size)
        .def_readwrite("seed", &Hyperparams::seed)
        .def_readwrite("init_scale", &Hyperparams::init_scale)
        .def_readwrite("learn_calibration", &Hyperparams::learn_calibration)
        .def("validate", &Hyperparams::validate);

    py::class_<EmbeddingSet>(m, "EmbeddingSet")
        .def_property_readonly("mode", &EmbeddingSet::mode)
        .def_property_readonly("num_users", &EmbeddingSet::num_users)
        .def_property_readonly("num_items", &EmbeddingSet::num_items)
        .def_property_readonly("dim", &EmbeddingSet::dim)
        .def_property_readonly("gamma_c", [](const EmbeddingSet& s) { return to_numpy(s.gamma_c()); })
        .def_property_readonly("gamma_t", [](const EmbeddingSet& s) { return to_numpy(s.gamma_t()); })
        .def_property_readonly("theta_c", [](const EmbeddingSet& s) { return to_numpy(s.theta_c()); })
        .def_property_readonly("theta_t", [](const EmbeddingSet& s) { return to_numpy(s.theta_t()); })
        .def_readwrite("calib_scale", &EmbeddingSet::calib_scale)
        .def_readwrite("calib_bias", &EmbeddingSet::calib_bias)
        .def_property_readonly("tag", [](const EmbeddingSet& s) { return to_string(s.tag); })
        .def("item_delta", &EmbeddingSet::item_delta)
        .def("__eq__", [](const EmbeddingSet& a, const EmbeddingSet& b) { return a == b; });

    py::class_<SplitFractions>(m, "SplitFractions")
        .def(py::init<>())
        .def(py::init([](double tr, double va, double te) { return SplitFractions{tr, va, te}; }),
             py::arg("train"), py::arg("validation"), py::arg("test"))
        .def_readwrite("train", &SplitFractions::train)
        .def_readwrite("validation", &SplitFractions::validation)
        .def_readwrite("test", &SplitFractions::test);

    py::class_<SplitDataset>(m, "SplitDataset")
        .def_readonly("s_c", &SplitDataset::s_c)
        .def_readonly("s_t", &SplitDataset::s_t)
        .def_readonly("validation", &SplitDataset::validation)
        .def_readonly("test", &SplitDataset::test)
        .def_readonly("num_users", &SplitDataset::num_users)
        .def_readonly("num_items", &SplitDataset::num_items);

    py::class_<SyntheticParams>(m, "SyntheticParams")
        .def(py::init<>())
        .def_readwrite("num_users", &SyntheticParams::num_users)
        .def_readwrite("num_items", &SyntheticParams::num_items)
        .def_readwrite("latent_dim", &SyntheticParams::latent_dim)
        .def_readwrite("zipf_exponent", &SyntheticParams::zipf_exponent)
        .def_readwrite("events_per_user", &SyntheticParams::events_per_user)
        .def_readwrite("true_bias", &SyntheticParams::true_bias)
        .def_readwrite("factor_scale", &SyntheticParams::factor_scale)
        .def_readwrite("fractions", &SyntheticParams::fractions)
        .def_readwrite("s_t_injection", &SyntheticParams::s_t_injection)
        .def_readwrite("seed", &SyntheticParams::seed);

    py::class_<SyntheticGroundTruth>(m, "SyntheticGroundTruth")
        .def_property_readonly("reward_matrix",
                               [](const SyntheticGroundTruth& g) { return to_numpy(g.reward_matrix); })
        .def_readonly("logging_exposure", &SyntheticGroundTruth::logging_exposure)
        .def_readonly("true_bias", &SyntheticGroundTruth::true_bias);

    m.def("gen_synthetic", &gen_synthetic, py::arg("params"));
    m.def("read_manifest", &read_manifest, py::arg("path"));
    m.def("load_ratings",
          [](const std::filesystem::path& path, const std::string& format, std::uint64_t seed,
             double s_t_injection) {
              auto log = index_ratings(parse_ratings(path, parse_rating_format(format)));
              SkewParams p;
              p.seed = seed;
              p.s_t_injection = s_t_injection;
              auto split = make_skew_split(log.events, log.users.size(), log.items.size(), p);
              return split;
          },
          py::arg("path"), py::arg("format") = "::", py::arg("seed") = 1,
          py::arg("s_t_injection") = 0.0,
          "Parse a ratings file, binarize it and build the skewed split.");
    m.def("chi_square_to_uniform", &chi_square_to_uniform);

    m.def("train_cause", &train_cause, py::arg("s_c"), py::arg("s_t"), py::arg("num_users"),
          py::arg("num_items"), py::arg("hyper") = Hyperparams{},
          py::arg("mode") = EmbeddingMode::ProdOnly, py::arg("variant") = CauseVariant::ProdC);
    m.def("train_sp2v",
          [](const std::vector<Interaction>& events, std::size_t nu, std::size_t ni,
             const Hyperparams& h) { return train_sp2v(events, nu, ni, h); },
          py::arg("events"), py::arg("num_users"), py::arg("num_items"),
          py::arg("hyper") = Hyperparams{});
    m.def("train_wsp2v",
          [](const std::vector<Interaction>& events, std::size_t nu, std::size_t ni,
             const Hyperparams& h, double alpha, double cap, bool normalize) {
              auto prop = estimate_propensity(events, ni, alpha);
              return train_wsp2v(events, nu, ni, h, prop, cap, normalize);
          },
          py::arg("events"), py::arg("num_users"), py::arg("num_items"),
          py::arg("hyper") = Hyperparams{}, py::arg("smoothing_alpha") = 1.0,
          py::arg("cap") = kDefaultIpsCap, py::arg("normalize") = false);
    m.def("train_bpr", &train_bpr, py::arg("events"), py::arg("num_users"),
          py::arg("num_items"), py::arg("hyper") = Hyperparams{},
          py::arg("negatives_per_positive") = 1);
    m.def("assemble_training_set", &assemble_training_set);

    m.def("predict", py::overload_cast<const EmbeddingSet&, std::size_t, std::size_t>(&predict));
    m.def("predict", py::overload_cast<const EmbeddingSet&, CauseVariant, std::size_t, std::size_t>(
                         &predict));
    m.def("predict_many", &predict_many, py::arg("model"), py::arg("users"), py::arg("items"));
    m.def("raw_score",
          py::overload_cast<const EmbeddingSet&, std::size_t, std::size_t>(&raw_score));

    m.def("estimate_propensity",
          [](const std::vector<Interaction>& events, std::size_t ni, double alpha) {
              return estimate_propensity(events, ni, alpha).probs;
          },
          py::arg("events"), py::arg("num_items"), py::arg("smoothing_alpha") = 1.0);
    m.def("ips_reward", &ips_reward, py::arg("y"), py::arg("pi_c_j"),
          py::arg("cap") = kDefaultIpsCap);
    m.def("ite_pair", &ite_pair);
    m.def("ips_from_embeddings", &ips_from_embeddings);
    m.def("optimal_policy", [](const py::array_t<double>& scores) {
        return optimal_policy(from_numpy(scores));
    });

    m.def("mse", [](const std::vector<double>& p, const std::vector<int>& y) { return mse(p, y); });
    m.def("nll", [](const std::vector<double>& p, const std::vector<int>& y) { return nll(p, y); });
    m.def("auc", [](const std::vector<double>& s, const std::vector<int>& y) { return auc(s, y); });
    m.def("lift", [](double v, double b) { return lift(v, b); });

    m.def("save_model", &save_model);
    m.def("load_model", &load_model);

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("method_name", &MetricReport::method_name)
        .def_readonly("dataset_name", &MetricReport::dataset_name)
        .def_readonly("seed", &MetricReport::seed)
        .def_readonly("n_events", &MetricReport::n_events)
        .def_readonly("avg_cr", &MetricReport::avg_cr)
        .def_readonly("mse", &MetricReport::mse)
        .def_readonly("mse_lift", &MetricReport::mse_lift)
        .def_readonly("nll", &MetricReport::nll)
        .def_readonly("nll_lift", &MetricReport::nll_lift)
        .def_readonly("auc", &MetricReport::auc)
        .def("csv_row", &to_csv_row);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def("set", &apply_setting, py::arg("key"), py::arg("value"))
        .def("validate", &ExperimentConfig::validate)
        .def_property_readonly("hyper", &ExperimentConfig::training_hyperparams)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("seeds", &ExperimentConfig::seeds);
    m.def("parse_config", &parse_config);
    m.def("parse_config_text", &parse_config_text);
    m.def("config_keys", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& k : config_keys()) out.emplace_back(k.key, k.help);
        return out;
    });

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("test", &ExperimentResult::test)
        .def_readonly("validation", &ExperimentResult::validation)
        .def_readonly("model", &ExperimentResult::model)
        .def_readonly("model_path", &ExperimentResult::model_path)
        .def_readonly("report_path", &ExperimentResult::report_path);
    py::class_<SummaryRow>(m, "SummaryRow")
        .def_readonly("method", &SummaryRow::method)
        .def_readonly("n", &SummaryRow::n)
        .def_readonly("has_loss_metrics", &SummaryRow::has_loss_metrics)
        .def_readonly("mse_lift_mean", &SummaryRow::mse_lift_mean)
        .def_readonly("mse_lift_std", &SummaryRow::mse_lift_std)
        .def_readonly("nll_lift_mean", &SummaryRow::nll_lift_mean)
        .def_readonly("nll_lift_std", &SummaryRow::nll_lift_std)
        .def_readonly("auc_mean", &SummaryRow::auc_mean)
        .def_readonly("auc_std", &SummaryRow::auc_std);
    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("runs", &SweepResult::runs)
        .def_readonly("summary", &SweepResult::summary);
    py::class_<InjectionRow>(m, "InjectionRow")
        .def_readonly("fraction", &InjectionRow::fraction)
        .def_readonly("method", &InjectionRow::method)
        .def_readonly("mse_lift_mean", &InjectionRow::mse_lift_mean)
        .def_readonly("mse_lift_std", &InjectionRow::mse_lift_std)
        .def_readonly("n_seeds", &InjectionRow::n_seeds);

    m.def("run_experiment",
          [](const ExperimentConfig& c, bool write) { return run_experiment(c, {write}); },
          py::arg("config"), py::arg("write_outputs") = true,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_sweep", [](const ExperimentConfig& c, bool write) { return run_sweep(c, {write}); },
          py::arg("config"), py::arg("write_outputs") = true,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_injection_sweep",
          [](const ExperimentConfig& c, const std::vector<double>& fractions, bool write) {
              return run_injection_sweep(c, fractions, {write});
          },
          py::arg("config"), py::arg("fractions"), py::arg("write_outputs") = true,
          py::call_guard<py::gil_scoped_release>());
}
