#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gdd/bundle.hpp"
#include "gdd/classifiers.hpp"
#include "gdd/dataset.hpp"
#include "gdd/encoders.hpp"
#include "gdd/error.hpp"
#include "gdd/evaluation.hpp"
#include "gdd/report.hpp"
#include "gdd/sampling.hpp"
#include "gdd/serialize.hpp"
#include "gdd/synthetic.hpp"

namespace py = pybind11;

namespace {

gdd::ExperimentConfig make_config(std::size_t folds, std::uint64_t seed, std::size_t jobs, const py::object& config_json) {
    gdd::ExperimentConfig cfg;
    if (!config_json.is_none()) cfg = gdd::config_from_json(config_json.cast<std::string>());
    cfg.folds = folds;
    cfg.seed = seed;
    cfg.sampling.rng_seed = seed;
    cfg.jobs = jobs;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_gdd, m) {
    m.doc() = "Bindings for the gdd group deception-detection library";

    static py::exception<gdd::Error> error(m, "GddError");
    static py::exception<gdd::Error> input_error(m, "GddInputError", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const gdd::Error& e) {
            if (e.is_input_error()) {
                py::set_error(input_error, e.what());
            } else {
                py::set_error(error, e.what());
            }
        }
    });

    py::class_<gdd::GameDataset>(m, "GameDataset")
        .def_property_readonly("game_ids",
                               [](const gdd::GameDataset& ds) {
                                   std::vector<std::string> ids;
                                   for (const auto& g : ds.games) ids.push_back(g.game_id);
                                   return ids;
                               })
        .def_property_readonly("channels",
                               [](const gdd::GameDataset& ds) {
                                   std::vector<std::string> names;
                                   for (const auto& c : ds.channels) names.push_back(c.name);
                                   return names;
                               })
        .def_property_readonly("player_count", &gdd::GameDataset::player_count)
        .def("labels",
             [](const gdd::GameDataset& ds) {
                 std::map<std::string, int> out;
                 for (const auto& g : ds.games) {
                     for (const auto& p : g.players) out[p.player_id] = p.is_spy() ? 1 : 0;
                 }
                 return out;
             },
             "Player id -> 1 for spy, 0 for resistance.");

    m.def("load_manifest", [](const std::filesystem::path& p) { return gdd::load_manifest(p); }, py::arg("path"));

    m.def("validate_dataset",
          [](const gdd::GameDataset& ds) {
              const auto r = gdd::validate_dataset(ds);
              return py::make_tuple(r.errors, r.warnings);
          },
          py::arg("dataset"), "Returns (errors, warnings).");

    m.def("generate_synthetic",
          [](const std::filesystem::path& out_dir, std::size_t games, std::map<std::string, double> effects,
             std::uint64_t seed) {
              gdd::SyntheticSpec spec;
              spec.n_games = games;
              spec.effects = std::move(effects);
              spec.seed = seed;
              return gdd::generate_synthetic(spec, out_dir);
          },
          py::arg("out_dir"), py::arg("games") = 20, py::arg("effects") = std::map<std::string, double>{},
          py::arg("seed") = 0);

    m.def("schedule_clips",
          [](double duration_s, double clip_len_s, double clip_interval_s) {
              gdd::SamplingPolicy policy;
              policy.clip_len_s = clip_len_s;
              policy.clip_interval_s = clip_interval_s;
              std::vector<std::pair<double, double>> out;
              for (const auto& w : gdd::schedule_clips(duration_s, policy).windows) out.emplace_back(w.start_s, w.end_s);
              return out;
          },
          py::arg("duration_s"), py::arg("clip_len_s") = 10.0, py::arg("clip_interval_s") = 30.0);

    m.def("auc", [](std::vector<double> scores, std::vector<int> labels) { return gdd::auc(scores, labels); },
          py::arg("scores"), py::arg("labels"));

    m.def("classification_metrics",
          [](std::vector<double> scores, std::vector<int> labels, double threshold) {
              const auto r = gdd::classification_metrics(scores, labels, threshold);
              return std::map<std::string, double>{{"auc", r.auc},   {"f1", r.f1},
                                                   {"fnr", r.fnr},   {"fpr", r.fpr},
                                                   {"precision", r.precision}, {"recall", r.recall}};
          },
          py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

    py::class_<gdd::GmmModel>(m, "GmmModel")
        .def_readonly("weights", &gdd::GmmModel::weights)
        .def_readonly("means", &gdd::GmmModel::means)
        .def_readonly("variances", &gdd::GmmModel::variances)
        .def_readonly("iterations", &gdd::GmmModel::iterations)
        .def_readonly("converged", &gdd::GmmModel::converged)
        .def("mean_log_likelihood", &gdd::GmmModel::mean_log_likelihood, py::arg("x"))
        .def("posteriors", &gdd::GmmModel::posteriors, py::arg("x"));

    m.def("fit_gmm",
          [](const gdd::RowMatrix& data, std::size_t components, std::uint64_t seed, std::size_t max_iters) {
              gdd::GmmOptions opt;
              opt.components = components;
              opt.seed = seed;
              opt.max_iters = max_iters;
              return gdd::fit_gmm(data, opt);
          },
          py::arg("data"), py::arg("components") = 32, py::arg("seed") = 0, py::arg("max_iters") = 100);

    m.def("fisher_vector", &gdd::encode_fisher_vector, py::arg("clips"), py::arg("gmm"), py::arg("normalize") = true);

    m.def("run_experiment",
          [](const gdd::GameDataset& ds, std::size_t folds, std::uint64_t seed, std::size_t jobs, bool ablate,
             const py::object& config_json) {
              const auto cfg = make_config(folds, seed, jobs, config_json);
              std::string text;
              {
                  py::gil_scoped_release release;
                  auto run = gdd::run_experiment(ds, cfg);
                  if (ablate) run.report.ablation = gdd::ablate_leave_one_out(run);
                  text = gdd::to_json_text(run.report);
              }
              return text;
          },
          py::arg("dataset"), py::arg("folds") = 10, py::arg("seed") = 0, py::arg("jobs") = 1, py::arg("ablate") = false,
          py::arg("config_json") = py::none(), "Runs cross-validation and returns the report as JSON text.");

    m.def("render_report",
          [](const std::string& report_json, std::size_t top) {
              return gdd::render_report(gdd::report_from_json(report_json), top);
          },
          py::arg("report_json"), py::arg("top") = 5);
}
