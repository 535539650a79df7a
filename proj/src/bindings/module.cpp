#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bril/bandit.hpp"
#include "bril/dbscan.hpp"
#include "bril/demo.hpp"
#include "bril/errors.hpp"
#include "bril/env.hpp"
#include "bril/evaluate.hpp"
#include "bril/mlp.hpp"
#include "bril/pca.hpp"
#include "bril/pipeline.hpp"

namespace py = pybind11;
using namespace bril;

namespace {

// Python-side behaviors are plain coordinate lists.
std::vector<ReducedDescriptor> to_reduced(const std::vector<std::vector<double>>& coords) {
    std::vector<ReducedDescriptor> out;
    for (const auto& c : coords) out.push_back({c});
    return out;
}

}  // namespace

PYBIND11_MODULE(_bril, m) {
    m.doc() = "behavioral repertoire imitation learning core";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

    py::class_<DemoSchema>(m, "DemoSchema")
        .def(py::init<>())
        .def_readwrite("state_dim", &DemoSchema::state_dim)
        .def_readwrite("action_count", &DemoSchema::action_count)
        .def_readwrite("unit_types", &DemoSchema::unit_types);

    py::class_<Demonstration>(m, "Demonstration")
        .def(py::init<>())
        .def_readwrite("id", &Demonstration::id)
        .def_readwrite("pairs", &Demonstration::pairs)
        .def_readwrite("unit_counts", &Demonstration::unit_counts)
        .def_readwrite("win", &Demonstration::win)
        .def_readwrite("meta", &Demonstration::meta);

    py::class_<DemoSet>(m, "DemoSet")
        .def(py::init<>())
        .def_readwrite("schema", &DemoSet::schema)
        .def_readwrite("demos", &DemoSet::demos)
        .def("__len__", &DemoSet::size);

    m.def("load_demoset", &load_demoset, py::arg("path"));
    m.def("save_demoset", &save_demoset, py::arg("demoset"), py::arg("path"));
    m.def(
        "split_per_cluster",
        [](const DemoSet& set, const std::vector<int>& labels, double train, double val,
           double test, std::uint64_t seed) {
            SplitSpec spec{train, val, test, seed};
            DemoSplit s = split_per_cluster(set, labels, spec);
            return py::make_tuple(s.train, s.val, s.test);
        },
        py::arg("demoset"), py::arg("labels"), py::arg("train") = 0.6, py::arg("val") = 0.1,
        py::arg("test") = 0.3, py::arg("seed") = 0);
    m.def(
        "flatten",
        [](const DemoSet& set, const std::optional<std::vector<std::vector<double>>>& behaviors) {
            std::vector<std::pair<std::vector<double>, int>> rows;
            std::vector<TrainingRow> flat;
            if (behaviors) {
                auto b = to_reduced(*behaviors);
                flat = flatten(set, &b);
            } else {
                flat = flatten(set);
            }
            for (auto& r : flat) rows.emplace_back(std::move(r.input), r.action);
            return rows;
        },
        py::arg("demoset"), py::arg("behaviors") = py::none());

    m.def("compute_descriptor",
          [](const Demonstration& d) { return compute_descriptor(d).ratios; });
    m.def("compute_descriptors", [](const DemoSet& set) {
        std::vector<std::vector<double>> out;
        for (const auto& d : set.demos) out.push_back(compute_descriptor(d).ratios);
        return out;
    });

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("std", &PcaModel::std_dev)
        .def_readonly("components", &PcaModel::components)
        .def_readonly("eigenvalues", &PcaModel::eigenvalues);
    m.def(
        "fit_pca",
        [](const std::vector<std::vector<double>>& descriptors, int p) {
            std::vector<RawDescriptor> raw;
            for (const auto& d : descriptors) raw.push_back({d});
            return fit_pca(raw, p);
        },
        py::arg("descriptors"), py::arg("p") = 2);
    m.def(
        "project",
        [](const PcaModel& model, const std::vector<double>& d) {
            return project(model, RawDescriptor{d}).coords;
        },
        py::arg("model"), py::arg("descriptor"));
    m.def("explained_variance", &explained_variance);
    m.def("save_pca", &save_pca);
    m.def("load_pca", &load_pca);

    m.def(
        "dbscan",
        [](const std::vector<std::vector<double>>& points, double eps, int min_pts) {
            return dbscan(to_reduced(points), ClusterConfig{eps, min_pts}).labels;
        },
        py::arg("points"), py::arg("eps"), py::arg("min_pts"));
    m.def(
        "centroids",
        [](const std::vector<std::vector<double>>& points, const std::vector<int>& labels) {
            std::map<int, std::vector<double>> out;
            for (auto& [k, v] : centroids(to_reduced(points), ClusterLabels{labels, 0}))
                out[k] = v.coords;
            return out;
        },
        py::arg("points"), py::arg("labels"));

    py::class_<MlpPolicy>(m, "MlpPolicy")
        .def_property_readonly("input_dim", [](const MlpPolicy& p) { return p.input_dim; })
        .def_property_readonly("action_count", [](const MlpPolicy& p) { return p.action_count; })
        .def_property_readonly("behavior_dim", [](const MlpPolicy& p) { return p.behavior_dim; })
        .def_property_readonly(
            "mode", [](const MlpPolicy& p) { return p.mode == PolicyMode::kBril ? "BRIL" : "IL"; });

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("epoch_loss", &TrainReport::epoch_loss)
        .def_readonly("test_accuracy", &TrainReport::test_accuracy)
        .def_readonly("test_loss", &TrainReport::test_loss);

    m.def("init_policy", &init_policy, py::arg("input_dim"), py::arg("action_count"),
          py::arg("seed"), py::arg("behavior_dim") = 0);
    m.def(
        "forward",
        [](const MlpPolicy& p, const std::vector<double>& input) {
            return forward(p, std::span<const double>(input));
        },
        py::arg("policy"), py::arg("input"));
    m.def(
        "train",
        [](const std::vector<std::pair<std::vector<double>, int>>& rows, double learning_rate,
           int batch_size, int epochs, std::uint64_t seed, double l2,
           const std::vector<std::pair<std::vector<double>, int>>& test_rows, int behavior_dim,
           int action_count) {
            auto convert = [](const auto& src) {
                std::vector<TrainingRow> out;
                for (const auto& [input, action] : src) out.push_back({input, action});
                return out;
            };
            TrainConfig cfg{learning_rate, batch_size, epochs, seed, l2};
            return train(convert(rows), cfg, convert(test_rows), behavior_dim, action_count);
        },
        py::arg("rows"), py::arg("learning_rate") = 0.05, py::arg("batch_size") = 64,
        py::arg("epochs") = 12, py::arg("seed") = 0, py::arg("l2") = 0.0,
        py::arg("test_rows") = std::vector<std::pair<std::vector<double>, int>>{},
        py::arg("behavior_dim") = 0, py::arg("action_count") = 0);
    m.def(
        "gradient_check",
        [](const MlpPolicy& p, const std::vector<double>& input, int action, std::uint64_t seed) {
            return gradient_check(p, TrainingRow{input, action}, seed);
        },
        py::arg("policy"), py::arg("input"), py::arg("action"), py::arg("seed") = 0);
    m.def(
        "act",
        [](const MlpPolicy& p, const std::vector<double>& state,
           const std::optional<std::vector<double>>& behavior, const std::string& mode,
           std::uint64_t seed) {
            std::optional<ReducedDescriptor> b;
            if (behavior) b = ReducedDescriptor{*behavior};
            Rng rng(seed);
            return act(p, state, b, mode == "greedy" ? ActMode::kGreedy : ActMode::kSample, rng);
        },
        py::arg("policy"), py::arg("state"), py::arg("behavior") = py::none(),
        py::arg("mode") = "sample", py::arg("seed") = 0);
    m.def("save_policy", &save_policy);
    m.def("load_policy", &load_policy);

    py::class_<EnvConfig>(m, "EnvConfig")
        .def_readwrite("max_ticks", &EnvConfig::max_ticks)
        .def_readwrite("opponent_archetype", &EnvConfig::opponent_archetype)
        .def_readwrite("opponent_noise", &EnvConfig::opponent_noise)
        .def_property_readonly("state_dim", &EnvConfig::state_dim)
        .def_property_readonly("action_count", &EnvConfig::action_count)
        .def_property_readonly("unit_names", &EnvConfig::unit_names);
    m.def("default_env_config", &default_env_config);
    m.def("load_env_config", &load_env_config);
    m.def("save_env_config", &save_env_config);

    py::class_<EpisodeResult>(m, "EpisodeResult")
        .def_readonly("win", &EpisodeResult::win)
        .def_readonly("produced_counts", &EpisodeResult::produced_counts)
        .def_readonly("trace", &EpisodeResult::trace);

    m.def("archetype_ids", &archetype_ids);
    m.def(
        "run_archetype_episode",
        [](const std::string& archetype, const EnvConfig& cfg, std::uint64_t seed) {
            return run_episode(make_archetype_controller(archetype, cfg), cfg, seed);
        },
        py::arg("archetype"), py::arg("env"), py::arg("seed"));
    m.def(
        "run_policy_episode",
        [](const MlpPolicy& policy, const std::optional<std::vector<double>>& behavior,
           const EnvConfig& cfg, std::uint64_t seed, const std::string& mode) {
            std::optional<ReducedDescriptor> b;
            if (behavior) b = ReducedDescriptor{*behavior};
            Rng rng(mix_seed(seed, "py-act"));
            Controller controller = [&](const StateVector& obs) {
                return act(policy, obs, b,
                           mode == "greedy" ? ActMode::kGreedy : ActMode::kSample, rng);
            };
            return run_episode(controller, cfg, seed);
        },
        py::arg("policy"), py::arg("behavior"), py::arg("env"), py::arg("seed"),
        py::arg("mode") = "sample");
    m.def("generate_demoset", &generate_demoset, py::arg("archetypes"), py::arg("env"),
          py::arg("noise"), py::arg("seed"));

    py::class_<BanditState>(m, "BanditState")
        .def(py::init([](const std::vector<std::vector<double>>& options, double exploration) {
                 return BanditState(to_reduced(options), exploration);
             }),
             py::arg("options"), py::arg("exploration") = 1.4142135623730951)
        .def_readonly("counts", &BanditState::counts)
        .def_readonly("means", &BanditState::means)
        .def_readonly("total", &BanditState::total);
    m.def("bandit_select", [](const BanditState& b) { return bril::select(b); },
          py::arg("bandit"));
    m.def("bandit_update",
          [](BanditState& b, int option, double ret) { bril::update(b, option, ret); },
          py::arg("bandit"), py::arg("option"), py::arg("ret"));

    m.def("mean_behavior",
          [](const std::vector<EpisodeResult>& results) { return mean_behavior(results).ratios; });
    m.def(
        "localize",
        [](const std::vector<double>& mean, const DemoSet& set, const PcaModel& pca) {
            const BehaviorEstimate est = localize(RawDescriptor{mean}, set, pca);
            return py::make_tuple(est.nearest_demo_id, est.coords.coords);
        },
        py::arg("mean"), py::arg("demoset"), py::arg("pca"));

    m.def(
        "run_pipeline",
        [](const std::string& config_path, std::uint64_t seed) {
            PipelineConfig cfg = load_pipeline_config(config_path);
            cfg.seed = seed;
            run_pipeline(cfg);
            return cfg.out_dir;
        },
        py::arg("config_path"), py::arg("seed"));

    m.attr("__version__") = "0.1.0";
}
