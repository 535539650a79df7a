#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bril/dbscan.hpp"
#include "bril/demo.hpp"
#include "bril/env.hpp"
#include "bril/mlp.hpp"
#include "bril/pca.hpp"

namespace bril {

// End-to-end workflow configuration. Every stage derives its random
// stream from the global seed, and artifacts are persisted between
// stages so each one can be re-run from the previous stage's files.
struct PipelineConfig {
    std::string out_dir = "out";
    std::string env_config_path;  // empty = built-in default environment

    std::vector<std::pair<std::string, int>> corpus_archetypes = {
        {"rush_alpha", 100}, {"mix_alpha_charlie", 100}, {"siege_delta", 100}};
    double corpus_noise = 0.1;

    int pca_p = 2;
    ClusterConfig cluster{0.5, 8};
    SplitSpec split;
    // The module-level TrainConfig defaults are conservative; the
    // pipeline ships settings that converge on the toy corpus.
    TrainConfig train{0.1, 64, 30, 0, 0.0};

    int eval_episodes = 100;
    ActMode eval_mode = ActMode::kSample;
    int adapt_episodes = 100;
    double adapt_exploration = 1.4142135623730951;
    int max_options = 4;

    std::uint64_t seed = 0;

    // Artifact locations inside out_dir.
    std::string demos_path() const { return out_dir + "/demos.jsonl"; }
    std::string descriptors_path() const { return out_dir + "/descriptors.csv"; }
    std::string pca_path() const { return out_dir + "/pca_model.json"; }
    std::string reduced_path() const { return out_dir + "/reduced.csv"; }
    std::string labels_path() const { return out_dir + "/labels.csv"; }
    std::string centroids_path() const { return out_dir + "/centroids.csv"; }
    std::string policy_path(const std::string& method) const {
        return out_dir + "/policy_" + method + ".json";
    }
    std::string train_report_path() const { return out_dir + "/train_report.csv"; }
    std::string epoch_loss_path() const { return out_dir + "/epoch_loss.csv"; }
    std::string evaluation_path() const { return out_dir + "/evaluation.csv"; }
    std::string adaptation_log_path() const { return out_dir + "/adaptation_log.csv"; }
    std::string adaptation_summary_path() const { return out_dir + "/adaptation_summary.csv"; }
    std::string plot_path() const { return out_dir + "/behavior_map.svg"; }
};

PipelineConfig load_pipeline_config(const std::string& path);
void save_pipeline_config(const PipelineConfig& cfg, const std::string& path);
EnvConfig pipeline_env(const PipelineConfig& cfg);

// Individual stages. Each reads only the files listed as produced by
// earlier stages and atomically writes its own artifacts.
void stage_gen_demos(const PipelineConfig& cfg);
void stage_extract(const PipelineConfig& cfg);
void stage_reduce(const PipelineConfig& cfg);
void stage_cluster(const PipelineConfig& cfg);
void stage_train(const PipelineConfig& cfg);
void stage_eval(const PipelineConfig& cfg);
void stage_adapt(const PipelineConfig& cfg);
void stage_plot(const std::string& labels_csv_path, const std::string& svg_path);

// gen-demos through adapt, plus the plot; aborts with the failing
// stage's name while keeping earlier artifacts in place.
void run_pipeline(const PipelineConfig& cfg);

// Deterministic SVG scatter of the clustered behavioral space: one
// marker per point colored by cluster, noise black, centroid rings.
std::string render_cluster_svg(const std::vector<ReducedDescriptor>& points,
                               const std::vector<int>& labels);

// Helpers shared by stages, the CLI and tests.
std::vector<std::string> split_csv_line(const std::string& line);
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path);  // skips # and header
double parse_double(const std::string& s);

struct EvalRow {
    std::string method;
    long long wins = 0;
    int episodes = 0;
    std::map<int, double> centroid_distances;
    std::vector<double> mean_produced;
    std::vector<double> std_produced;
};

// Fixed-behavior evaluation protocol shared by stage_eval and the
// acceptance suite: play `episodes` games, then localize the mean
// realized behavior against the demo corpus.
EvalRow evaluate_policy(const std::string& method, const MlpPolicy& policy,
                        const ReducedDescriptor* behavior, const EnvConfig& env, int episodes,
                        ActMode mode, const DemoSet& demos, const PcaModel& pca,
                        const std::map<int, ReducedDescriptor>& centroids, std::uint64_t seed);

}  // namespace bril
