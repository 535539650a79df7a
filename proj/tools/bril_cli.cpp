// Command-line front end for the behavioral-repertoire workflow.
// Subcommands mirror the pipeline stages; flags override config
// fields. Exit codes: 0 success, 2 config error, 3 stage failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bril/errors.hpp"
#include "bril/pipeline.hpp"

namespace {

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::string> env_config;
    std::optional<double> noise;
    std::optional<int> pca_p;
    std::optional<double> eps;
    std::optional<int> min_pts;
    std::optional<double> learning_rate;
    std::optional<int> batch_size;
    std::optional<int> epochs;
    std::optional<double> l2;
    std::optional<int> eval_episodes;
    std::optional<std::string> eval_mode;
    std::optional<int> adapt_episodes;
    std::optional<double> exploration;
    std::optional<int> max_options;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(bril::PipelineConfig& cfg, const CliOverrides& o) {
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.env_config) cfg.env_config_path = *o.env_config;
    if (o.noise) cfg.corpus_noise = *o.noise;
    if (o.pca_p) cfg.pca_p = *o.pca_p;
    if (o.eps) cfg.cluster.eps = *o.eps;
    if (o.min_pts) cfg.cluster.min_pts = *o.min_pts;
    if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
    if (o.batch_size) cfg.train.batch_size = *o.batch_size;
    if (o.epochs) cfg.train.epochs = *o.epochs;
    if (o.l2) cfg.train.l2 = *o.l2;
    if (o.eval_episodes) cfg.eval_episodes = *o.eval_episodes;
    if (o.eval_mode) {
        if (*o.eval_mode != "sample" && *o.eval_mode != "greedy")
            throw bril::ContractError("--mode must be sample or greedy");
        cfg.eval_mode = *o.eval_mode == "greedy" ? bril::ActMode::kGreedy : bril::ActMode::kSample;
    }
    if (o.adapt_episodes) cfg.adapt_episodes = *o.adapt_episodes;
    if (o.exploration) cfg.adapt_exploration = *o.exploration;
    if (o.max_options) cfg.max_options = *o.max_options;
    if (o.seed) cfg.seed = *o.seed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"behavioral repertoire imitation learning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides overrides;
    app.add_option("-c,--config", config_path, "pipeline config JSON");
    app.add_option("--out-dir", overrides.out_dir, "artifact directory");
    app.add_option("--env-config", overrides.env_config, "environment config JSON");
    app.add_option("--noise", overrides.noise, "demo generation action noise");
    app.add_option("--pca-p", overrides.pca_p, "reduced behavioral dimensions");
    app.add_option("--eps", overrides.eps, "DBSCAN epsilon");
    app.add_option("--min-pts", overrides.min_pts, "DBSCAN min points");
    app.add_option("--lr", overrides.learning_rate, "SGD learning rate");
    app.add_option("--batch", overrides.batch_size, "minibatch size");
    app.add_option("--epochs", overrides.epochs, "training epochs");
    app.add_option("--l2", overrides.l2, "L2 penalty");
    app.add_option("--episodes", overrides.eval_episodes, "episodes per evaluation");
    app.add_option("--mode", overrides.eval_mode, "action selection: sample|greedy");
    app.add_option("--adapt-episodes", overrides.adapt_episodes, "UCB1 adaptation episodes");
    app.add_option("--exploration", overrides.exploration, "UCB1 exploration constant C");
    app.add_option("--max-options", overrides.max_options, "behavior options (largest clusters)");
    auto* seed_opt = app.add_option("--seed", overrides.seed, "global random seed");

    auto* gen = app.add_subcommand("gen-demos", "generate a demonstration corpus");
    auto* extract = app.add_subcommand("extract", "compute raw behavioral descriptors");
    auto* reduce = app.add_subcommand("reduce", "fit PCA and project descriptors");
    auto* cluster = app.add_subcommand("cluster", "DBSCAN over the reduced space");
    auto* train_cmd = app.add_subcommand("train", "train IL, BRIL and per-cluster policies");
    auto* eval_cmd = app.add_subcommand("eval", "fixed-behavior evaluation episodes");
    auto* adapt = app.add_subcommand("adapt", "UCB1 adaptation over cluster centroids");
    auto* plot = app.add_subcommand("plot", "render the cluster map as SVG");
    auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");

    std::string plot_in, plot_out = "behavior_map.svg";
    plot->add_option("input", plot_in, "labels CSV")->required();
    plot->add_option("output", plot_out, "output SVG path");

    auto* write_cfg = app.add_subcommand("init-config", "write default config files");
    std::string init_dir = ".";
    write_cfg->add_option("dir", init_dir, "directory for default configs");

    CLI11_PARSE(app, argc, argv);

    bril::PipelineConfig cfg;
    try {
        if (!config_path.empty()) cfg = bril::load_pipeline_config(config_path);
        apply_overrides(cfg, overrides);
        if (pipeline->parsed() && seed_opt->count() == 0) {
            std::cerr << "error: pipeline requires an explicit --seed\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (gen->parsed()) bril::stage_gen_demos(cfg);
        else if (extract->parsed()) bril::stage_extract(cfg);
        else if (reduce->parsed()) bril::stage_reduce(cfg);
        else if (cluster->parsed()) bril::stage_cluster(cfg);
        else if (train_cmd->parsed()) bril::stage_train(cfg);
        else if (eval_cmd->parsed()) bril::stage_eval(cfg);
        else if (adapt->parsed()) bril::stage_adapt(cfg);
        else if (plot->parsed()) bril::stage_plot(plot_in, plot_out);
        else if (pipeline->parsed()) bril::run_pipeline(cfg);
        else if (write_cfg->parsed()) {
            bril::save_env_config(bril::default_env_config(), init_dir + "/env_default.json");
            bril::PipelineConfig defaults;
            defaults.env_config_path = init_dir + "/env_default.json";
            bril::save_pipeline_config(defaults, init_dir + "/pipeline_default.json");
            std::cout << "wrote " << init_dir << "/env_default.json and " << init_dir
                      << "/pipeline_default.json\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
