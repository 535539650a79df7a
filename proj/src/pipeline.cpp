#include "bril/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "bril/bandit.hpp"
#include "bril/errors.hpp"
#include "bril/evaluate.hpp"
#include "bril/io_util.hpp"
#include "bril/pca.hpp"

namespace bril {

namespace {

using ordered_json = nlohmann::ordered_json;

void ensure_out_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (!std::filesystem::is_directory(cfg.out_dir))
        throw IoError("cannot create output directory " + cfg.out_dir);
}

std::vector<RawDescriptor> read_descriptors(const std::string& path) {
    std::vector<RawDescriptor> out;
    for (const auto& row : read_csv_rows(path)) {
        RawDescriptor d;
        for (std::size_t i = 2; i < row.size(); ++i) d.ratios.push_back(parse_double(row[i]));
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<ReducedDescriptor> read_reduced(const std::string& path) {
    std::vector<ReducedDescriptor> out;
    for (const auto& row : read_csv_rows(path)) {
        ReducedDescriptor d;
        for (std::size_t i = 2; i < row.size(); ++i) d.coords.push_back(parse_double(row[i]));
        out.push_back(std::move(d));
    }
    return out;
}

std::pair<std::vector<ReducedDescriptor>, std::vector<int>> read_labels(const std::string& path) {
    std::vector<ReducedDescriptor> pts;
    std::vector<int> labels;
    for (const auto& row : read_csv_rows(path)) {
        if (row.size() < 3) throw ParseError("labels row needs index, coords, label", 0);
        ReducedDescriptor d;
        for (std::size_t i = 1; i + 1 < row.size(); ++i) d.coords.push_back(parse_double(row[i]));
        pts.push_back(std::move(d));
        labels.push_back(static_cast<int>(std::llround(parse_double(row.back()))));
    }
    return {std::move(pts), std::move(labels)};
}

// Cluster sizes, largest first (ties toward the lower label); used to
// pick the default behavior options.
std::vector<std::pair<int, int>> clusters_by_size(const std::vector<int>& labels) {
    std::map<int, int> sizes;
    for (int l : labels)
        if (l >= 0) sizes[l] += 1;
    std::vector<std::pair<int, int>> order(sizes.begin(), sizes.end());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return order;
}

std::vector<std::pair<int, ReducedDescriptor>> option_centroids(
    const PipelineConfig& cfg, const std::vector<int>& labels,
    const std::map<int, ReducedDescriptor>& cents) {
    std::vector<std::pair<int, ReducedDescriptor>> options;
    for (const auto& [label, size] : clusters_by_size(labels)) {
        if (static_cast<int>(options.size()) >= cfg.max_options) break;
        options.emplace_back(label, cents.at(label));
    }
    return options;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

double parse_double(const std::string& s) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("bad numeric field '" + s + "'", 0);
    return value;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what(), 1);
    }
    PipelineConfig cfg;
    try {
        if (j.value("format_version", -1) != 1)
            throw SchemaError("unsupported pipeline config format_version");
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.env_config_path = j.value("env_config", cfg.env_config_path);
        if (j.contains("corpus")) {
            const auto& c = j.at("corpus");
            if (c.contains("archetypes")) {
                cfg.corpus_archetypes.clear();
                for (const auto& a : c.at("archetypes"))
                    cfg.corpus_archetypes.emplace_back(a.at(0).get<std::string>(),
                                                       a.at(1).get<int>());
            }
            cfg.corpus_noise = c.value("noise", cfg.corpus_noise);
        }
        if (j.contains("pca")) cfg.pca_p = j.at("pca").value("p", cfg.pca_p);
        if (j.contains("cluster")) {
            cfg.cluster.eps = j.at("cluster").value("eps", cfg.cluster.eps);
            cfg.cluster.min_pts = j.at("cluster").value("min_pts", cfg.cluster.min_pts);
        }
        if (j.contains("split")) {
            cfg.split.train = j.at("split").value("train", cfg.split.train);
            cfg.split.val = j.at("split").value("val", cfg.split.val);
            cfg.split.test = j.at("split").value("test", cfg.split.test);
        }
        if (j.contains("train")) {
            const auto& t = j.at("train");
            cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
            cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
            cfg.train.epochs = t.value("epochs", cfg.train.epochs);
            cfg.train.l2 = t.value("l2", cfg.train.l2);
        }
        if (j.contains("eval")) {
            cfg.eval_episodes = j.at("eval").value("episodes", cfg.eval_episodes);
            const std::string mode = j.at("eval").value("mode", std::string("sample"));
            if (mode != "sample" && mode != "greedy") throw SchemaError("eval mode must be sample or greedy");
            cfg.eval_mode = mode == "greedy" ? ActMode::kGreedy : ActMode::kSample;
        }
        if (j.contains("adapt")) {
            const auto& a = j.at("adapt");
            cfg.adapt_episodes = a.value("episodes", cfg.adapt_episodes);
            cfg.adapt_exploration = a.value("exploration", cfg.adapt_exploration);
            cfg.max_options = a.value("max_options", cfg.max_options);
        }
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("pipeline config: ") + e.what());
    }
    return cfg;
}

void save_pipeline_config(const PipelineConfig& cfg, const std::string& path) {
    ordered_json j;
    j["format_version"] = 1;
    j["out_dir"] = cfg.out_dir;
    j["env_config"] = cfg.env_config_path;
    auto& corpus = j["corpus"];
    auto& arch = corpus["archetypes"] = ordered_json::array();
    for (const auto& [id, count] : cfg.corpus_archetypes) arch.push_back({id, count});
    corpus["noise"] = cfg.corpus_noise;
    j["pca"]["p"] = cfg.pca_p;
    j["cluster"]["eps"] = cfg.cluster.eps;
    j["cluster"]["min_pts"] = cfg.cluster.min_pts;
    j["split"]["train"] = cfg.split.train;
    j["split"]["val"] = cfg.split.val;
    j["split"]["test"] = cfg.split.test;
    j["train"]["learning_rate"] = cfg.train.learning_rate;
    j["train"]["batch_size"] = cfg.train.batch_size;
    j["train"]["epochs"] = cfg.train.epochs;
    j["train"]["l2"] = cfg.train.l2;
    j["eval"]["episodes"] = cfg.eval_episodes;
    j["eval"]["mode"] = cfg.eval_mode == ActMode::kGreedy ? "greedy" : "sample";
    j["adapt"]["episodes"] = cfg.adapt_episodes;
    j["adapt"]["exploration"] = cfg.adapt_exploration;
    j["adapt"]["max_options"] = cfg.max_options;
    j["seed"] = cfg.seed;
    write_file_atomic(path, j.dump(2) + "\n");
}

EnvConfig pipeline_env(const PipelineConfig& cfg) {
    if (cfg.env_config_path.empty()) return default_env_config();
    return load_env_config(cfg.env_config_path);
}

void stage_gen_demos(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const EnvConfig env = pipeline_env(cfg);
    DemoSet set = generate_demoset(cfg.corpus_archetypes, env, cfg.corpus_noise,
                                   mix_seed(cfg.seed, "gen-demos"));
    save_demoset(set, cfg.demos_path());
}

void stage_extract(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const DemoSet set = load_demoset(cfg.demos_path());
    std::vector<std::string> cols = {"index", "demo_id"};
    for (const auto& name : set.schema.unit_types) cols.push_back("ratio_" + name);
    std::string csv = csv_preamble(1, cols);
    for (std::size_t i = 0; i < set.demos.size(); ++i) {
        const RawDescriptor d = compute_descriptor(set.demos[i]);
        std::vector<std::string> cells = {std::to_string(i), set.demos[i].id};
        for (double r : d.ratios) cells.push_back(format_double(r));
        csv += join_csv_row(cells);
    }
    write_file_atomic(cfg.descriptors_path(), csv);
}

void stage_reduce(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const DemoSet set = load_demoset(cfg.demos_path());
    const std::vector<RawDescriptor> descriptors = read_descriptors(cfg.descriptors_path());
    if (descriptors.size() != set.demos.size())
        throw SchemaError("descriptors.csv does not match demos.jsonl");
    const PcaModel model = fit_pca(descriptors, cfg.pca_p);
    save_pca(model, cfg.pca_path());

    std::vector<std::string> cols = {"index", "demo_id"};
    for (int c = 0; c < cfg.pca_p; ++c) cols.push_back("b" + std::to_string(c));
    std::string csv = csv_preamble(1, cols);
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        const ReducedDescriptor r = project(model, descriptors[i]);
        std::vector<std::string> cells = {std::to_string(i), set.demos[i].id};
        for (double x : r.coords) cells.push_back(format_double(x));
        csv += join_csv_row(cells);
    }
    write_file_atomic(cfg.reduced_path(), csv);
}

void stage_cluster(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const std::vector<ReducedDescriptor> points = read_reduced(cfg.reduced_path());
    const ClusterLabels labels = dbscan(points, cfg.cluster);
    write_file_atomic(cfg.labels_path(), labels_to_csv(points, labels));

    const auto cents = centroids(points, labels);
    std::map<int, int> sizes;
    for (int l : labels.labels)
        if (l >= 0) sizes[l] += 1;
    const std::size_t dim = points.empty() ? 2 : points[0].coords.size();
    std::vector<std::string> cols = {"label"};
    for (std::size_t c = 0; c < dim; ++c) cols.push_back("x" + std::to_string(c));
    cols.push_back("size");
    std::string csv = csv_preamble(1, cols);
    for (const auto& [label, c] : cents) {
        std::vector<std::string> cells = {std::to_string(label)};
        for (double x : c.coords) cells.push_back(format_double(x));
        cells.push_back(std::to_string(sizes[label]));
        csv += join_csv_row(cells);
    }
    write_file_atomic(cfg.centroids_path(), csv);
}

namespace {

struct TrainedMethod {
    std::string method;
    std::size_t rows = 0;
    TrainReport report;
};

}  // namespace

void stage_train(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const DemoSet set = load_demoset(cfg.demos_path());
    const std::vector<ReducedDescriptor> reduced = read_reduced(cfg.reduced_path());
    auto [points, labels] = read_labels(cfg.labels_path());
    if (reduced.size() != set.demos.size() || labels.size() != set.demos.size())
        throw SchemaError("reduced/labels artifacts do not match demos.jsonl");

    SplitSpec split_spec = cfg.split;
    split_spec.seed = mix_seed(cfg.seed, "split");
    // The split keeps demos aligned with their behaviors by splitting
    // indices, not sets.
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < set.demos.size(); ++i) index_of[set.demos[i].id] = i;
    const DemoSplit split = split_per_cluster(set, labels, split_spec);

    auto behaviors_for = [&](const DemoSet& subset) {
        std::vector<ReducedDescriptor> out;
        for (const auto& d : subset.demos) out.push_back(reduced[index_of.at(d.id)]);
        return out;
    };
    auto labels_for = [&](const DemoSet& subset) {
        std::vector<int> out;
        for (const auto& d : subset.demos) out.push_back(labels[index_of.at(d.id)]);
        return out;
    };

    std::vector<TrainedMethod> report_rows;
    const int action_count = set.schema.action_count;

    auto train_method = [&](const std::string& method, const std::vector<TrainingRow>& rows,
                            const std::vector<TrainingRow>& test_rows, int behavior_dim,
                            const char* seed_tag) {
        TrainConfig tc = cfg.train;
        tc.seed = mix_seed(cfg.seed, seed_tag);
        auto [policy, report] = train(rows, tc, test_rows, behavior_dim, action_count);
        save_policy(policy, cfg.policy_path(method));
        report_rows.push_back({method, rows.size(), std::move(report)});
    };

    train_method("il", flatten(split.train), flatten(split.test), 0, "train-il");

    const auto train_behaviors = behaviors_for(split.train);
    const auto test_behaviors = behaviors_for(split.test);
    train_method("bril", flatten(split.train, &train_behaviors),
                 flatten(split.test, &test_behaviors), cfg.pca_p, "train-bril");

    // One plain-IL baseline per cluster, trained only on that cluster.
    const auto train_labels = labels_for(split.train);
    const auto test_labels = labels_for(split.test);
    std::map<int, int> cluster_sizes;
    for (int l : labels)
        if (l >= 0) cluster_sizes[l] += 1;
    for (const auto& [label, size] : cluster_sizes) {
        DemoSet sub_train, sub_test;
        sub_train.schema = sub_test.schema = set.schema;
        for (std::size_t i = 0; i < split.train.demos.size(); ++i)
            if (train_labels[i] == label) sub_train.demos.push_back(split.train.demos[i]);
        for (std::size_t i = 0; i < split.test.demos.size(); ++i)
            if (test_labels[i] == label) sub_test.demos.push_back(split.test.demos[i]);
        if (sub_train.demos.empty()) continue;
        train_method("cluster_" + std::to_string(label), flatten(sub_train), flatten(sub_test), 0,
                     ("train-cluster-" + std::to_string(label)).c_str());
    }

    std::string report_csv =
        csv_preamble(1, {"method", "train_rows", "test_accuracy", "test_loss"});
    std::string loss_csv = csv_preamble(1, {"method", "epoch", "loss"});
    for (const auto& row : report_rows) {
        report_csv += join_csv_row({row.method, std::to_string(row.rows),
                                    format_double(row.report.test_accuracy),
                                    format_double(row.report.test_loss)});
        for (std::size_t e = 0; e < row.report.epoch_loss.size(); ++e)
            loss_csv += join_csv_row(
                {row.method, std::to_string(e), format_double(row.report.epoch_loss[e])});
    }
    write_file_atomic(cfg.train_report_path(), report_csv);
    write_file_atomic(cfg.epoch_loss_path(), loss_csv);
}

EvalRow evaluate_policy(const std::string& method, const MlpPolicy& policy,
                        const ReducedDescriptor* behavior, const EnvConfig& env, int episodes,
                        ActMode mode, const DemoSet& demos, const PcaModel& pca,
                        const std::map<int, ReducedDescriptor>& cents, std::uint64_t seed) {
    if (episodes < 1) throw ContractError("evaluate_policy: episodes must be >= 1");
    EvalRow row;
    row.method = method;
    row.episodes = episodes;
    std::vector<EpisodeResult> results;
    results.reserve(episodes);
    std::optional<ReducedDescriptor> b;
    if (behavior) b = *behavior;
    for (int e = 0; e < episodes; ++e) {
        Rng act_rng(mix_seed(seed, "eval-act", static_cast<std::uint64_t>(e)));
        Controller controller = [&](const StateVector& obs) {
            return act(policy, obs, b, mode, act_rng);
        };
        EpisodeResult ep =
            run_episode(controller, env, mix_seed(seed, "eval-env", static_cast<std::uint64_t>(e)));
        if (ep.win) row.wins += 1;
        results.push_back(std::move(ep));
    }

    const RawDescriptor mean = mean_behavior(results);
    const BehaviorEstimate est = localize(mean, demos, pca);
    row.centroid_distances = centroid_distances(est.coords, cents);

    const std::size_t k = results[0].produced_counts.size();
    row.mean_produced.assign(k, 0.0);
    row.std_produced.assign(k, 0.0);
    for (const auto& ep : results)
        for (std::size_t i = 0; i < k; ++i) row.mean_produced[i] += ep.produced_counts[i];
    for (double& m : row.mean_produced) m /= episodes;
    if (episodes > 1) {
        for (const auto& ep : results)
            for (std::size_t i = 0; i < k; ++i) {
                const double d = ep.produced_counts[i] - row.mean_produced[i];
                row.std_produced[i] += d * d;
            }
        for (double& s : row.std_produced) s = std::sqrt(s / (episodes - 1));  // sample std
    }
    return row;
}

namespace {

std::string eval_rows_to_csv(const std::vector<EvalRow>& rows,
                             const std::vector<int>& option_labels,
                             const std::vector<std::string>& unit_names) {
    std::vector<std::string> cols = {"method", "wins", "episodes"};
    for (int label : option_labels) cols.push_back("dist_C" + std::to_string(label));
    for (const auto& name : unit_names) cols.push_back("mean_" + name);
    for (const auto& name : unit_names) cols.push_back("std_" + name);
    std::string csv = csv_preamble(1, cols);
    for (const auto& row : rows) {
        std::vector<std::string> cells = {row.method, std::to_string(row.wins),
                                          std::to_string(row.episodes)};
        for (int label : option_labels)
            cells.push_back(format_double(row.centroid_distances.at(label)));
        for (double m : row.mean_produced) cells.push_back(format_double(m));
        for (double s : row.std_produced) cells.push_back(format_double(s));
        csv += join_csv_row(cells);
    }
    return csv;
}

}  // namespace

void stage_eval(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const EnvConfig env = pipeline_env(cfg);
    const DemoSet set = load_demoset(cfg.demos_path());
    const PcaModel pca = load_pca(cfg.pca_path());
    auto [points, labels] = read_labels(cfg.labels_path());
    const auto cents = centroids(points, ClusterLabels{labels, 0});
    const auto options = option_centroids(cfg, labels, cents);

    std::map<int, ReducedDescriptor> option_cents;
    std::vector<int> option_labels;
    for (const auto& [label, c] : options) {
        option_cents[label] = c;
        option_labels.push_back(label);
    }

    std::vector<EvalRow> rows;
    const MlpPolicy il = load_policy(cfg.policy_path("il"));
    rows.push_back(evaluate_policy("il", il, nullptr, env, cfg.eval_episodes, cfg.eval_mode, set,
                                   pca, option_cents, mix_seed(cfg.seed, "eval-il")));

    for (const auto& [label, c] : options) {
        const std::string name = "cluster_" + std::to_string(label);
        if (!std::filesystem::exists(cfg.policy_path(name))) continue;
        const MlpPolicy cluster_policy = load_policy(cfg.policy_path(name));
        rows.push_back(evaluate_policy("il_C" + std::to_string(label), cluster_policy, nullptr,
                                       env, cfg.eval_episodes, cfg.eval_mode, set, pca,
                                       option_cents, mix_seed(cfg.seed, "eval-" + name)));
    }

    const MlpPolicy bril = load_policy(cfg.policy_path("bril"));
    for (const auto& [label, c] : options) {
        rows.push_back(evaluate_policy("bril_C" + std::to_string(label), bril, &c, env,
                                       cfg.eval_episodes, cfg.eval_mode, set, pca, option_cents,
                                       mix_seed(cfg.seed, "eval-bril-" + std::to_string(label))));
    }

    write_file_atomic(cfg.evaluation_path(), eval_rows_to_csv(rows, option_labels, env.unit_names()));
}

void stage_adapt(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const EnvConfig env = pipeline_env(cfg);
    auto [points, labels] = read_labels(cfg.labels_path());
    const auto cents = centroids(points, ClusterLabels{labels, 0});
    const auto options = option_centroids(cfg, labels, cents);
    if (options.empty()) throw SchemaError("adapt: no clusters available as options");

    std::vector<ReducedDescriptor> arms;
    for (const auto& [label, c] : options) arms.push_back(c);

    const MlpPolicy bril = load_policy(cfg.policy_path("bril"));
    const AdaptationResult result = run_adaptation(bril, arms, cfg.adapt_episodes, env,
                                                   cfg.adapt_exploration, mix_seed(cfg.seed, "adapt"));

    write_file_atomic(cfg.adaptation_log_path(), adaptation_log_to_csv(result));

    std::string csv = csv_preamble(1, {"option", "cluster", "plays", "wins"});
    for (std::size_t j = 0; j < arms.size(); ++j)
        csv += join_csv_row({std::to_string(j), "C" + std::to_string(options[j].first),
                             std::to_string(result.plays[j]), std::to_string(result.wins[j])});
    csv += join_csv_row({"total", "", std::to_string(cfg.adapt_episodes),
                         std::to_string(result.total_wins)});
    write_file_atomic(cfg.adaptation_summary_path(), csv);
}

void stage_plot(const std::string& labels_csv_path, const std::string& svg_path) {
    auto [points, labels] = read_labels(labels_csv_path);
    write_file_atomic(svg_path, render_cluster_svg(points, labels));
}

void run_pipeline(const PipelineConfig& cfg) {
    struct Stage {
        const char* name;
        void (*fn)(const PipelineConfig&);
    };
    const Stage stages[] = {
        {"gen-demos", stage_gen_demos}, {"extract", stage_extract}, {"reduce", stage_reduce},
        {"cluster", stage_cluster},     {"train", stage_train},     {"eval", stage_eval},
        {"adapt", stage_adapt},
    };
    for (const auto& stage : stages) {
        try {
            stage.fn(cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("stage ") + stage.name + " failed: " + e.what());
        }
    }
    try {
        stage_plot(cfg.labels_path(), cfg.plot_path());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage plot failed: ") + e.what());
    }
}

std::string render_cluster_svg(const std::vector<ReducedDescriptor>& points,
                               const std::vector<int>& labels) {
    if (points.size() != labels.size())
        throw ContractError("render_cluster_svg: points/labels mismatch");
    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    constexpr int kPaletteSize = 10;
    constexpr double kCanvas = 640.0;
    constexpr double kMargin = 48.0;

    double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
    if (!points.empty()) {
        min_x = max_x = points[0].coords[0];
        min_y = max_y = points[0].coords.size() > 1 ? points[0].coords[1] : 0.0;
        for (const auto& p : points) {
            const double x = p.coords[0];
            const double y = p.coords.size() > 1 ? p.coords[1] : 0.0;
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
        if (max_x - min_x < 1e-12) max_x = min_x + 1.0;
        if (max_y - min_y < 1e-12) max_y = min_y + 1.0;
    }
    const double span = kCanvas - 2.0 * kMargin;
    auto sx = [&](double x) { return kMargin + (x - min_x) / (max_x - min_x) * span; };
    auto sy = [&](double y) { return kCanvas - kMargin - (y - min_y) / (max_y - min_y) * span; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    svg += "<rect width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int label = labels[i];
        const char* color = label < 0 ? "#000000" : kPalette[label % kPaletteSize];
        svg += "<circle cx=\"" + format_double(sx(points[i].coords[0])) + "\" cy=\"" +
               format_double(sy(points[i].coords.size() > 1 ? points[i].coords[1] : 0.0)) +
               "\" r=\"3\" fill=\"" + color + "\" fill-opacity=\"0.7\"/>\n";
    }
    // Centroid rings with the cluster number.
    std::map<int, ReducedDescriptor> cents;
    if (!points.empty()) cents = centroids(points, ClusterLabels{labels, 0});
    for (const auto& [label, c] : cents) {
        const double cx = sx(c.coords[0]);
        const double cy = sy(c.coords.size() > 1 ? c.coords[1] : 0.0);
        svg += "<circle cx=\"" + format_double(cx) + "\" cy=\"" + format_double(cy) +
               "\" r=\"9\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + format_double(cx + 11.0) + "\" y=\"" + format_double(cy + 4.0) +
               "\" font-family=\"monospace\" font-size=\"12\">" + std::to_string(label) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace bril
