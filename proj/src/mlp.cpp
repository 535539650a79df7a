#include "bril/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "bril/errors.hpp"
#include "bril/io_util.hpp"

namespace bril {

namespace {

void check_finite(std::span<const double> input) {
    for (double x : input)
        if (!std::isfinite(x)) throw ContractError("non-finite input entry");
}

// Row-major batch matmul: Y[b,o] = X[b,i] * W[i,o] + bias[o].
// Weight rows are the outer loop so each is loaded once per batch;
// four rows are fused per pass to cut the Y-row traffic. The fused
// body accumulates in ascending i order, so results are identical to
// the plain loop.
void affine_forward(const double* x, int batch, const MlpPolicy::Layer& layer, double* y) {
    const int in = layer.in, out = layer.out;
    for (int b = 0; b < batch; ++b) {
        double* yb = y + static_cast<std::size_t>(b) * out;
        for (int o = 0; o < out; ++o) yb[o] = layer.b[o];
    }
    const double* w = layer.w.data();
    int i = 0;
    for (; i + 4 <= in; i += 4) {
        const double* w0 = w + static_cast<std::size_t>(i) * out;
        const double* w1 = w0 + out;
        const double* w2 = w1 + out;
        const double* w3 = w2 + out;
        for (int b = 0; b < batch; ++b) {
            const double* xb = x + static_cast<std::size_t>(b) * in + i;
            const double x0 = xb[0], x1 = xb[1], x2 = xb[2], x3 = xb[3];
            if (x0 == 0.0 && x1 == 0.0 && x2 == 0.0 && x3 == 0.0) continue;
            double* yb = y + static_cast<std::size_t>(b) * out;
            for (int o = 0; o < out; ++o)
                yb[o] = ((((yb[o] + x0 * w0[o]) + x1 * w1[o]) + x2 * w2[o]) + x3 * w3[o]);
        }
    }
    for (; i < in; ++i) {
        const double* wrow = w + static_cast<std::size_t>(i) * out;
        for (int b = 0; b < batch; ++b) {
            const double xi = x[static_cast<std::size_t>(b) * in + i];
            if (xi == 0.0) continue;
            double* yb = y + static_cast<std::size_t>(b) * out;
            for (int o = 0; o < out; ++o) yb[o] += xi * wrow[o];
        }
    }
}

void softmax_rows(double* z, int batch, int width) {
    for (int b = 0; b < batch; ++b) {
        double* row = z + static_cast<std::size_t>(b) * width;
        double mx = row[0];
        for (int o = 1; o < width; ++o) mx = std::max(mx, row[o]);
        double sum = 0.0;
        for (int o = 0; o < width; ++o) {
            row[o] = std::exp(row[o] - mx);
            sum += row[o];
        }
        for (int o = 0; o < width; ++o) row[o] /= sum;
    }
}

// Scratch buffers for one batch pass through the network.
struct Workspace {
    std::vector<std::vector<double>> act;    // act[l]: input to layer l (act[0] = X)
    std::vector<std::vector<double>> delta;  // delta[l]: dLoss/dZ of layer l
    void resize(const MlpPolicy& policy, int batch) {
        act.resize(policy.layers.size() + 1);
        delta.resize(policy.layers.size());
        act[0].resize(static_cast<std::size_t>(batch) * policy.input_dim);
        for (std::size_t l = 0; l < policy.layers.size(); ++l) {
            act[l + 1].resize(static_cast<std::size_t>(batch) * policy.layers[l].out);
            delta[l].resize(static_cast<std::size_t>(batch) * policy.layers[l].out);
        }
    }
};

// Forward through all layers; leaves post-activation values in ws.act
// and the softmax distribution in ws.act.back(). Returns mean CE given
// the target actions (or 0 if actions is null).
double batch_forward(const MlpPolicy& policy, Workspace& ws, int batch, const int* actions) {
    const std::size_t last = policy.layers.size() - 1;
    for (std::size_t l = 0; l < policy.layers.size(); ++l) {
        affine_forward(ws.act[l].data(), batch, policy.layers[l], ws.act[l + 1].data());
        if (l < last) {
            for (double& v : ws.act[l + 1]) v = v > 0.0 ? v : 0.0;  // rectifier
        }
    }
    softmax_rows(ws.act[last + 1].data(), batch, policy.action_count);
    if (!actions) return 0.0;
    double loss = 0.0;
    for (int b = 0; b < batch; ++b) {
        const double p = ws.act[last + 1][static_cast<std::size_t>(b) * policy.action_count + actions[b]];
        loss += -std::log(std::max(p, 1e-300));
    }
    return loss / batch;
}

// Gradients of mean cross-entropy; accumulates into gw/gb (zeroed here).
void batch_backward(const MlpPolicy& policy, Workspace& ws, int batch, const int* actions,
                    std::vector<std::vector<double>>& gw, std::vector<std::vector<double>>& gb) {
    const std::size_t L = policy.layers.size();
    const int ac = policy.action_count;
    // dLoss/dZ_last = (softmax - onehot) / batch
    auto& dlast = ws.delta[L - 1];
    const auto& probs = ws.act[L];
    for (int b = 0; b < batch; ++b)
        for (int o = 0; o < ac; ++o) {
            const std::size_t idx = static_cast<std::size_t>(b) * ac + o;
            dlast[idx] = (probs[idx] - (o == actions[b] ? 1.0 : 0.0)) / batch;
        }
    for (std::size_t l = L; l-- > 0;) {
        const auto& layer = policy.layers[l];
        gw[l].assign(layer.w.size(), 0.0);
        gb[l].assign(layer.b.size(), 0.0);
        const auto& delta = ws.delta[l];
        const auto& input = ws.act[l];
        for (int b = 0; b < batch; ++b) {
            const double* db = delta.data() + static_cast<std::size_t>(b) * layer.out;
            for (int o = 0; o < layer.out; ++o) gb[l][o] += db[o];
        }
        // dW[i,o] = sum_b X[b,i] * delta[b,o]; two batch rows fused per
        // pass (ascending b order, so results match the plain loop).
        for (int i = 0; i < layer.in; ++i) {
            double* grow = gw[l].data() + static_cast<std::size_t>(i) * layer.out;
            int b = 0;
            for (; b + 2 <= batch; b += 2) {
                const double x0 = input[static_cast<std::size_t>(b) * layer.in + i];
                const double x1 = input[static_cast<std::size_t>(b + 1) * layer.in + i];
                if (x0 == 0.0 && x1 == 0.0) continue;
                const double* d0 = delta.data() + static_cast<std::size_t>(b) * layer.out;
                const double* d1 = d0 + layer.out;
                for (int o = 0; o < layer.out; ++o)
                    grow[o] = (grow[o] + x0 * d0[o]) + x1 * d1[o];
            }
            for (; b < batch; ++b) {
                const double xi = input[static_cast<std::size_t>(b) * layer.in + i];
                if (xi == 0.0) continue;
                const double* db = delta.data() + static_cast<std::size_t>(b) * layer.out;
                for (int o = 0; o < layer.out; ++o) grow[o] += xi * db[o];
            }
        }
        if (l == 0) break;
        // dLoss/dZ_{l-1} = (delta_l . W_l^T) masked by the rectifier.
        // Four independent dot products run at once to hide FMA
        // latency (reductions are not auto-vectorized at strict FP).
        auto& dprev = ws.delta[l - 1];
        const auto& act_prev = ws.act[l];  // post-activation of layer l-1
        for (int b = 0; b < batch; ++b) {
            const double* db = delta.data() + static_cast<std::size_t>(b) * layer.out;
            const double* ap = act_prev.data() + static_cast<std::size_t>(b) * layer.in;
            double* dp = dprev.data() + static_cast<std::size_t>(b) * layer.in;
            int i = 0;
            for (; i + 4 <= layer.in; i += 4) {
                const double* w0 = layer.w.data() + static_cast<std::size_t>(i) * layer.out;
                const double* w1 = w0 + layer.out;
                const double* w2 = w1 + layer.out;
                const double* w3 = w2 + layer.out;
                double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
                for (int o = 0; o < layer.out; ++o) {
                    const double d = db[o];
                    a0 += d * w0[o];
                    a1 += d * w1[o];
                    a2 += d * w2[o];
                    a3 += d * w3[o];
                }
                dp[i] = ap[i] > 0.0 ? a0 : 0.0;
                dp[i + 1] = ap[i + 1] > 0.0 ? a1 : 0.0;
                dp[i + 2] = ap[i + 2] > 0.0 ? a2 : 0.0;
                dp[i + 3] = ap[i + 3] > 0.0 ? a3 : 0.0;
            }
            for (; i < layer.in; ++i) {
                if (ap[i] <= 0.0) {
                    dp[i] = 0.0;
                    continue;
                }
                const double* wrow = layer.w.data() + static_cast<std::size_t>(i) * layer.out;
                double acc = 0.0;
                for (int o = 0; o < layer.out; ++o) acc += db[o] * wrow[o];
                dp[i] = acc;
            }
        }
    }
}

void fill_batch(const std::vector<TrainingRow>& rows, const std::vector<std::size_t>& order,
                std::size_t start, int batch, Workspace& ws, std::vector<int>& actions) {
    const std::size_t dim = rows[0].input.size();
    actions.resize(batch);
    for (int b = 0; b < batch; ++b) {
        const auto& row = rows[order[start + b]];
        std::copy(row.input.begin(), row.input.end(),
                  ws.act[0].begin() + static_cast<std::size_t>(b) * dim);
        actions[b] = row.action;
    }
}

}  // namespace

MlpPolicy init_policy(int input_dim, int action_count, std::uint64_t seed, int behavior_dim) {
    if (input_dim < 1 || action_count < 1) throw ContractError("init_policy: dims must be >= 1");
    if (behavior_dim < 0 || behavior_dim >= input_dim)
        throw ContractError("init_policy: behavior_dim must be in [0, input_dim)");
    MlpPolicy policy;
    policy.mode = behavior_dim > 0 ? PolicyMode::kBril : PolicyMode::kIl;
    policy.input_dim = input_dim;
    policy.action_count = action_count;
    policy.behavior_dim = behavior_dim;

    std::vector<int> sizes = {input_dim};
    for (int l = 0; l < kHiddenLayers; ++l) sizes.push_back(kHiddenWidth);
    sizes.push_back(action_count);

    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        MlpPolicy::Layer layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        layer.b.assign(layer.out, 0.0);
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (double& w : layer.w) w = rng.uniform_range(-bound, bound);
        policy.layers.push_back(std::move(layer));
    }
    return policy;
}

std::vector<double> forward(const MlpPolicy& policy, std::span<const double> input) {
    if (static_cast<int>(input.size()) != policy.input_dim)
        throw ContractError("forward: input length != input_dim");
    check_finite(input);
    static thread_local Workspace ws;
    ws.resize(policy, 1);
    std::copy(input.begin(), input.end(), ws.act[0].begin());
    batch_forward(policy, ws, 1, nullptr);
    return ws.act.back();
}

std::pair<double, double> evaluate_rows(const MlpPolicy& policy,
                                        const std::vector<TrainingRow>& rows) {
    if (rows.empty()) return {0.0, 0.0};
    std::size_t correct = 0;
    double loss = 0.0;
    for (const auto& row : rows) {
        const auto dist = forward(policy, row.input);
        int arg = 0;
        for (int o = 1; o < policy.action_count; ++o)
            if (dist[o] > dist[arg]) arg = o;
        if (arg == row.action) ++correct;
        loss += -std::log(std::max(dist[row.action], 1e-300));
    }
    return {static_cast<double>(correct) / rows.size(), loss / rows.size()};
}

std::pair<MlpPolicy, TrainReport> train(const std::vector<TrainingRow>& rows,
                                        const TrainConfig& cfg,
                                        const std::vector<TrainingRow>& test_rows,
                                        int behavior_dim, int action_count) {
    if (rows.empty()) throw ContractError("train: empty row set");
    if (cfg.learning_rate <= 0.0 || cfg.learning_rate >= 1.0)
        throw ContractError("train: learning_rate must be in (0, 1)");
    if (cfg.batch_size < 1 || cfg.epochs < 1) throw ContractError("train: bad batch/epoch config");
    if (cfg.l2 < 0.0) throw ContractError("train: l2 must be >= 0");
    const std::size_t dim = rows[0].input.size();
    int max_action = 0;
    for (const auto& row : rows) {
        if (row.input.size() != dim) throw ContractError("train: inconsistent input width");
        if (row.action < 0) throw ContractError("train: negative action id");
        max_action = std::max(max_action, row.action + 1);
    }
    for (const auto& row : test_rows) {
        if (row.input.size() != dim) throw ContractError("train: test input width mismatch");
        max_action = std::max(max_action, row.action + 1);
    }
    if (action_count == 0) action_count = max_action;
    if (action_count < max_action) throw ContractError("train: action id outside action_count");

    MlpPolicy policy = init_policy(static_cast<int>(dim), action_count,
                                   mix_seed(cfg.seed, "mlp-init"), behavior_dim);
    Rng shuffle_rng(mix_seed(cfg.seed, "mlp-shuffle"));

    Workspace ws;
    ws.resize(policy, cfg.batch_size);
    std::vector<std::vector<double>> gw(policy.layers.size()), gb(policy.layers.size());
    std::vector<int> actions;
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < rows.size(); start += cfg.batch_size) {
            const int batch = static_cast<int>(std::min<std::size_t>(cfg.batch_size, rows.size() - start));
            fill_batch(rows, order, start, batch, ws, actions);
            const double batch_loss = batch_forward(policy, ws, batch, actions.data());
            batch_backward(policy, ws, batch, actions.data(), gw, gb);
            for (std::size_t l = 0; l < policy.layers.size(); ++l) {
                auto& layer = policy.layers[l];
                const double lr = cfg.learning_rate;
                if (cfg.l2 > 0.0) {
                    for (std::size_t k = 0; k < layer.w.size(); ++k)
                        layer.w[k] -= lr * (gw[l][k] + cfg.l2 * layer.w[k]);
                } else {
                    for (std::size_t k = 0; k < layer.w.size(); ++k) layer.w[k] -= lr * gw[l][k];
                }
                for (std::size_t k = 0; k < layer.b.size(); ++k) layer.b[k] -= lr * gb[l][k];
            }
            loss_sum += batch_loss * batch;
            seen += batch;
        }
        report.epoch_loss.push_back(loss_sum / static_cast<double>(seen));
    }
    std::tie(report.test_accuracy, report.test_loss) = evaluate_rows(policy, test_rows);
    return {std::move(policy), std::move(report)};
}

double gradient_check(const MlpPolicy& policy, const TrainingRow& row, std::uint64_t seed,
                      int samples) {
    if (static_cast<int>(row.input.size()) != policy.input_dim)
        throw ContractError("gradient_check: input length mismatch");
    if (row.action < 0 || row.action >= policy.action_count)
        throw ContractError("gradient_check: bad action");

    Workspace ws;
    ws.resize(policy, 1);
    std::vector<std::vector<double>> gw(policy.layers.size()), gb(policy.layers.size());
    std::vector<int> actions = {row.action};
    std::copy(row.input.begin(), row.input.end(), ws.act[0].begin());
    batch_forward(policy, ws, 1, actions.data());
    batch_backward(policy, ws, 1, actions.data(), gw, gb);

    // Pre-activations of the rectifier layers; a parameter whose
    // perturbation would push its unit across the kink at 0 is not
    // finite-difference checkable and gets resampled.
    const std::size_t L = policy.layers.size();
    std::vector<std::vector<double>> pre(L);
    {
        std::vector<double> cur = row.input;
        for (std::size_t l = 0; l < L; ++l) {
            const auto& layer = policy.layers[l];
            std::vector<double> z(layer.b);
            for (int i = 0; i < layer.in; ++i) {
                if (cur[i] == 0.0) continue;
                for (int o = 0; o < layer.out; ++o)
                    z[o] += cur[i] * layer.w[static_cast<std::size_t>(i) * layer.out + o];
            }
            pre[l] = z;
            if (l + 1 < L)
                for (double& v : z) v = v > 0.0 ? v : 0.0;
            cur = std::move(z);
        }
    }

    MlpPolicy probe = policy;
    auto loss_at = [&](const MlpPolicy& p) {
        Workspace w2;
        w2.resize(p, 1);
        std::copy(row.input.begin(), row.input.end(), w2.act[0].begin());
        return batch_forward(p, w2, 1, actions.data());
    };

    std::size_t total = 0;
    for (const auto& layer : policy.layers) total += layer.w.size() + layer.b.size();
    Rng rng(mix_seed(seed, "gradcheck"));

    const double h = 1e-5;
    double worst = 0.0;
    int checked = 0;
    int attempts = 0;
    while (checked < samples && attempts < samples * 100) {
        ++attempts;
        std::size_t pick = rng.uniform_index(total);
        double analytic = 0.0;
        double* slot = nullptr;
        std::size_t layer_idx = 0;
        int unit = 0;
        double input_scale = 1.0;  // |activation| feeding a weight; 1 for biases
        for (std::size_t l = 0; l < probe.layers.size(); ++l) {
            auto& layer = probe.layers[l];
            if (pick < layer.w.size()) {
                slot = &layer.w[pick];
                analytic = gw[l][pick];
                layer_idx = l;
                unit = static_cast<int>(pick % layer.out);
                const int in_idx = static_cast<int>(pick / layer.out);
                input_scale = std::abs(l == 0 ? row.input[in_idx]
                                              : std::max(pre[l - 1][in_idx], 0.0));
                break;
            }
            pick -= layer.w.size();
            if (pick < layer.b.size()) {
                slot = &layer.b[pick];
                analytic = gb[l][pick];
                layer_idx = l;
                unit = static_cast<int>(pick);
                input_scale = 1.0;
                break;
            }
            pick -= layer.b.size();
        }
        // Rectifier layers only; the softmax output layer is smooth. A
        // weight fed by a zero activation cannot move its unit at all,
        // so it stays checkable (both gradients are exactly zero).
        const double reach = h * input_scale;
        if (layer_idx + 1 < L && reach > 0.0 && std::abs(pre[layer_idx][unit]) <= 10.0 * reach)
            continue;

        const double saved = *slot;
        *slot = saved + h;
        const double up = loss_at(probe);
        *slot = saved - h;
        const double down = loss_at(probe);
        *slot = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double err = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        worst = std::max(worst, err);
        ++checked;
    }
    return worst;
}

int act(const MlpPolicy& policy, const StateVector& state,
        const std::optional<ReducedDescriptor>& behavior, ActMode mode, Rng& rng) {
    if (policy.mode == PolicyMode::kBril && !behavior)
        throw ContractError("act: BRIL policy requires a behavior input");
    if (policy.mode == PolicyMode::kIl && behavior)
        throw ContractError("act: IL policy takes no behavior input");
    std::vector<double> input = state;
    if (behavior) input.insert(input.end(), behavior->coords.begin(), behavior->coords.end());
    const auto dist = forward(policy, input);
    if (mode == ActMode::kGreedy) {
        int arg = 0;
        for (int o = 1; o < policy.action_count; ++o)
            if (dist[o] > dist[arg]) arg = o;
        return arg;
    }
    const double u = rng.uniform();
    double acc = 0.0;
    for (int o = 0; o < policy.action_count; ++o) {
        acc += dist[o];
        if (u < acc) return o;
    }
    return policy.action_count - 1;
}

void save_policy(const MlpPolicy& policy, const std::string& path) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["mode"] = policy.mode == PolicyMode::kBril ? "BRIL" : "IL";
    j["input_dim"] = policy.input_dim;
    j["action_count"] = policy.action_count;
    j["behavior_dim"] = policy.behavior_dim;
    auto& layers = j["layers"] = nlohmann::ordered_json::array();
    for (const auto& layer : policy.layers) {
        nlohmann::ordered_json lj;
        lj["in"] = layer.in;
        lj["out"] = layer.out;
        lj["w"] = layer.w;  // row-major [in][out]
        lj["b"] = layer.b;
        layers.push_back(std::move(lj));
    }
    write_file_atomic(path, j.dump() + "\n");
}

MlpPolicy load_policy(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what(), 1);
    }
    if (j.value("format_version", -1) != 1) throw SchemaError("unsupported policy format_version");
    MlpPolicy policy;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "IL" && mode != "BRIL") throw SchemaError("policy mode must be IL or BRIL");
    policy.mode = mode == "BRIL" ? PolicyMode::kBril : PolicyMode::kIl;
    policy.input_dim = j.at("input_dim").get<int>();
    policy.action_count = j.at("action_count").get<int>();
    policy.behavior_dim = j.at("behavior_dim").get<int>();
    for (const auto& lj : j.at("layers")) {
        MlpPolicy::Layer layer;
        layer.in = lj.at("in").get<int>();
        layer.out = lj.at("out").get<int>();
        layer.w = lj.at("w").get<std::vector<double>>();
        layer.b = lj.at("b").get<std::vector<double>>();
        if (layer.w.size() != static_cast<std::size_t>(layer.in) * layer.out ||
            layer.b.size() != static_cast<std::size_t>(layer.out))
            throw SchemaError("policy layer shape mismatch");
        policy.layers.push_back(std::move(layer));
    }
    if (policy.layers.empty()) throw SchemaError("policy has no layers");
    return policy;
}

}  // namespace bril
