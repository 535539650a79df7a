#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bril/demo.hpp"
#include "bril/descriptor.hpp"
#include "bril/rng.hpp"

namespace bril {

enum class PolicyMode { kIl, kBril };

enum class ActMode { kGreedy, kSample };

// Feedforward softmax policy: three rectifier hidden layers of 256
// units, then a softmax over the action set. BRIL policies take the
// behavior coordinates appended to the state as extra inputs.
struct MlpPolicy {
    PolicyMode mode = PolicyMode::kIl;
    int input_dim = 0;
    int action_count = 0;
    int behavior_dim = 0;  // 0 for IL, p for BRIL

    struct Layer {
        int in = 0;
        int out = 0;
        std::vector<double> w;  // row-major [in][out]
        std::vector<double> b;  // out

        bool operator==(const Layer&) const = default;
    };
    std::vector<Layer> layers;

    bool operator==(const MlpPolicy&) const = default;
};

inline constexpr int kHiddenLayers = 3;
inline constexpr int kHiddenWidth = 256;

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 64;
    int epochs = 20;
    std::uint64_t seed = 0;
    double l2 = 0.0;
};

// epoch_loss[e] is the running mean cross-entropy of the minibatches
// processed during epoch e (each batch scored before its update).
struct TrainReport {
    std::vector<double> epoch_loss;
    double test_accuracy = 0.0;
    double test_loss = 0.0;
};

// Weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
MlpPolicy init_policy(int input_dim, int action_count, std::uint64_t seed, int behavior_dim = 0);

// Softmax action distribution; strictly positive, sums to 1.
std::vector<double> forward(const MlpPolicy& policy, std::span<const double> input);

// Minibatch SGD on mean cross-entropy. Deterministic given cfg.seed.
// action_count 0 means infer from the largest action id seen.
std::pair<MlpPolicy, TrainReport> train(const std::vector<TrainingRow>& rows,
                                        const TrainConfig& cfg,
                                        const std::vector<TrainingRow>& test_rows,
                                        int behavior_dim = 0, int action_count = 0);

// Argmax-match fraction and mean cross-entropy on a row set.
std::pair<double, double> evaluate_rows(const MlpPolicy& policy,
                                        const std::vector<TrainingRow>& rows);

// Max relative error between analytic gradients and central finite
// differences (step 1e-5) over >= `samples` randomly chosen parameters.
double gradient_check(const MlpPolicy& policy, const TrainingRow& row,
                      std::uint64_t seed = 0, int samples = 256);

// Greedy takes the argmax (lowest index on ties); sample draws from
// the distribution using the caller's stream. BRIL policies require a
// behavior, IL policies forbid one.
int act(const MlpPolicy& policy, const StateVector& state,
        const std::optional<ReducedDescriptor>& behavior, ActMode mode, Rng& rng);

void save_policy(const MlpPolicy& policy, const std::string& path);
MlpPolicy load_policy(const std::string& path);

}  // namespace bril
