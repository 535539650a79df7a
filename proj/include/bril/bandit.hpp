#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bril/descriptor.hpp"
#include "bril/env.hpp"
#include "bril/mlp.hpp"

namespace bril {

// UCB1 over a discrete set of behavior coordinates. Each arm is one
// candidate behavioral feature input for a BRIL policy.
struct BanditState {
    std::vector<ReducedDescriptor> options;
    std::vector<long long> counts;
    std::vector<double> means;
    long long total = 0;
    double exploration = 1.4142135623730951;  // sqrt(2)

    explicit BanditState(std::vector<ReducedDescriptor> opts, double c = 1.4142135623730951);
};

// Plays every untried arm first (lowest index), then the arm with the
// highest mean + C*sqrt(2 ln t / n); ties go to the lower index.
int select(const BanditState& b);

// UCB scores of all arms; defined only once every arm has been tried.
std::vector<double> ucb_scores(const BanditState& b);

// Incremental-mean update with a return in [0, 1].
void update(BanditState& b, int option, double ret);

struct AdaptationLogRow {
    int episode = 0;
    int option = 0;
    double ret = 0.0;
    std::vector<double> running_means;
};

struct AdaptationResult {
    std::vector<long long> plays;
    std::vector<long long> wins;
    long long total_wins = 0;
    std::vector<AdaptationLogRow> log;
    std::vector<EpisodeResult> episodes;
};

// Inter-episode adaptation: select an option, run one full episode
// with the BRIL policy conditioned on it (the behavior input is held
// fixed for the whole episode), feed back win=1/loss=0.
AdaptationResult run_adaptation(const MlpPolicy& policy,
                                const std::vector<ReducedDescriptor>& options, int episodes,
                                const EnvConfig& cfg, double exploration, std::uint64_t seed);

std::string adaptation_log_to_csv(const AdaptationResult& result);

}  // namespace bril
