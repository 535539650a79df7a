#include "bril/bandit.hpp"

#include <cmath>

#include "bril/errors.hpp"
#include "bril/io_util.hpp"

namespace bril {

BanditState::BanditState(std::vector<ReducedDescriptor> opts, double c)
    : options(std::move(opts)), exploration(c) {
    if (options.empty()) throw ContractError("bandit: options must be non-empty");
    // C = 0 is allowed and degenerates to greedy selection on means.
    if (!(exploration >= 0.0)) throw ContractError("bandit: exploration constant must be >= 0");
    counts.assign(options.size(), 0);
    means.assign(options.size(), 0.0);
}

int select(const BanditState& b) {
    for (std::size_t j = 0; j < b.counts.size(); ++j)
        if (b.counts[j] == 0) return static_cast<int>(j);
    const auto scores = ucb_scores(b);
    int best = 0;
    for (std::size_t j = 1; j < scores.size(); ++j)
        if (scores[j] > scores[best]) best = static_cast<int>(j);
    return best;
}

std::vector<double> ucb_scores(const BanditState& b) {
    std::vector<double> scores(b.options.size());
    const double log_t = std::log(static_cast<double>(b.total));
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (b.counts[j] == 0) throw ContractError("ucb_scores: arm never tried");
        scores[j] = b.means[j] +
                    b.exploration * std::sqrt(2.0 * log_t / static_cast<double>(b.counts[j]));
    }
    return scores;
}

void update(BanditState& b, int option, double ret) {
    if (option < 0 || option >= static_cast<int>(b.options.size()))
        throw ContractError("bandit update: option index out of range");
    if (!(ret >= 0.0 && ret <= 1.0)) throw ContractError("bandit update: return must be in [0,1]");
    b.counts[option] += 1;
    b.total += 1;
    b.means[option] += (ret - b.means[option]) / static_cast<double>(b.counts[option]);
}

AdaptationResult run_adaptation(const MlpPolicy& policy,
                                const std::vector<ReducedDescriptor>& options, int episodes,
                                const EnvConfig& cfg, double exploration, std::uint64_t seed) {
    if (policy.mode != PolicyMode::kBril)
        throw ContractError("run_adaptation: policy must be behavior-conditioned");
    if (episodes < 1) throw ContractError("run_adaptation: episodes must be >= 1");

    BanditState bandit(options, exploration);
    AdaptationResult result;
    result.plays.assign(options.size(), 0);
    result.wins.assign(options.size(), 0);

    for (int e = 0; e < episodes; ++e) {
        const int j = select(bandit);
        const ReducedDescriptor& behavior = bandit.options[j];
        Rng act_rng(mix_seed(seed, "adapt-act", static_cast<std::uint64_t>(e)));
        Controller controller = [&](const StateVector& obs) {
            return act(policy, obs, behavior, ActMode::kSample, act_rng);
        };
        EpisodeResult ep =
            run_episode(controller, cfg, mix_seed(seed, "adapt-env", static_cast<std::uint64_t>(e)));
        const double ret = ep.win ? 1.0 : 0.0;
        update(bandit, j, ret);

        result.plays[j] += 1;
        if (ep.win) {
            result.wins[j] += 1;
            result.total_wins += 1;
        }
        AdaptationLogRow row;
        row.episode = e;
        row.option = j;
        row.ret = ret;
        row.running_means = bandit.means;
        result.log.push_back(std::move(row));
        result.episodes.push_back(std::move(ep));
    }
    return result;
}

std::string adaptation_log_to_csv(const AdaptationResult& result) {
    const std::size_t k = result.plays.size();
    std::vector<std::string> cols = {"episode", "option", "return"};
    for (std::size_t j = 0; j < k; ++j) cols.push_back("mean_" + std::to_string(j));
    std::string csv = csv_preamble(1, cols);
    for (const auto& row : result.log) {
        std::vector<std::string> cells = {std::to_string(row.episode), std::to_string(row.option),
                                          format_double(row.ret)};
        for (double m : row.running_means) cells.push_back(format_double(m));
        csv += join_csv_row(cells);
    }
    return csv;
}

}  // namespace bril
