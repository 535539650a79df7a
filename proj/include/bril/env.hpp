#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bril/demo.hpp"
#include "bril/rng.hpp"

namespace bril {

// Deterministic two-player build-order game. Both sides run the same
// economy/production/combat rules; the opponent side is driven by a
// scripted archetype chosen in the config. All randomness is confined
// to opponent decision noise and controller noise; the physics itself
// is deterministic, so fixed action scripts can be traced by hand.
//
// Actions: 0 wait, 1 train worker, 2 build depot, 3 build factory,
// 4..3+K train combat unit k, 4+K attack. Well-formed but currently
// illegal actions (unaffordable, no supply, no free production slot,
// attack without an army) degrade to wait.

struct UnitTypeSpec {
    std::string name;
    int cost = 0;
    double attack = 0.0;
    int build_ticks = 1;
    std::vector<double> counter;  // effectiveness against each defender type, > 0
};

struct EnvConfig {
    std::vector<UnitTypeSpec> unit_types;
    int worker_cost = 40;
    int depot_cost = 50;
    int factory_cost = 90;
    int worker_ticks = 3;
    int depot_ticks = 3;
    int factory_ticks = 5;
    int income_per_worker = 3;
    int base_supply = 8;
    int depot_supply = 8;
    int start_workers = 5;
    int start_minerals = 120;
    double base_hp = 150.0;
    int max_ticks = 70;
    std::string opponent_archetype = "brawler_bravo";
    double opponent_noise = 0.05;

    int unit_count() const { return static_cast<int>(unit_types.size()); }
    int action_count() const { return unit_count() + 5; }
    // Production categories: worker, depot, factory, then one per unit type.
    int category_count() const { return unit_count() + 3; }
    int state_dim() const { return 4 * unit_count() + 15; }
    std::vector<std::string> unit_names() const;
};

inline constexpr int kActionWait = 0;
inline constexpr int kActionTrainWorker = 1;
inline constexpr int kActionBuildDepot = 2;
inline constexpr int kActionBuildFactory = 3;
inline constexpr int kActionTrainUnit0 = 4;  // unit k is action 4 + k
inline int attack_action(const EnvConfig& cfg) { return 4 + cfg.unit_count(); }

struct InProgress {
    int category = 0;  // 0 worker, 1 depot, 2 factory, 3+k unit k
    int remaining = 0;
};

struct SideState {
    long long minerals = 0;
    int workers = 0;
    int depots = 0;
    int factories = 0;
    std::vector<int> units;
    std::vector<InProgress> queue;
    double base_hp = 0.0;
    std::vector<long long> produced;   // tally of successfully enqueued train actions
    std::vector<int> seen_enemy;       // opposing army as of the end of last tick

    int army_total() const;
    int supply_used() const;
};

struct GameState {
    int tick = 0;
    SideState own;
    SideState foe;
    Rng foe_rng{0};
};

struct StepResult {
    bool done = false;
    bool win = false;
};

struct EpisodeResult {
    bool win = false;
    std::vector<long long> produced_counts;
    std::vector<std::pair<StateVector, int>> trace;
};

using Controller = std::function<int(const StateVector&)>;

void validate_env(const EnvConfig& cfg);
EnvConfig default_env_config();
void save_env_config(const EnvConfig& cfg, const std::string& path);
EnvConfig load_env_config(const std::string& path);

// Canonical fixed starting state; the seed only feeds the opponent's
// decision-noise stream.
GameState reset(const EnvConfig& cfg, std::uint64_t seed);

// Advances one tick: both sides enqueue, income accrues, production
// progresses, combat resolves if either side attacked.
StepResult step(const EnvConfig& cfg, GameState& state, int action);

// The player-side observation (the StateVector recorded into demos).
StateVector observe(const EnvConfig& cfg, const GameState& state);

EpisodeResult run_episode(const Controller& controller, const EnvConfig& cfg,
                          std::uint64_t seed);

// Scripted players. Each archetype targets a distinct unit mix:
//   rush_alpha         pure alpha pressure
//   mix_alpha_charlie  alpha/charlie composition
//   siege_delta        delta-heavy with echo escort
//   econ_boom          workers only, never attacks
//   brawler_bravo      bravo mass (the default opponent)
std::vector<std::string> archetype_ids();
Controller make_archetype_controller(const std::string& id, const EnvConfig& cfg);

// Mean production-ratio signature of an archetype's target mix.
RawDescriptor archetype_mix(const std::string& id, const EnvConfig& cfg);

// Runs scripted archetypes with epsilon-noise action perturbation and
// packages the episodes as a DemoSet.
DemoSet generate_demoset(const std::vector<std::pair<std::string, int>>& archetypes,
                         const EnvConfig& cfg, double noise, std::uint64_t seed);

// Relative army strength given the counter matrix; exposed because
// combat tests check it directly.
double army_power(const EnvConfig& cfg, const std::vector<int>& attacker,
                  const std::vector<int>& defender);

}  // namespace bril
