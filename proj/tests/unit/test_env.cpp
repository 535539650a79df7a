#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "bril/env.hpp"
#include "bril/errors.hpp"
#include "bril/pca.hpp"

using namespace bril;

namespace {

EnvConfig quiet_env() {
    EnvConfig cfg = default_env_config();
    cfg.opponent_archetype = "econ_boom";  // never attacks
    cfg.opponent_noise = 0.0;              // fully deterministic
    return cfg;
}

}  // namespace

TEST_SUITE("microbuild_env") {

TEST_CASE("reset: canonical start, seed only feeds opponent noise") {
    const EnvConfig cfg = default_env_config();
    const GameState a = reset(cfg, 1);
    const GameState b = reset(cfg, 1);
    const GameState c = reset(cfg, 2);
    CHECK(a.own.minerals == cfg.start_minerals);
    CHECK(a.own.workers == cfg.start_workers);
    CHECK(a.own.base_hp == cfg.base_hp);
    CHECK(a.tick == 0);
    CHECK(b.own.minerals == a.own.minerals);
    CHECK(c.own.minerals == a.own.minerals);
    CHECK(c.foe.minerals == a.foe.minerals);

    SUBCASE("invalid configs are contract errors") {
        EnvConfig bad = cfg;
        bad.max_ticks = 0;
        CHECK_THROWS_AS(reset(bad, 0), ContractError);
        bad = cfg;
        bad.unit_types[0].counter[2] = 0.0;
        CHECK_THROWS_AS(reset(bad, 0), ContractError);
    }
}

TEST_CASE("wait accrues income exactly") {
    const EnvConfig cfg = quiet_env();
    GameState s = reset(cfg, 0);
    step(cfg, s, kActionWait);
    CHECK(s.own.minerals == cfg.start_minerals + cfg.start_workers * cfg.income_per_worker);
    CHECK(s.tick == 1);
}

TEST_CASE("unaffordable or illegal actions degrade to wait") {
    const EnvConfig cfg = quiet_env();
    // No factory yet: training a combat unit acts as wait.
    GameState a = reset(cfg, 0);
    GameState b = reset(cfg, 0);
    step(cfg, a, kActionTrainUnit0);
    step(cfg, b, kActionWait);
    CHECK(a.own.minerals == b.own.minerals);
    CHECK(a.own.queue.empty());
    CHECK(a.own.produced == b.own.produced);

    // Attack without an army acts as wait.
    GameState c = reset(cfg, 0);
    step(cfg, c, attack_action(cfg));
    CHECK(c.own.base_hp == cfg.base_hp);
    CHECK(c.foe.base_hp == cfg.base_hp);
    CHECK(c.own.minerals == b.own.minerals);

    // Unaffordable structure: low starting minerals variant.
    EnvConfig poor = cfg;
    poor.start_minerals = 10;
    GameState d = reset(poor, 0);
    GameState e = reset(poor, 0);
    step(poor, d, kActionBuildFactory);
    step(poor, e, kActionWait);
    CHECK(d.own.minerals == e.own.minerals);

    SUBCASE("malformed action id is a contract error") {
        GameState f = reset(cfg, 0);
        CHECK_THROWS_AS(step(cfg, f, -1), ContractError);
        CHECK_THROWS_AS(step(cfg, f, cfg.action_count()), ContractError);
    }
}

// Hand-traced transcript of a fixed 10-tick script against the
// passive deterministic opponent. Rules: enqueue (pay) -> income ->
// production progress; an item enqueued at tick t with duration d
// completes at the end of tick t+d-1. Defaults: income 3/worker,
// worker 40/3t, depot 50/3t, factory 90/5t, alpha 30/2t, start
// 5 workers / 120 minerals.
TEST_CASE("ten-tick scripted transcript matches the hand computation") {
    const EnvConfig cfg = quiet_env();
    GameState s = reset(cfg, 0);

    const int script[10] = {
        kActionTrainWorker,   // t0: 120-40+15 = 95, worker due end t2
        kActionBuildFactory,  // t1: 95-90+15 = 20, factory due end t5
        kActionTrainWorker,   // t2: worker busy -> wait, 20+15 = 35
        kActionTrainUnit0,    // t3: no factory -> wait, 35+18 = 53 (6 workers now)
        kActionBuildDepot,    // t4: 53-50+18 = 21, depot due end t6
        attack_action(cfg),   // t5: no army -> wait, 21+18 = 39; factory completes
        kActionTrainUnit0,    // t6: 39-30+18 = 27, alpha due end t7
        kActionTrainUnit0,    // t7: factory busy -> wait, 27+18 = 45
        kActionTrainUnit0,    // t8: 45-30+18 = 33, alpha due end t9
        kActionWait,          // t9: 33+18 = 51
    };
    const long long minerals_after[10] = {95, 20, 35, 53, 21, 39, 27, 45, 33, 51};

    for (int t = 0; t < 10; ++t) {
        const StepResult r = step(cfg, s, script[t]);
        CHECK(!r.done);
        CHECK(s.own.minerals == minerals_after[t]);
    }
    CHECK(s.tick == 10);
    CHECK(s.own.workers == 6);
    CHECK(s.own.depots == 1);
    CHECK(s.own.factories == 1);
    CHECK(s.own.units == std::vector<int>{2, 0, 0, 0, 0});
    CHECK(s.own.produced == std::vector<long long>{2, 0, 0, 0, 0});
    CHECK(s.own.queue.empty());
    CHECK(s.own.base_hp == cfg.base_hp);

    // The passive opponent ran its own economy: workers at t0/t3, a
    // depot at t4 once the queued worker reserved the last supply
    // (room fell below 2), workers again at t6 and t9:
    //   95, 110, 125, 103, 71, 89, 70, 91, 112, 96.
    CHECK(s.foe.workers == 8);
    CHECK(s.foe.depots == 1);
    CHECK(s.foe.factories == 0);
    CHECK(s.foe.minerals == 96);
    CHECK(s.foe.base_hp == cfg.base_hp);
}

TEST_CASE("combat arithmetic follows the counter matrix") {
    const EnvConfig cfg = quiet_env();
    // alpha attacks bravo: weight 0.5; bravo answers at 2.5.
    CHECK(army_power(cfg, {3, 0, 0, 0, 0}, {0, 2, 0, 0, 0}) == doctest::Approx(3 * 4.0 * 0.5));
    CHECK(army_power(cfg, {0, 2, 0, 0, 0}, {3, 0, 0, 0, 0}) == doctest::Approx(2 * 6.0 * 2.5));
    // Against an empty army the weight is 1.
    CHECK(army_power(cfg, {0, 0, 4, 0, 0}, {0, 0, 0, 0, 0}) == doctest::Approx(4 * 7.0));

    SUBCASE("losing assault destroys the attacker, defender bleeds") {
        GameState s = reset(cfg, 0);
        s.own.units = {3, 0, 0, 0, 0};
        s.foe.units = {0, 2, 0, 0, 0};
        step(cfg, s, attack_action(cfg));
        CHECK(s.own.units == std::vector<int>{0, 0, 0, 0, 0});
        // attrition floor(2 * 6/30) = 0
        CHECK(s.foe.units == std::vector<int>{0, 2, 0, 0, 0});
        CHECK(s.foe.base_hp == cfg.base_hp);
        CHECK(s.own.base_hp == cfg.base_hp);
    }
    SUBCASE("winning assault: defender army dies, excess hits the base") {
        GameState s = reset(cfg, 0);
        s.own.units = {0, 0, 4, 0, 0};  // charlies counter bravos at 2.5
        s.foe.units = {0, 2, 0, 0, 0};
        step(cfg, s, attack_action(cfg));
        // P_att = 4*7*2.5 = 70, P_def = 2*6*0.5 = 6
        CHECK(s.foe.units == std::vector<int>{0, 0, 0, 0, 0});
        CHECK(s.own.units == std::vector<int>{0, 0, 4, 0, 0});  // floor(4 * 6/70) = 0
        CHECK(s.foe.base_hp == doctest::Approx(cfg.base_hp - 64.0));
    }
}

TEST_CASE("resource conservation holds over a full episode") {
    EnvConfig cfg = default_env_config();
    cfg.max_ticks = 40;
    const Controller script = make_archetype_controller("mix_alpha_charlie", cfg);
    GameState s = reset(cfg, 3);
    long long income_total = 0;
    while (true) {
        income_total += static_cast<long long>(s.own.workers) * cfg.income_per_worker;
        const StepResult r = step(cfg, s, script(observe(cfg, s)));
        if (r.done) break;
    }
    long long spend = 0;
    spend += static_cast<long long>(cfg.worker_cost) * (s.own.workers - cfg.start_workers);
    spend += static_cast<long long>(cfg.depot_cost) * s.own.depots;
    spend += static_cast<long long>(cfg.factory_cost) * s.own.factories;
    for (std::size_t k = 0; k < s.own.produced.size(); ++k)
        spend += s.own.produced[k] * cfg.unit_types[k].cost;
    for (const auto& item : s.own.queue) {
        const int costs[3] = {cfg.worker_cost, cfg.depot_cost, cfg.factory_cost};
        if (item.category < 3) spend += costs[item.category];
        // units still in the queue are already in the produced tally
    }
    CHECK(s.own.minerals == cfg.start_minerals + income_total - spend);
}

TEST_CASE("always-wait loses; trace stays within the tick limit") {
    const EnvConfig cfg = default_env_config();
    const EpisodeResult ep = run_episode([](const StateVector&) { return kActionWait; }, cfg, 5);
    CHECK(!ep.win);
    CHECK(ep.trace.size() <= static_cast<std::size_t>(cfg.max_ticks));
    for (long long c : ep.produced_counts) CHECK(c == 0);
}

// Calibration regression: the composition that counters the default
// opponent must win the large majority of games.
TEST_CASE("best-response archetype beats its countered opponent") {
    const EnvConfig cfg = default_env_config();
    const Controller mix = make_archetype_controller("mix_alpha_charlie", cfg);
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) wins += run_episode(mix, cfg, seed).win;
    CHECK(wins > 80);
}

TEST_CASE("episodes are deterministic given config and seed") {
    const EnvConfig cfg = default_env_config();
    const Controller rush = make_archetype_controller("rush_alpha", cfg);
    const EpisodeResult a = run_episode(rush, cfg, 11);
    const EpisodeResult b = run_episode(rush, cfg, 11);
    CHECK(a.win == b.win);
    CHECK(a.produced_counts == b.produced_counts);
    CHECK(a.trace == b.trace);
}

TEST_CASE("demo generation: archetype purity and bookkeeping") {
    const EnvConfig cfg = default_env_config();
    const DemoSet pure = generate_demoset({{"rush_alpha", 5}}, cfg, 0.0, 9);
    CHECK(pure.demos.size() == 5);
    CHECK(pure.schema.state_dim == cfg.state_dim());
    CHECK(pure.schema.action_count == cfg.action_count());
    for (const auto& d : pure.demos) {
        const RawDescriptor r = compute_descriptor(d);
        CHECK(r.ratios[0] == 1.0);  // pure alpha
        for (int k = 1; k < 5; ++k) CHECK(r.ratios[k] == 0.0);
        CHECK(d.meta.at("archetype") == "rush_alpha");
    }

    const DemoSet armyless = generate_demoset({{"econ_boom", 3}}, cfg, 0.0, 9);
    for (const auto& d : armyless.demos)
        CHECK(compute_descriptor(d).ratios == std::vector<double>(5, 0.0));

    SUBCASE("contract errors") {
        CHECK_THROWS_AS(generate_demoset({{"nope", 1}}, cfg, 0.0, 1), ContractError);
        CHECK_THROWS_AS(generate_demoset({{"rush_alpha", 0}}, cfg, 0.0, 1), ContractError);
        CHECK_THROWS_AS(generate_demoset({{"rush_alpha", 1}}, cfg, 1.5, 1), ContractError);
    }
    SUBCASE("deterministic given seed") {
        const DemoSet a = generate_demoset({{"rush_alpha", 3}}, cfg, 0.1, 4);
        const DemoSet b = generate_demoset({{"rush_alpha", 3}}, cfg, 0.1, 4);
        CHECK(a == b);
    }
}

TEST_CASE("archetype mean descriptors stay separated under noise") {
    const EnvConfig cfg = default_env_config();
    const char* archetypes[3] = {"rush_alpha", "mix_alpha_charlie", "siege_delta"};
    std::vector<std::vector<double>> means;
    for (const char* id : archetypes) {
        const DemoSet set = generate_demoset({{id, 30}}, cfg, 0.1, 21);
        std::vector<double> mean(5, 0.0);
        for (const auto& d : set.demos) {
            const RawDescriptor r = compute_descriptor(d);
            for (int k = 0; k < 5; ++k) mean[k] += r.ratios[k];
        }
        for (double& v : mean) v /= set.demos.size();
        means.push_back(std::move(mean));
    }
    for (std::size_t a = 0; a < means.size(); ++a)
        for (std::size_t b = a + 1; b < means.size(); ++b) {
            double l1 = 0.0;
            for (int k = 0; k < 5; ++k) l1 += std::abs(means[a][k] - means[b][k]);
            CHECK(l1 >= 0.3);
        }
}

TEST_CASE("observation invariants: counts non-negative, fractions in range") {
    const EnvConfig cfg = default_env_config();
    const Controller siege = make_archetype_controller("siege_delta", cfg);
    GameState s = reset(cfg, 2);
    for (int t = 0; t < 30; ++t) {
        const StateVector obs = observe(cfg, s);
        REQUIRE(static_cast<int>(obs.size()) == cfg.state_dim());
        for (double v : obs) CHECK(v >= 0.0);
        const int cats = cfg.category_count();
        for (int c = 0; c < cats; ++c) {
            const double frac = obs[8 + cfg.unit_count() + cats + c];
            CHECK(frac >= 0.0);
            CHECK(frac <= 1.0);
        }
        if (step(cfg, s, siege(obs)).done) break;
    }
}

TEST_CASE("env config round-trips through its file format") {
    const EnvConfig cfg = default_env_config();
    const std::string path =
        (std::filesystem::temp_directory_path() / "bril_env_rt.json").string();
    save_env_config(cfg, path);
    const EnvConfig loaded = load_env_config(path);
    CHECK(loaded.unit_types.size() == cfg.unit_types.size());
    CHECK(loaded.unit_types[3].counter == cfg.unit_types[3].counter);
    CHECK(loaded.max_ticks == cfg.max_ticks);
    CHECK(loaded.opponent_archetype == cfg.opponent_archetype);
    GameState a = reset(cfg, 7);
    GameState b = reset(loaded, 7);
    const Controller script = make_archetype_controller("rush_alpha", cfg);
    for (int t = 0; t < 20; ++t) {
        step(cfg, a, script(observe(cfg, a)));
        step(loaded, b, script(observe(loaded, b)));
    }
    CHECK(a.own.minerals == b.own.minerals);
    CHECK(a.foe.units == b.foe.units);
}

}  // TEST_SUITE
