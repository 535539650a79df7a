#include "bril/env.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "bril/errors.hpp"
#include "bril/io_util.hpp"

namespace bril {

namespace {

// Observation scale constants. Counts stay non-negative and completion
// fractions stay in [0,1]; everything else is divided into a range the
// network trains on comfortably.
constexpr double kMineralScale = 200.0;
constexpr double kCountScale = 20.0;
constexpr double kStructScale = 4.0;
constexpr double kQueueScale = 2.0;

int category_duration(const EnvConfig& cfg, int category) {
    switch (category) {
        case 0: return cfg.worker_ticks;
        case 1: return cfg.depot_ticks;
        case 2: return cfg.factory_ticks;
        default: return cfg.unit_types[category - 3].build_ticks;
    }
}

int category_cost(const EnvConfig& cfg, int category) {
    switch (category) {
        case 0: return cfg.worker_cost;
        case 1: return cfg.depot_cost;
        case 2: return cfg.factory_cost;
        default: return cfg.unit_types[category - 3].cost;
    }
}

}  // namespace

int SideState::army_total() const {
    int total = 0;
    for (int u : units) total += u;
    return total;
}

int SideState::supply_used() const {
    int used = workers + army_total();
    for (const auto& item : queue)
        if (item.category == 0 || item.category >= 3) used += 1;
    return used;
}

std::vector<std::string> EnvConfig::unit_names() const {
    std::vector<std::string> names;
    for (const auto& u : unit_types) names.push_back(u.name);
    return names;
}

void validate_env(const EnvConfig& cfg) {
    const int k = cfg.unit_count();
    if (k < 1) throw ContractError("env: need at least one unit type");
    for (const auto& u : cfg.unit_types) {
        if (u.cost <= 0 || u.attack <= 0.0 || u.build_ticks < 1)
            throw ContractError("env: unit costs, attack and build times must be positive");
        if (static_cast<int>(u.counter.size()) != k)
            throw ContractError("env: counter matrix must be KxK");
        for (double c : u.counter)
            if (!(c > 0.0)) throw ContractError("env: counter entries must be > 0");
    }
    if (cfg.worker_cost <= 0 || cfg.depot_cost <= 0 || cfg.factory_cost <= 0)
        throw ContractError("env: structure and worker costs must be positive");
    if (cfg.worker_ticks < 1 || cfg.depot_ticks < 1 || cfg.factory_ticks < 1)
        throw ContractError("env: build durations must be >= 1");
    if (cfg.income_per_worker < 1) throw ContractError("env: income_per_worker must be >= 1");
    if (cfg.base_supply < 1 || cfg.depot_supply < 1) throw ContractError("env: supply must be positive");
    if (cfg.start_workers < 1 || cfg.start_minerals < 0) throw ContractError("env: bad starting resources");
    if (cfg.base_hp <= 0.0) throw ContractError("env: base_hp must be positive");
    if (cfg.max_ticks < 1) throw ContractError("env: max_ticks must be >= 1");
    if (cfg.opponent_noise < 0.0 || cfg.opponent_noise > 1.0)
        throw ContractError("env: opponent_noise must be in [0,1]");
}

EnvConfig default_env_config() {
    EnvConfig cfg;
    const int k = 5;
    auto unit = [&](const std::string& name, int cost, double attack, int ticks) {
        UnitTypeSpec u;
        u.name = name;
        u.cost = cost;
        u.attack = attack;
        u.build_ticks = ticks;
        u.counter.assign(k, 1.0);
        return u;
    };
    cfg.unit_types = {
        unit("alpha", 30, 4.0, 2),
        unit("bravo", 45, 6.0, 3),
        unit("charlie", 60, 7.0, 3),
        unit("delta", 100, 12.0, 5),
        unit("echo", 70, 8.0, 4),
    };
    // Asymmetric counter cycle: bravo > alpha, charlie > bravo,
    // delta > charlie, alpha > delta, plus echo as the anti-delta
    // escort. Distinct opponents therefore favor distinct mixes.
    auto& c = cfg.unit_types;
    c[1].counter[0] = 2.5;
    c[0].counter[1] = 0.5;
    c[2].counter[1] = 2.5;
    c[1].counter[2] = 0.5;
    c[3].counter[2] = 2.5;
    c[2].counter[3] = 0.5;
    c[0].counter[3] = 2.5;
    c[3].counter[0] = 0.5;
    c[4].counter[3] = 2.0;
    c[3].counter[4] = 0.5;
    return cfg;
}

GameState reset(const EnvConfig& cfg, std::uint64_t seed) {
    validate_env(cfg);
    const int k = cfg.unit_count();
    GameState state;
    state.tick = 0;
    for (SideState* side : {&state.own, &state.foe}) {
        side->minerals = cfg.start_minerals;
        side->workers = cfg.start_workers;
        side->depots = 0;
        side->factories = 0;
        side->units.assign(k, 0);
        side->queue.clear();
        side->base_hp = cfg.base_hp;
        side->produced.assign(k, 0);
        side->seen_enemy.assign(k, 0);
    }
    state.foe_rng = Rng(mix_seed(seed, "opponent"));
    return state;
}

namespace {

int in_progress_count(const SideState& side, int category) {
    int n = 0;
    for (const auto& item : side.queue)
        if (item.category == category) ++n;
    return n;
}

int units_in_progress(const SideState& side) {
    int n = 0;
    for (const auto& item : side.queue)
        if (item.category >= 3) ++n;
    return n;
}

// Checks legality of a production/attack action for one side and, if
// legal, pays the cost and enqueues. Illegal actions become wait.
// Returns true when the action was an attack that will be carried out.
bool apply_action(const EnvConfig& cfg, SideState& side, int action) {
    if (action == kActionWait) return false;
    if (action == attack_action(cfg)) return side.army_total() >= 1;

    int category;
    if (action == kActionTrainWorker) category = 0;
    else if (action == kActionBuildDepot) category = 1;
    else if (action == kActionBuildFactory) category = 2;
    else category = 3 + (action - kActionTrainUnit0);

    const int cost = category_cost(cfg, category);
    if (side.minerals < cost) return false;
    const int supply_cap = cfg.base_supply + side.depots * cfg.depot_supply;
    if (category == 0 || category >= 3) {
        if (side.supply_used() + 1 > supply_cap) return false;
    }
    if (category == 0 && in_progress_count(side, 0) >= 1) return false;  // base trains one at a time
    if (category >= 3) {
        if (side.factories < 1) return false;
        if (units_in_progress(side) >= side.factories) return false;  // one unit per factory
    }
    side.minerals -= cost;
    side.queue.push_back({category, category_duration(cfg, category)});
    if (category >= 3) side.produced[category - 3] += 1;
    return false;
}

void advance_production(SideState& side) {
    std::vector<InProgress> remaining;
    remaining.reserve(side.queue.size());
    for (auto& item : side.queue) {
        item.remaining -= 1;
        if (item.remaining > 0) {
            remaining.push_back(item);
            continue;
        }
        switch (item.category) {
            case 0: side.workers += 1; break;
            case 1: side.depots += 1; break;
            case 2: side.factories += 1; break;
            default: side.units[item.category - 3] += 1; break;
        }
    }
    side.queue = std::move(remaining);
}

void attrition(std::vector<int>& units, double rho) {
    for (int& u : units) u -= static_cast<int>(std::floor(u * rho + 1e-9));
}

// Engagement between an attacker and a defender. The stronger army
// annihilates the weaker and bleeds proportionally to the power ratio;
// only a winning attacker damages the defender's base (by the excess).
void resolve_assault(const EnvConfig& cfg, SideState& att, SideState& def) {
    const double pa = army_power(cfg, att.units, def.units);
    const double pd = army_power(cfg, def.units, att.units);
    if (pa > pd) {
        std::fill(def.units.begin(), def.units.end(), 0);
        attrition(att.units, pd / pa);
        def.base_hp -= pa - pd;
    } else if (pd > pa) {
        std::fill(att.units.begin(), att.units.end(), 0);
        attrition(def.units, pa / pd);
    } else {
        std::fill(att.units.begin(), att.units.end(), 0);
        std::fill(def.units.begin(), def.units.end(), 0);
    }
}

// Both sides attacked the same tick: the armies meet in the field and
// no base is reached.
void resolve_field_battle(const EnvConfig& cfg, SideState& a, SideState& b) {
    const double pa = army_power(cfg, a.units, b.units);
    const double pb = army_power(cfg, b.units, a.units);
    if (pa > pb) {
        std::fill(b.units.begin(), b.units.end(), 0);
        attrition(a.units, pb / pa);
    } else if (pb > pa) {
        std::fill(a.units.begin(), a.units.end(), 0);
        attrition(b.units, pa / pb);
    } else {
        std::fill(a.units.begin(), a.units.end(), 0);
        std::fill(b.units.begin(), b.units.end(), 0);
    }
}

// View of one side as the scripts see it, recovered exactly from the
// scaled observation vector.
struct SideView {
    long long minerals = 0;
    int supply_used = 0;
    int supply_cap = 0;
    int workers = 0;
    int depots = 0;
    int factories = 0;
    std::vector<int> units;
    std::vector<int> in_progress;
    std::vector<int> seen_enemy;
    int tick = 0;

    int army_total() const {
        int t = 0;
        for (int u : units) t += u;
        return t;
    }
    int seen_total() const {
        int t = 0;
        for (int u : seen_enemy) t += u;
        return t;
    }
};

StateVector observe_side(const EnvConfig& cfg, const SideState& side, const SideState& other,
                         int tick) {
    (void)other;
    const int k = cfg.unit_count();
    StateVector obs;
    obs.reserve(cfg.state_dim());
    const int supply_cap = cfg.base_supply + side.depots * cfg.depot_supply;
    obs.push_back(static_cast<double>(side.minerals) / kMineralScale);
    obs.push_back(side.supply_used() / kCountScale);
    obs.push_back(supply_cap / kCountScale);
    obs.push_back(side.workers / kCountScale);
    obs.push_back(side.base_hp / cfg.base_hp);
    obs.push_back(other.base_hp / cfg.base_hp);
    obs.push_back(side.depots / kStructScale);
    obs.push_back(side.factories / kStructScale);
    for (int u : side.units) obs.push_back(u / kCountScale);
    for (int cat = 0; cat < cfg.category_count(); ++cat)
        obs.push_back(in_progress_count(side, cat) / kQueueScale);
    for (int cat = 0; cat < cfg.category_count(); ++cat) {
        int best_remaining = -1;
        for (const auto& item : side.queue)
            if (item.category == cat && (best_remaining < 0 || item.remaining < best_remaining))
                best_remaining = item.remaining;
        obs.push_back(best_remaining < 0
                          ? 0.0
                          : 1.0 - static_cast<double>(best_remaining) / category_duration(cfg, cat));
    }
    for (int u : side.seen_enemy) obs.push_back(u / kCountScale);
    obs.push_back(static_cast<double>(tick) / cfg.max_ticks);
    (void)k;
    return obs;
}

SideView parse_view(const EnvConfig& cfg, const StateVector& obs) {
    const int k = cfg.unit_count();
    SideView v;
    std::size_t i = 0;
    auto descale = [&](double scale) { return std::llround(obs[i++] * scale); };
    v.minerals = descale(kMineralScale);
    v.supply_used = static_cast<int>(descale(kCountScale));
    v.supply_cap = static_cast<int>(descale(kCountScale));
    v.workers = static_cast<int>(descale(kCountScale));
    i += 2;  // base hp fractions, unused by scripts
    v.depots = static_cast<int>(descale(kStructScale));
    v.factories = static_cast<int>(descale(kStructScale));
    v.units.resize(k);
    for (int u = 0; u < k; ++u) v.units[u] = static_cast<int>(descale(kCountScale));
    v.in_progress.resize(cfg.category_count());
    for (int cat = 0; cat < cfg.category_count(); ++cat)
        v.in_progress[cat] = static_cast<int>(descale(kQueueScale));
    i += cfg.category_count();  // completion fractions, unused by scripts
    v.seen_enemy.resize(k);
    for (int u = 0; u < k; ++u) v.seen_enemy[u] = static_cast<int>(descale(kCountScale));
    v.tick = static_cast<int>(std::llround(obs[i++] * cfg.max_ticks));
    return v;
}

struct ArchetypeSpec {
    std::string id;
    std::vector<double> mix;  // target unit-type shares; all zero = no army
    int worker_target = 8;
    int factory_target = 1;
    int attack_at = 8;   // launch an assault at this army size
    int press_at = 3;    // keep pushing at this size once the enemy army is gone
    bool never_attack = false;
    int opener = kActionTrainWorker;  // distinct first action per archetype
};

const std::vector<ArchetypeSpec>& archetype_table() {
    // Targets are deliberately spread out so each archetype's state
    // trajectory (worker count, structure counts, army mix) identifies
    // it within a few ticks.
    static const std::vector<ArchetypeSpec> table = {
        {"rush_alpha", {1.0, 0, 0, 0, 0}, 6, 3, 8, 3, false, kActionBuildFactory},
        {"mix_alpha_charlie", {0.4, 0, 0.6, 0, 0}, 9, 2, 10, 3, false, kActionTrainWorker},
        {"siege_delta", {0, 0, 0, 0.75, 0.25}, 12, 2, 8, 3, false, kActionBuildDepot},
        {"econ_boom", {0, 0, 0, 0, 0}, 24, 0, 0, 0, true, kActionTrainWorker},
        {"brawler_bravo", {0, 1.0, 0, 0, 0}, 8, 2, 8, 4, false, kActionTrainWorker},
    };
    return table;
}

const ArchetypeSpec& find_archetype(const std::string& id) {
    for (const auto& spec : archetype_table())
        if (spec.id == id) return spec;
    throw ContractError("unknown archetype: " + id);
}

int script_decide(const EnvConfig& cfg, const ArchetypeSpec& spec, const SideView& v) {
    if (v.tick == 0) return spec.opener;

    if (!spec.never_attack) {
        const int army = v.army_total();
        if (army >= spec.attack_at) return attack_action(cfg);
        if (v.seen_total() == 0 && army >= spec.press_at) return attack_action(cfg);
    }
    if (v.supply_cap - v.supply_used < 2 && v.in_progress[1] == 0 && v.minerals >= cfg.depot_cost)
        return kActionBuildDepot;
    if (v.workers + v.in_progress[0] < spec.worker_target && v.in_progress[0] == 0 &&
        v.minerals >= cfg.worker_cost && v.supply_used < v.supply_cap)
        return kActionTrainWorker;
    if (v.factories + v.in_progress[2] < spec.factory_target && v.minerals >= cfg.factory_cost)
        return kActionBuildFactory;

    // Train toward the target mix: pick the most deficient type and
    // save up for it rather than substituting a cheaper one.
    if (v.factories >= 1) {
        int in_prog_units = 0;
        for (int cat = 3; cat < cfg.category_count(); ++cat) in_prog_units += v.in_progress[cat];
        if (in_prog_units < v.factories) {
            int pick = -1;
            double best_score = 0.0;
            for (int u = 0; u < cfg.unit_count(); ++u) {
                if (spec.mix[u] <= 0.0) continue;
                const double score = (v.units[u] + v.in_progress[3 + u]) / spec.mix[u];
                if (pick < 0 || score < best_score) {
                    pick = u;
                    best_score = score;
                }
            }
            if (pick >= 0 && v.minerals >= cfg.unit_types[pick].cost &&
                v.supply_used < v.supply_cap)
                return kActionTrainUnit0 + pick;
        }
    }
    return kActionWait;
}

}  // namespace

double army_power(const EnvConfig& cfg, const std::vector<int>& attacker,
                  const std::vector<int>& defender) {
    const int k = cfg.unit_count();
    int def_total = 0;
    for (int u : defender) def_total += u;
    double power = 0.0;
    for (int i = 0; i < k; ++i) {
        if (attacker[i] == 0) continue;
        double weight = 1.0;
        if (def_total > 0) {
            double acc = 0.0;
            for (int j = 0; j < k; ++j) acc += cfg.unit_types[i].counter[j] * defender[j];
            weight = acc / def_total;
        }
        power += attacker[i] * cfg.unit_types[i].attack * weight;
    }
    return power;
}

StateVector observe(const EnvConfig& cfg, const GameState& state) {
    return observe_side(cfg, state.own, state.foe, state.tick);
}

StepResult step(const EnvConfig& cfg, GameState& state, int action) {
    if (action < 0 || action >= cfg.action_count())
        throw ContractError("step: action id out of range");
    if (state.tick >= cfg.max_ticks) throw ContractError("step: episode already finished");

    // The opponent decides from its view of the current tick.
    const ArchetypeSpec& foe_spec = find_archetype(cfg.opponent_archetype);
    int foe_action =
        script_decide(cfg, foe_spec, parse_view(cfg, observe_side(cfg, state.foe, state.own, state.tick)));
    if (cfg.opponent_noise > 0.0 && state.foe_rng.uniform() < cfg.opponent_noise)
        foe_action = static_cast<int>(state.foe_rng.uniform_index(cfg.action_count()));

    const bool own_attacks = apply_action(cfg, state.own, action);
    const bool foe_attacks = apply_action(cfg, state.foe, foe_action);

    for (SideState* side : {&state.own, &state.foe})
        side->minerals += static_cast<long long>(side->workers) * cfg.income_per_worker;

    advance_production(state.own);
    advance_production(state.foe);

    if (own_attacks && foe_attacks) resolve_field_battle(cfg, state.own, state.foe);
    else if (own_attacks) resolve_assault(cfg, state.own, state.foe);
    else if (foe_attacks) resolve_assault(cfg, state.foe, state.own);

    state.own.seen_enemy = state.foe.units;
    state.foe.seen_enemy = state.own.units;
    state.tick += 1;

    StepResult result;
    if (state.own.base_hp <= 0.0 || state.foe.base_hp <= 0.0) {
        result.done = true;
        result.win = state.foe.base_hp <= 0.0 && state.own.base_hp > 0.0;
    } else if (state.tick >= cfg.max_ticks) {
        result.done = true;
        result.win = state.own.base_hp > state.foe.base_hp;
    }
    return result;
}

EpisodeResult run_episode(const Controller& controller, const EnvConfig& cfg,
                          std::uint64_t seed) {
    GameState state = reset(cfg, seed);
    EpisodeResult result;
    while (true) {
        StateVector obs = observe(cfg, state);
        const int action = controller(obs);
        result.trace.emplace_back(std::move(obs), action);
        const StepResult r = step(cfg, state, action);
        if (r.done) {
            result.win = r.win;
            break;
        }
    }
    result.produced_counts = state.own.produced;
    return result;
}

std::vector<std::string> archetype_ids() {
    std::vector<std::string> ids;
    for (const auto& spec : archetype_table()) ids.push_back(spec.id);
    return ids;
}

Controller make_archetype_controller(const std::string& id, const EnvConfig& cfg) {
    const ArchetypeSpec& spec = find_archetype(id);
    return [cfg, spec](const StateVector& obs) {
        return script_decide(cfg, spec, parse_view(cfg, obs));
    };
}

RawDescriptor archetype_mix(const std::string& id, const EnvConfig& cfg) {
    const ArchetypeSpec& spec = find_archetype(id);
    RawDescriptor d;
    d.ratios = spec.mix;
    d.ratios.resize(cfg.unit_count(), 0.0);
    double total = 0.0;
    for (double r : d.ratios) total += r;
    if (total > 0.0)
        for (double& r : d.ratios) r /= total;
    return d;
}

DemoSet generate_demoset(const std::vector<std::pair<std::string, int>>& archetypes,
                         const EnvConfig& cfg, double noise, std::uint64_t seed) {
    validate_env(cfg);
    if (noise < 0.0 || noise > 1.0) throw ContractError("generate_demoset: noise must be in [0,1]");
    for (const auto& [id, count] : archetypes) {
        find_archetype(id);
        if (count < 1) throw ContractError("generate_demoset: counts must be >= 1");
    }

    DemoSet set;
    set.schema.state_dim = cfg.state_dim();
    set.schema.action_count = cfg.action_count();
    set.schema.unit_types = cfg.unit_names();

    std::uint64_t index = 0;
    for (const auto& [id, count] : archetypes) {
        const Controller script = make_archetype_controller(id, cfg);
        for (int i = 0; i < count; ++i, ++index) {
            Rng noise_rng(mix_seed(seed, "demo-noise", index));
            Controller noisy = [&](const StateVector& obs) {
                if (noise > 0.0 && noise_rng.uniform() < noise)
                    return static_cast<int>(noise_rng.uniform_index(cfg.action_count()));
                return script(obs);
            };
            EpisodeResult ep = run_episode(noisy, cfg, mix_seed(seed, "demo-env", index));

            Demonstration d;
            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "-%05llu", static_cast<unsigned long long>(index));
            d.id = id + suffix;
            d.pairs = std::move(ep.trace);
            d.unit_counts = ep.produced_counts;
            d.win = ep.win;
            d.meta["archetype"] = id;
            d.meta["opponent"] = cfg.opponent_archetype;
            set.demos.push_back(std::move(d));
        }
    }
    return set;
}

void save_env_config(const EnvConfig& cfg, const std::string& path) {
    validate_env(cfg);
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    auto& units = j["unit_types"] = nlohmann::ordered_json::array();
    for (const auto& u : cfg.unit_types) {
        nlohmann::ordered_json uj;
        uj["name"] = u.name;
        uj["cost"] = u.cost;
        uj["attack"] = u.attack;
        uj["build_ticks"] = u.build_ticks;
        uj["counter"] = u.counter;
        units.push_back(std::move(uj));
    }
    j["worker_cost"] = cfg.worker_cost;
    j["depot_cost"] = cfg.depot_cost;
    j["factory_cost"] = cfg.factory_cost;
    j["worker_ticks"] = cfg.worker_ticks;
    j["depot_ticks"] = cfg.depot_ticks;
    j["factory_ticks"] = cfg.factory_ticks;
    j["income_per_worker"] = cfg.income_per_worker;
    j["base_supply"] = cfg.base_supply;
    j["depot_supply"] = cfg.depot_supply;
    j["start_workers"] = cfg.start_workers;
    j["start_minerals"] = cfg.start_minerals;
    j["base_hp"] = cfg.base_hp;
    j["max_ticks"] = cfg.max_ticks;
    j["opponent_archetype"] = cfg.opponent_archetype;
    j["opponent_noise"] = cfg.opponent_noise;
    write_file_atomic(path, j.dump(2) + "\n");
}

EnvConfig load_env_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what(), 1);
    }
    if (j.value("format_version", -1) != 1) throw SchemaError("unsupported env format_version");
    EnvConfig cfg;
    cfg.unit_types.clear();
    for (const auto& uj : j.at("unit_types")) {
        UnitTypeSpec u;
        u.name = uj.at("name").get<std::string>();
        u.cost = uj.at("cost").get<int>();
        u.attack = uj.at("attack").get<double>();
        u.build_ticks = uj.at("build_ticks").get<int>();
        u.counter = uj.at("counter").get<std::vector<double>>();
        cfg.unit_types.push_back(std::move(u));
    }
    cfg.worker_cost = j.at("worker_cost").get<int>();
    cfg.depot_cost = j.at("depot_cost").get<int>();
    cfg.factory_cost = j.at("factory_cost").get<int>();
    cfg.worker_ticks = j.at("worker_ticks").get<int>();
    cfg.depot_ticks = j.at("depot_ticks").get<int>();
    cfg.factory_ticks = j.at("factory_ticks").get<int>();
    cfg.income_per_worker = j.at("income_per_worker").get<int>();
    cfg.base_supply = j.at("base_supply").get<int>();
    cfg.depot_supply = j.at("depot_supply").get<int>();
    cfg.start_workers = j.at("start_workers").get<int>();
    cfg.start_minerals = j.at("start_minerals").get<int>();
    cfg.base_hp = j.at("base_hp").get<double>();
    cfg.max_ticks = j.at("max_ticks").get<int>();
    cfg.opponent_archetype = j.at("opponent_archetype").get<std::string>();
    cfg.opponent_noise = j.at("opponent_noise").get<double>();
    validate_env(cfg);
    return cfg;
}

}  // namespace bril
