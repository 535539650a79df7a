#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bril/descriptor.hpp"

namespace bril {

// Feature vector the policy sees: resources, supply, own unit and
// structure counts, in-progress counts with completion fractions in
// [0,1], and the observed enemy unit tally. The dimensionality is
// fixed by the environment configuration.
using StateVector = std::vector<double>;

struct DemoSchema {
    int state_dim = 0;
    int action_count = 0;
    std::vector<std::string> unit_types;

    bool operator==(const DemoSchema&) const = default;
};

// One recorded episode: ordered state-action pairs, the per-type tally
// of combat units produced, and the win/loss outcome.
struct Demonstration {
    std::string id;
    std::vector<std::pair<StateVector, int>> pairs;
    std::vector<long long> unit_counts;
    bool win = false;
    std::map<std::string, std::string> meta;

    bool operator==(const Demonstration&) const = default;
};

struct DemoSet {
    DemoSchema schema;
    std::vector<Demonstration> demos;

    bool operator==(const DemoSet&) const = default;
    std::size_t size() const { return demos.size(); }
};

// Train/val/test fractions. Must be non-negative and sum to 1.
struct SplitSpec {
    double train = 0.6;
    double val = 0.1;
    double test = 0.3;
    std::uint64_t seed = 0;
};

struct DemoSplit {
    DemoSet train;
    DemoSet val;
    DemoSet test;
};

// One supervised example: network input (state, optionally followed
// by the behavior coordinates) and the demonstrated action.
struct TrainingRow {
    std::vector<double> input;
    int action = 0;
};

// Line-delimited records, one demonstration per line, preceded by a
// schema header line. Round-trips bit-exactly.
DemoSet load_demoset(const std::string& path);
void save_demoset(const DemoSet& set, const std::string& path);

// Serialized form without touching the filesystem (used by save and
// by tests asserting byte determinism).
std::string serialize_demoset(const DemoSet& set);
DemoSet parse_demoset(const std::string& text);

// Splits every cluster (noise label -1 included) separately. Counts
// per split follow largest-remainder rounding of the fractions, ties
// broken toward the lower split index; membership is a seeded shuffle.
DemoSplit split_per_cluster(const DemoSet& set, const std::vector<int>& labels,
                            const SplitSpec& spec);

// One row per state-action pair; when behaviors are given, each row's
// input is the state with its demo's coordinates appended.
std::vector<TrainingRow> flatten(const DemoSet& set,
                                 const std::vector<ReducedDescriptor>* behaviors = nullptr);

void validate(const DemoSet& set);

}  // namespace bril
