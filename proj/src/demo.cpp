#include "bril/demo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bril/errors.hpp"
#include "bril/io_util.hpp"
#include "bril/rng.hpp"

namespace bril {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

void validate_demo(const Demonstration& d, const DemoSchema& schema, int line) {
    if (d.pairs.empty()) throw ParseError("demonstration '" + d.id + "' has no pairs", line);
    for (const auto& [state, action] : d.pairs) {
        if (static_cast<int>(state.size()) != schema.state_dim)
            throw SchemaError("line " + std::to_string(line) + ": state length " +
                              std::to_string(state.size()) + " != schema state_dim " +
                              std::to_string(schema.state_dim));
        if (action < 0 || action >= schema.action_count)
            throw ParseError("action id " + std::to_string(action) + " outside [0, " +
                                 std::to_string(schema.action_count) + ") in '" + d.id + "'",
                             line);
    }
    if (d.unit_counts.size() != schema.unit_types.size())
        throw SchemaError("line " + std::to_string(line) + ": unit_counts size != number of unit types");
    for (long long c : d.unit_counts)
        if (c < 0) throw ParseError("negative unit count in '" + d.id + "'", line);
}

}  // namespace

void validate(const DemoSet& set) {
    if (set.schema.state_dim <= 0 || set.schema.action_count <= 0)
        throw SchemaError("schema dimensions must be positive");
    std::vector<std::string> seen;
    int line = 2;
    for (const auto& d : set.demos) {
        validate_demo(d, set.schema, line++);
        seen.push_back(d.id);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw SchemaError("duplicate demonstration ids");
}

std::string serialize_demoset(const DemoSet& set) {
    std::string out;
    ordered_json header;
    header["format_version"] = kFormatVersion;
    header["record"] = "schema";
    header["state_dim"] = set.schema.state_dim;
    header["action_count"] = set.schema.action_count;
    header["unit_types"] = set.schema.unit_types;
    out += header.dump();
    out += '\n';
    for (const auto& d : set.demos) {
        ordered_json j;
        j["id"] = d.id;
        j["outcome"] = d.win ? "win" : "loss";
        j["unit_counts"] = d.unit_counts;
        j["meta"] = d.meta;  // std::map iterates sorted, so key order is canonical
        auto& pairs = j["pairs"] = ordered_json::array();
        for (const auto& [state, action] : d.pairs) pairs.push_back({state, action});
        out += j.dump();
        out += '\n';
    }
    return out;
}

void save_demoset(const DemoSet& set, const std::string& path) {
    validate(set);
    write_file_atomic(path, serialize_demoset(set));
}

DemoSet parse_demoset(const std::string& text) {
    DemoSet set;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_schema = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), lineno);
        }
        try {
            if (!have_schema) {
                if (j.value("record", "") != "schema")
                    throw ParseError("first line must be the schema record", lineno);
                if (j.value("format_version", -1) != kFormatVersion)
                    throw ParseError("unsupported format_version", lineno);
                set.schema.state_dim = j.at("state_dim").get<int>();
                set.schema.action_count = j.at("action_count").get<int>();
                set.schema.unit_types = j.at("unit_types").get<std::vector<std::string>>();
                have_schema = true;
                continue;
            }
            Demonstration d;
            d.id = j.at("id").get<std::string>();
            const std::string outcome = j.at("outcome").get<std::string>();
            if (outcome != "win" && outcome != "loss")
                throw ParseError("outcome must be win or loss", lineno);
            d.win = outcome == "win";
            d.unit_counts = j.at("unit_counts").get<std::vector<long long>>();
            d.meta = j.at("meta").get<std::map<std::string, std::string>>();
            for (const auto& pair : j.at("pairs")) {
                if (!pair.is_array() || pair.size() != 2)
                    throw ParseError("pair must be [state, action]", lineno);
                d.pairs.emplace_back(pair[0].get<StateVector>(), pair[1].get<int>());
            }
            validate_demo(d, set.schema, lineno);
            set.demos.push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    if (!have_schema) throw SchemaError("missing schema header record");
    validate(set);
    return set;
}

DemoSet load_demoset(const std::string& path) { return parse_demoset(read_text_file(path)); }

namespace {

// Largest-remainder apportionment of `total` over the three fractions.
// Ties in the remainders go to the lower split index.
std::array<std::size_t, 3> apportion(std::size_t total, const SplitSpec& spec) {
    const double fractions[3] = {spec.train, spec.val, spec.test};
    std::array<std::size_t, 3> counts{};
    double remainders[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = static_cast<double>(total) * fractions[i];
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainders[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    while (assigned < total) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (remainders[i] > remainders[best] + 1e-12) best = i;
        counts[best] += 1;
        remainders[best] = -1.0;
        ++assigned;
    }
    return counts;
}

}  // namespace

DemoSplit split_per_cluster(const DemoSet& set, const std::vector<int>& labels,
                            const SplitSpec& spec) {
    if (labels.size() != set.demos.size())
        throw ContractError("labels length != demonstration count");
    if (spec.train < 0 || spec.val < 0 || spec.test < 0 ||
        std::abs(spec.train + spec.val + spec.test - 1.0) > 1e-9)
        throw ContractError("split fractions must be non-negative and sum to 1");

    std::map<int, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < labels.size(); ++i) clusters[labels[i]].push_back(i);

    // 0 = train, 1 = val, 2 = test
    std::vector<int> assignment(set.demos.size(), 0);
    for (auto& [label, members] : clusters) {
        Rng rng(mix_seed(spec.seed, "split", static_cast<std::uint64_t>(label + 1)));
        rng.shuffle(members);
        const auto counts = apportion(members.size(), spec);
        std::size_t pos = 0;
        for (int s = 0; s < 3; ++s)
            for (std::size_t k = 0; k < counts[s]; ++k) assignment[members[pos++]] = s;
    }

    DemoSplit split;
    split.train.schema = split.val.schema = split.test.schema = set.schema;
    for (std::size_t i = 0; i < set.demos.size(); ++i) {
        DemoSet& target = assignment[i] == 0 ? split.train : assignment[i] == 1 ? split.val : split.test;
        target.demos.push_back(set.demos[i]);
    }
    return split;
}

std::vector<TrainingRow> flatten(const DemoSet& set,
                                 const std::vector<ReducedDescriptor>* behaviors) {
    if (behaviors && behaviors->size() != set.demos.size())
        throw ContractError("behaviors length != demonstration count");
    std::size_t total = 0;
    for (const auto& d : set.demos) total += d.pairs.size();
    std::vector<TrainingRow> rows;
    rows.reserve(total);
    for (std::size_t j = 0; j < set.demos.size(); ++j) {
        for (const auto& [state, action] : set.demos[j].pairs) {
            TrainingRow row;
            row.input = state;
            if (behaviors) {
                const auto& b = (*behaviors)[j].coords;
                row.input.insert(row.input.end(), b.begin(), b.end());
            }
            row.action = action;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ContractError("euclidean: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace bril
