#pragma once

#include <string>
#include <vector>

#include "bril/demo.hpp"
#include "bril/mlp.hpp"
#include "bril/rng.hpp"

namespace bril::testing {

inline DemoSchema tiny_schema(int state_dim = 3, int action_count = 4) {
    DemoSchema s;
    s.state_dim = state_dim;
    s.action_count = action_count;
    s.unit_types = {"alpha", "bravo", "charlie", "delta"};
    return s;
}

inline Demonstration make_demo(const std::string& id, int pair_count,
                               const std::vector<long long>& unit_counts, int state_dim = 3,
                               int action = 1) {
    Demonstration d;
    d.id = id;
    for (int k = 0; k < pair_count; ++k) {
        StateVector s(state_dim, 0.0);
        s[0] = static_cast<double>(k);
        d.pairs.emplace_back(std::move(s), action);
    }
    d.unit_counts = unit_counts;
    d.win = pair_count % 2 == 0;
    return d;
}

inline DemoSet make_demoset(int demo_count, int pair_count = 2) {
    DemoSet set;
    set.schema = tiny_schema();
    for (int j = 0; j < demo_count; ++j) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "d%03d", j);
        set.demos.push_back(make_demo(buf, pair_count, {1, 0, 2, 0}));
    }
    return set;
}

// Three linearly separable 2-D classes with a margin. A nearest-center
// rule (linear) classifies the generated rows perfectly, which the
// tests verify before trusting the data.
inline std::pair<std::vector<TrainingRow>, std::vector<TrainingRow>> separable_three_class(
    int train_rows, int test_rows, std::uint64_t seed) {
    const double cx[3] = {2.0, -1.0, -1.0};
    const double cy[3] = {0.0, 1.8, -1.8};
    Rng rng(seed);
    auto sample = [&](int count) {
        std::vector<TrainingRow> rows;
        while (static_cast<int>(rows.size()) < count) {
            const int cls = static_cast<int>(rng.uniform_index(3));
            const double x = cx[cls] + rng.uniform_range(-0.6, 0.6);
            const double y = cy[cls] + rng.uniform_range(-0.6, 0.6);
            int nearest = 0;
            double best = 1e300, second = 1e300;
            for (int k = 0; k < 3; ++k) {
                const double d = (x - cx[k]) * (x - cx[k]) + (y - cy[k]) * (y - cy[k]);
                if (d < best) {
                    second = best;
                    best = d;
                    nearest = k;
                } else if (d < second) {
                    second = d;
                }
            }
            if (nearest != cls || second - best < 0.5) continue;  // enforce the margin
            rows.push_back({{x, y}, cls});
        }
        return rows;
    };
    return {sample(train_rows), sample(test_rows)};
}

// The independent linear oracle for the synthetic set.
inline int nearest_center_class(const std::vector<double>& input) {
    const double cx[3] = {2.0, -1.0, -1.0};
    const double cy[3] = {0.0, 1.8, -1.8};
    int nearest = 0;
    double best = 1e300;
    for (int k = 0; k < 3; ++k) {
        const double d = (input[0] - cx[k]) * (input[0] - cx[k]) +
                         (input[1] - cy[k]) * (input[1] - cy[k]);
        if (d < best) {
            best = d;
            nearest = k;
        }
    }
    return nearest;
}

}  // namespace bril::testing
