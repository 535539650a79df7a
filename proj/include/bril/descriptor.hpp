#pragma once

#include <vector>

namespace bril {

// Per-demonstration unit-production ratios. Entries are non-negative
// and sum to 1, except for the all-zero no-army case.
struct RawDescriptor {
    std::vector<double> ratios;

    bool operator==(const RawDescriptor&) const = default;
};

// Coordinates of a behavior in the reduced space (2-D by default).
struct ReducedDescriptor {
    std::vector<double> coords;

    bool operator==(const ReducedDescriptor&) const = default;
};

double euclidean(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace bril
