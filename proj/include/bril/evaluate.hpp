#pragma once

#include <map>
#include <string>
#include <vector>

#include "bril/demo.hpp"
#include "bril/descriptor.hpp"
#include "bril/env.hpp"
#include "bril/pca.hpp"

namespace bril {

// Where a policy's realized behavior sits in the behavioral space:
// mean production ratios, the nearest demonstration (searched in the
// raw descriptor space), that demonstration's reduced coordinates, and
// the distances from there to each cluster centroid.
struct BehaviorEstimate {
    RawDescriptor mean_raw;
    std::string nearest_demo_id;
    ReducedDescriptor coords;
    std::map<int, double> centroid_distances;
};

// Per-episode production ratios (zero-army episodes stay the zero
// vector), averaged component-wise.
RawDescriptor mean_behavior(const std::vector<EpisodeResult>& results);

// Nearest demonstration by Euclidean distance between raw descriptors,
// lowest id on ties; coords are that demonstration's projection.
BehaviorEstimate localize(const RawDescriptor& mean, const DemoSet& set, const PcaModel& pca);

std::map<int, double> centroid_distances(const ReducedDescriptor& coords,
                                         const std::map<int, ReducedDescriptor>& centroids);

}  // namespace bril
