#pragma once

#include <map>
#include <string>
#include <vector>

#include "bril/descriptor.hpp"

namespace bril {

struct ClusterConfig {
    double eps = 0.02;
    int min_pts = 30;
};

// Per-point labels: -1 for noise, 0..m-1 for clusters. Cluster ids are
// assigned in order of first core-point discovery (ascending index).
struct ClusterLabels {
    std::vector<int> labels;
    int cluster_count = 0;

    bool operator==(const ClusterLabels&) const = default;
};

// Euclidean DBSCAN over the reduced space. A core point has at least
// min_pts neighbors within eps (closed ball, self included). Border
// points attach to the first cluster whose expansion reaches them.
// Brute-force O(n^2) neighborhoods; fine at the point counts used here.
ClusterLabels dbscan(const std::vector<ReducedDescriptor>& points, const ClusterConfig& cfg);

// Arithmetic mean of each cluster's members; noise excluded.
std::map<int, ReducedDescriptor> centroids(const std::vector<ReducedDescriptor>& points,
                                           const ClusterLabels& labels);

// CSV rows (index, coordinates..., label) for plotting.
std::string labels_to_csv(const std::vector<ReducedDescriptor>& points,
                          const ClusterLabels& labels);

}  // namespace bril
