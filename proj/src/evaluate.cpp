#include "bril/evaluate.hpp"

#include <cmath>

#include "bril/errors.hpp"

namespace bril {

RawDescriptor mean_behavior(const std::vector<EpisodeResult>& results) {
    if (results.empty()) throw ContractError("mean_behavior: no episodes");
    const std::size_t n = results[0].produced_counts.size();
    RawDescriptor mean;
    mean.ratios.assign(n, 0.0);
    for (const auto& ep : results) {
        if (ep.produced_counts.size() != n)
            throw ContractError("mean_behavior: inconsistent unit-type counts");
        long long total = 0;
        for (long long c : ep.produced_counts) total += c;
        if (total > 0)
            for (std::size_t i = 0; i < n; ++i)
                mean.ratios[i] += static_cast<double>(ep.produced_counts[i]) / total;
    }
    for (double& r : mean.ratios) r /= static_cast<double>(results.size());
    return mean;
}

BehaviorEstimate localize(const RawDescriptor& mean, const DemoSet& set, const PcaModel& pca) {
    if (set.demos.empty()) throw ContractError("localize: empty demo set");
    BehaviorEstimate est;
    est.mean_raw = mean;
    std::size_t best = 0;
    double best_dist = 0.0;
    std::string best_id;
    for (std::size_t j = 0; j < set.demos.size(); ++j) {
        const RawDescriptor d = compute_descriptor(set.demos[j]);
        const double dist = euclidean(mean.ratios, d.ratios);
        const bool better = j == 0 || dist < best_dist ||
                            (dist == best_dist && set.demos[j].id < best_id);
        if (better) {
            best = j;
            best_dist = dist;
            best_id = set.demos[j].id;
        }
    }
    est.nearest_demo_id = best_id;
    est.coords = project(pca, compute_descriptor(set.demos[best]));
    return est;
}

std::map<int, double> centroid_distances(const ReducedDescriptor& coords,
                                         const std::map<int, ReducedDescriptor>& centroids) {
    std::map<int, double> out;
    for (const auto& [label, c] : centroids) out[label] = euclidean(coords.coords, c.coords);
    return out;
}

}  // namespace bril
