#pragma once

// Independent O(n^2) DBSCAN used as the oracle for the production
// implementation. Deliberately structured differently: it first finds
// all core points, forms clusters as connected components of the core
// graph, then attaches border points. Conventions match the documented
// ones: closed eps-ball, min_pts counts the point itself, cluster ids
// ordered by the smallest core index, border points claimed by the
// lowest-id cluster with a core in range.

#include <functional>
#include <vector>

#include "bril/dbscan.hpp"

namespace bril::testing {

inline ClusterLabels reference_dbscan(const std::vector<ReducedDescriptor>& pts,
                                      const ClusterConfig& cfg) {
    const std::size_t n = pts.size();
    const double eps_sq = cfg.eps * cfg.eps;
    auto within = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t k = 0; k < pts[a].coords.size(); ++k) {
            const double d = pts[a].coords[k] - pts[b].coords[k];
            s += d * d;
        }
        return s <= eps_sq;
    };

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        int neighbors = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (within(i, j)) ++neighbors;
        core[i] = neighbors >= cfg.min_pts;
    }

    // Union-find over core points.
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j)
            if (core[j] && within(i, j)) parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
    }

    // Components get ids in order of their smallest core index.
    std::vector<int> component_id(n, -1);
    int next_id = 0;
    ClusterLabels out;
    out.labels.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const int root = find(static_cast<int>(i));
        if (component_id[root] < 0) component_id[root] = next_id++;
        out.labels[i] = component_id[root];
    }
    // Border points: lowest cluster id among cores in range.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        int best = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (!core[j] || !within(i, j)) continue;
            const int cid = out.labels[j];
            if (best < 0 || cid < best) best = cid;
        }
        out.labels[i] = best;
    }
    out.cluster_count = next_id;
    return out;
}

}  // namespace bril::testing
