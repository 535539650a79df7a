#include "bril/dbscan.hpp"

#include <cmath>

#include "bril/errors.hpp"
#include "bril/io_util.hpp"

namespace bril {

namespace {

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

std::vector<int> neighbors_of(const std::vector<ReducedDescriptor>& pts, std::size_t i,
                              double eps_sq) {
    std::vector<int> out;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < pts[i].coords.size(); ++k) {
            const double d = pts[i].coords[k] - pts[j].coords[k];
            s += d * d;
        }
        if (s <= eps_sq) out.push_back(static_cast<int>(j));
    }
    return out;
}

}  // namespace

ClusterLabels dbscan(const std::vector<ReducedDescriptor>& points, const ClusterConfig& cfg) {
    if (points.empty()) throw ContractError("dbscan: empty point set");
    if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw ContractError("dbscan: eps must be finite and > 0");
    if (cfg.min_pts < 1) throw ContractError("dbscan: min_pts must be >= 1");
    const std::size_t dim = points[0].coords.size();
    for (const auto& p : points)
        if (p.coords.size() != dim) throw ContractError("dbscan: mixed point dimensions");

    const double eps_sq = cfg.eps * cfg.eps;
    ClusterLabels result;
    result.labels.assign(points.size(), kUnvisited);
    int cid = 0;

    for (std::size_t i = 0; i < points.size(); ++i) {
        if (result.labels[i] != kUnvisited) continue;
        std::vector<int> seeds = neighbors_of(points, i, eps_sq);
        if (seeds.size() < static_cast<std::size_t>(cfg.min_pts)) {
            result.labels[i] = kNoise;  // may be claimed later as a border point
            continue;
        }
        result.labels[i] = cid;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const int j = seeds[s];
            if (result.labels[j] == kNoise) result.labels[j] = cid;  // border
            if (result.labels[j] != kUnvisited) continue;
            result.labels[j] = cid;
            std::vector<int> more = neighbors_of(points, static_cast<std::size_t>(j), eps_sq);
            if (more.size() >= static_cast<std::size_t>(cfg.min_pts))
                seeds.insert(seeds.end(), more.begin(), more.end());
        }
        ++cid;
    }
    result.cluster_count = cid;
    return result;
}

std::map<int, ReducedDescriptor> centroids(const std::vector<ReducedDescriptor>& points,
                                           const ClusterLabels& labels) {
    if (points.size() != labels.labels.size())
        throw ContractError("centroids: points/labels length mismatch");
    std::map<int, ReducedDescriptor> out;
    std::map<int, int> counts;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int label = labels.labels[i];
        if (label < 0) continue;
        auto& c = out[label];
        if (c.coords.empty()) c.coords.assign(points[i].coords.size(), 0.0);
        for (std::size_t k = 0; k < points[i].coords.size(); ++k) c.coords[k] += points[i].coords[k];
        counts[label] += 1;
    }
    for (auto& [label, c] : out)
        for (double& x : c.coords) x /= static_cast<double>(counts[label]);
    return out;
}

std::string labels_to_csv(const std::vector<ReducedDescriptor>& points,
                          const ClusterLabels& labels) {
    if (points.size() != labels.labels.size())
        throw ContractError("labels_to_csv: points/labels length mismatch");
    const std::size_t dim = points.empty() ? 2 : points[0].coords.size();
    std::vector<std::string> cols = {"index"};
    for (std::size_t k = 0; k < dim; ++k) cols.push_back("x" + std::to_string(k));
    cols.push_back("label");
    std::string csv = csv_preamble(1, cols);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<std::string> cells = {std::to_string(i)};
        for (double x : points[i].coords) cells.push_back(format_double(x));
        cells.push_back(std::to_string(labels.labels[i]));
        csv += join_csv_row(cells);
    }
    return csv;
}

}  // namespace bril
