#include "bril/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "bril/errors.hpp"
#include "bril/io_util.hpp"

namespace bril {

RawDescriptor compute_descriptor(const Demonstration& demo) {
    RawDescriptor d;
    d.ratios.assign(demo.unit_counts.size(), 0.0);
    long long total = 0;
    for (long long c : demo.unit_counts) total += c;
    if (total > 0) {
        for (std::size_t i = 0; i < demo.unit_counts.size(); ++i)
            d.ratios[i] = static_cast<double>(demo.unit_counts[i]) / static_cast<double>(total);
    }
    return d;
}

std::pair<std::vector<double>, std::vector<std::vector<double>>> jacobi_eigen_symmetric(
    std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    auto off_norm_sq = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a[p][q] * a[p][q];
        return s;
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm_sq() >= 1e-24; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });

    std::vector<double> values(n);
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        values[r] = a[order[r]][order[r]];
        for (std::size_t k = 0; k < n; ++k) rows[r][k] = v[k][order[r]];
    }
    return {std::move(values), std::move(rows)};
}

namespace {

// Flip each eigenvector so its largest-magnitude entry is positive;
// serialized models then come out identical run to run.
void canonicalize_sign(std::vector<double>& row) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
        if (std::abs(row[i]) > std::abs(row[arg])) arg = i;
    if (row[arg] < 0.0)
        for (double& x : row) x = -x;
}

}  // namespace

PcaModel fit_pca(const std::vector<RawDescriptor>& descriptors, int p) {
    const std::size_t m = descriptors.size();
    if (m < 2) throw ContractError("fit_pca requires at least 2 descriptors");
    const std::size_t n = descriptors[0].ratios.size();
    if (p < 1 || static_cast<std::size_t>(p) > n)
        throw ContractError("reduced dimension p must be in [1, n]");
    for (const auto& d : descriptors)
        if (d.ratios.size() != n) throw ContractError("descriptor dimension mismatch");

    PcaModel model;
    model.mean.assign(n, 0.0);
    model.std_dev.assign(n, 0.0);
    for (const auto& d : descriptors)
        for (std::size_t i = 0; i < n; ++i) model.mean[i] += d.ratios[i];
    for (std::size_t i = 0; i < n; ++i) model.mean[i] /= static_cast<double>(m);
    for (const auto& d : descriptors)
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = d.ratios[i] - model.mean[i];
            model.std_dev[i] += dx * dx;
        }
    for (std::size_t i = 0; i < n; ++i) {
        model.std_dev[i] = std::sqrt(model.std_dev[i] / static_cast<double>(m - 1));
        if (model.std_dev[i] <= 0.0) model.std_dev[i] = 1.0;  // zero-variance dimension
    }

    // Sample covariance of the standardized data.
    std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
    std::vector<double> z(n);
    for (const auto& d : descriptors) {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = (d.ratios[i] - model.mean[i]) / model.std_dev[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) cov[i][j] += z[i] * z[j];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cov[i][j] /= static_cast<double>(m - 1);
            cov[j][i] = cov[i][j];
        }

    auto [values, rows] = jacobi_eigen_symmetric(std::move(cov));
    model.eigenvalues.assign(values.begin(), values.begin() + p);
    model.components.assign(rows.begin(), rows.begin() + p);
    for (auto& row : model.components) canonicalize_sign(row);
    return model;
}

ReducedDescriptor project(const PcaModel& model, const RawDescriptor& d) {
    const std::size_t n = model.mean.size();
    if (d.ratios.size() != n) throw ContractError("project: descriptor dimension mismatch");
    ReducedDescriptor r;
    r.coords.assign(model.components.size(), 0.0);
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += model.components[c][i] * ((d.ratios[i] - model.mean[i]) / model.std_dev[i]);
        r.coords[c] = acc;
    }
    return r;
}

std::vector<double> explained_variance(const PcaModel& model) {
    std::vector<double> fractions(model.eigenvalues.size());
    const double total = static_cast<double>(model.mean.size());
    for (std::size_t i = 0; i < fractions.size(); ++i)
        fractions[i] = model.eigenvalues[i] / total;
    return fractions;
}

void save_pca(const PcaModel& model, const std::string& path) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["input_dim"] = model.input_dim();
    j["reduced_dim"] = model.reduced_dim();
    j["mean"] = model.mean;
    j["std"] = model.std_dev;
    j["eigenvalues"] = model.eigenvalues;
    j["components"] = model.components;  // row-major
    write_file_atomic(path, j.dump(2) + "\n");
}

PcaModel load_pca(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what(), 1);
    }
    if (j.value("format_version", -1) != 1) throw SchemaError("unsupported pca format_version");
    PcaModel model;
    model.mean = j.at("mean").get<std::vector<double>>();
    model.std_dev = j.at("std").get<std::vector<double>>();
    model.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    model.components = j.at("components").get<std::vector<std::vector<double>>>();
    if (model.components.size() != model.eigenvalues.size())
        throw SchemaError("pca model: components/eigenvalues size mismatch");
    for (const auto& row : model.components)
        if (row.size() != model.mean.size()) throw SchemaError("pca model: component length mismatch");
    return model;
}

}  // namespace bril
