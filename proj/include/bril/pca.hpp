#pragma once

#include <string>
#include <vector>

#include "bril/demo.hpp"
#include "bril/descriptor.hpp"

namespace bril {

// Standardization statistics plus the top-p principal components of
// the standardized covariance matrix, rows sorted by descending
// eigenvalue with the largest-magnitude entry of each row positive.
struct PcaModel {
    std::vector<double> mean;                     // n
    std::vector<double> std_dev;                  // n, strictly positive
    std::vector<std::vector<double>> components;  // p rows of length n
    std::vector<double> eigenvalues;              // p, non-increasing

    int input_dim() const { return static_cast<int>(mean.size()); }
    int reduced_dim() const { return static_cast<int>(components.size()); }
};

// Ratios of each combat unit type produced; all-zero when the
// demonstration produced no army at all.
RawDescriptor compute_descriptor(const Demonstration& demo);

PcaModel fit_pca(const std::vector<RawDescriptor>& descriptors, int p);

ReducedDescriptor project(const PcaModel& model, const RawDescriptor& d);

// Fraction of total standardized variance (which is n) per component.
std::vector<double> explained_variance(const PcaModel& model);

void save_pca(const PcaModel& model, const std::string& path);
PcaModel load_pca(const std::string& path);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations,
// iterated until the off-diagonal Frobenius norm drops below 1e-12.
// Returns (eigenvalues, row eigenvectors) sorted by descending value.
// Exposed for direct testing.
std::pair<std::vector<double>, std::vector<std::vector<double>>> jacobi_eigen_symmetric(
    std::vector<std::vector<double>> a);

}  // namespace bril
