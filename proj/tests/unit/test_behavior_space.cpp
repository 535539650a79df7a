#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bril/errors.hpp"
#include "bril/pca.hpp"
#include "bril/rng.hpp"
#include "support/pca_oracle.hpp"
#include "support/test_helpers.hpp"

using namespace bril;
using namespace bril::testing;

namespace {

std::vector<RawDescriptor> random_descriptors(int count, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<RawDescriptor> out;
    for (int i = 0; i < count; ++i) {
        RawDescriptor d;
        d.ratios.resize(dim);
        double sum = 0.0;
        for (double& r : d.ratios) {
            r = rng.uniform();
            sum += r;
        }
        for (double& r : d.ratios) r /= sum;
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace

TEST_SUITE("behavior_space") {

TEST_CASE("descriptor is the production ratio vector") {
    Demonstration d = make_demo("x", 1, {10, 30, 0, 0});
    const RawDescriptor r = compute_descriptor(d);
    CHECK(r.ratios == std::vector<double>{0.25, 0.75, 0.0, 0.0});

    d.unit_counts = {0, 0, 0, 0};
    CHECK(compute_descriptor(d).ratios == std::vector<double>{0, 0, 0, 0});

    d.unit_counts = {1, 1, 1, 1};
    CHECK(compute_descriptor(d).ratios == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("variance confined to one axis") {
    std::vector<RawDescriptor> pts = {{{1, 0}}, {{-1, 0}}, {{2, 0}}, {{-2, 0}}};
    const PcaModel model = fit_pca(pts, 2);
    CHECK(model.components[0][0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(model.components[0][1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(model.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(model.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-10));
    const auto fractions = explained_variance(model);
    CHECK(fractions[0] == doctest::Approx(0.5).epsilon(1e-8));  // constant axis contributes no variance
    CHECK(fractions[1] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("2x2 eigenpairs match the closed-form oracle") {
    // Eigenvectors are compared up to a global sign: when the two
    // entries have (numerically) equal magnitude, the canonical sign
    // choice can flip on a 1-ulp difference between the two methods.
    auto row_error = [](const std::vector<double>& got, const std::vector<double>& want) {
        double plus = 0.0, minus = 0.0;
        for (int k = 0; k < 2; ++k) {
            plus = std::max(plus, std::abs(got[k] - want[k]));
            minus = std::max(minus, std::abs(got[k] + want[k]));
        }
        return std::min(plus, minus);
    };
    for (std::uint64_t seed : {3u, 17u, 40u}) {
        Rng rng(seed);
        std::vector<RawDescriptor> pts;
        const int m = 3 + static_cast<int>(rng.uniform_index(5));
        for (int i = 0; i < m; ++i)
            pts.push_back({{rng.uniform_range(-2, 2), rng.uniform_range(-2, 2)}});
        const Eigen2x2 oracle = closed_form_2d(pts);
        const PcaModel model = fit_pca(pts, 2);
        CHECK(model.eigenvalues[0] == doctest::Approx(oracle.l1).epsilon(1e-8));
        CHECK(model.eigenvalues[1] == doctest::Approx(oracle.l2).epsilon(1e-8));
        CHECK(row_error(model.components[0], oracle.v1) < 1e-8);
        CHECK(row_error(model.components[1], oracle.v2) < 1e-8);
    }
}

TEST_CASE("full-rank projection reconstructs the input") {
    const auto pts = random_descriptors(40, 4, 11);
    const PcaModel model = fit_pca(pts, 4);
    for (const auto& p : pts) {
        const ReducedDescriptor r = project(model, p);
        for (int i = 0; i < 4; ++i) {
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += model.components[c][i] * r.coords[c];
            const double reconstructed = model.mean[i] + model.std_dev[i] * acc;
            CHECK(reconstructed == doctest::Approx(p.ratios[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("projection basics and brute-force oracle") {
    const auto pts = random_descriptors(60, 5, 23);
    const PcaModel model = fit_pca(pts, 2);

    RawDescriptor at_mean{model.mean};
    for (double c : project(model, at_mean).coords) CHECK(c == doctest::Approx(0.0).epsilon(1e-12));

    RawDescriptor along_first;
    along_first.ratios.resize(5);
    for (int i = 0; i < 5; ++i)
        along_first.ratios[i] = model.mean[i] + model.std_dev[i] * model.components[0][i];
    const auto coords = project(model, along_first).coords;
    CHECK(coords[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(coords[1] == doctest::Approx(0.0).epsilon(1e-10));

    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        RawDescriptor d;
        d.ratios.resize(5);
        for (double& x : d.ratios) x = rng.uniform_range(-1, 1);
        const auto got = project(model, d).coords;
        for (int c = 0; c < 2; ++c) {
            double expected = 0.0;
            for (int i = 0; i < 5; ++i)
                expected += model.components[c][i] * (d.ratios[i] - model.mean[i]) / model.std_dev[i];
            CHECK(got[c] == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("explained variance sums to 1 at full rank") {
    const auto pts = random_descriptors(200, 4, 31);
    const PcaModel model = fit_pca(pts, 4);
    const auto fractions = explained_variance(model);
    double oracle_sum = 0.0;
    for (double v : model.eigenvalues) oracle_sum += v;
    CHECK(oracle_sum / 4.0 == doctest::Approx(1.0).epsilon(1e-8));
    double total = 0.0;
    for (double f : fractions) {
        CHECK(f >= -1e-12);
        total += f;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t i = 1; i < fractions.size(); ++i) CHECK(fractions[i] <= fractions[i - 1] + 1e-12);
}

TEST_CASE("components are orthonormal and capture the projected variance") {
    const auto pts = random_descriptors(500, 6, 47);
    const PcaModel model = fit_pca(pts, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            double dot = 0.0;
            for (int i = 0; i < 6; ++i) dot += model.components[a][i] * model.components[b][i];
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
    // Sample variance along component i equals eigenvalue i.
    std::vector<std::vector<double>> projected;
    for (const auto& p : pts) projected.push_back(project(model, p).coords);
    for (int c = 0; c < 6; ++c) {
        double mean = 0.0;
        for (const auto& row : projected) mean += row[c];
        mean /= projected.size();
        double var = 0.0;
        for (const auto& row : projected) var += (row[c] - mean) * (row[c] - mean);
        var /= projected.size() - 1;
        if (model.eigenvalues[c] > 1e-9)
            CHECK(std::abs(var - model.eigenvalues[c]) / model.eigenvalues[c] < 1e-6);
    }
}

TEST_CASE("projection is affine") {
    const auto pts = random_descriptors(30, 4, 53);
    const PcaModel model = fit_pca(pts, 2);
    Rng rng(9);
    for (int rep = 0; rep < 8; ++rep) {
        const double alpha = rng.uniform();
        RawDescriptor d1, d2, blend;
        d1.ratios.resize(4);
        d2.ratios.resize(4);
        blend.ratios.resize(4);
        for (int i = 0; i < 4; ++i) {
            d1.ratios[i] = rng.uniform_range(-1, 1);
            d2.ratios[i] = rng.uniform_range(-1, 1);
            blend.ratios[i] = alpha * d1.ratios[i] + (1 - alpha) * d2.ratios[i];
        }
        const auto p1 = project(model, d1).coords;
        const auto p2 = project(model, d2).coords;
        const auto pb = project(model, blend).coords;
        for (int c = 0; c < 2; ++c)
            CHECK(pb[c] == doctest::Approx(alpha * p1[c] + (1 - alpha) * p2[c]).epsilon(1e-9));
    }
}

TEST_CASE("pca model round-trips through its file format") {
    const auto pts = random_descriptors(50, 5, 61);
    const PcaModel model = fit_pca(pts, 3);
    const std::string path =
        (std::filesystem::temp_directory_path() / "bril_pca_rt.json").string();
    save_pca(model, path);
    const PcaModel loaded = load_pca(path);
    CHECK(loaded.mean == model.mean);
    CHECK(loaded.std_dev == model.std_dev);
    CHECK(loaded.eigenvalues == model.eigenvalues);
    CHECK(loaded.components == model.components);
}

TEST_CASE("contract errors") {
    const auto pts = random_descriptors(10, 3, 71);
    CHECK_THROWS_AS(fit_pca(pts, 0), ContractError);
    CHECK_THROWS_AS(fit_pca(pts, 4), ContractError);
    CHECK_THROWS_AS(fit_pca({pts[0]}, 1), ContractError);
    const PcaModel model = fit_pca(pts, 2);
    CHECK_THROWS_AS(project(model, RawDescriptor{{1.0, 2.0}}), ContractError);
}

}  // TEST_SUITE
