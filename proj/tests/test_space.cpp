#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nblod/space.hpp"
#include "oracles.hpp"

using namespace nblod;

namespace {

Dataset random_nd(std::mt19937& gen, std::size_t n, std::size_t d) {
    // anisotropic so the spectrum has clear gaps
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> pts(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            pts[i * d + j] = u(gen) * static_cast<double>(d - j) + 0.3 * u(gen);
    return Dataset(n, d, std::move(pts));
}

std::vector<double> covariance(const Dataset& ds) {
    const std::size_t n = ds.size(), d = ds.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += ds.coord(i, j);
    for (auto& m : mean) m /= static_cast<double>(n);
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                cov[a * d + b] +=
                    (ds.coord(i, a) - mean[a]) * (ds.coord(i, b) - mean[b]);
    for (auto& v : cov) v /= static_cast<double>(n - 1);
    return cov;
}

// project through the oracle eigendecomposition
std::vector<double> oracle_projection(const Dataset& ds, std::size_t d_out) {
    const std::size_t n = ds.size(), d = ds.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += ds.coord(i, j);
    for (auto& m : mean) m /= static_cast<double>(n);
    const auto eig = oracle::jacobi_eigen(covariance(ds), d);
    std::vector<double> out(n * d_out, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d_out; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a)
                s += (ds.coord(i, a) - mean[a]) * eig.vectors[a * d + j];
            out[i * d_out + j] = s;
        }
    return out;
}

std::vector<double> pairwise(const std::vector<double>& pts, std::size_t n, std::size_t d) {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = oracle::dist(pts, d, i, j);
    return out;
}

} // namespace

TEST_CASE("full-space transform is the identity") {
    std::mt19937 gen(1);
    const Dataset ds = random_nd(gen, 20, 3);
    const auto t = SpaceTransform::fit(TransformKind::FullSpace, ds);
    REQUIRE(t.output_dim() == 3);
    REQUIRE(t.basis().empty());
    REQUIRE(t.apply(ds) == ds);
}

TEST_CASE("points on the x-axis project onto +(1,0)") {
    const Dataset ds(4, 2, {-3, 0, -1, 0, 1, 0, 3, 0});
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
    REQUIRE(t.output_dim() == 1);
    REQUIRE(t.basis()[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(t.basis()[1] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("the fitted mean projects to the zero vector") {
    std::mt19937 gen(2);
    const Dataset ds = random_nd(gen, 30, 4);
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
    std::vector<double> pts = t.mean();
    pts.insert(pts.end(), t.mean().begin(), t.mean().end()); // N >= 2
    const Dataset probe(2, 4, std::move(pts));
    const Dataset proj = t.apply(probe);
    for (std::size_t j = 0; j < proj.dim(); ++j)
        REQUIRE(proj.coord(0, j) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("6-D projection matches the dense eigendecomposition") {
    std::mt19937 gen(3);
    for (int rep = 0; rep < 4; ++rep) {
        const Dataset ds = random_nd(gen, 60, 6);
        const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
        REQUIRE(t.output_dim() == 3);
        const Dataset proj = t.apply(ds);
        const auto ref = oracle_projection(ds, 3);
        const auto got_d = pairwise(proj.points(), ds.size(), 3);
        const auto ref_d = pairwise(ref, ds.size(), 3);
        double worst = 0.0;
        for (std::size_t i = 0; i < got_d.size(); ++i)
            worst = std::max(worst, std::abs(got_d[i] - ref_d[i]));
        REQUIRE(worst <= 1e-6);
    }
}

TEST_CASE("retained variance equals the leading eigenvalue sum") {
    std::mt19937 gen(4);
    const Dataset ds = random_nd(gen, 80, 8);
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
    const Dataset proj = t.apply(ds);
    const auto eig = oracle::jacobi_eigen(covariance(ds), 8);

    double retained = 0.0;
    for (std::size_t j = 0; j < proj.dim(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < proj.size(); ++i) mean += proj.coord(i, j);
        mean /= static_cast<double>(proj.size());
        double var = 0.0;
        for (std::size_t i = 0; i < proj.size(); ++i) {
            const double c = proj.coord(i, j) - mean;
            var += c * c;
        }
        retained += var / static_cast<double>(proj.size() - 1);
    }
    double expected = 0.0;
    for (std::size_t j = 0; j < proj.dim(); ++j) expected += eig.values[j];
    REQUIRE(retained == Catch::Approx(expected).epsilon(1e-6));

    // and the transform reports the same eigenvalues
    for (std::size_t j = 0; j < proj.dim(); ++j)
        REQUIRE(t.eigenvalues()[j] == Catch::Approx(eig.values[j]).epsilon(1e-8));
}

TEST_CASE("projected per-direction variances are non-increasing") {
    std::mt19937 gen(5);
    const Dataset ds = random_nd(gen, 50, 6);
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
    const Dataset proj = t.apply(ds);
    std::vector<double> vars(proj.dim(), 0.0);
    for (std::size_t j = 0; j < proj.dim(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < proj.size(); ++i) mean += proj.coord(i, j);
        mean /= static_cast<double>(proj.size());
        for (std::size_t i = 0; i < proj.size(); ++i) {
            const double c = proj.coord(i, j) - mean;
            vars[j] += c * c;
        }
    }
    for (std::size_t j = 1; j < vars.size(); ++j) REQUIRE(vars[j] <= vars[j - 1] + 1e-9);
}

TEST_CASE("basis columns are orthonormal") {
    std::mt19937 gen(6);
    const Dataset ds = random_nd(gen, 40, 7);
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
    const std::size_t d = t.input_dim(), m = t.output_dim();
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                dot += t.basis()[i * m + a] * t.basis()[i * m + b];
            REQUIRE(dot == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-8));
        }
}

TEST_CASE("labels and ids pass through the projection unchanged") {
    std::mt19937 gen(7);
    std::vector<double> pts(20 * 4);
    std::uniform_real_distribution<double> u(-2, 2);
    for (auto& v : pts) v = u(gen);
    std::vector<int> labels(20, 0);
    labels[3] = labels[11] = 1;
    const Dataset ds(20, 4, std::move(pts), labels, "tagged");
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, ds);
    const Dataset proj = t.apply(ds);
    REQUIRE(proj.labels() == labels);
    REQUIRE(proj.ids() == ds.ids());
    REQUIRE(proj.name() == "tagged");
}

TEST_CASE("pca rejects unusable inputs") {
    const Dataset d1(3, 1, {0, 1, 2});
    REQUIRE_THROWS_AS(SpaceTransform::fit(TransformKind::PcaSubspace, d1),
                      std::invalid_argument);

    std::mt19937 gen(8);
    const Dataset d4 = random_nd(gen, 10, 4);
    const Dataset d3 = random_nd(gen, 10, 3);
    const auto t = SpaceTransform::fit(TransformKind::PcaSubspace, d4);
    REQUIRE_THROWS_AS(t.apply(d3), std::invalid_argument);
}
