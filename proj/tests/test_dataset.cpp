#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "nblod/dataset.hpp"
#include "oracles.hpp"

using namespace nblod;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("nblod_test_" + name);
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    f << content;
}

Dataset random_dataset(std::mt19937& gen, std::size_t n, std::size_t d, bool labels) {
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::bernoulli_distribution lab(0.3);
    std::vector<double> pts(n * d);
    for (auto& v : pts) v = coord(gen);
    std::optional<std::vector<int>> lv;
    if (labels) {
        lv.emplace(n);
        for (auto& v : *lv) v = lab(gen) ? 1 : 0;
    }
    return Dataset(n, d, std::move(pts), std::move(lv), "random");
}

} // namespace

TEST_CASE("load_csv parses a plain labeled file") {
    const auto p = temp_file("basic.csv");
    write_file(p, "1,2,0\n5,6,1\n2,1,0\n");
    CsvReadOptions opts;
    opts.label_column = "2";
    const Dataset ds = load_csv(p.string(), opts);
    REQUIRE(ds.size() == 3);
    REQUIRE(ds.dim() == 2);
    REQUIRE(ds.labels() == std::vector<int>{0, 1, 0});
    REQUIRE(ds.coord(1, 1) == 6.0);
    REQUIRE(ds.ids() == std::vector<int>{0, 1, 2});
    fs::remove(p);
}

TEST_CASE("load_csv resolves a named label column through the header") {
    const auto p = temp_file("named.csv");
    write_file(p, "a,b,outlier\n0.5,1.5,0\n2.5,3.5,1\n");
    CsvReadOptions opts;
    opts.has_header = true;
    opts.label_column = "outlier";
    const Dataset ds = load_csv(p.string(), opts);
    REQUIRE(ds.size() == 2);
    REQUIRE(ds.labels() == std::vector<int>{0, 1});
    fs::remove(p);
}

TEST_CASE("load_csv rejects bad cells with their location") {
    const auto p = temp_file("bad.csv");

    SECTION("NaN cell") {
        write_file(p, "1,2\n3,NaN\n");
        REQUIRE_THROWS_WITH(load_csv(p.string()),
                            Catch::Matchers::ContainsSubstring("row 2") &&
                                Catch::Matchers::ContainsSubstring("column 2"));
    }
    SECTION("ragged row") {
        write_file(p, "1,2\n3\n");
        REQUIRE_THROWS_WITH(load_csv(p.string()),
                            Catch::Matchers::ContainsSubstring("row 2") &&
                                Catch::Matchers::ContainsSubstring("expected 2"));
    }
    SECTION("non-binary label") {
        write_file(p, "1,2,2\n3,4,0\n");
        CsvReadOptions opts;
        opts.label_column = "2";
        REQUIRE_THROWS_WITH(load_csv(p.string(), opts),
                            Catch::Matchers::ContainsSubstring("0 or 1"));
    }
    SECTION("missing label column") {
        write_file(p, "a,b\n1,2\n3,4\n");
        CsvReadOptions opts;
        opts.has_header = true;
        opts.label_column = "outlier";
        REQUIRE_THROWS_WITH(load_csv(p.string(), opts),
                            Catch::Matchers::ContainsSubstring("outlier"));
    }
    fs::remove(p);
}

TEST_CASE("save_csv emits one row per point, label last") {
    const auto p = temp_file("save.csv");
    const Dataset ds(2, 1, {1.5, -2.5}, std::vector<int>{0, 1});
    save_csv(ds, p.string());
    std::ifstream f(p);
    std::string l1, l2;
    std::getline(f, l1);
    std::getline(f, l2);
    REQUIRE(l1 == "1.5,0");
    REQUIRE(l2 == "-2.5,1");
    fs::remove(p);
}

TEST_CASE("save_csv omits the label column for unlabeled data") {
    const auto p = temp_file("nolabel.csv");
    const Dataset ds(2, 2, {1, 2, 3, 4});
    save_csv(ds, p.string());
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    REQUIRE(line == "1,2");
    fs::remove(p);
}

TEST_CASE("csv round-trip is the identity") {
    std::mt19937 gen(42);
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset ds = random_dataset(gen, 10, 4, rep % 2 == 0);
        const auto p = temp_file("roundtrip.csv");
        save_csv(ds, p.string());
        CsvReadOptions opts;
        if (ds.has_labels()) opts.label_column = "4";
        const Dataset back = load_csv(p.string(), opts);
        REQUIRE(back == ds);
        fs::remove(p);
    }
}

TEST_CASE("synthetic datasets match their published shape") {
    struct Expect {
        SyntheticVariant variant;
        std::size_t n, outliers;
    };
    const Expect table[] = {
        {SyntheticVariant::Data1, 940, 90},
        {SyntheticVariant::Data2, 1100, 105},
        {SyntheticVariant::Data3, 324, 58},
    };
    for (const auto& e : table) {
        const Dataset ds = generate_synthetic({e.variant, 7});
        CAPTURE(variant_name(e.variant));
        REQUIRE(ds.size() == e.n);
        REQUIRE(ds.dim() == 2);
        REQUIRE(ds.outlier_count() == e.outliers);
    }
}

TEST_CASE("generation is a pure function of variant and seed") {
    for (auto variant :
         {SyntheticVariant::Data1, SyntheticVariant::Data2, SyntheticVariant::Data3}) {
        const Dataset a = generate_synthetic({variant, 7});
        const Dataset b = generate_synthetic({variant, 7});
        REQUIRE(a == b);
        const Dataset c = generate_synthetic({variant, 8});
        REQUIRE(!(a == c));
    }
}

TEST_CASE("data2 cluster densities differ by at least 2x") {
    const Dataset ds = generate_synthetic({SyntheticVariant::Data2, 7});
    // counts within a fixed radius of the blob center and of a point on the ring
    auto count_near = [&](double cx, double cy, double r) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const double dx = ds.coord(i, 0) - cx, dy = ds.coord(i, 1) - cy;
            if (dx * dx + dy * dy <= r * r) ++c;
        }
        return c;
    };
    const double blob = static_cast<double>(count_near(-6.0, 0.0, 0.5));
    const double ring = static_cast<double>(count_near(8.6, 0.0, 0.5));
    REQUIRE(ring > 0);
    REQUIRE(blob / ring >= 2.0);
}

TEST_CASE("dataset constructor enforces invariants") {
    REQUIRE_THROWS_AS(Dataset(1, 1, {0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(Dataset(2, 1, {0.0, std::numeric_limits<double>::quiet_NaN()}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(Dataset(2, 1, {0.0, 1.0}, std::vector<int>{0}), std::invalid_argument);
    REQUIRE_THROWS_AS(Dataset(2, 1, {0.0, 1.0}, std::vector<int>{0, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(Dataset(2, 1, {0.0, 1.0}, std::nullopt, "x", std::vector<int>{1, 1}),
                      std::invalid_argument);
}
