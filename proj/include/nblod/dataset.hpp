#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace nblod {

// N x D point matrix with optional binary outlier labels (1 = outlier).
// Immutable after construction.
class Dataset {
public:
    Dataset(std::size_t n, std::size_t d, std::vector<double> points,
            std::optional<std::vector<int>> labels = std::nullopt,
            std::string name = "", std::optional<std::vector<int>> ids = std::nullopt)
        : n_(n), d_(d), points_(std::move(points)), labels_(std::move(labels)),
          name_(std::move(name)) {
        if (n_ < 2) throw std::invalid_argument("dataset: need at least 2 points");
        if (d_ < 1) throw std::invalid_argument("dataset: need at least 1 dimension");
        if (points_.size() != n_ * d_)
            throw std::invalid_argument("dataset: point buffer size does not match N*D");
        for (double v : points_)
            if (!std::isfinite(v))
                throw std::invalid_argument("dataset: non-finite coordinate");
        if (labels_) {
            if (labels_->size() != n_)
                throw std::invalid_argument("dataset: label count does not match N");
            for (int v : *labels_)
                if (v != 0 && v != 1)
                    throw std::invalid_argument("dataset: labels must be 0 or 1");
        }
        if (ids) {
            if (ids->size() != n_)
                throw std::invalid_argument("dataset: id count does not match N");
            std::unordered_set<int> seen(ids->begin(), ids->end());
            if (seen.size() != n_)
                throw std::invalid_argument("dataset: ids must be unique");
            ids_ = std::move(*ids);
        } else {
            ids_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) ids_[i] = static_cast<int>(i);
        }
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * d_, d_};
    }
    double coord(std::size_t i, std::size_t j) const { return points_[i * d_ + j]; }
    const std::vector<double>& points() const { return points_; }

    bool has_labels() const { return labels_.has_value(); }
    const std::vector<int>& labels() const {
        if (!labels_) throw std::logic_error("dataset '" + name_ + "' has no labels");
        return *labels_;
    }
    std::size_t outlier_count() const {
        std::size_t c = 0;
        for (int v : labels()) c += static_cast<std::size_t>(v);
        return c;
    }

    const std::vector<int>& ids() const { return ids_; }
    const std::string& name() const { return name_; }

    // Same labels/ids/name over a new coordinate matrix (used by space transforms).
    Dataset with_points(std::size_t d, std::vector<double> points) const {
        return Dataset(n_, d, std::move(points), labels_, name_, ids_);
    }

    bool operator==(const Dataset& o) const {
        return n_ == o.n_ && d_ == o.d_ && points_ == o.points_ && labels_ == o.labels_ &&
               ids_ == o.ids_;
    }

private:
    std::size_t n_, d_;
    std::vector<double> points_;
    std::optional<std::vector<int>> labels_;
    std::vector<int> ids_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvReadOptions {
    char delimiter = ',';
    bool has_header = false;
    // With a header: column name (a pure integer also accepted as an index).
    // Without: 0-based column index.
    std::optional<std::string> label_column;
};

struct CsvWriteOptions {
    char delimiter = ',';
    bool header = false; // x0..x{D-1}[,label]
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_cell(const std::string& raw, std::size_t line_no, std::size_t col_no) {
    const std::string tok = trim(raw);
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || tok.empty() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "csv: row " << line_no << ", column " << col_no + 1 << ": cannot parse '" << tok
            << "' as a finite real";
        throw std::runtime_error(msg.str());
    }
    return v;
}

inline std::optional<std::size_t> parse_index(const std::string& tok) {
    if (tok.empty()) return std::nullopt;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

} // namespace detail

inline Dataset load_csv(const std::string& path, const CsvReadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> label_idx;
    std::size_t n_cols = 0;
    std::vector<std::string> header;

    if (opts.has_header) {
        if (!std::getline(in, line)) throw std::runtime_error("csv: '" + path + "' is empty");
        ++line_no;
        header = detail::split_line(line, opts.delimiter);
        for (auto& h : header) h = detail::trim(h);
        n_cols = header.size();
    }

    if (opts.label_column) {
        const std::string& want = *opts.label_column;
        if (opts.has_header) {
            for (std::size_t j = 0; j < header.size(); ++j)
                if (header[j] == want) label_idx = j;
            if (!label_idx) label_idx = detail::parse_index(want);
            if (!label_idx || *label_idx >= n_cols) {
                std::ostringstream msg;
                msg << "csv: no column named '" << want << "' in '" << path << "' (columns:";
                for (const auto& h : header) msg << " " << h;
                msg << ")";
                throw std::runtime_error(msg.str());
            }
        } else {
            label_idx = detail::parse_index(want);
            if (!label_idx)
                throw std::runtime_error("csv: label column '" + want +
                                         "' must be a 0-based index when the file has no header");
        }
    }

    std::vector<double> points;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_line(line, opts.delimiter);
        if (n_cols == 0) {
            n_cols = cells.size();
            if (label_idx && *label_idx >= n_cols) {
                std::ostringstream msg;
                msg << "csv: label column index " << *label_idx << " out of range (row has "
                    << n_cols << " fields)";
                throw std::runtime_error(msg.str());
            }
        }
        if (cells.size() != n_cols) {
            std::ostringstream msg;
            msg << "csv: row " << line_no << " has " << cells.size() << " fields, expected "
                << n_cols;
            throw std::runtime_error(msg.str());
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const double v = detail::parse_cell(cells[j], line_no, j);
            if (label_idx && j == *label_idx) {
                if (v != 0.0 && v != 1.0) {
                    std::ostringstream msg;
                    msg << "csv: row " << line_no << ", label column: value must be 0 or 1, got '"
                        << detail::trim(cells[j]) << "'";
                    throw std::runtime_error(msg.str());
                }
                labels.push_back(static_cast<int>(v));
            } else {
                points.push_back(v);
            }
        }
    }
    if (n_cols == 0) throw std::runtime_error("csv: '" + path + "' has no data rows");

    const std::size_t d = n_cols - (label_idx ? 1 : 0);
    if (d == 0) throw std::runtime_error("csv: '" + path + "' has no feature columns");
    const std::size_t n = points.size() / d;
    std::optional<std::vector<int>> lab;
    if (label_idx) lab = std::move(labels);
    return Dataset(n, d, std::move(points), std::move(lab), path);
}

inline void save_csv(const Dataset& ds, const std::string& path,
                     const CsvWriteOptions& opts = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
    const char delim = opts.delimiter;
    if (opts.header) {
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            if (j) out << delim;
            out << "x" << j;
        }
        if (ds.has_labels()) out << delim << "label";
        out << "\n";
    }
    char buf[40];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            if (j) out << delim;
            std::snprintf(buf, sizeof(buf), "%.17g", ds.coord(i, j));
            out << buf;
        }
        if (ds.has_labels()) out << delim << ds.labels()[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("csv: write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Synthetic benchmark datasets

enum class SyntheticVariant { Data1, Data2, Data3 };

struct SyntheticSpec {
    SyntheticVariant variant;
    std::uint64_t seed = 0;
};

inline SyntheticVariant parse_variant(std::string tok) {
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (tok == "data1") return SyntheticVariant::Data1;
    if (tok == "data2") return SyntheticVariant::Data2;
    if (tok == "data3") return SyntheticVariant::Data3;
    throw std::invalid_argument("unknown synthetic variant '" + tok +
                                "' (expected data1|data2|data3)");
}

inline std::string variant_name(SyntheticVariant v) {
    switch (v) {
    case SyntheticVariant::Data1: return "data1";
    case SyntheticVariant::Data2: return "data2";
    case SyntheticVariant::Data3: return "data3";
    }
    return "?";
}

namespace detail {

// mt19937_64-backed sampling with fixed derivations, so generated datasets are
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    double uniform() { // [0,1)
        return static_cast<double>(state_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    std::size_t index(std::size_t n) { // [0,n)
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// axis-aligned anisotropic Gaussian; sx == sy gives the round case
struct GaussCluster {
    double cx, cy, sx, sy;
    std::size_t count;
    double mahalanobis(double x, double y) const {
        const double dx = (x - cx) / sx, dy = (y - cy) / sy;
        return std::sqrt(dx * dx + dy * dy);
    }
};

inline void emit_gauss(Rng& rng, const GaussCluster& c, std::vector<double>& pts) {
    for (std::size_t i = 0; i < c.count; ++i) {
        pts.push_back(c.cx + c.sx * rng.normal());
        pts.push_back(c.cy + c.sy * rng.normal());
    }
}

// One outlier band hugging a cluster: points on the [r_lo, r_hi] Mahalanobis
// shell, kept min_sep apart from every other outlier (cross-band pairs use the
// larger of the two separations).
struct HaloBand {
    const GaussCluster* cluster;
    std::size_t count;
    double r_lo, r_hi;
    double min_sep;
};

// Draws every band's outliers with a shared pairwise-separation check
// (cross-band pairs use the larger nominal separation). A global relaxation
// factor shrinks whenever a band stalls, so the loop always terminates.
inline void scatter_halos(Rng& rng, std::span<const HaloBand> bands,
                          std::span<const GaussCluster> clusters, double clear_radius,
                          std::vector<double>& pts) {
    struct Placed {
        double x, y, sep;
    };
    std::vector<Placed> placed;
    double relax = 1.0;
    for (const auto& band : bands) {
        std::size_t done = 0, failures = 0;
        while (done < band.count) {
            const double ang = rng.uniform(0.0, 6.283185307179586);
            const double r = rng.uniform(band.r_lo, band.r_hi);
            const double x = band.cluster->cx + r * band.cluster->sx * std::cos(ang);
            const double y = band.cluster->cy + r * band.cluster->sy * std::sin(ang);
            bool ok = true;
            for (const auto& c : clusters)
                if (c.mahalanobis(x, y) < clear_radius) ok = false;
            if (ok) {
                for (const auto& p : placed) {
                    const double need = std::max(band.min_sep, p.sep) * relax;
                    const double dx = x - p.x, dy = y - p.y;
                    if (dx * dx + dy * dy < need * need) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) {
                placed.push_back({x, y, band.min_sep});
                ++done;
                failures = 0;
            } else if (++failures > 5000) {
                relax *= 0.9;
                failures = 0;
            }
        }
    }
    for (const auto& p : placed) {
        pts.push_back(p.x);
        pts.push_back(p.y);
    }
}

inline Dataset finish(std::vector<double> pts, std::size_t n_inliers, std::size_t n_outliers,
                      const std::string& name) {
    const std::size_t n = n_inliers + n_outliers;
    std::vector<int> labels(n, 0);
    for (std::size_t i = n_inliers; i < n; ++i) labels[i] = 1;
    return Dataset(n, 2, std::move(pts), std::move(labels), name);
}

// Four Gaussian-like clusters of distinct size and density (two elongated, two
// round); outliers scattered along the cluster fringes.
inline Dataset make_data1(std::uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1ULL);
    const GaussCluster clusters[] = {
        {0.0, -8.0, 3.6, 0.9, 430},
        {0.0, 8.0, 2.4, 0.7, 230},
        {-9.0, 1.0, 0.7, 0.7, 120},
        {9.0, 1.0, 0.45, 0.45, 70},
    };
    std::vector<double> pts;
    pts.reserve(2 * 940);
    for (const auto& c : clusters) emit_gauss(rng, c, pts);
    const HaloBand bands[] = {
        {&clusters[0], 32, 2.9, 4.1, 2.4},
        {&clusters[1], 26, 2.9, 4.1, 1.9},
        {&clusters[2], 17, 2.9, 4.2, 1.3},
        {&clusters[3], 15, 2.9, 4.4, 0.95},
    };
    scatter_halos(rng, bands, clusters, 2.7, pts);
    return finish(std::move(pts), 850, 90, "data1");
}

// One dense blob and one ring-shaped group; outliers hug both shapes.
inline Dataset make_data2(std::uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 2ULL);
    std::vector<double> pts;
    pts.reserve(2 * 1100);
    const GaussCluster blob{-6.0, 0.0, 0.5, 0.5, 440};
    emit_gauss(rng, blob, pts);
    const double ring_cx = 5.0, ring_cy = 0.0, ring_r = 3.6, ring_sigma = 0.2;
    for (std::size_t i = 0; i < 555; ++i) {
        const double ang = rng.uniform(0.0, 6.283185307179586);
        const double r = ring_r + ring_sigma * rng.normal();
        pts.push_back(ring_cx + r * std::cos(ang));
        pts.push_back(ring_cy + r * std::sin(ang));
    }

    // outliers: bands on both sides of the ring plus a blob fringe
    struct Placed {
        double x, y, sep;
    };
    std::vector<Placed> placed;
    double relax = 1.0;
    auto blocked = [&](double x, double y, double sep) {
        if (blob.mahalanobis(x, y) < 3.0) return true;
        const double rx = x - ring_cx, ry = y - ring_cy;
        if (std::abs(std::sqrt(rx * rx + ry * ry) - ring_r) < 0.7) return true;
        for (const auto& p : placed) {
            const double need = std::max(sep, p.sep) * relax;
            const double dx = x - p.x, dy = y - p.y;
            if (dx * dx + dy * dy < need * need) return true;
        }
        return false;
    };
    struct RingBand {
        std::size_t count;
        double off_lo, off_hi, sep;
    };
    const RingBand ring_bands[] = {
        {74, 0.75, 1.10, 0.95},
        {20, 1.35, 1.70, 1.60},
    };
    for (const auto& band : ring_bands) {
        std::size_t done = 0, failures = 0;
        while (done < band.count) {
            const double ang = rng.uniform(0.0, 6.283185307179586);
            const double off = rng.uniform(band.off_lo, band.off_hi);
            const double r = ring_r + (rng.uniform() < 0.5 ? -off : off);
            const double x = ring_cx + r * std::cos(ang);
            const double y = ring_cy + r * std::sin(ang);
            if (!blocked(x, y, band.sep)) {
                placed.push_back({x, y, band.sep});
                ++done;
                failures = 0;
            } else if (++failures > 5000) {
                relax *= 0.9;
                failures = 0;
            }
        }
    }
    {
        std::size_t done = 0, failures = 0;
        while (done < 11) {
            const double ang = rng.uniform(0.0, 6.283185307179586);
            const double r = rng.uniform(1.7, 2.2);
            const double x = blob.cx + r * std::cos(ang);
            const double y = blob.cy + r * std::sin(ang);
            if (!blocked(x, y, 1.0)) {
                placed.push_back({x, y, 1.0});
                ++done;
                failures = 0;
            } else if (++failures > 5000) {
                relax *= 0.9;
                failures = 0;
            }
        }
    }
    for (const auto& p : placed) {
        pts.push_back(p.x);
        pts.push_back(p.y);
    }
    return finish(std::move(pts), 995, 105, "data2");
}

// Three clusters with clearly different densities (one sparse); outliers sit
// in bands close around the clusters instead of far out in the gaps.
inline Dataset make_data3(std::uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 3ULL);
    const GaussCluster clusters[] = {
        {-5.0, 4.0, 0.38, 0.38, 130},
        {5.0, 4.0, 0.95, 0.95, 85},
        {0.0, -4.5, 2.10, 2.10, 51},
    };
    std::vector<double> pts;
    pts.reserve(2 * 324);
    for (const auto& c : clusters) emit_gauss(rng, c, pts);
    const HaloBand bands[] = {
        {&clusters[0], 20, 2.7, 3.6, 0.8},
        {&clusters[1], 20, 2.7, 3.6, 1.6},
        {&clusters[2], 18, 2.2, 3.2, 2.2},
    };
    scatter_halos(rng, bands, clusters, 2.1, pts);
    return finish(std::move(pts), 266, 58, "data3");
}

} // namespace detail

inline Dataset generate_synthetic(const SyntheticSpec& spec) {
    switch (spec.variant) {
    case SyntheticVariant::Data1: return detail::make_data1(spec.seed);
    case SyntheticVariant::Data2: return detail::make_data2(spec.seed);
    case SyntheticVariant::Data3: return detail::make_data3(spec.seed);
    }
    throw std::invalid_argument("unknown synthetic variant");
}

} // namespace nblod
