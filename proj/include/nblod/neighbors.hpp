#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nblod/dataset.hpp"
#include "nblod/parallel.hpp"

namespace nblod {

enum class Methodology { StaticSorting, DynamicSelection };
enum class SetKind { Knn, Rknn, Hybrid, Natural, NonNatural };

inline Methodology parse_methodology(std::string tok) {
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (tok == "ss") return Methodology::StaticSorting;
    if (tok == "ds") return Methodology::DynamicSelection;
    throw std::invalid_argument("unknown methodology token '" + tok + "' (expected ss|ds)");
}

inline SetKind parse_set_kind(std::string tok) {
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (tok == "knn") return SetKind::Knn;
    if (tok == "rknn") return SetKind::Rknn;
    if (tok == "hy") return SetKind::Hybrid;
    if (tok == "nan") return SetKind::Natural;
    if (tok == "non") return SetKind::NonNatural;
    throw std::invalid_argument("unknown neighbor-set token '" + tok +
                                "' (expected knn|rknn|hy|nan|non)");
}

struct NeighborSet {
    SetKind kind;
    int query;
    std::vector<int> members; // KNN: stored order; other kinds: ascending id
};

// Per-point K-neighbor lists for one (methodology, k) configuration, with the
// reverse relation. Immutable once built.
class NeighborModel {
public:
    int k() const { return k_; }
    Methodology methodology() const { return methodology_; }
    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

    std::span<const int> knn_ids(int id) const {
        const std::size_t r = row_of(id);
        return {knn_ids_.data() + r * k_, static_cast<std::size_t>(k_)};
    }
    std::span<const double> knn_dists(int id) const {
        const std::size_t r = row_of(id);
        return {knn_dists_.data() + r * k_, static_cast<std::size_t>(k_)};
    }
    std::span<const int> rknn(int id) const { // ascending id
        const std::size_t r = row_of(id);
        return {rknn_members_.data() + rknn_offsets_[r],
                rknn_offsets_[r + 1] - rknn_offsets_[r]};
    }

    double distance(int a, int b) const {
        const std::size_t ra = row_of(a), rb = row_of(b);
        double s = 0.0;
        for (std::size_t j = 0; j < d_; ++j) {
            const double t = points_[ra * d_ + j] - points_[rb * d_ + j];
            s += t * t;
        }
        return std::sqrt(s);
    }

    const std::vector<int>& ids() const { return ids_; }

    std::size_t row_of(int id) const {
        if (identity_ids_) {
            if (id < 0 || static_cast<std::size_t>(id) >= n_)
                throw std::invalid_argument("unknown point id " + std::to_string(id));
            return static_cast<std::size_t>(id);
        }
        auto it = id_to_row_.find(id);
        if (it == id_to_row_.end())
            throw std::invalid_argument("unknown point id " + std::to_string(id));
        return it->second;
    }

private:
    friend NeighborModel build_model(const Dataset&, int, Methodology, unsigned);

    std::size_t n_ = 0, d_ = 0;
    int k_ = 0;
    Methodology methodology_ = Methodology::StaticSorting;
    std::vector<double> points_;
    std::vector<int> ids_;
    bool identity_ids_ = true;
    std::unordered_map<int, std::size_t> id_to_row_;
    std::vector<int> knn_ids_;      // n*k, per-point ordered
    std::vector<double> knn_dists_; // n*k, distance to query
    std::vector<std::size_t> rknn_offsets_;
    std::vector<int> rknn_members_;
};

namespace detail {

inline double dist2(const std::vector<double>& pts, std::size_t d, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double t = pts[a * d + j] - pts[b * d + j];
        s += t * t;
    }
    return s;
}

} // namespace detail

// StaticSorting: the k nearest others by Euclidean distance, ties by ascending
// id. DynamicSelection: grow S from the query; each round add the point with
// the smallest distance to any member of S (ties by id); store members in
// selection order with their distance to the query.
inline NeighborModel build_model(const Dataset& ds, int k, Methodology methodology,
                                 unsigned threads = 0) {
    const std::size_t n = ds.size(), d = ds.dim();
    if (k < 1 || static_cast<std::size_t>(k) > n - 1)
        throw std::invalid_argument("k = " + std::to_string(k) + " out of range [1, " +
                                    std::to_string(n - 1) + "]");

    NeighborModel m;
    m.n_ = n;
    m.d_ = d;
    m.k_ = k;
    m.methodology_ = methodology;
    m.points_ = ds.points();
    m.ids_ = ds.ids();
    for (std::size_t i = 0; i < n; ++i)
        if (m.ids_[i] != static_cast<int>(i)) m.identity_ids_ = false;
    if (!m.identity_ids_)
        for (std::size_t i = 0; i < n; ++i) m.id_to_row_[m.ids_[i]] = i;

    m.knn_ids_.resize(n * k);
    m.knn_dists_.resize(n * k);
    const auto& pts = m.points_;
    const auto& ids = m.ids_;

    if (methodology == Methodology::StaticSorting) {
        parallel_for(
            n,
            [&](std::size_t x) {
                std::vector<std::pair<double, std::size_t>> cand;
                cand.reserve(n - 1);
                for (std::size_t i = 0; i < n; ++i)
                    if (i != x) cand.emplace_back(detail::dist2(pts, d, x, i), i);
                auto less = [&](const auto& a, const auto& b) {
                    if (a.first != b.first) return a.first < b.first;
                    return ids[a.second] < ids[b.second];
                };
                std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), less);
                for (int j = 0; j < k; ++j) {
                    m.knn_ids_[x * k + j] = ids[cand[j].second];
                    m.knn_dists_[x * k + j] = std::sqrt(cand[j].first);
                }
            },
            threads);
    } else {
        parallel_for(
            n,
            [&](std::size_t x) {
                std::vector<double> min_d2(n);
                std::vector<char> taken(n, 0);
                for (std::size_t i = 0; i < n; ++i)
                    min_d2[i] = detail::dist2(pts, d, x, i);
                taken[x] = 1;
                for (int round = 0; round < k; ++round) {
                    std::size_t best = n;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (taken[i]) continue;
                        if (best == n || min_d2[i] < min_d2[best] ||
                            (min_d2[i] == min_d2[best] && ids[i] < ids[best]))
                            best = i;
                    }
                    taken[best] = 1;
                    m.knn_ids_[x * k + round] = ids[best];
                    m.knn_dists_[x * k + round] = std::sqrt(detail::dist2(pts, d, x, best));
                    for (std::size_t i = 0; i < n; ++i) {
                        if (taken[i]) continue;
                        const double t = detail::dist2(pts, d, best, i);
                        if (t < min_d2[i]) min_d2[i] = t;
                    }
                }
            },
            threads);
    }

    // reverse index; appending in ascending row order keeps each list sorted
    // by id whenever ids are the identity
    std::vector<std::size_t> degree(n, 0);
    for (std::size_t x = 0; x < n; ++x)
        for (int j = 0; j < k; ++j) degree[m.row_of(m.knn_ids_[x * k + j])]++;
    m.rknn_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) m.rknn_offsets_[i + 1] = m.rknn_offsets_[i] + degree[i];
    m.rknn_members_.resize(m.rknn_offsets_[n]);
    std::vector<std::size_t> cursor(m.rknn_offsets_.begin(), m.rknn_offsets_.end() - 1);
    for (std::size_t x = 0; x < n; ++x)
        for (int j = 0; j < k; ++j) {
            const std::size_t z = m.row_of(m.knn_ids_[x * k + j]);
            m.rknn_members_[cursor[z]++] = ids[x];
        }
    for (std::size_t i = 0; i < n; ++i)
        std::sort(m.rknn_members_.begin() + static_cast<std::ptrdiff_t>(m.rknn_offsets_[i]),
                  m.rknn_members_.begin() + static_cast<std::ptrdiff_t>(m.rknn_offsets_[i + 1]));

    return m;
}

inline NeighborSet neighbor_set(const NeighborModel& m, int query, SetKind kind) {
    const auto knn = m.knn_ids(query);
    const auto rev = m.rknn(query);
    NeighborSet out{kind, query, {}};
    switch (kind) {
    case SetKind::Knn:
        out.members.assign(knn.begin(), knn.end());
        return out;
    case SetKind::Rknn:
        out.members.assign(rev.begin(), rev.end());
        return out;
    default: break;
    }
    std::vector<int> knn_sorted(knn.begin(), knn.end());
    std::sort(knn_sorted.begin(), knn_sorted.end());
    switch (kind) {
    case SetKind::Hybrid:
        std::set_union(knn_sorted.begin(), knn_sorted.end(), rev.begin(), rev.end(),
                       std::back_inserter(out.members));
        break;
    case SetKind::Natural:
        std::set_intersection(knn_sorted.begin(), knn_sorted.end(), rev.begin(), rev.end(),
                              std::back_inserter(out.members));
        break;
    case SetKind::NonNatural: {
        std::vector<int> natural;
        std::set_intersection(knn_sorted.begin(), knn_sorted.end(), rev.begin(), rev.end(),
                              std::back_inserter(natural));
        std::set_difference(knn_sorted.begin(), knn_sorted.end(), natural.begin(), natural.end(),
                            std::back_inserter(out.members));
        break;
    }
    default: break;
    }
    return out;
}

// In-degree histogram of the reverse relation; sum of degree*count is N*k.
inline std::map<int, int> reverse_count_histogram(const NeighborModel& m) {
    std::map<int, int> hist;
    for (std::size_t i = 0; i < m.size(); ++i)
        hist[static_cast<int>(m.rknn(m.ids()[i]).size())]++;
    return hist;
}

} // namespace nblod
