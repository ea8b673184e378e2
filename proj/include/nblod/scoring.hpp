#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nblod/neighbors.hpp"
#include "nblod/parallel.hpp"

namespace nblod {

enum class Forced { None, Outlier, Inlier };

// Per-point outlier factors. Forced entries carry +/-inf in scores so any
// ranking consumer places them above (below) every finite score.
struct ScoreVector {
    std::vector<double> scores;
    std::vector<Forced> forced;
    std::string method_tag;
    int k = 0;
};

// all-duplicate neighborhoods get this density; ratios of two sentinels are 1
inline constexpr double kSentinelDensity = 1e12;

// Distance to the last stored neighbor of the query's k-list.
inline double k_distance(const NeighborModel& m, int x) {
    return m.knn_dists(x).back();
}

// Local reachability density of x over an arbitrary context set:
// |S| / sum of reach-dist_k(x, o), reach-dist_k(x, o) = max(k_distance(o), d(x, o)).
inline double lrd(const NeighborModel& m, const NeighborSet& context, int x) {
    if (context.query != x)
        throw std::invalid_argument("lrd: context set belongs to a different query");
    if (context.members.empty())
        throw std::invalid_argument("lrd: empty context set (apply forced rules first)");
    double sum = 0.0;
    for (int o : context.members) sum += std::max(k_distance(m, o), m.distance(x, o));
    if (sum == 0.0) return kSentinelDensity;
    return static_cast<double>(context.members.size()) / sum;
}

struct OutlierFactor {
    double value;
    Forced forced;
};

namespace detail {

// lrd over o's own kind set, falling back to its KNN set when empty, so a
// neighbor with an empty set still contributes a defined density.
inline double aggregation_lrd(const NeighborModel& m, SetKind kind, int o) {
    NeighborSet s = neighbor_set(m, o, kind);
    if (s.members.empty()) s = neighbor_set(m, o, SetKind::Knn);
    return lrd(m, s, o);
}

} // namespace detail

// Empty RKNN or NaN set -> outlier; empty Non-NaN set -> inlier; otherwise the
// mean lrd ratio over the kind-specific set.
inline OutlierFactor outlier_factor(const NeighborModel& m, SetKind kind, int x) {
    const NeighborSet s = neighbor_set(m, x, kind);
    if (s.members.empty()) {
        if (kind == SetKind::Rknn || kind == SetKind::Natural)
            return {std::numeric_limits<double>::infinity(), Forced::Outlier};
        if (kind == SetKind::NonNatural)
            return {-std::numeric_limits<double>::infinity(), Forced::Inlier};
        throw std::logic_error("outlier_factor: empty KNN/Hybrid set");
    }
    const double lx = lrd(m, s, x);
    double sum = 0.0;
    for (int o : s.members) sum += detail::aggregation_lrd(m, kind, o) / lx;
    return {sum / static_cast<double>(s.members.size()), Forced::None};
}

inline ScoreVector score_all(const NeighborModel& m, SetKind kind, std::string method_tag,
                             unsigned threads = 0) {
    const std::size_t n = m.size();
    ScoreVector out;
    out.method_tag = std::move(method_tag);
    out.k = m.k();
    out.scores.resize(n);
    out.forced.assign(n, Forced::None);

    std::vector<std::vector<int>> sets(n);
    std::vector<double> agg_lrd(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            const int id = m.ids()[i];
            NeighborSet s = neighbor_set(m, id, kind);
            sets[i] = s.members;
            if (s.members.empty()) s = neighbor_set(m, id, SetKind::Knn);
            agg_lrd[i] = lrd(m, s, id);
        },
        threads);

    parallel_for(
        n,
        [&](std::size_t i) {
            const int id = m.ids()[i];
            const auto& members = sets[i];
            if (members.empty()) {
                if (kind == SetKind::Rknn || kind == SetKind::Natural) {
                    out.scores[i] = std::numeric_limits<double>::infinity();
                    out.forced[i] = Forced::Outlier;
                } else if (kind == SetKind::NonNatural) {
                    out.scores[i] = -std::numeric_limits<double>::infinity();
                    out.forced[i] = Forced::Inlier;
                } else {
                    throw std::logic_error("score_all: empty KNN/Hybrid set");
                }
                return;
            }
            const double lx = agg_lrd[i];
            double sum = 0.0;
            for (int o : members) sum += agg_lrd[m.row_of(o)] / lx;
            out.scores[i] = sum / static_cast<double>(members.size());
        },
        threads);
    return out;
}

} // namespace nblod
