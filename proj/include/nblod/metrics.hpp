#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "nblod/scoring.hpp"

namespace nblod {

struct EvalReport {
    std::string method_tag;
    int k = 0;
    double auc = 0.0;
    double acc_n = 0.0;
    double acc_2n = 0.0;
    int n_outliers = 0;
};

namespace detail {

inline void check_labels(const ScoreVector& sv, const std::vector<int>& labels) {
    if (labels.size() != sv.scores.size())
        throw std::invalid_argument("metrics: label count does not match score count");
}

} // namespace detail

// Trapezoidal ROC area with ties contributing 1/2 per pair. Equals the
// probability that a random (outlier, inlier) pair is ranked correctly.
inline double auc(const ScoreVector& sv, const std::vector<int>& labels) {
    detail::check_labels(sv, labels);
    const std::size_t n = labels.size();
    std::size_t pos = 0;
    for (int v : labels) pos += static_cast<std::size_t>(v != 0);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("auc: labels must contain both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sv.scores[a] > sv.scores[b];
    });

    double area = 0.0; // in units of (tp * fp)
    double cum_tp = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        double dtp = 0.0, dfp = 0.0;
        while (j < n && sv.scores[order[j]] == sv.scores[order[i]]) {
            if (labels[order[j]] != 0)
                dtp += 1.0;
            else
                dfp += 1.0;
            ++j;
        }
        area += dfp * (cum_tp + dtp / 2.0);
        cum_tp += dtp;
        i = j;
    }
    return area / (static_cast<double>(pos) * static_cast<double>(neg));
}

// Fraction of all true outliers captured among the m highest-scored points;
// ties at the boundary resolved by ascending index.
inline double top_m_accuracy(const ScoreVector& sv, const std::vector<int>& labels,
                             std::size_t m) {
    detail::check_labels(sv, labels);
    const std::size_t n = labels.size();
    if (m == 0 || m > n)
        throw std::invalid_argument("top_m_accuracy: m out of range [1, N]");
    std::size_t total = 0;
    for (int v : labels) total += static_cast<std::size_t>(v != 0);
    if (total == 0) throw std::invalid_argument("top_m_accuracy: no true outliers");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sv.scores[a] != sv.scores[b]) return sv.scores[a] > sv.scores[b];
        return a < b;
    });
    std::size_t hits = 0;
    for (std::size_t r = 0; r < m; ++r) hits += static_cast<std::size_t>(labels[order[r]] != 0);
    return static_cast<double>(hits) / static_cast<double>(total);
}

inline EvalReport evaluate(const ScoreVector& sv, const std::vector<int>& labels) {
    EvalReport rep;
    rep.method_tag = sv.method_tag;
    rep.k = sv.k;
    rep.auc = auc(sv, labels);
    std::size_t n_out = 0;
    for (int v : labels) n_out += static_cast<std::size_t>(v != 0);
    rep.n_outliers = static_cast<int>(n_out);
    rep.acc_n = top_m_accuracy(sv, labels, n_out);
    rep.acc_2n = top_m_accuracy(sv, labels, std::min(2 * n_out, labels.size()));
    return rep;
}

} // namespace nblod
