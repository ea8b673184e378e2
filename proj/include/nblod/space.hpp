#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nblod/dataset.hpp"

namespace nblod {

enum class TransformKind { FullSpace, PcaSubspace };

inline TransformKind parse_space(std::string tok) {
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (tok == "fp") return TransformKind::FullSpace;
    if (tok == "sp") return TransformKind::PcaSubspace;
    throw std::invalid_argument("unknown space token '" + tok + "' (expected fp|sp)");
}

namespace detail {

struct EigPair {
    double value;
    std::vector<double> vector;
};

inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Leading eigenpairs of a symmetric matrix by power iteration with Hotelling
// deflation. Start vectors are fixed pseudo-random, re-orthogonalized against
// already-found pairs every step. Throws if a pair fails to reach residual
// 1e-8 (relative to the matrix scale) within 10000 iterations.
inline std::vector<EigPair> leading_eigenpairs(std::vector<double> a, std::size_t dim,
                                               std::size_t count) {
    const std::size_t d = dim;
    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::abs(a[i * d + i]));
    scale = std::max(scale, 1e-30);

    auto mat_vec = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += a[i * d + j] * v[j];
            out[i] = s;
        }
    };

    std::vector<EigPair> found;
    found.reserve(count);
    std::vector<double> v(d), w(d);

    for (std::size_t p = 0; p < count; ++p) {
        std::uint64_t rs = 0x6a09e667f3bcc908ULL + 0x100000001b3ULL * p;
        for (std::size_t i = 0; i < d; ++i)
            v[i] = static_cast<double>(splitmix64(rs) >> 11) * 0x1.0p-53 - 0.5;

        auto orthogonalize = [&](std::vector<double>& x) {
            for (const auto& f : found) {
                double dot = 0.0;
                for (std::size_t i = 0; i < d; ++i) dot += x[i] * f.vector[i];
                for (std::size_t i = 0; i < d; ++i) x[i] -= dot * f.vector[i];
            }
        };
        auto normalize = [&](std::vector<double>& x) {
            double nrm = 0.0;
            for (double t : x) nrm += t * t;
            nrm = std::sqrt(nrm);
            if (nrm < 1e-300) return false;
            for (double& t : x) t /= nrm;
            return true;
        };

        orthogonalize(v);
        if (!normalize(v)) {
            // start vector collapsed; fall back to canonical axes
            for (std::size_t j = 0; j < d && !normalize(v); ++j) {
                std::fill(v.begin(), v.end(), 0.0);
                v[j] = 1.0;
                orthogonalize(v);
            }
        }

        double lambda = 0.0;
        double residual = 0.0;
        for (int iter = 0; iter < 10000; ++iter) {
            mat_vec(v, w);
            orthogonalize(w);
            lambda = 0.0;
            for (std::size_t i = 0; i < d; ++i) lambda += v[i] * w[i];
            residual = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double r = w[i] - lambda * v[i];
                residual += r * r;
            }
            residual = std::sqrt(residual);
            if (residual <= 1e-10 * scale) break;
            if (!normalize(w)) break; // null space: keep current v, lambda ~ 0
            v = w;
        }
        if (residual > 1e-8 * scale)
            throw std::runtime_error("pca: eigenpair " + std::to_string(p) +
                                     " did not converge (residual " + std::to_string(residual) +
                                     ")");

        // sign convention: largest-magnitude component positive
        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
        if (v[arg] < 0.0)
            for (double& t : v) t = -t;

        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) a[i * d + j] -= lambda * v[i] * v[j];
        found.push_back({lambda, v});
    }
    return found;
}

} // namespace detail

// Information-level mapping: identity (full space) or projection onto the
// leading principal directions at half the original dimension.
class SpaceTransform {
public:
    static SpaceTransform fit(TransformKind kind, const Dataset& ds) {
        SpaceTransform t;
        t.kind_ = kind;
        t.input_dim_ = ds.dim();
        if (kind == TransformKind::FullSpace) {
            t.output_dim_ = ds.dim();
            return t;
        }
        const std::size_t n = ds.size(), d_in = ds.dim();
        if (d_in < 2) throw std::invalid_argument("pca: need at least 2 dimensions");
        const std::size_t d_out = std::max<std::size_t>(1, d_in / 2);

        t.mean_.assign(d_in, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d_in; ++j) t.mean_[j] += ds.coord(i, j);
        for (double& m : t.mean_) m /= static_cast<double>(n);

        std::vector<double> cov(d_in * d_in, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < d_in; ++a) {
                const double xa = ds.coord(i, a) - t.mean_[a];
                for (std::size_t b = a; b < d_in; ++b)
                    cov[a * d_in + b] += xa * (ds.coord(i, b) - t.mean_[b]);
            }
        }
        for (std::size_t a = 0; a < d_in; ++a)
            for (std::size_t b = a; b < d_in; ++b) {
                cov[a * d_in + b] /= static_cast<double>(n - 1);
                cov[b * d_in + a] = cov[a * d_in + b];
            }
        for (double v : cov)
            if (!std::isfinite(v)) throw std::runtime_error("pca: non-finite covariance");

        const auto pairs = detail::leading_eigenpairs(cov, d_in, d_out);
        t.output_dim_ = d_out;
        t.basis_.assign(d_in * d_out, 0.0);
        t.eigenvalues_.resize(d_out);
        for (std::size_t j = 0; j < d_out; ++j) {
            t.eigenvalues_[j] = pairs[j].value;
            for (std::size_t i = 0; i < d_in; ++i) t.basis_[i * d_out + j] = pairs[j].vector[i];
        }
        return t;
    }

    Dataset apply(const Dataset& ds) const {
        if (kind_ == TransformKind::FullSpace) return ds;
        if (ds.dim() != input_dim_)
            throw std::invalid_argument("space: dataset dimension " + std::to_string(ds.dim()) +
                                        " does not match fitted " + std::to_string(input_dim_));
        const std::size_t n = ds.size();
        std::vector<double> out(n * output_dim_, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < output_dim_; ++j) {
                double s = 0.0;
                for (std::size_t a = 0; a < input_dim_; ++a)
                    s += (ds.coord(i, a) - mean_[a]) * basis_[a * output_dim_ + j];
                out[i * output_dim_ + j] = s;
            }
        }
        return ds.with_points(output_dim_, std::move(out));
    }

    TransformKind kind() const { return kind_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& basis() const { return basis_; } // D x d, row-major
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

private:
    TransformKind kind_ = TransformKind::FullSpace;
    std::size_t input_dim_ = 0, output_dim_ = 0;
    std::vector<double> mean_;
    std::vector<double> basis_;
    std::vector<double> eigenvalues_;
};

} // namespace nblod
