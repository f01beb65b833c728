#pragma once

// Independent verification paths used by the test suite: Monte-Carlo
// sampling of Gaussian states and brute-force gain optimization. Nothing in
// here reuses the analytic gain or threshold formulas it is meant to check.

#include "optosteer/gaussian.hpp"
#include "optosteer/numeric.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>

namespace optosteer {

/// Samples are generated in fixed-size chunks so that splitting a batch
/// across workers cannot change the draws: chunk c of a batch with master
/// seed s is generated by a fresh mt19937_64 seeded with
/// splitmix64(s + (c+1) * 0x9e3779b97f4a7c15), and rows are assembled in
/// chunk order. Two batches with the same seed therefore agree on their
/// common prefix regardless of length or execution split.
inline constexpr std::size_t kSampleChunk = 8192;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t chunk_seed(std::uint64_t master, std::uint64_t chunk)
{
    return splitmix64(master + (chunk + 1) * 0x9e3779b97f4a7c15ULL);
}

struct SampleBatch {
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd draws;  // n_samples x 2n, one quadrature vector per row
};

/// Draws from the zero-mean normal with the state's covariance via a
/// symmetric eigendecomposition transform (tolerant of the semidefinite
/// boundary at r = 0, unlike a triangular factorization).
inline SampleBatch sample_gaussian(const GaussianState& state, std::size_t n_samples,
                                   std::uint64_t seed)
{
    if (n_samples < 2) {
        throw std::invalid_argument("sample_gaussian: need at least 2 samples");
    }
    const Eigen::MatrixXd& cov = state.cov();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -kPsdSlack * scale) {
        throw std::domain_error("sample_gaussian: covariance is not positive semidefinite");
    }
    const Eigen::MatrixXd transform =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    const Eigen::Index dim = cov.rows();
    SampleBatch batch{n_samples, seed, Eigen::MatrixXd(n_samples, dim)};
    std::normal_distribution<double> normal;
    for (std::size_t start = 0, chunk = 0; start < n_samples; start += kSampleChunk, ++chunk) {
        const std::size_t rows = std::min(kSampleChunk, n_samples - start);
        std::mt19937_64 rng(chunk_seed(seed, chunk));
        Eigen::MatrixXd z(rows, dim);
        for (std::size_t i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) z(static_cast<Eigen::Index>(i), j) = normal(rng);
        }
        batch.draws.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(rows)) =
            z * transform.transpose();
    }
    return batch;
}

inline void check_batch_column(const SampleBatch& batch, Quadrature q)
{
    if (q.index() < 0 || q.index() >= batch.draws.cols()) {
        throw std::invalid_argument("sample batch: quadrature out of range");
    }
}

inline double empirical_mean(const SampleBatch& batch, Quadrature q)
{
    check_batch_column(batch, q);
    return batch.draws.col(q.index()).mean();
}

inline double empirical_covariance(const SampleBatch& batch, Quadrature a, Quadrature b)
{
    check_batch_column(batch, a);
    check_batch_column(batch, b);
    const auto ca = batch.draws.col(a.index());
    const auto cb = batch.draws.col(b.index());
    const double ma = ca.mean();
    const double mb = cb.mean();
    return (ca.array() - ma).matrix().dot((cb.array() - mb).matrix()) /
           static_cast<double>(batch.n_samples - 1);
}

inline double empirical_variance(const SampleBatch& batch, Quadrature q)
{
    return empirical_covariance(batch, q, q);
}

/// Least-squares residual variance of the target column regressed on the
/// measured column; the sample analogue of conditional_variance.
inline double empirical_conditional_variance(const SampleBatch& batch, Quadrature target,
                                             Quadrature measured)
{
    const double vm = empirical_variance(batch, measured);
    if (!(vm > 0.0)) {
        throw std::domain_error("empirical_conditional_variance: degenerate measured column");
    }
    const double c = empirical_covariance(batch, target, measured);
    const double vt = empirical_variance(batch, target);
    double cv = vt - c * c / vm;
    if (cv < 0.0) cv = 0.0;
    return cv;
}

struct GainScanResult {
    double g_star = 0.0;
    double value = 0.0;
};

/// Brute-force oracle for the analytic gain formulas: dense scan over
/// [g_lo, g_hi] followed by golden-section refinement to 1e-7 in g.
template <class F>
GainScanResult grid_optimize_gain(F&& value_at_gain, double g_lo, double g_hi, int steps)
{
    const MinimumResult m = grid_then_golden(value_at_gain, g_lo, g_hi, steps, 1e-7);
    return {m.x, m.value};
}

}  // namespace optosteer
