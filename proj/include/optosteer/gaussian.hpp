#pragma once

// Covariance-matrix algebra for zero-mean multimode Gaussian states.
//
// Conventions used throughout the library:
//   * quadratures are ordered (X1, P1, X2, P2, ...),
//   * [X, P] = 2i, so the vacuum has unit variance in every quadrature and
//     the symplectic form has per-mode blocks [[0, 1], [-1, 0]],
//   * states are zero-mean; all criteria depend on second moments only, so
//     mean vectors are not part of the data model.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace optosteer {

/// Entrywise tolerance for symmetry and symplectic checks.
inline constexpr double kSymmetryTol = 1e-12;
/// Allowed negative slack on eigenvalues of cov + i*Omega.
inline constexpr double kPsdSlack = 1e-9;
/// Agreement required between analytic gains and numeric gain optimization.
inline constexpr double kGainAgreementTol = 1e-6;

enum class Axis { X, P };

/// One quadrature slot: a mode index plus the X/P label.
struct Quadrature {
    int mode = 0;
    Axis axis = Axis::X;

    /// Row/column index in the (X1,P1,X2,P2,...) ordering.
    [[nodiscard]] int index() const { return 2 * mode + (axis == Axis::P ? 1 : 0); }

    friend bool operator==(const Quadrature& a, const Quadrature& b)
    {
        return a.mode == b.mode && a.axis == b.axis;
    }
};

/// Symplectic form Omega with per-mode blocks [[0,1],[-1,0]].
inline Eigen::MatrixXd symplectic_form(int n_modes)
{
    if (n_modes <= 0) {
        throw std::invalid_argument("symplectic_form: n_modes must be positive");
    }
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

/// Zero-mean Gaussian state stored as its covariance matrix.
///
/// Construction validates shape, symmetry (to 1e-12, then symmetrizes
/// exactly) and positive diagonal entries. Physicality (cov + i*Omega >= 0)
/// is deliberately not enforced here so that unphysical matrices can be fed
/// to check_physical(); states produced by the scenario constructors are
/// physical by construction.
class GaussianState {
public:
    explicit GaussianState(Eigen::MatrixXd cov)
    {
        if (cov.rows() != cov.cols() || cov.rows() < 2 || cov.rows() % 2 != 0) {
            throw std::invalid_argument("GaussianState: covariance must be square 2n x 2n");
        }
        // tolerance scales with the matrix so hot states don't trip on round-off
        const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
        const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
        if (!(asym <= kSymmetryTol * scale)) {
            throw std::invalid_argument("GaussianState: covariance not symmetric (max asymmetry " +
                                        std::to_string(asym) + ")");
        }
        for (Eigen::Index i = 0; i < cov.rows(); ++i) {
            if (!(cov(i, i) > 0.0)) {
                throw std::invalid_argument("GaussianState: diagonal entries must be positive");
            }
        }
        cov_ = 0.5 * (cov + cov.transpose());
        n_modes_ = static_cast<int>(cov_.rows() / 2);
    }

    [[nodiscard]] int n_modes() const { return n_modes_; }
    [[nodiscard]] const Eigen::MatrixXd& cov() const { return cov_; }

    [[nodiscard]] int check_index(Quadrature q) const
    {
        const int i = q.index();
        if (q.mode < 0 || i >= 2 * n_modes_) {
            throw std::invalid_argument("Quadrature mode out of range for this state");
        }
        return i;
    }

private:
    Eigen::MatrixXd cov_;
    int n_modes_ = 0;
};

/// Single-mode thermal state, cov = (2 n_bar + 1) * I.
inline GaussianState thermal_state(double n_bar)
{
    if (!(n_bar >= 0.0)) {
        throw std::invalid_argument("thermal_state: n_bar must be nonnegative");
    }
    return GaussianState((2.0 * n_bar + 1.0) * Eigen::MatrixXd::Identity(2, 2));
}

inline GaussianState vacuum_state() { return thermal_state(0.0); }

/// Tensor product: block-diagonal covariance, list order preserved.
inline GaussianState tensor(const std::vector<GaussianState>& states)
{
    if (states.empty()) {
        throw std::invalid_argument("tensor: empty state list");
    }
    int dim = 0;
    for (const auto& s : states) dim += 2 * s.n_modes();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    int off = 0;
    for (const auto& s : states) {
        const int d = 2 * s.n_modes();
        cov.block(off, off, d, d) = s.cov();
        off += d;
    }
    return GaussianState(std::move(cov));
}

/// Real linear transformation of the quadrature vector. The scenario
/// constructors only ever produce symplectic instances.
class LinearModeMap {
public:
    explicit LinearModeMap(Eigen::MatrixXd matrix)
    {
        if (matrix.rows() != matrix.cols() || matrix.rows() < 2 || matrix.rows() % 2 != 0) {
            throw std::invalid_argument("LinearModeMap: matrix must be square 2n x 2n");
        }
        m_ = std::move(matrix);
    }

    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return m_; }
    [[nodiscard]] int n_modes() const { return static_cast<int>(m_.rows() / 2); }

    /// max |S Omega S^T - Omega|; zero for exactly symplectic maps.
    [[nodiscard]] double symplectic_defect() const
    {
        const Eigen::MatrixXd omega = symplectic_form(n_modes());
        return (m_ * omega * m_.transpose() - omega).cwiseAbs().maxCoeff();
    }

    [[nodiscard]] bool is_symplectic(double tol = kSymmetryTol) const
    {
        return symplectic_defect() <= tol;
    }

private:
    Eigen::MatrixXd m_;
};

/// cov' = S cov S^T. Physicality is preserved when S is symplectic.
inline GaussianState apply_map(const GaussianState& state, const LinearModeMap& map)
{
    if (map.n_modes() != state.n_modes()) {
        throw std::invalid_argument("apply_map: dimension mismatch");
    }
    const Eigen::MatrixXd& s = map.matrix();
    return GaussianState(s * state.cov() * s.transpose());
}

/// Variance of the linear combination c . quadratures, i.e. c^T cov c.
inline double variance_of(const GaussianState& state, const Eigen::VectorXd& coeffs)
{
    if (coeffs.size() != state.cov().rows()) {
        throw std::invalid_argument("variance_of: coefficient length mismatch");
    }
    double v = coeffs.dot(state.cov() * coeffs);
    if (v < 0.0 && v > -kSymmetryTol) v = 0.0;  // round-off on null combinations
    return v;
}

/// <a, b> = a^T cov b; symmetric in its arguments.
inline double covariance_of(const GaussianState& state, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b)
{
    if (a.size() != state.cov().rows() || b.size() != state.cov().rows()) {
        throw std::invalid_argument("covariance_of: coefficient length mismatch");
    }
    return a.dot(state.cov() * b);
}

inline Eigen::VectorXd unit_coeffs(const GaussianState& state, Quadrature q)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(state.cov().rows());
    c(state.check_index(q)) = 1.0;
    return c;
}

inline double variance(const GaussianState& state, Quadrature q)
{
    const int i = state.check_index(q);
    return state.cov()(i, i);
}

inline double covariance(const GaussianState& state, Quadrature a, Quadrature b)
{
    return state.cov()(state.check_index(a), state.check_index(b));
}

/// Minimum over real g of Var(target - g * measured):
/// Var(target) - Cov(target, measured)^2 / Var(measured).
inline double conditional_variance(const GaussianState& state, Quadrature target,
                                   Quadrature measured)
{
    if (target == measured) {
        throw std::invalid_argument("conditional_variance: target equals measured quadrature");
    }
    const int t = state.check_index(target);
    const int m = state.check_index(measured);
    const double vm = state.cov()(m, m);
    if (!(vm > 0.0)) {
        throw std::domain_error("conditional_variance: degenerate measured quadrature");
    }
    const double c = state.cov()(t, m);
    double cv = state.cov()(t, t) - c * c / vm;
    if (cv < 0.0) cv = 0.0;
    return cv;
}

struct PhysicalityReport {
    bool physical = false;
    double min_eigenvalue = 0.0;  // smallest eigenvalue of cov + i*Omega
};

/// A covariance matrix describes a quantum state iff cov + i*Omega >= 0.
/// The slack scales with the covariance norm, matching the eigenvalue
/// accuracy attainable for hot states.
inline PhysicalityReport check_physical(const GaussianState& state)
{
    Eigen::MatrixXcd h = state.cov().cast<std::complex<double>>();
    const Eigen::MatrixXd omega = symplectic_form(state.n_modes());
    h += std::complex<double>(0.0, 1.0) * omega.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    const double scale = std::max(1.0, state.cov().cwiseAbs().maxCoeff());
    return {min_eig >= -kPsdSlack * scale, min_eig};
}

/// Linear model of outputs over independent zero-mean inputs:
/// outputs = out_map * inputs with diagonal input covariance in_var.
///
/// combination_variance evaluates c^T (M diag(in_var) M^T) c as a sum of
/// squares, sum_i (M^T c)_i^2 var_i. This avoids the large-entry cancellation
/// the assembled output covariance suffers for strongly squeezed
/// combinations, and is the route threshold bisections use.
struct LinearGaussianModel {
    Eigen::MatrixXd out_map;
    Eigen::VectorXd in_var;

    [[nodiscard]] GaussianState state() const
    {
        return GaussianState(out_map * in_var.asDiagonal() * out_map.transpose());
    }

    [[nodiscard]] double combination_variance(const Eigen::VectorXd& out_coeffs) const
    {
        if (out_coeffs.size() != out_map.rows()) {
            throw std::invalid_argument("combination_variance: coefficient length mismatch");
        }
        const Eigen::VectorXd w = out_map.transpose() * out_coeffs;
        return w.cwiseAbs2().dot(in_var);
    }
};

}  // namespace optosteer
