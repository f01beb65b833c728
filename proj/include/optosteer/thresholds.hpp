#pragma once

// Closed-form threshold squeeze parameters r* at which each criterion
// crosses its bound, plus bisection for numeric cross-validation.

#include "optosteer/criteria.hpp"
#include "optosteer/numeric.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace optosteer {

enum class ThresholdMethod { ClosedForm, Bisection };

struct ThresholdResult {
    double r_star = 0.0;
    ThresholdMethod method = ThresholdMethod::ClosedForm;
    double residual = 0.0;  ///< criterion value minus bound at r_star
};

/// Default bisection bracket; every threshold handled here stays below
/// (1/2) ln(4e7) ~ 8.8 for occupations up to 1e7.
inline constexpr double kDefaultBracketLo = 0.0;
inline constexpr double kDefaultBracketHi = 20.0;
inline constexpr double kBisectionXtol = 1e-12;

/// DGCZ threshold: r > ln((n0+2)/(2 sqrt(n0+1))), ~ (1/2) ln n0 for large n0.
inline double r_dgcz(double n0)
{
    if (!(n0 >= 0.0)) {
        throw std::invalid_argument("r_dgcz: n0 must be nonnegative");
    }
    return std::log((n0 + 2.0) / (2.0 * std::sqrt(n0 + 1.0)));
}

/// Steering threshold for the oscillator steered by the pulse:
/// r > (1/2) ln((2 n0 + 1)/(n0 + 1)), saturating at (1/2) ln 2.
inline double r_epr_m_given_c(double n0)
{
    if (!(n0 >= 0.0)) {
        throw std::invalid_argument("r_epr_m_given_c: n0 must be nonnegative");
    }
    return 0.5 * std::log((2.0 * n0 + 1.0) / (n0 + 1.0));
}

/// Steering threshold for E_{m2|m1} (r = r'):
/// (1/2) ln(n_m2 + 1 + sqrt((n_m2+1)^2 - (n_m1+n_m2+1)/(n_m1+1))).
/// Zero whenever n_m2 = 0: the swap leaves no thermal barrier in that case.
/// A negative radicand would mean steering at every r > 0 and is reported as
/// an empty result; it cannot occur for nonnegative occupations.
inline std::optional<double> r_epr_m2_given_m1(double n_m1, double n_m2)
{
    if (!(n_m1 >= 0.0) || !(n_m2 >= 0.0)) {
        throw std::invalid_argument("r_epr_m2_given_m1: occupations must be nonnegative");
    }
    const double a = n_m2 + 1.0;
    const double radicand = a * a - (n_m1 + n_m2 + 1.0) / (n_m1 + 1.0);
    if (radicand < 0.0) return std::nullopt;
    return 0.5 * std::log(a + std::sqrt(radicand));
}

/// Steering threshold for E_{m1|m2} (r = r'):
/// (1/2) ln(A + sqrt(A^2 - 2 n_m2/(1+n_m1) - 2)), A = n_m2 + 2 - 1/(2(1+n_m1)).
/// Exact for all occupations (it reduces to the n_m2 = 0 special case and
/// matches bisection on E_{m1|m2} = 1 everywhere); tends to
/// (1/2) ln(2 + sqrt(2)) as n_m1 -> inf at n_m2 = 0 and to (1/2) ln(2 n_m2)
/// for large n_m2.
inline std::optional<double> r_epr_m1_given_m2(double n_m1, double n_m2)
{
    if (!(n_m1 >= 0.0) || !(n_m2 >= 0.0)) {
        throw std::invalid_argument("r_epr_m1_given_m2: occupations must be nonnegative");
    }
    const double a = n_m2 + 2.0 - 0.5 / (1.0 + n_m1);
    const double radicand = a * a - 2.0 * n_m2 / (1.0 + n_m1) - 2.0;
    if (radicand < 0.0) return std::nullopt;
    return 0.5 * std::log(a + std::sqrt(radicand));
}

/// Bisection on criterion(r) = bound over [r_lo, r_hi]. Requires
/// criterion(r_lo) >= bound and criterion(r_hi) < bound; the interval is
/// shrunk to 1e-12 and the residual at the root is recorded.
inline ThresholdResult numeric_threshold(const std::function<double(double)>& criterion,
                                         double bound, double r_lo = kDefaultBracketLo,
                                         double r_hi = kDefaultBracketHi)
{
    const auto f = [&](double r) { return criterion(r) - bound; };
    const RootResult root = bisect_decreasing(f, r_lo, r_hi, kBisectionXtol);
    return {root.x, ThresholdMethod::Bisection, root.f_at_x};
}

}  // namespace optosteer
