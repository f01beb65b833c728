#pragma once

// One-dimensional numeric workhorses: golden-section minimization, a dense
// scan with golden refinement, and bracketed bisection for threshold roots.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace optosteer {

struct MinimumResult {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section search on [lo, hi]; assumes a unimodal objective and
/// shrinks the bracket until hi - lo <= xtol.
template <class F>
MinimumResult golden_section_minimize(F&& f, double lo, double hi, double xtol)
{
    if (!(lo < hi)) {
        throw std::invalid_argument("golden_section_minimize: empty interval");
    }
    constexpr double invphi = 0.6180339887498949;  // (sqrt(5)-1)/2
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

/// Dense scan over `steps` equally spaced points, then golden-section
/// refinement inside the bracketing neighbours of the best point.
template <class F>
MinimumResult grid_then_golden(F&& f, double lo, double hi, int steps, double xtol)
{
    if (steps < 3) {
        throw std::invalid_argument("grid_then_golden: need at least 3 scan points");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("grid_then_golden: empty interval");
    }
    const double h = (hi - lo) / (steps - 1);
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i < steps; ++i) {
        const double v = f(lo + i * h);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = lo + (best > 0 ? (best - 1) : 0) * h;
    const double b = lo + (best < steps - 1 ? (best + 1) : steps - 1) * h;
    if (!(a < b)) return {lo + best * h, best_val};
    MinimumResult refined = golden_section_minimize(f, a, b, xtol);
    if (best_val < refined.value) return {lo + best * h, best_val};
    return refined;
}

struct RootResult {
    double x = 0.0;
    double f_at_x = 0.0;
};

/// Bisection for a decreasing crossing: requires f(lo) >= 0 and f(hi) < 0,
/// shrinks to |interval| <= xtol. A boundary touch f(lo) == 0 is allowed;
/// the search then converges to the last point where f is still >= 0.
template <class F>
RootResult bisect_decreasing(F&& f, double lo, double hi, double xtol)
{
    if (!(lo < hi)) {
        throw std::invalid_argument("bisect_decreasing: empty bracket");
    }
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo < 0.0 || fhi >= 0.0) {
        throw std::domain_error("bisect_decreasing: bracket does not straddle the crossing");
    }
    double a = lo, b = hi;
    while (b - a > xtol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm >= 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    // f dipped below zero immediately above lo: the crossing is the edge
    // itself. Reporting lo keeps the residual meaningful even when f has a
    // square-root-type singularity there.
    if (a == lo) return {lo, flo};
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

}  // namespace optosteer
