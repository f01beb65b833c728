#pragma once

// EPR-steering and entanglement criteria on two-mode Gaussian states.
//
// Three tests are provided, all phrased over inference combinations
// target + sign * g * partner described by an EPRPairing:
//
//   * Reid EPR product   E = Dinf(X) * Dinf(P) < 1   (per-axis optimal or
//     supplied gains; for Gaussian states this is the necessary and
//     sufficient steering test),
//   * DGCZ sum           D(u)^2 + D(v)^2 < 4         (unit gains),
//   * gain-optimized variance product
//                        D(u_gx)^2 D(v_gp)^2 / (|gx gp| + 1)^2 < 1.
//
// Gains reported here are the positive combination weights; the sign of the
// underlying correlation is carried by the pairing. All bounds use strict
// inequality: a value exactly on the bound is not a violation.

#include "optosteer/gaussian.hpp"
#include "optosteer/numeric.hpp"
#include "optosteer/scenarios.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace optosteer {

/// One inference combination target + sign * g * partner.
struct InferenceTriple {
    Quadrature target;
    Quadrature partner;
    double sign = 1.0;
};

/// The X-like and P-like inference combinations for one steering direction.
/// Targets must address both axes of one mode, partners the other mode.
struct EPRPairing {
    std::array<InferenceTriple, 2> triples;

    void validate() const
    {
        const int target_mode = triples[0].target.mode;
        const int partner_mode = triples[0].partner.mode;
        if (target_mode == partner_mode) {
            throw std::invalid_argument("EPRPairing: target and partner modes coincide");
        }
        if (triples[1].target.mode != target_mode || triples[1].partner.mode != partner_mode) {
            throw std::invalid_argument("EPRPairing: triples must share target/partner modes");
        }
        if (triples[0].target.axis == triples[1].target.axis) {
            throw std::invalid_argument("EPRPairing: triples must cover both target axes");
        }
        if (std::abs(triples[0].sign) != 1.0 || std::abs(triples[1].sign) != 1.0) {
            throw std::invalid_argument("EPRPairing: signs must be +1 or -1");
        }
    }

    [[nodiscard]] int steered_mode() const { return triples[0].target.mode; }
    [[nodiscard]] int steering_mode() const { return triples[0].partner.mode; }
};

/// Cross-axis pairing of the pulse-oscillator setting: X is inferred from
/// the partner's P and vice versa, with positive combination signs.
inline EPRPairing pulse_oscillator_pairing(int steered_mode)
{
    if (steered_mode != kPulseMode && steered_mode != kOscillatorMode) {
        throw std::invalid_argument("pulse_oscillator_pairing: mode must be 0 (pulse) or 1");
    }
    const int other = steered_mode == kPulseMode ? kOscillatorMode : kPulseMode;
    return {{InferenceTriple{{steered_mode, Axis::X}, {other, Axis::P}, +1.0},
             InferenceTriple{{steered_mode, Axis::P}, {other, Axis::X}, +1.0}}};
}

/// Same-axis pairing of the two-oscillator setting: X + g X with plus sign,
/// P - g P with minus sign (the swap anticorrelates X and correlates P).
inline EPRPairing two_oscillator_pairing(int steered_mode)
{
    if (steered_mode != kOscillator1Mode && steered_mode != kOscillator2Mode) {
        throw std::invalid_argument("two_oscillator_pairing: mode must be 0 (m1) or 1 (m2)");
    }
    const int other = steered_mode == kOscillator1Mode ? kOscillator2Mode : kOscillator1Mode;
    return {{InferenceTriple{{steered_mode, Axis::X}, {other, Axis::X}, +1.0},
             InferenceTriple{{steered_mode, Axis::P}, {other, Axis::P}, -1.0}}};
}

enum class CriterionKind { ReidEPR, DGCZ, ProductEntanglement };

struct Gains {
    double g_x = 0.0;
    double g_p = 0.0;
};

struct CriterionResult {
    CriterionKind kind = CriterionKind::ReidEPR;
    double value = 0.0;
    double bound = 1.0;
    Gains gains;
    bool violated = false;  // value < bound, strictly
};

namespace detail {

inline Eigen::VectorXd combination_coeffs(Eigen::Index dim, const InferenceTriple& t, double gain)
{
    if (t.target.mode < 0 || t.target.index() >= dim || t.partner.mode < 0 ||
        t.partner.index() >= dim) {
        throw std::invalid_argument("inference triple addresses quadratures outside the state");
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    c(t.target.index()) = 1.0;
    c(t.partner.index()) += t.sign * gain;
    return c;
}

struct CombinationMoments {
    double var_target = 0.0;
    double var_partner = 0.0;
    double cross = 0.0;  // sign * Cov(target, partner)

    [[nodiscard]] double value_at(double g) const
    {
        return var_target + 2.0 * g * cross + g * g * var_partner;
    }
    [[nodiscard]] double regression_gain() const
    {
        if (!(var_partner > 0.0)) {
            throw std::domain_error("inference gain: degenerate measured quadrature");
        }
        const double g = -cross / var_partner;
        return g == 0.0 ? 0.0 : g;  // avoid -0 leaking into reports
    }
};

inline CombinationMoments moments(const GaussianState& s, const InferenceTriple& t)
{
    const int ti = s.check_index(t.target);
    const int pi = s.check_index(t.partner);
    return {s.cov()(ti, ti), s.cov()(pi, pi), t.sign * s.cov()(ti, pi)};
}

inline CombinationMoments moments(const LinearGaussianModel& m, const InferenceTriple& t)
{
    if (t.target.mode < 0 || t.target.index() >= m.out_map.rows() || t.partner.mode < 0 ||
        t.partner.index() >= m.out_map.rows()) {
        throw std::invalid_argument("inference triple addresses quadratures outside the model");
    }
    const Eigen::VectorXd wt = m.out_map.row(t.target.index()).transpose();
    const Eigen::VectorXd wp = m.out_map.row(t.partner.index()).transpose();
    return {wt.cwiseAbs2().dot(m.in_var), wp.cwiseAbs2().dot(m.in_var),
            t.sign * wt.cwiseProduct(wp).dot(m.in_var)};
}

}  // namespace detail

/// Inference variance of one combination at an explicit gain.
inline double inference_variance(const GaussianState& s, const InferenceTriple& t, double gain)
{
    return variance_of(s, detail::combination_coeffs(s.cov().rows(), t, gain));
}

/// Same, evaluated through the input-side model. The variance is assembled
/// as a sum of squares over independent inputs, which stays accurate for
/// strongly squeezed combinations where the 2n x 2n covariance route loses
/// all digits to cancellation.
inline double inference_variance(const LinearGaussianModel& m, const InferenceTriple& t,
                                 double gain)
{
    return m.combination_variance(detail::combination_coeffs(m.out_map.rows(), t, gain));
}

/// Reid EPR product criterion. With no gains supplied, each combination uses
/// its variance-minimizing regression gain -sign*Cov/Var; the resulting
/// per-axis values are the conditional variances.
template <class StateOrModel>
CriterionResult epr_reid(const StateOrModel& s, const EPRPairing& pairing,
                         std::optional<Gains> gains = std::nullopt)
{
    pairing.validate();
    Gains g{};
    if (gains) {
        g = *gains;
    } else {
        g.g_x = detail::moments(s, pairing.triples[0]).regression_gain();
        g.g_p = detail::moments(s, pairing.triples[1]).regression_gain();
    }
    const double dx2 = inference_variance(s, pairing.triples[0], g.g_x);
    const double dp2 = inference_variance(s, pairing.triples[1], g.g_p);
    const double value = std::sqrt(dx2 * dp2);
    return {CriterionKind::ReidEPR, value, 1.0, g, value < 1.0};
}

/// DGCZ symmetric entanglement criterion: sum of the two unit-gain
/// combination variances against the bound 4.
template <class StateOrModel>
CriterionResult dgcz(const StateOrModel& s, const EPRPairing& pairing)
{
    pairing.validate();
    const double value =
        inference_variance(s, pairing.triples[0], 1.0) + inference_variance(s, pairing.triples[1], 1.0);
    return {CriterionKind::DGCZ, value, 4.0, Gains{1.0, 1.0}, value < 4.0};
}

namespace detail {

/// Gain search domain of the product criterion. The optima for the scenarios
/// modelled here stay well inside (0, 2]; the upper end only matters for
/// uncorrelated states where the product decreases toward its g->inf limit.
inline constexpr double kProductGainLo = 1e-9;
inline constexpr double kProductGainHi = 10.0;
inline constexpr double kProductGainTol = 1e-9;

struct ProductObjective {
    CombinationMoments x;
    CombinationMoments p;

    [[nodiscard]] double operator()(double g) const
    {
        const double q = 1.0 + g * g;
        return x.value_at(g) * p.value_at(g) / (q * q);
    }

    // d/dg log objective and its derivative, used for one Newton polish.
    [[nodiscard]] double dlog(double g) const
    {
        const double fx = x.value_at(g), fp = p.value_at(g);
        return 2.0 * (x.cross + g * x.var_partner) / fx +
               2.0 * (p.cross + g * p.var_partner) / fp - 4.0 * g / (1.0 + g * g);
    }
    [[nodiscard]] double d2log(double g) const
    {
        const double fx = x.value_at(g), fp = p.value_at(g);
        const double dfx = 2.0 * (x.cross + g * x.var_partner);
        const double dfp = 2.0 * (p.cross + g * p.var_partner);
        const double q = 1.0 + g * g;
        return (2.0 * x.var_partner * fx - dfx * dfx) / (fx * fx) +
               (2.0 * p.var_partner * fp - dfp * dfp) / (fp * fp) +
               4.0 * (g * g - 1.0) / (q * q);
    }
};

inline MinimumResult minimize_product(const ProductObjective& obj)
{
    MinimumResult best =
        golden_section_minimize(obj, kProductGainLo, kProductGainHi, kProductGainTol);

    // One Newton polish on the analytic derivative of the log-objective.
    const double curv = obj.d2log(best.x);
    if (curv > 0.0) {
        const double polished = best.x - obj.dlog(best.x) / curv;
        if (polished > 0.0 && polished <= kProductGainHi) {
            const double v = obj(polished);
            if (v < best.value) best = {polished, v};
        }
    }

    // Golden section assumes unimodality; a coarse scan catches the case
    // where it was trapped, and a refined pass recovers the true minimum.
    constexpr int kScanPoints = 2001;
    const double h = (kProductGainHi - kProductGainLo) / (kScanPoints - 1);
    int grid_best = 0;
    double grid_val = obj(kProductGainLo);
    for (int i = 1; i < kScanPoints; ++i) {
        const double v = obj(kProductGainLo + i * h);
        if (v < grid_val) {
            grid_val = v;
            grid_best = i;
        }
    }
    if (grid_val < best.value - 1e-12 * (1.0 + std::abs(best.value))) {
        const double lo = kProductGainLo + (grid_best > 0 ? grid_best - 1 : 0) * h;
        const double hi =
            kProductGainLo + (grid_best < kScanPoints - 1 ? grid_best + 1 : kScanPoints - 1) * h;
        best = golden_section_minimize(obj, lo, hi, kProductGainTol);
        if (grid_val < best.value) best = {kProductGainLo + grid_best * h, grid_val};
    }
    return best;
}

}  // namespace detail

/// Gain-optimized variance-product entanglement criterion. With supplied
/// gains the value follows the definition directly; otherwise the common
/// gain g = g_x = g_p is optimized numerically over (0, 10].
template <class StateOrModel>
CriterionResult product_entanglement(const StateOrModel& s, const EPRPairing& pairing,
                                     std::optional<Gains> gains = std::nullopt)
{
    pairing.validate();
    if (gains) {
        const double dx2 = inference_variance(s, pairing.triples[0], gains->g_x);
        const double dp2 = inference_variance(s, pairing.triples[1], gains->g_p);
        const double denom = std::abs(gains->g_x * gains->g_p) + 1.0;
        const double value = dx2 * dp2 / (denom * denom);
        return {CriterionKind::ProductEntanglement, value, 1.0, *gains, value < 1.0};
    }
    const detail::ProductObjective obj{detail::moments(s, pairing.triples[0]),
                                       detail::moments(s, pairing.triples[1])};
    const MinimumResult m = detail::minimize_product(obj);
    return {CriterionKind::ProductEntanglement, m.value, 1.0, Gains{m.x, m.x}, m.value < 1.0};
}

// ---------------------------------------------------------------------------
// Analytic optimal gains.
// ---------------------------------------------------------------------------

/// Optimal inference gain for steering the oscillator by the pulse:
/// 2 e^r sqrt(e^{2r}-1) (n0+1) / (2 e^{2r} (n0+1) - (2 n0+1)).
inline double epr_gain_pulse_osc(double r, double n0)
{
    if (!(r >= 0.0) || !(n0 >= 0.0)) {
        throw std::invalid_argument("epr_gain_pulse_osc: r, n0 must be nonnegative");
    }
    const double z = std::exp(2.0 * r);
    const double den = 2.0 * z * (n0 + 1.0) - (2.0 * n0 + 1.0);
    if (!(std::abs(den) > 1e-300)) {
        throw std::domain_error("epr_gain_pulse_osc: vanishing denominator");
    }
    return 2.0 * std::exp(r) * std::sqrt(z - 1.0) * (n0 + 1.0) / den;
}

/// Optimal common gain of the product criterion for the pulse-oscillator
/// state: [delta + sqrt(delta^2 + 4 e^{2r}(e^{2r}-1))] / (2 e^r sqrt(e^{2r}-1))
/// with delta = n0/(n0+1). Undefined at r = 0.
inline double ent_gain_pulse_osc(double r, double n0)
{
    if (!(r >= 0.0) || !(n0 >= 0.0)) {
        throw std::invalid_argument("ent_gain_pulse_osc: r, n0 must be nonnegative");
    }
    const double z = std::exp(2.0 * r);
    const double den = 2.0 * std::exp(r) * std::sqrt(z - 1.0);
    if (!(den > 0.0)) {
        throw std::domain_error("ent_gain_pulse_osc: r = 0 has no optimal gain");
    }
    const double delta = n0 / (n0 + 1.0);
    return (delta + std::sqrt(delta * delta + 4.0 * z * (z - 1.0))) / den;
}

/// Optimal common gain of the product criterion for two oscillators with
/// equal occupation n0 (r = r'):
/// sqrt(1 + (2n0+1)^2 / (4 e^{4r} (n0+1)^2)) - (2n0+1) / (2 e^{2r} (n0+1)).
inline double ent_gain_two_osc(double r, double n0)
{
    if (!(r > 0.0) || !(n0 >= 0.0)) {
        throw std::invalid_argument("ent_gain_two_osc: need r > 0, n0 >= 0");
    }
    const double z = std::exp(2.0 * r);
    const double a = (2.0 * n0 + 1.0) / (2.0 * z * (n0 + 1.0));
    return std::sqrt(1.0 + a * a) - a;
}

/// Optimal inference gain for E_{m2|m1} (r = r'):
/// (e^{2r}-1)(n_m1+1) / (e^{2r}(n_m1+1) - 1/2). Independent of n_m2.
inline double epr_gain_m2_given_m1(double r, double n_m1)
{
    if (!(r >= 0.0) || !(n_m1 >= 0.0)) {
        throw std::invalid_argument("epr_gain_m2_given_m1: r, n_m1 must be nonnegative");
    }
    const double z = std::exp(2.0 * r);
    return (z - 1.0) * (n_m1 + 1.0) / (z * (n_m1 + 1.0) - 0.5);
}

/// Optimal inference gain for E_{m1|m2} (r = r'):
/// (e^{2r}-1)(V1+Vc) / [(e^{2r}+e^{-2r}-2)V1 + (e^{2r}-1)Vc + e^{-2r}V2]
/// with V1 = 2 n_m1 + 1, Vc = 1, V2 = 2 n_m2 + 1.
inline double epr_gain_m1_given_m2(double r, double n_m1, double n_m2)
{
    if (!(r >= 0.0) || !(n_m1 >= 0.0) || !(n_m2 >= 0.0)) {
        throw std::invalid_argument("epr_gain_m1_given_m2: inputs must be nonnegative");
    }
    const double z = std::exp(2.0 * r);
    const double zi = std::exp(-2.0 * r);
    const double v1 = 2.0 * n_m1 + 1.0;
    const double v2 = 2.0 * n_m2 + 1.0;
    const double den = (z + zi - 2.0) * v1 + (z - 1.0) * 1.0 + zi * v2;
    if (!(den > 0.0)) return 0.0;  // r = 0: no correlation, zero gain
    return (z - 1.0) * (v1 + 1.0) / den;
}

// ---------------------------------------------------------------------------
// Steering classification.
// ---------------------------------------------------------------------------

enum class SteeringVerdict { NoSteering, OneWayAtoB, OneWayBtoA, TwoWay };

struct SteeringClassification {
    double e_b_given_a = 0.0;  ///< Reid value for A steering B
    double e_a_given_b = 0.0;  ///< Reid value for B steering A
    double delta_ent = 0.0;    ///< gain-optimized entanglement product
    SteeringVerdict verdict = SteeringVerdict::NoSteering;
};

/// Evaluates the Reid criterion in both directions plus the optimal-gain
/// entanglement product. The verdict reflects which E values fall below 1.
template <class StateOrModel>
SteeringClassification classify_steering(const StateOrModel& s, const EPRPairing& pairing_b_given_a,
                                         const EPRPairing& pairing_a_given_b)
{
    SteeringClassification out;
    out.e_b_given_a = epr_reid(s, pairing_b_given_a).value;
    out.e_a_given_b = epr_reid(s, pairing_a_given_b).value;
    out.delta_ent = product_entanglement(s, pairing_b_given_a).value;
    const bool a_to_b = out.e_b_given_a < 1.0;
    const bool b_to_a = out.e_a_given_b < 1.0;
    if (a_to_b && b_to_a) {
        out.verdict = SteeringVerdict::TwoWay;
    } else if (a_to_b) {
        out.verdict = SteeringVerdict::OneWayAtoB;
    } else if (b_to_a) {
        out.verdict = SteeringVerdict::OneWayBtoA;
    } else {
        out.verdict = SteeringVerdict::NoSteering;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario evaluators. These compose the model constructors with the Reid
// criterion through the input-side route, so they remain usable deep into
// the violated region where threshold bisections probe.
// ---------------------------------------------------------------------------

/// E_{m|c}(r, n0): steering of the oscillator by pulse measurements.
inline double e_m_given_c(double r, double n0)
{
    return epr_reid(pulse_oscillator_model({r, n0}), pulse_oscillator_pairing(kOscillatorMode))
        .value;
}

/// E_{c|m}(r, n0): steering of the pulse by oscillator measurements.
inline double e_c_given_m(double r, double n0)
{
    return epr_reid(pulse_oscillator_model({r, n0}), pulse_oscillator_pairing(kPulseMode)).value;
}

/// E_{m2|m1}(r, n_m1, n_m2) with r' = r.
inline double e_m2_given_m1(double r, double n_m1, double n_m2)
{
    return epr_reid(two_oscillator_model({r, r, n_m1, n_m2}),
                    two_oscillator_pairing(kOscillator2Mode))
        .value;
}

/// E_{m1|m2}(r, n_m1, n_m2) with r' = r.
inline double e_m1_given_m2(double r, double n_m1, double n_m2)
{
    return epr_reid(two_oscillator_model({r, r, n_m1, n_m2}),
                    two_oscillator_pairing(kOscillator1Mode))
        .value;
}

/// Unit-gain Reid product between the oscillators (r' = r). This is the
/// symmetric-detection variant whose threshold grows as (1/2) ln 4 n0 for
/// equal occupations; the optimal inference gain tends to 1 at large r, so
/// it is also the large-r limit of the optimal-gain criterion.
inline double e_two_osc_unit_gain(double r, double n_m1, double n_m2)
{
    return epr_reid(two_oscillator_model({r, r, n_m1, n_m2}),
                    two_oscillator_pairing(kOscillator2Mode), Gains{1.0, 1.0})
        .value;
}

/// DGCZ sum for the pulse-oscillator state.
inline double dgcz_sum_pulse_osc(double r, double n0)
{
    return dgcz(pulse_oscillator_model({r, n0}), pulse_oscillator_pairing(kOscillatorMode)).value;
}

/// DGCZ sum between the two oscillators (r' = r).
inline double dgcz_sum_two_osc(double r, double n_m1, double n_m2)
{
    return dgcz(two_oscillator_model({r, r, n_m1, n_m2}), two_oscillator_pairing(kOscillator2Mode))
        .value;
}

}  // namespace optosteer
