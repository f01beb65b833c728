#pragma once

// Constructors for the two physical settings modelled by this library.
//
// Pulse-oscillator setting: a blue-detuned light pulse (mode c) interacts
// with a mechanical oscillator (mode m) through an effective two-mode
// squeezing interaction of strength r. The input-output relations are
//
//   Xc' = -e^r Xc - sqrt(e^{2r}-1) Pm        Xm' = e^r Xm + sqrt(e^{2r}-1) Pc
//   Pc' = -e^r Pc - sqrt(e^{2r}-1) Xm        Pm' = e^r Pm + sqrt(e^{2r}-1) Xc
//
// Two-oscillator setting: the pulse leaving the first cavity is injected,
// red-detuned, into a second cavity whose oscillator m2 picks up the pulse
// quadratures through a beam-splitter-like coupling of strength r':
//
//   Xm2' = e^{-r'} Xm2 + sqrt(1-e^{-2r'}) Pc'
//   Pm2' = e^{-r'} Pm2 - sqrt(1-e^{-2r'}) Xc'
//
// Only the oscillator outputs are tracked for the second interaction (the
// second-cavity pulse output is never needed), so the swap chain is stored
// as a partial 4x6 linear map over the six independent inputs rather than a
// symplectic completion.

#include "optosteer/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace optosteer {

// Mode layout of the pulse-oscillator state: mode 0 = pulse, mode 1 = oscillator.
inline constexpr int kPulseMode = 0;
inline constexpr int kOscillatorMode = 1;

// Mode layout of the two-oscillator state.
inline constexpr int kOscillator1Mode = 0;
inline constexpr int kOscillator2Mode = 1;

struct PulseOscillatorParams {
    double r = 0.0;   ///< squeeze parameter of the entangling interaction
    double n0 = 0.0;  ///< initial thermal occupation of the oscillator

    void validate() const
    {
        if (!(r >= 0.0) || !(n0 >= 0.0)) {
            throw std::invalid_argument("PulseOscillatorParams: r and n0 must be nonnegative");
        }
    }
};

struct TwoOscillatorParams {
    double r = 0.0;        ///< squeeze parameter of the first (blue-detuned) cavity
    double r_prime = 0.0;  ///< squeeze parameter of the second (red-detuned) cavity
    double n_m1 = 0.0;
    double n_m2 = 0.0;

    void validate() const
    {
        if (!(r >= 0.0) || !(r_prime >= 0.0) || !(n_m1 >= 0.0) || !(n_m2 >= 0.0)) {
            throw std::invalid_argument("TwoOscillatorParams: all parameters must be nonnegative");
        }
    }
};

/// Symplectic map of the blue-detuned interaction on (Xc, Pc, Xm, Pm).
inline LinearModeMap blue_detuned_map(double r)
{
    if (!(r >= 0.0)) {
        throw std::invalid_argument("blue_detuned_map: r must be nonnegative");
    }
    const double e = std::exp(r);
    const double s = std::sqrt(std::exp(2.0 * r) - 1.0);
    Eigen::MatrixXd m(4, 4);
    // clang-format off
    m << -e, 0.0, 0.0,  -s,
        0.0,  -e,  -s, 0.0,
        0.0,   s,   e, 0.0,
          s, 0.0, 0.0,   e;
    // clang-format on
    return LinearModeMap(std::move(m));
}

/// Pulse-oscillator output as a linear model over the inputs
/// (Xc, Pc, Xm, Pm) with the pulse in vacuum and the oscillator thermal.
inline LinearGaussianModel pulse_oscillator_model(const PulseOscillatorParams& p)
{
    p.validate();
    const double v = 2.0 * p.n0 + 1.0;
    Eigen::VectorXd in_var(4);
    in_var << 1.0, 1.0, v, v;
    return {blue_detuned_map(p.r).matrix(), std::move(in_var)};
}

/// apply_map(vacuum (x) thermal(n0), blue_detuned_map(r)).
inline GaussianState pulse_oscillator_state(const PulseOscillatorParams& p)
{
    p.validate();
    return apply_map(tensor({vacuum_state(), thermal_state(p.n0)}), blue_detuned_map(p.r));
}

/// Partial linear map of the swap chain: rows are the tracked outputs
/// (Xm1', Pm1', Xm2', Pm2'), columns the independent inputs
/// (Xc, Pc, Xm1, Pm1, Xm2, Pm2).
inline Eigen::MatrixXd two_oscillator_output_map(double r, double r_prime)
{
    if (!(r >= 0.0) || !(r_prime >= 0.0)) {
        throw std::invalid_argument("two_oscillator_output_map: r, r' must be nonnegative");
    }
    const double e = std::exp(r);
    const double s = std::sqrt(std::exp(2.0 * r) - 1.0);
    const double ep = std::exp(-r_prime);
    const double t = std::sqrt(1.0 - std::exp(-2.0 * r_prime));
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 6);
    // Xm1' = s Pc + e Xm1
    b(0, 1) = s;
    b(0, 2) = e;
    // Pm1' = s Xc + e Pm1
    b(1, 0) = s;
    b(1, 3) = e;
    // Xm2' = e' Xm2 + t Pc' = -t e Pc - t s Xm1 + e' Xm2
    b(2, 1) = -t * e;
    b(2, 2) = -t * s;
    b(2, 4) = ep;
    // Pm2' = e' Pm2 - t Xc' = t e Xc + t s Pm1 + e' Pm2
    b(3, 0) = t * e;
    b(3, 3) = t * s;
    b(3, 5) = ep;
    return b;
}

inline LinearGaussianModel two_oscillator_model(const TwoOscillatorParams& p)
{
    p.validate();
    const double v1 = 2.0 * p.n_m1 + 1.0;
    const double v2 = 2.0 * p.n_m2 + 1.0;
    Eigen::VectorXd in_var(6);
    in_var << 1.0, 1.0, v1, v1, v2, v2;
    return {two_oscillator_output_map(p.r, p.r_prime), std::move(in_var)};
}

/// Two-mode state of the oscillators after the swap chain, ordered (m1, m2).
inline GaussianState two_oscillator_state(const TwoOscillatorParams& p)
{
    return two_oscillator_model(p).state();
}

/// r = g_R^2 tau / kappa.
inline double squeeze_param_from_physical(double g_r, double tau, double kappa)
{
    if (!(g_r > 0.0) || !(tau > 0.0) || !(kappa > 0.0)) {
        throw std::invalid_argument("squeeze_param_from_physical: inputs must be positive");
    }
    return g_r * g_r * tau / kappa;
}

}  // namespace optosteer
