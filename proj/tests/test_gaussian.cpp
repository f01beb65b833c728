#include "optosteer/gaussian.hpp"
#include "optosteer/numeric.hpp"
#include "optosteer/scenarios.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace optosteer;
using Catch::Approx;

namespace {
const Quadrature Xc{kPulseMode, Axis::X};
const Quadrature Pc{kPulseMode, Axis::P};
const Quadrature Xm{kOscillatorMode, Axis::X};
const Quadrature Pm{kOscillatorMode, Axis::P};
}  // namespace

TEST_CASE("thermal_state covariance is (2n+1) I")
{
    CHECK(thermal_state(0.0).cov().isApprox(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(thermal_state(5.0).cov().isApprox(11.0 * Eigen::MatrixXd::Identity(2, 2)));
    CHECK(thermal_state(0.5).cov().isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
    CHECK_THROWS_AS(thermal_state(-0.1), std::invalid_argument);
}

TEST_CASE("tensor builds block-diagonal covariance in list order")
{
    const GaussianState s = tensor({vacuum_state(), thermal_state(1.0)});
    Eigen::VectorXd diag(4);
    diag << 1, 1, 3, 3;
    CHECK(s.n_modes() == 2);
    CHECK(s.cov().isApprox(Eigen::MatrixXd(diag.asDiagonal())));

    const GaussianState single = tensor({vacuum_state()});
    CHECK(single.cov().isApprox(vacuum_state().cov()));

    const GaussianState two = tensor({thermal_state(2.0), thermal_state(3.0)});
    Eigen::VectorXd d2(4);
    d2 << 5, 5, 7, 7;
    CHECK(two.cov().isApprox(Eigen::MatrixXd(d2.asDiagonal())));

    CHECK_THROWS_AS(tensor({}), std::invalid_argument);
}

TEST_CASE("state construction validates shape, symmetry and diagonal")
{
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.5, 0.4, 1.0;  // asymmetric
    CHECK_THROWS_AS(GaussianState(bad), std::invalid_argument);

    Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(2, 2);
    neg(1, 1) = 0.0;
    CHECK_THROWS_AS(GaussianState(neg), std::invalid_argument);

    CHECK_THROWS_AS(GaussianState(Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("apply_map: identity, propagation rule, dimension mismatch")
{
    const GaussianState s = tensor({vacuum_state(), thermal_state(2.0)});
    const LinearModeMap id(Eigen::MatrixXd::Identity(4, 4));
    CHECK(apply_map(s, id).cov().isApprox(s.cov()));

    CHECK_THROWS_AS(apply_map(vacuum_state(), id), std::invalid_argument);

    // cov' = S cov S^T for a non-symplectic S as well
    Eigen::MatrixXd m(2, 2);
    m << 2.0, 0.0, 0.0, 3.0;
    const GaussianState scaled = apply_map(vacuum_state(), LinearModeMap(m));
    CHECK(scaled.cov()(0, 0) == Approx(4.0));
    CHECK(scaled.cov()(1, 1) == Approx(9.0));
}

TEST_CASE("variance_of and covariance_of are the covariance quadratic forms")
{
    const GaussianState vac2 = tensor({vacuum_state(), vacuum_state()});
    CHECK(variance_of(vac2, unit_coeffs(vac2, Xc)) == Approx(1.0));
    CHECK(variance_of(vac2, Eigen::VectorXd::Zero(4)) == 0.0);
    CHECK_THROWS_AS(variance_of(vac2, Eigen::VectorXd::Zero(3)), std::invalid_argument);

    const GaussianState s = pulse_oscillator_state({0.8, 2.0});
    Eigen::VectorXd a = unit_coeffs(s, Xm), b = unit_coeffs(s, Pc);
    CHECK(covariance_of(s, a, a) == Approx(variance_of(s, a)));
    CHECK(covariance_of(s, a, b) == Approx(covariance_of(s, b, a)));

    // independent modes of a product state have zero cross-covariance
    const GaussianState prod = tensor({thermal_state(1.0), thermal_state(4.0)});
    CHECK(covariance_of(prod, unit_coeffs(prod, Xc), unit_coeffs(prod, Xm)) == 0.0);

    // the combination entering the symmetric criterion, from the moments
    const double r = 0.7, n0 = 3.0;
    const GaussianState po = pulse_oscillator_state({r, n0});
    const double v = 2.0 * n0 + 1.0;
    const double e = std::exp(r), srt = std::sqrt(std::exp(2.0 * r) - 1.0);
    Eigen::VectorXd c = unit_coeffs(po, Xm) + unit_coeffs(po, Pc);
    CHECK(variance_of(po, c) == Approx((v + 1.0) * (e - srt) * (e - srt)).epsilon(1e-12));
}

TEST_CASE("conditional_variance matches the Schur form and its preconditions")
{
    // uncorrelated quadratures leave the marginal variance unchanged
    const GaussianState prod = tensor({thermal_state(1.0), thermal_state(4.0)});
    CHECK(conditional_variance(prod, Xm, Pc) == Approx(9.0));

    // no interaction: thermal variance survives conditioning
    const GaussianState r0 = pulse_oscillator_state({0.0, 5.0});
    CHECK(conditional_variance(r0, Xm, Pc) == Approx(11.0));

    // r=1, n0=0: (2n0+1) / (2 e^{2r}(n0+1) - (2n0+1))
    const GaussianState s = pulse_oscillator_state({1.0, 0.0});
    CHECK(conditional_variance(s, Xm, Pc) ==
          Approx(1.0 / (2.0 * std::exp(2.0) - 1.0)).epsilon(1e-12));

    CHECK_THROWS_AS(conditional_variance(s, Xm, Xm), std::invalid_argument);
    CHECK_THROWS_AS(conditional_variance(s, Quadrature{2, Axis::X}, Pc), std::invalid_argument);
}

TEST_CASE("conditional_variance equals the gain-scan minimum on scenario states")
{
    const auto check_pairs =
        [](const GaussianState& s,
           const std::vector<std::pair<Quadrature, Quadrature>>& pairs) {
            for (const auto& [target, measured] : pairs) {
                const double cv = conditional_variance(s, target, measured);
                const Eigen::VectorXd ct = unit_coeffs(s, target);
                const Eigen::VectorXd cm = unit_coeffs(s, measured);
                const auto objective = [&](double g) {
                    return variance_of(s, Eigen::VectorXd(ct - g * cm));
                };
                const MinimumResult m = grid_then_golden(objective, -10.0, 10.0, 801, 1e-7);
                CHECK(cv == Approx(m.value).margin(1e-6));
                CHECK(cv <= variance_of(s, ct) + 1e-12);
            }
        };

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> rdist(0.0, 2.5), ndist(0.0, 20.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double r = rdist(rng), n0 = ndist(rng);
        check_pairs(pulse_oscillator_state({r, n0}),
                    {{Xm, Pc}, {Pm, Xc}, {Xc, Pm}, {Pc, Xm}});

        const Quadrature xm1{kOscillator1Mode, Axis::X}, pm1{kOscillator1Mode, Axis::P};
        const Quadrature xm2{kOscillator2Mode, Axis::X}, pm2{kOscillator2Mode, Axis::P};
        check_pairs(two_oscillator_state({r, r, n0, ndist(rng)}),
                    {{xm2, xm1}, {pm2, pm1}, {xm1, xm2}, {pm1, pm2}});
    }
}

TEST_CASE("check_physical accepts the vacuum and rejects sub-Heisenberg noise")
{
    const PhysicalityReport vac = check_physical(vacuum_state());
    CHECK(vac.physical);
    CHECK(vac.min_eigenvalue == Approx(0.0).margin(1e-12));

    const GaussianState squeezed_too_far(0.5 * Eigen::MatrixXd::Identity(2, 2));
    const PhysicalityReport rep = check_physical(squeezed_too_far);
    CHECK_FALSE(rep.physical);
    CHECK(rep.min_eigenvalue < -0.4);
}

TEST_CASE("symplectic maps preserve physicality")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rdist(0.0, 3.0), ndist(0.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = rdist(rng);
        const LinearModeMap map = blue_detuned_map(r);
        REQUIRE(map.is_symplectic());
        const GaussianState in = tensor({vacuum_state(), thermal_state(ndist(rng))});
        CHECK(check_physical(apply_map(in, map)).physical);
    }
}

TEST_CASE("LinearGaussianModel agrees with the assembled state")
{
    const LinearGaussianModel model = pulse_oscillator_model({1.2, 4.0});
    const GaussianState s = model.state();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> cdist(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd c(4);
        for (int i = 0; i < 4; ++i) c(i) = cdist(rng);
        CHECK(model.combination_variance(c) == Approx(variance_of(s, c)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(model.combination_variance(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
