#include "optosteer/sampling.hpp"

#include "optosteer/criteria.hpp"
#include "optosteer/scenarios.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace optosteer;
using Catch::Approx;

namespace {
constexpr std::uint64_t kSeed = 0x5eed0f00dULL;

const Quadrature Xc{kPulseMode, Axis::X};
const Quadrature Pc{kPulseMode, Axis::P};
const Quadrature Xm{kOscillatorMode, Axis::X};

double se_variance(double var, std::size_t n)
{
    return var * std::sqrt(2.0 / static_cast<double>(n));
}

double se_covariance(double var_a, double var_b, double cov, std::size_t n)
{
    return std::sqrt((var_a * var_b + cov * cov) / static_cast<double>(n));
}
}  // namespace

TEST_CASE("sampler sanity on the vacuum")
{
    const std::size_t n = 1'000'000;
    const SampleBatch batch = sample_gaussian(vacuum_state(), n, kSeed);
    REQUIRE(batch.draws.rows() == static_cast<Eigen::Index>(n));
    const double var_x = empirical_variance(batch, Quadrature{0, Axis::X});
    const double var_p = empirical_variance(batch, Quadrature{0, Axis::P});
    CHECK(std::abs(var_x - 1.0) < 0.01);
    CHECK(std::abs(var_p - 1.0) < 0.01);
    CHECK(std::abs(var_x - 1.0) < 3.0 * se_variance(1.0, n));
    CHECK(std::abs(empirical_mean(batch, Quadrature{0, Axis::X})) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("sampled moments reproduce the analytic covariance")
{
    const std::size_t n = 1'000'000;
    const double r = 1.0, n0 = 5.0;
    const GaussianState s = pulse_oscillator_state({r, n0});
    const SampleBatch batch = sample_gaussian(s, n, kSeed + 1);

    const double cov_true = covariance(s, Xm, Pc);
    const double cov_emp = empirical_covariance(batch, Xm, Pc);
    CHECK(std::abs(cov_emp - cov_true) < 0.01 * std::abs(cov_true));
    CHECK(std::abs(cov_emp - cov_true) <
          3.0 * se_covariance(variance(s, Xm), variance(s, Pc), cov_true, n));

    const double var_true = variance(s, Xm);
    CHECK(std::abs(empirical_variance(batch, Xm) - var_true) < 3.0 * se_variance(var_true, n));
}

TEST_CASE("sampling is deterministic per seed and split-invariant by prefix")
{
    const GaussianState s = pulse_oscillator_state({0.7, 2.0});
    const SampleBatch a = sample_gaussian(s, 10'000, kSeed);
    const SampleBatch b = sample_gaussian(s, 10'000, kSeed);
    CHECK(a.draws == b.draws);

    const SampleBatch c = sample_gaussian(s, 10'000, kSeed + 7);
    CHECK(a.draws != c.draws);

    // chunked sub-seeding: a longer batch starts with the same rows
    const SampleBatch longer = sample_gaussian(s, 20'000, kSeed);
    CHECK(longer.draws.topRows(10'000) == a.draws);
}

TEST_CASE("sampler rejects indefinite covariance input")
{
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
    CHECK_THROWS_AS(sample_gaussian(GaussianState(bad), 100, kSeed), std::domain_error);
    CHECK_THROWS_AS(sample_gaussian(vacuum_state(), 1, kSeed), std::invalid_argument);
}

TEST_CASE("empirical conditional variance tracks the analytic value")
{
    const std::size_t n = 1'000'000;
    const double r = 1.0, n0 = 5.0;
    const GaussianState s = pulse_oscillator_state({r, n0});
    const SampleBatch batch = sample_gaussian(s, n, kSeed + 2);

    const double cv_true = conditional_variance(s, Xm, Pc);
    const double cv_emp = empirical_conditional_variance(batch, Xm, Pc);
    CHECK(std::abs(cv_emp - cv_true) < 3.0 * se_variance(cv_true, n));

    // independent columns: conditioning changes nothing
    const GaussianState prod = tensor({thermal_state(1.0), thermal_state(3.0)});
    const SampleBatch pb = sample_gaussian(prod, 200'000, kSeed + 3);
    const double raw = empirical_variance(pb, Xm);
    CHECK(empirical_conditional_variance(pb, Xm, Pc) == Approx(raw).epsilon(0.01));

    // r = 0: the oscillator keeps its thermal variance
    const SampleBatch r0 = sample_gaussian(pulse_oscillator_state({0.0, 5.0}), 200'000, kSeed + 4);
    const double cv0 = empirical_conditional_variance(r0, Xm, Pc);
    CHECK(std::abs(cv0 - 11.0) < 3.0 * se_variance(11.0, 200'000));
}

TEST_CASE("grid_optimize_gain recovers analytic optima")
{
    const double r = 0.9, n0 = 4.0;
    const GaussianState s = pulse_oscillator_state({r, n0});
    const EPRPairing pairing = pulse_oscillator_pairing(kOscillatorMode);

    const auto inf_var = [&](double g) { return inference_variance(s, pairing.triples[0], g); };
    const GainScanResult epr = grid_optimize_gain(inf_var, 0.0, 10.0, 4001);
    CHECK(epr.g_star == Approx(epr_gain_pulse_osc(r, n0)).margin(1e-6));
    CHECK(epr.value == Approx(conditional_variance(s, Xm, Pc)).epsilon(1e-9));

    const auto product = [&](double g) {
        return product_entanglement(s, pairing, Gains{g, g}).value;
    };
    const GainScanResult ent = grid_optimize_gain(product, 1e-6, 10.0, 4001);
    CHECK(ent.g_star == Approx(ent_gain_pulse_osc(r, n0)).margin(1e-6));

    CHECK_THROWS_AS(grid_optimize_gain(inf_var, 0.0, 10.0, 2), std::invalid_argument);
}

TEST_CASE("chunk seeds spread over the full 64-bit range")
{
    CHECK(chunk_seed(0, 0) != chunk_seed(0, 1));
    CHECK(chunk_seed(1, 0) != chunk_seed(0, 0));
    CHECK(chunk_seed(kSeed, 3) == chunk_seed(kSeed, 3));
}
