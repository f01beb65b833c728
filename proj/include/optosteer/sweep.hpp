#pragma once

// Parameter sweeps, threshold tables and their CSV serialization. The CLI is
// a thin shell over these functions; keeping them here lets the test suite
// exercise the exact bytes the tool emits.
//
// CSV values are written with std::to_chars in scientific notation with 16
// fractional digits: locale-independent, '.' decimal separator, '\n' line
// endings, and enough digits to round-trip every double exactly.

#include "optosteer/criteria.hpp"
#include "optosteer/thresholds.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace optosteer {

enum class Scenario { PulseOscillator, TwoOscillator };

inline std::string format_full(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& what)
{
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("could not parse " + what + ": '" + std::string(text) + "'");
    }
    return value;
}

/// Inclusive grid lo:hi:count with count points (count >= 2 unless lo == hi).
struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;

    static RangeSpec parse(std::string_view text)
    {
        const auto c1 = text.find(':');
        const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) {
            throw std::invalid_argument("range must be lo:hi:count, got '" + std::string(text) +
                                        "'");
        }
        RangeSpec spec;
        spec.lo = parse_double(text.substr(0, c1), "range lo");
        spec.hi = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "range hi");
        spec.count = static_cast<int>(parse_double(text.substr(c2 + 1), "range count"));
        spec.validate();
        return spec;
    }

    void validate() const
    {
        if (!(lo <= hi) || count < 2) {
            throw std::invalid_argument("range requires lo <= hi and count >= 2");
        }
    }

    [[nodiscard]] std::vector<double> grid() const
    {
        std::vector<double> g(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
        }
        g.back() = hi;
        return g;
    }

    /// Log-spaced grid; requires lo > 0.
    [[nodiscard]] std::vector<double> log_grid() const
    {
        if (!(lo > 0.0)) {
            throw std::invalid_argument("log grid requires lo > 0");
        }
        std::vector<double> g(static_cast<std::size_t>(count));
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i < count; ++i) {
            g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (count - 1));
        }
        g.back() = hi;
        return g;
    }
};

inline std::vector<double> parse_list(std::string_view text, const std::string& what)
{
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_double(text.substr(0, comma), what));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) {
        throw std::invalid_argument(what + ": empty list");
    }
    return out;
}

enum class SweepQuantity { ESteered, ESteering, DeltaEnt, Dgcz, GainColumns };

struct SweepSpec {
    Scenario scenario = Scenario::PulseOscillator;
    RangeSpec r;
    std::vector<double> n0;                        // pulse-oscillator occupations
    std::vector<std::pair<double, double>> n_osc;  // (n_m1, n_m2) pairs
    std::vector<SweepQuantity> quantities;         // empty selects everything

    [[nodiscard]] bool wants(SweepQuantity q) const
    {
        if (quantities.empty()) return true;
        for (const auto sel : quantities) {
            if (sel == q) return true;
        }
        return false;
    }
};

struct SweepRow {
    double r = 0.0;
    double n_a = 0.0;  // n0 or n_m1
    double n_b = 0.0;  // n_m2 (two-oscillator scenario only)
    double e_steered = 0.0;
    double e_steering = 0.0;
    double delta_ent = 0.0;
    double dgcz_sum = 0.0;
    double g_epr = 0.0;
    double g_ent = 0.0;
};

/// Rows are produced in deterministic grid order: occupations outer (one
/// contiguous block per curve), r inner. Each row is independent of the
/// others, so the loop could be parallelized without changing the output.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec)
{
    const std::vector<double> rs = spec.r.grid();
    std::vector<SweepRow> rows;

    const auto eval = [&](double r, double na, double nb) {
        SweepRow row;
        row.r = r;
        row.n_a = na;
        row.n_b = nb;
        if (spec.scenario == Scenario::PulseOscillator) {
            const LinearGaussianModel model = pulse_oscillator_model({r, na});
            const EPRPairing steered = pulse_oscillator_pairing(kOscillatorMode);
            const CriterionResult reid = epr_reid(model, steered);
            row.e_steered = reid.value;
            row.g_epr = reid.gains.g_x;
            row.e_steering = epr_reid(model, pulse_oscillator_pairing(kPulseMode)).value;
            const CriterionResult ent = product_entanglement(model, steered);
            row.delta_ent = ent.value;
            row.g_ent = ent.gains.g_x;
            row.dgcz_sum = dgcz(model, steered).value;
        } else {
            const LinearGaussianModel model = two_oscillator_model({r, r, na, nb});
            const EPRPairing steered = two_oscillator_pairing(kOscillator2Mode);
            const CriterionResult reid = epr_reid(model, steered);
            row.e_steered = reid.value;
            row.g_epr = reid.gains.g_x;
            row.e_steering = epr_reid(model, two_oscillator_pairing(kOscillator1Mode)).value;
            const CriterionResult ent = product_entanglement(model, steered);
            row.delta_ent = ent.value;
            row.g_ent = ent.gains.g_x;
            row.dgcz_sum = dgcz(model, steered).value;
        }
        return row;
    };

    if (spec.scenario == Scenario::PulseOscillator) {
        rows.reserve(spec.n0.size() * rs.size());
        for (const double n : spec.n0) {
            for (const double r : rs) rows.push_back(eval(r, n, 0.0));
        }
    } else {
        rows.reserve(spec.n_osc.size() * rs.size());
        for (const auto& [n1, n2] : spec.n_osc) {
            for (const double r : rs) rows.push_back(eval(r, n1, n2));
        }
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                            const std::vector<SweepRow>& rows)
{
    const bool two_osc = spec.scenario == Scenario::TwoOscillator;
    std::string header = two_osc ? "r,nm1,nm2" : "r,n0";
    if (spec.wants(SweepQuantity::ESteered)) {
        header += two_osc ? ",E_m2_given_m1" : ",E_m_given_c";
    }
    if (spec.wants(SweepQuantity::ESteering)) {
        header += two_osc ? ",E_m1_given_m2" : ",E_c_given_m";
    }
    if (spec.wants(SweepQuantity::DeltaEnt)) header += ",delta_ent";
    if (spec.wants(SweepQuantity::Dgcz)) header += ",dgcz_sum";
    if (spec.wants(SweepQuantity::GainColumns)) header += ",g_epr,g_ent";
    out << header << '\n';

    for (const SweepRow& row : rows) {
        out << format_full(row.r) << ',' << format_full(row.n_a);
        if (two_osc) out << ',' << format_full(row.n_b);
        if (spec.wants(SweepQuantity::ESteered)) out << ',' << format_full(row.e_steered);
        if (spec.wants(SweepQuantity::ESteering)) out << ',' << format_full(row.e_steering);
        if (spec.wants(SweepQuantity::DeltaEnt)) out << ',' << format_full(row.delta_ent);
        if (spec.wants(SweepQuantity::Dgcz)) out << ',' << format_full(row.dgcz_sum);
        if (spec.wants(SweepQuantity::GainColumns)) {
            out << ',' << format_full(row.g_epr) << ',' << format_full(row.g_ent);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Threshold tables.
// ---------------------------------------------------------------------------

enum class ThresholdDirection { MGivenC, M2GivenM1, M1GivenM2, Dgcz };
enum class ThresholdSweepVar { N0, Nm1, Nm2 };

struct ThresholdSweepSpec {
    ThresholdDirection direction = ThresholdDirection::MGivenC;
    std::vector<double> sweep;                    // occupation grid
    ThresholdSweepVar sweep_var = ThresholdSweepVar::N0;
    std::optional<double> fixed_n;                // the other occupation
    double r_max = kDefaultBracketHi;
};

struct ThresholdRow {
    double n_sweep = 0.0;
    std::optional<double> n_fixed;
    std::optional<double> r_closed_form;
    std::optional<double> r_bisection;
    std::optional<double> residual;
};

inline std::vector<ThresholdRow> run_threshold_sweep(const ThresholdSweepSpec& spec,
                                                     std::ostream& warnings)
{
    std::vector<ThresholdRow> rows;
    rows.reserve(spec.sweep.size());
    for (const double n : spec.sweep) {
        ThresholdRow row;
        row.n_sweep = n;
        row.n_fixed = spec.fixed_n;

        double n1 = 0.0, n2 = 0.0;
        if (spec.direction == ThresholdDirection::M2GivenM1 ||
            spec.direction == ThresholdDirection::M1GivenM2) {
            const double fixed = spec.fixed_n.value_or(0.0);
            n1 = spec.sweep_var == ThresholdSweepVar::Nm1 ? n : fixed;
            n2 = spec.sweep_var == ThresholdSweepVar::Nm2 ? n : fixed;
        }

        std::function<double(double)> criterion;
        double bound = 1.0;
        switch (spec.direction) {
            case ThresholdDirection::MGivenC:
                row.r_closed_form = r_epr_m_given_c(n);
                criterion = [n](double r) { return e_m_given_c(r, n); };
                break;
            case ThresholdDirection::Dgcz:
                row.r_closed_form = r_dgcz(n);
                criterion = [n](double r) { return dgcz_sum_pulse_osc(r, n); };
                bound = 4.0;
                break;
            case ThresholdDirection::M2GivenM1:
                row.r_closed_form = r_epr_m2_given_m1(n1, n2);
                criterion = [n1, n2](double r) { return e_m2_given_m1(r, n1, n2); };
                break;
            case ThresholdDirection::M1GivenM2:
                row.r_closed_form = r_epr_m1_given_m2(n1, n2);
                criterion = [n1, n2](double r) { return e_m1_given_m2(r, n1, n2); };
                break;
        }

        try {
            const ThresholdResult res = numeric_threshold(criterion, bound, 0.0, spec.r_max);
            row.r_bisection = res.r_star;
            row.residual = res.residual;
            if (row.r_closed_form &&
                std::abs(*row.r_closed_form - res.r_star) > kGainAgreementTol) {
                warnings << "warning: closed form and bisection disagree at n=" << n << " ("
                         << *row.r_closed_form << " vs " << res.r_star << ")\n";
            }
        } catch (const std::exception& e) {
            warnings << "warning: bisection failed at n=" << n << ": " << e.what() << '\n';
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows)
{
    out << "n_sweep,n_fixed,r_closed_form,r_bisection,residual\n";
    const auto field = [](const std::optional<double>& v) {
        return v ? format_full(*v) : std::string();
    };
    for (const ThresholdRow& row : rows) {
        out << format_full(row.n_sweep) << ',' << field(row.n_fixed) << ','
            << field(row.r_closed_form) << ',' << field(row.r_bisection) << ','
            << field(row.residual) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Classification report.
// ---------------------------------------------------------------------------

inline std::string verdict_label(SteeringVerdict v)
{
    switch (v) {
        case SteeringVerdict::NoSteering: return "no-steering";
        case SteeringVerdict::OneWayAtoB:
        case SteeringVerdict::OneWayBtoA: return "one-way";
        case SteeringVerdict::TwoWay: return "two-way";
    }
    return "no-steering";
}

/// Human-readable report plus a trailing machine-readable line.
inline void write_classification_report(std::ostream& out, Scenario scenario, double r,
                                        double n_a, double n_b,
                                        const SteeringClassification& c)
{
    const bool two_osc = scenario == Scenario::TwoOscillator;
    const char* b_name = two_osc ? "m2" : "oscillator";
    const char* a_name = two_osc ? "m1" : "pulse";
    const char* e_ba = two_osc ? "E_m2|m1" : "E_m|c";
    const char* e_ab = two_osc ? "E_m1|m2" : "E_c|m";

    out << "scenario: " << (two_osc ? "two-oscillator" : "pulse-oscillator") << "  r=" << r;
    if (two_osc) {
        out << "  n_m1=" << n_a << "  n_m2=" << n_b << '\n';
    } else {
        out << "  n0=" << n_a << '\n';
    }
    out << "  " << e_ba << "     = " << format_full(c.e_b_given_a) << "  ("
        << (c.e_b_given_a < 1.0 ? "steers" : "does not steer") << " the " << b_name << ")\n";
    out << "  " << e_ab << "     = " << format_full(c.e_a_given_b) << "  ("
        << (c.e_a_given_b < 1.0 ? "steers" : "does not steer") << " the " << a_name << ")\n";
    out << "  Delta_ent  = " << format_full(c.delta_ent) << "  ("
        << (c.delta_ent < 1.0 ? "entangled" : "no entanglement detected") << ")\n";
    out << "  verdict: " << verdict_label(c.verdict);
    if (c.verdict == SteeringVerdict::OneWayAtoB) {
        out << " (only the " << b_name << " is steered)";
    } else if (c.verdict == SteeringVerdict::OneWayBtoA) {
        out << " (only the " << a_name << " is steered)";
    }
    out << '\n';

    out << "result scenario=" << (two_osc ? "two-osc" : "pulse-osc") << " r=" << format_full(r);
    if (two_osc) {
        out << " nm1=" << format_full(n_a) << " nm2=" << format_full(n_b);
    } else {
        out << " n0=" << format_full(n_a);
    }
    out << " e_steered=" << format_full(c.e_b_given_a)
        << " e_steering=" << format_full(c.e_a_given_b)
        << " delta_ent=" << format_full(c.delta_ent) << " verdict=" << verdict_label(c.verdict)
        << '\n';
}

}  // namespace optosteer
