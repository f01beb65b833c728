#pragma once

// Command-line surface: subcommands `sweep`, `threshold`, `classify` and
// `physical`. Exit codes: 0 success, 1 flag/config usage error, 2 numeric
// failure (the computation rejected a value or could not converge).

#include "optosteer/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace optosteer::cli {

struct SweepOptions {
    std::string scenario;
    std::string r_range;
    std::string n0_list;
    std::string nm1_list;
    std::string nm2_list;
    std::vector<std::string> quantities;
    std::string out_path;
};

struct ThresholdOptions {
    std::string direction;
    std::string sweep_range;
    bool log_spaced = false;
    std::string sweep_var = "nm2";
    double fixed_n = 0.0;
    bool fixed_given = false;
    double r_max = kDefaultBracketHi;
    std::string out_path;
};

struct ClassifyOptions {
    std::string scenario;
    double r = 0.0;
    double n0 = 0.0;
    bool n0_given = false;
    double nm1 = 0.0;
    double nm2 = 0.0;
    bool nm1_given = false;
    bool nm2_given = false;
    std::optional<double> r_prime;
};

struct PhysicalOptions {
    double g_r = 0.0;
    double tau = 0.0;
    double kappa = 0.0;
};

/// Lifts string-parsing failures of flag payloads into usage errors.
template <class F>
auto usage_checked(F&& parse, const char* where) -> decltype(parse())
{
    try {
        return parse();
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError(where, e.what());
    }
}

inline Scenario parse_scenario(const std::string& name)
{
    if (name == "pulse-osc") return Scenario::PulseOscillator;
    if (name == "two-osc") return Scenario::TwoOscillator;
    throw CLI::ValidationError("--scenario", "must be pulse-osc or two-osc");
}

inline SweepQuantity parse_quantity(const std::string& name)
{
    if (name == "e_steered") return SweepQuantity::ESteered;
    if (name == "e_steering") return SweepQuantity::ESteering;
    if (name == "delta_ent") return SweepQuantity::DeltaEnt;
    if (name == "dgcz") return SweepQuantity::Dgcz;
    if (name == "gains") return SweepQuantity::GainColumns;
    throw CLI::ValidationError("--quantities", "unknown quantity '" + name + "'");
}

inline int run_sweep_command(const SweepOptions& opt, std::ostream& out, std::ostream& err)
{
    SweepSpec spec;
    spec.scenario = parse_scenario(opt.scenario);
    spec.r = usage_checked([&] { return RangeSpec::parse(opt.r_range); }, "--r");
    for (const auto& q : opt.quantities) spec.quantities.push_back(parse_quantity(q));

    if (spec.scenario == Scenario::PulseOscillator) {
        if (opt.n0_list.empty() || !opt.nm1_list.empty() || !opt.nm2_list.empty()) {
            throw CLI::ValidationError("sweep", "pulse-osc takes --n0 (and not --nm1/--nm2)");
        }
        spec.n0 = usage_checked([&] { return parse_list(opt.n0_list, "--n0"); }, "--n0");
    } else {
        if (opt.nm1_list.empty() || opt.nm2_list.empty() || !opt.n0_list.empty()) {
            throw CLI::ValidationError("sweep", "two-osc takes --nm1 and --nm2 (and not --n0)");
        }
        std::vector<double> n1 = usage_checked([&] { return parse_list(opt.nm1_list, "--nm1"); }, "--nm1");
        std::vector<double> n2 = usage_checked([&] { return parse_list(opt.nm2_list, "--nm2"); }, "--nm2");
        if (n1.size() == 1) n1.assign(n2.size(), n1.front());
        if (n2.size() == 1) n2.assign(n1.size(), n2.front());
        if (n1.size() != n2.size()) {
            throw CLI::ValidationError("sweep", "--nm1 and --nm2 lists must pair up");
        }
        for (std::size_t i = 0; i < n1.size(); ++i) spec.n_osc.emplace_back(n1[i], n2[i]);
    }

    const std::vector<SweepRow> rows = run_sweep(spec);
    if (!opt.out_path.empty()) {
        std::ofstream file(opt.out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot open output file '" << opt.out_path << "'\n";
            return 2;
        }
        write_sweep_csv(file, spec, rows);
    } else {
        write_sweep_csv(out, spec, rows);
    }
    return 0;
}

inline int run_threshold_command(const ThresholdOptions& opt, std::ostream& out, std::ostream& err)
{
    ThresholdSweepSpec spec;
    if (opt.direction == "m_c") {
        spec.direction = ThresholdDirection::MGivenC;
        spec.sweep_var = ThresholdSweepVar::N0;
    } else if (opt.direction == "dgcz") {
        spec.direction = ThresholdDirection::Dgcz;
        spec.sweep_var = ThresholdSweepVar::N0;
    } else if (opt.direction == "m2_m1" || opt.direction == "m1_m2") {
        spec.direction = opt.direction == "m2_m1" ? ThresholdDirection::M2GivenM1
                                                  : ThresholdDirection::M1GivenM2;
        if (opt.sweep_var == "nm1") {
            spec.sweep_var = ThresholdSweepVar::Nm1;
        } else if (opt.sweep_var == "nm2") {
            spec.sweep_var = ThresholdSweepVar::Nm2;
        } else {
            throw CLI::ValidationError("--sweep-var", "must be nm1 or nm2");
        }
        if (!opt.fixed_given) {
            throw CLI::ValidationError("threshold",
                                       "two-oscillator directions need --fixed for the other "
                                       "occupation");
        }
        spec.fixed_n = opt.fixed_n;
    } else {
        throw CLI::ValidationError("--direction", "must be one of m_c, m2_m1, m1_m2, dgcz");
    }

    const RangeSpec range = usage_checked([&] { return RangeSpec::parse(opt.sweep_range); }, "--sweep");
    spec.sweep = usage_checked([&] { return opt.log_spaced ? range.log_grid() : range.grid(); },
                               "--sweep");
    spec.r_max = opt.r_max;

    const std::vector<ThresholdRow> rows = run_threshold_sweep(spec, err);
    if (!opt.out_path.empty()) {
        std::ofstream file(opt.out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot open output file '" << opt.out_path << "'\n";
            return 2;
        }
        write_threshold_csv(file, rows);
    } else {
        write_threshold_csv(out, rows);
    }
    return 0;
}

inline int run_classify_command(const ClassifyOptions& opt, std::ostream& out)
{
    const Scenario scenario = parse_scenario(opt.scenario);
    SteeringClassification c;
    double n_a = 0.0, n_b = 0.0;
    if (scenario == Scenario::PulseOscillator) {
        if (!opt.n0_given || opt.nm1_given || opt.nm2_given) {
            throw CLI::ValidationError("classify", "pulse-osc takes --n0");
        }
        n_a = opt.n0;
        c = classify_steering(pulse_oscillator_model({opt.r, opt.n0}),
                              pulse_oscillator_pairing(kOscillatorMode),
                              pulse_oscillator_pairing(kPulseMode));
    } else {
        if (!opt.nm1_given || !opt.nm2_given || opt.n0_given) {
            throw CLI::ValidationError("classify", "two-osc takes --nm1 and --nm2");
        }
        n_a = opt.nm1;
        n_b = opt.nm2;
        const double rp = opt.r_prime.value_or(opt.r);
        c = classify_steering(two_oscillator_model({opt.r, rp, opt.nm1, opt.nm2}),
                              two_oscillator_pairing(kOscillator2Mode),
                              two_oscillator_pairing(kOscillator1Mode));
    }
    write_classification_report(out, scenario, opt.r, n_a, n_b, c);
    return 0;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Gaussian toolkit for pulsed optomechanical EPR steering"};
    app.set_version_flag("--version", "optosteer 1.0.0");
    app.set_config("--config", "", "flat key = value configuration file (section per subcommand)");
    app.allow_config_extras(CLI::config_extras_mode::error);  // unknown keys fail fast
    app.fallthrough();  // lets --config appear after the subcommand name
    app.require_subcommand(1);

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "criterion values over an r grid, as CSV");
    sweep->configurable();
    sweep->add_option("--scenario", sweep_opt.scenario, "pulse-osc or two-osc")->required();
    sweep->add_option("--r", sweep_opt.r_range, "squeeze-parameter grid lo:hi:count")->required();
    sweep->add_option("--n0", sweep_opt.n0_list, "comma list of oscillator occupations");
    sweep->add_option("--nm1", sweep_opt.nm1_list, "comma list of first-oscillator occupations");
    sweep->add_option("--nm2", sweep_opt.nm2_list, "comma list of second-oscillator occupations");
    sweep->add_option("--quantities", sweep_opt.quantities,
                      "subset of e_steered,e_steering,delta_ent,dgcz,gains (default: all)")
        ->delimiter(',');
    sweep->add_option("--out", sweep_opt.out_path, "write CSV to this file instead of stdout");

    ThresholdOptions thr_opt;
    CLI::App* thr = app.add_subcommand("threshold", "threshold squeeze parameters r*, as CSV");
    thr->configurable();
    thr->add_option("--direction", thr_opt.direction, "m_c, m2_m1, m1_m2 or dgcz")->required();
    thr->add_option("--sweep", thr_opt.sweep_range, "occupation grid lo:hi:count")->required();
    thr->add_flag("--log", thr_opt.log_spaced, "log-spaced occupation grid");
    thr->add_option("--sweep-var", thr_opt.sweep_var, "nm1 or nm2 (two-oscillator directions)");
    thr->add_option("--fixed", thr_opt.fixed_n, "held-fixed occupation of the other oscillator")
        ->each([&thr_opt](const std::string&) { thr_opt.fixed_given = true; });
    thr->add_option("--r-max", thr_opt.r_max, "upper end of the bisection bracket (default 20)");
    thr->add_option("--out", thr_opt.out_path, "write CSV to this file instead of stdout");

    ClassifyOptions cls_opt;
    CLI::App* cls = app.add_subcommand("classify", "steering classification at one point");
    cls->configurable();
    cls->add_option("--scenario", cls_opt.scenario, "pulse-osc or two-osc")->required();
    cls->add_option("--r", cls_opt.r, "squeeze parameter")->required();
    cls->add_option("--n0", cls_opt.n0, "oscillator occupation (pulse-osc)")
        ->each([&cls_opt](const std::string&) { cls_opt.n0_given = true; });
    cls->add_option("--nm1", cls_opt.nm1, "first-oscillator occupation")
        ->each([&cls_opt](const std::string&) { cls_opt.nm1_given = true; });
    cls->add_option("--nm2", cls_opt.nm2, "second-oscillator occupation")
        ->each([&cls_opt](const std::string&) { cls_opt.nm2_given = true; });
    cls->add_option("--r-prime", [&cls_opt](const std::vector<std::string>& v) {
        cls_opt.r_prime = parse_double(v.front(), "--r-prime");
        return true;
    }, "second-cavity squeeze parameter (default: equal to --r)");

    PhysicalOptions phys_opt;
    CLI::App* phys = app.add_subcommand("physical", "squeeze parameter from g_R, tau, kappa");
    phys->configurable();
    phys->add_option("--gr", phys_opt.g_r, "optomechanical coupling rate g_R")->required();
    phys->add_option("--tau", phys_opt.tau, "pulse duration")->required();
    phys->add_option("--kappa", phys_opt.kappa, "cavity decay rate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (sweep->parsed()) return run_sweep_command(sweep_opt, out, err);
        if (thr->parsed()) return run_threshold_command(thr_opt, out, err);
        if (cls->parsed()) return run_classify_command(cls_opt, out);
        if (phys->parsed()) {
            const double r =
                squeeze_param_from_physical(phys_opt.g_r, phys_opt.tau, phys_opt.kappa);
            out << "r=" << format_full(r) << '\n';
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace optosteer::cli
