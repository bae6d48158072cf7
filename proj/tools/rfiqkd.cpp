// rfiqkd command-line interface.
//
//   rfiqkd rates [--werner | --c-const V | --c-poly a0,a1,...] [--qmin Q] [--qmax Q] [--steps N]
//   rfiqkd simulate [--n N] [--seed S] [--drift SPEC] [--noise Q] [--bases px,py,pz] [--transcript PATH]
//   rfiqkd qutrit [--n N] [--seed S] [--phase-drift SPEC] [--visibility P] [--device]
//   rfiqkd chip-verify [--inject-fault dc3]
//
// Every subcommand accepts --out PATH (default stdout).
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 insufficient data.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rfiqkd/commands.hpp"

namespace {

template <class Run>
int with_output(const std::string& path, Run&& run) {
    if (path.empty()) return run(std::cout);
    std::ofstream f(path);
    if (!f) {
        std::cerr << "config error: cannot open output '" << path << "'\n";
        return rfiqkd::kExitConfigError;
    }
    return run(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reference-frame-independent QKD simulator"};
    app.require_subcommand(1);
    std::string out_path;

    rfiqkd::RatesConfig rates;
    bool werner = false;
    double c_const = 0.0;
    auto* rates_cmd = app.add_subcommand("rates", "Secret key rate sweep r(Q) as CSV");
    rates_cmd->add_flag("--werner", werner, "C(Q) = 2(1-2Q)^2 (default)");
    auto* c_const_opt = rates_cmd->add_option("--c-const", c_const, "Constant C(Q)");
    auto* c_poly_opt = rates_cmd->add_option("--c-poly", rates.c_poly, "C(Q) polynomial coefficients a0,a1,...")->delimiter(',');
    rates_cmd->add_option("--qmin", rates.qmin, "Lowest QBER")->capture_default_str();
    rates_cmd->add_option("--qmax", rates.qmax, "Highest QBER")->capture_default_str();
    rates_cmd->add_option("--steps", rates.steps, "Grid points")->capture_default_str();
    rates_cmd->add_option("--out", out_path, "Output path");
    c_const_opt->excludes(c_poly_opt);
    rates_cmd->get_option("--werner")->excludes(c_const_opt)->excludes(c_poly_opt);

    rfiqkd::SimulateConfig sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo qubit protocol run");
    sim_cmd->add_option("--n", sim.n, "Number of signals")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--drift", sim.drift, "constant:B0 | ramp:B0:RATE | walk:B0:STEP[:SEED]")->capture_default_str();
    sim_cmd->add_option("--noise", sim.noise, "Werner QBER of the source")->capture_default_str();
    sim_cmd->add_option("--bases", sim.bases, "Basis probabilities px,py,pz")->delimiter(',');
    sim_cmd->add_option("--transcript", sim.transcript_path, "Write the transcript to PATH");
    sim_cmd->add_option("--out", out_path, "Output path");

    rfiqkd::QutritConfig qutrit;
    auto* qutrit_cmd = app.add_subcommand("qutrit", "Exact and sampled C3 for the qutrit protocol");
    qutrit_cmd->add_option("--n", qutrit.n, "Number of signals")->capture_default_str();
    qutrit_cmd->add_option("--seed", qutrit.seed, "Random seed")->capture_default_str();
    qutrit_cmd->add_option("--phase-drift", qutrit.phase_drift,
                           "none | fixed:P1:P2 | random[:SEED] | iid[:SEED] | walk:STEP[:SEED]")
        ->capture_default_str();
    qutrit_cmd->add_option("--visibility", qutrit.visibility, "Bell-state weight against white noise")->capture_default_str();
    qutrit_cmd->add_flag("--device", qutrit.device, "Measure through the photonic four-basis devices");
    qutrit_cmd->add_option("--reflectivities", qutrit.reflectivities, "Splitter reflectivities r1,r2,r3")->delimiter(',');
    qutrit_cmd->add_option("--out", out_path, "Output path");

    rfiqkd::ChipVerifyConfig chip;
    std::string fault;
    auto* chip_cmd = app.add_subcommand("chip-verify", "Verify the photonic circuits");
    chip_cmd->add_option("--inject-fault", fault, "Corrupt a component (dc3)")->check(CLI::IsMember({"dc3"}));
    chip_cmd->add_option("--reflectivities", chip.reflectivities, "Splitter reflectivities r1,r2,r3")->delimiter(',');
    chip_cmd->add_option("--out", out_path, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? rfiqkd::kExitOk : rfiqkd::kExitConfigError;
    }

    if (rates_cmd->parsed()) {
        if (c_const_opt->count() > 0) rates.c_const = c_const;
        return with_output(out_path, [&](std::ostream& os) { return rfiqkd::run_rates(rates, os, std::cerr); });
    }
    if (sim_cmd->parsed()) {
        return with_output(out_path, [&](std::ostream& os) { return rfiqkd::run_simulate(sim, os, std::cerr); });
    }
    if (qutrit_cmd->parsed()) {
        return with_output(out_path, [&](std::ostream& os) { return rfiqkd::run_qutrit(qutrit, os, std::cerr); });
    }
    chip.inject_dc3_fault = fault == "dc3";
    return with_output(out_path, [&](std::ostream& os) { return rfiqkd::run_chip_verify(chip, os, std::cerr); });
}
