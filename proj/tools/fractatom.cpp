#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "fractatom/cli.hpp"

using namespace fractatom;

namespace {

int emit(const cli::CommandResult& r, const cli::CommonOptions& common) {
  if (!r.message.empty()) std::cerr << r.message << '\n';
  if (r.output.empty()) return r.exit_code;
  if (common.out.empty()) {
    std::cout << r.output;
    return r.exit_code;
  }
  try {
    io::write_with_record(common.out, r.output, r.record);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return cli::kInputError;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability, WKB spectra and Rydberg laws of hydrogen-like atoms in fractal spaces"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  cli::CommonOptions common;
  const std::map<std::string, cli::Format> formats{{"csv", cli::Format::Csv}, {"json", cli::Format::Json}};
  app.add_option("--out", common.out, "Write output to this file (plus a .run.json record)");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::Range(1, 256));
  app.add_option("--tol-energy", common.tol_energy, "Relative energy tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-quad", common.tol_quad, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--maslov", common.maslov, "Maslov index")->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "Output format")->transform(CLI::CheckedTransformer(formats));

  double d_v = 3.0;
  double d_s = 2.0;
  std::string scenario = "full";
  auto add_fractality = [&](CLI::App* sub) {
    sub->add_option("--dv", d_v, "Volume fractal dimension")->required();
    sub->add_option("--ds", d_s, "Surface fractal dimension")->required();
    sub->add_option("--scenario", scenario, "full or embedded")->check(CLI::IsMember({"full", "embedded"}));
  };

  auto* stability = app.add_subcommand("stability", "Classify quantum stability");
  add_fractality(stability);

  auto* exponents = app.add_subcommand("exponents", "Rydberg energy and size exponents");
  add_fractality(exponents);

  cli::SpectrumOptions spec_opt;
  cli::PhysicalUnits units;
  auto* spectrum = app.add_subcommand("spectrum", "WKB energy levels n = 1 .. nmax");
  add_fractality(spectrum);
  spectrum->add_option("--nmax", spec_opt.n_max, "Highest level");
  spectrum->add_flag("--with-asymptote", spec_opt.with_asymptote, "Append large-n asymptote columns");
  auto* o_hbar = spectrum->add_option("--hbar", units.hbar, "Reduced Planck constant");
  auto* o_mass = spectrum->add_option("--mass", units.mass, "Electron mass");
  auto* o_charge = spectrum->add_option("--charge", units.charge, "Elementary charge");
  auto* o_z = spectrum->add_option("--z", units.z, "Nuclear charge number");

  cli::SweepSpec sweep_spec;
  std::string quantity = "stability";
  std::pair<double, double> dv_range{1.5, 3.0};
  std::pair<double, double> ds_range{1.0, 2.0};
  int steps = 151;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a quantity over a (d_v, d_s) grid");
  sweep->add_option("--scenario", scenario, "full or embedded")->check(CLI::IsMember({"full", "embedded"}));
  sweep->add_option("--quantity", quantity, "energy-exponent, size-exponent, stability or theta")
      ->check(CLI::IsMember({"energy-exponent", "size-exponent", "stability", "theta"}));
  sweep->add_option("--dv-range", dv_range, "d_v lo hi");
  sweep->add_option("--ds-range", ds_range, "d_s lo hi");
  auto* o_steps = sweep->add_option("--steps", steps, "Grid points per axis");
  int dv_steps = 0;
  int ds_steps = 0;
  sweep->add_option("--dv-steps", dv_steps, "Grid points along d_v")->excludes(o_steps);
  sweep->add_option("--ds-steps", ds_steps, "Grid points along d_s")->excludes(o_steps);

  cli::VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "Compare WKB levels with the shooting solver");
  add_fractality(verify);
  verify->add_option("--n", verify_opt.n_list, "Levels to compare")->expected(0, -1);
  verify->add_option("--gate", verify_opt.gate, "Maximum allowed relative difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInputError;
  }

  const Scenario sc = cli::parse_scenario(scenario);
  cli::CommandResult result;
  if (*stability) {
    result = cli::cmd_stability(d_v, d_s, sc, common);
  } else if (*exponents) {
    result = cli::cmd_exponents(d_v, d_s, sc, common);
  } else if (*spectrum) {
    spec_opt.d_v = d_v;
    spec_opt.d_s = d_s;
    spec_opt.scenario = sc;
    if (*o_hbar || *o_mass || *o_charge || *o_z) spec_opt.physical = units;
    result = cli::cmd_spectrum(spec_opt, common);
  } else if (*sweep) {
    sweep_spec.scenario = sc;
    sweep_spec.quantity = cli::parse_quantity(quantity);
    sweep_spec.d_v_range = {dv_range.first, dv_range.second, dv_steps ? dv_steps : steps};
    sweep_spec.d_s_range = {ds_range.first, ds_range.second, ds_steps ? ds_steps : steps};
    result = cli::cmd_sweep(sweep_spec, common);
  } else {
    verify_opt.d_v = d_v;
    verify_opt.d_s = d_s;
    verify_opt.scenario = sc;
    result = cli::cmd_verify(verify_opt, common);
  }
  return emit(result, common);
}
