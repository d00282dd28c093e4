#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fractatom/asymptotics.hpp"
#include "fractatom/errors.hpp"
#include "fractatom/geometry.hpp"
#include "fractatom/io.hpp"
#include "fractatom/oracle.hpp"
#include "fractatom/parallel.hpp"
#include "fractatom/potentials.hpp"
#include "fractatom/stability.hpp"
#include "fractatom/wkb.hpp"

namespace fractatom::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kSolverError = 3, kGateFailure = 4 };

enum class Format { Auto, Csv, Json };

struct CommonOptions {
  std::string out;
  int jobs = 1;
  double tol_energy = WkbConfig{}.energy_rel_tol;
  double tol_quad = WkbConfig{}.quadrature_abs_tol;
  double maslov = WkbConfig{}.maslov_index;
  Format format = Format::Auto;

  WkbConfig wkb() const {
    WkbConfig cfg;
    cfg.energy_rel_tol = tol_energy;
    cfg.quadrature_abs_tol = tol_quad;
    cfg.maslov_index = maslov;
    cfg.validate();
    return cfg;
  }

  nlohmann::ordered_json to_json() const {
    return {{"jobs", jobs}, {"tol_energy", tol_energy}, {"tol_quad", tol_quad}, {"maslov", maslov}};
  }
};

/// Rendered command output plus the metadata needed to persist it.
struct CommandResult {
  int exit_code = kOk;
  std::string output;
  std::string message;  // diagnostics for standard error
  io::RunRecord record;
};

inline Scenario parse_scenario(const std::string& name) {
  if (name == "full") return Scenario::FullFractal;
  if (name == "embedded") return Scenario::Embedded;
  throw DomainError("unknown scenario '" + name + "' (expected full or embedded)");
}

namespace detail {

inline std::string render(const io::Table& t, Format requested, Format fallback) {
  const Format f = requested == Format::Auto ? fallback : requested;
  return f == Format::Csv ? io::render_csv(t) : io::render_json(io::table_json(t));
}

inline std::string render_object(const io::Table& t, Format requested) {
  if (requested == Format::Csv) return io::render_csv(t);
  return io::render_json(io::table_json(t).at(0));
}

inline io::RunRecord make_record(const std::string& command, nlohmann::ordered_json params,
                                 const CommonOptions& common) {
  io::RunRecord r;
  r.command = command;
  params["common"] = common.to_json();
  r.parameters = std::move(params);
  return r;
}

/// Maps library exceptions to the exit-code contract.
template <class Body>
CommandResult guarded(Body&& body) {
  try {
    return body();
  } catch (const DomainError& e) {
    return {kInputError, {}, e.what(), {}};
  } catch (const ScenarioConstraintError& e) {
    return {kInputError, {}, e.what(), {}};
  } catch (const ScaleFreeSingularityError& e) {
    return {kInputError, {}, e.what(), {}};
  } catch (const InstabilityError& e) {
    return {kInputError, {}, e.what(), {}};
  } catch (const Error& e) {
    return {kSolverError, {}, e.what(), {}};
  }
}

inline Fractality scenario_fractality(double d_v, double d_s, Scenario s) { return Fractality::for_scenario(s, d_v, d_s); }

inline void require_stable(const Fractality& f, double kappa, Scenario s, const char* what) {
  const StabilityReport rep = classify_quantum(f, kappa, s);
  if (rep.classification != Classification::Stable) {
    throw InstabilityError(std::string(what) + ": fractality (" + io::format_number(f.d_v()) + ", " +
                           io::format_number(f.d_s()) + ") is " + to_string(rep.classification) +
                           " in the " + to_string(s) + " scenario, margin " + io::format_number(rep.margin));
  }
}

}  // namespace detail

inline CommandResult cmd_stability(double d_v, double d_s, Scenario scenario, const CommonOptions& common = {}) {
  return detail::guarded([&] {
    const Fractality f = detail::scenario_fractality(d_v, d_s, scenario);
    const StabilityReport rep = classify_quantum(f, scenario);
    io::Table t{{"scenario", "d_v", "d_s", "kappa", "margin", "classification"}, {}};
    t.add_row({std::string(to_string(scenario)), d_v, d_s, rep.kappa, rep.margin,
               std::string(to_string(rep.classification))});
    CommandResult r;
    r.output = detail::render_object(t, common.format);
    r.record = detail::make_record("stability", {{"d_v", d_v}, {"d_s", d_s}, {"scenario", to_string(scenario)}},
                                   common);
    return r;
  });
}

inline CommandResult cmd_exponents(double d_v, double d_s, Scenario scenario, const CommonOptions& common = {}) {
  return detail::guarded([&] {
    const Fractality f = detail::scenario_fractality(d_v, d_s, scenario);
    const RydbergExponents ex = exponents_for(scenario, f);
    io::Table t{{"energy_exponent", "size_exponent", "theta"}, {}};
    t.add_row({ex.energy_exponent, ex.size_exponent, ex.theta});
    CommandResult r;
    r.output = detail::render_object(t, common.format);
    r.record = detail::make_record("exponents", {{"d_v", d_v}, {"d_s", d_s}, {"scenario", to_string(scenario)}},
                                   common);
    return r;
  });
}

/// Physical constants for the optional unit conversion of `spectrum`.
struct PhysicalUnits {
  double hbar = 1.0;
  double mass = 1.0;
  double charge = 1.0;
  int z = 1;
};

struct SpectrumOptions {
  double d_v = 3.0;
  double d_s = 2.0;
  Scenario scenario = Scenario::FullFractal;
  int n_max = 50;
  bool with_asymptote = false;
  std::optional<PhysicalUnits> physical;
};

inline CommandResult cmd_spectrum(const SpectrumOptions& opt, const CommonOptions& common = {}) {
  return detail::guarded([&] {
    if (opt.n_max < 1) throw DomainError("spectrum: --nmax must be >= 1");
    const WkbConfig cfg = common.wkb();
    const Fractality f = detail::scenario_fractality(opt.d_v, opt.d_s, opt.scenario);
    const double kappa = scenario_kappa(opt.scenario, f);
    if (std::abs(kappa) < kDegenerateKappa) {
      throw DegenerateExponentError("spectrum: d_v = 2 d_s gives a logarithmic potential (kappa = 0)");
    }
    detail::require_stable(f, kappa, opt.scenario, "spectrum");

    std::optional<ScalingContext> scales;
    if (opt.physical) {
      const PowerLawPotential p = coulomb_potential(opt.scenario, f, Charges(opt.physical->z, opt.physical->charge));
      scales = scaling_context(f, p, opt.physical->hbar, opt.physical->mass, cfg.min_margin);
    }

    const SpectrumResult res = spectrum(f, kappa, 1, opt.n_max, cfg, common.jobs);
    if (!res.failures.empty()) {
      std::string msg = "spectrum: solver failed for";
      for (const auto& fail : res.failures) msg += "\n  n = " + std::to_string(fail.n) + ": " + fail.message;
      return CommandResult{kSolverError, {}, msg, {}};
    }

    io::Table t{{"n", "e_abs", "r_min", "r_max", "action_residual"}, {}};
    if (opt.with_asymptote) {
      t.columns.emplace_back("e_asym");
      t.columns.emplace_back("r_asym");
    }
    if (scales) {
      t.columns.emplace_back("e_abs_phys");
      t.columns.emplace_back("r_max_phys");
    }
    for (const SpectrumLevel& lvl : res.levels) {
      std::vector<io::Cell> row{static_cast<long long>(lvl.n), lvl.e_abs, lvl.r_min, lvl.r_max, lvl.action_residual};
      if (opt.with_asymptote) {
        const RydbergAsymptote a = rydberg_asymptote(f, kappa, lvl.n);
        row.emplace_back(a.e_abs);
        row.emplace_back(a.r_max);
      }
      if (scales) {
        row.emplace_back(scales->to_physical_energy(lvl.e_abs));
        row.emplace_back(scales->to_physical_radius(lvl.r_max));
      }
      t.add_row(std::move(row));
    }

    nlohmann::ordered_json params = {{"d_v", opt.d_v},
                                     {"d_s", opt.d_s},
                                     {"scenario", to_string(opt.scenario)},
                                     {"nmax", opt.n_max},
                                     {"with_asymptote", opt.with_asymptote}};
    if (opt.physical) {
      params["hbar"] = opt.physical->hbar;
      params["mass"] = opt.physical->mass;
      params["charge"] = opt.physical->charge;
      params["z"] = opt.physical->z;
    }
    CommandResult r;
    r.output = detail::render(t, common.format, Format::Csv);
    r.record = detail::make_record("spectrum", std::move(params), common);
    return r;
  });
}

enum class SweepQuantity { EnergyExponent, SizeExponent, StabilityClass, Theta };

inline const char* to_string(SweepQuantity q) {
  switch (q) {
    case SweepQuantity::EnergyExponent: return "energy-exponent";
    case SweepQuantity::SizeExponent: return "size-exponent";
    case SweepQuantity::StabilityClass: return "stability";
    case SweepQuantity::Theta: return "theta";
  }
  return "?";
}

inline SweepQuantity parse_quantity(const std::string& name) {
  for (auto q : {SweepQuantity::EnergyExponent, SweepQuantity::SizeExponent, SweepQuantity::StabilityClass,
                 SweepQuantity::Theta}) {
    if (name == to_string(q)) return q;
  }
  throw DomainError("unknown sweep quantity '" + name + "'");
}

struct SweepRange {
  double lo;
  double hi;
  int steps;

  double at(int i) const { return i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1); }
};

struct SweepSpec {
  Scenario scenario = Scenario::FullFractal;
  SweepRange d_v_range{1.5, 3.0, 151};
  SweepRange d_s_range{1.0, 2.0, 151};
  SweepQuantity quantity = SweepQuantity::StabilityClass;

  void validate() const {
    for (const SweepRange* r : {&d_v_range, &d_s_range}) {
      if (!std::isfinite(r->lo) || !std::isfinite(r->hi) || !(r->lo < r->hi)) {
        throw DomainError("sweep: range needs finite lo < hi");
      }
      if (r->steps < 2) throw DomainError("sweep: range needs at least 2 steps");
    }
  }
};

enum class CellStatus { Ok, Unstable, ScaleFree, OutOfBounds };

inline const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Unstable: return "unstable";
    case CellStatus::ScaleFree: return "scale_free";
    case CellStatus::OutOfBounds: return "out_of_bounds";
  }
  return "?";
}

struct SweepCell {
  double d_v = 0.0;
  double d_s = 0.0;
  std::optional<double> value;  // present only for status ok
  CellStatus status = CellStatus::OutOfBounds;
};

inline SweepCell evaluate_cell(Scenario scenario, SweepQuantity q, double d_v, double d_s) {
  SweepCell cell{d_v, d_s, std::nullopt, CellStatus::OutOfBounds};
  if (scenario == Scenario::Embedded && (d_v > 3.0 || d_s > 2.0)) return cell;
  try {
    const Fractality f = Fractality::make(d_v, d_s);
    const StabilityReport rep = classify_quantum(f, scenario);
    if (rep.classification == Classification::Unstable) {
      cell.status = CellStatus::Unstable;
      return cell;
    }
    if (rep.classification == Classification::ScaleFree) {
      cell.status = CellStatus::ScaleFree;
      return cell;
    }
    switch (q) {
      case SweepQuantity::StabilityClass: cell.value = rep.margin; break;
      case SweepQuantity::EnergyExponent: cell.value = exponents_for(scenario, f).energy_exponent; break;
      case SweepQuantity::SizeExponent: cell.value = exponents_for(scenario, f).size_exponent; break;
      case SweepQuantity::Theta: cell.value = exponents_for(scenario, f).theta; break;
    }
    cell.status = CellStatus::Ok;
  } catch (const Error&) {
    cell.value.reset();
    cell.status = CellStatus::OutOfBounds;
  }
  return cell;
}

/// All grid cells, d_v-major, independent of the worker count.
inline std::vector<SweepCell> run_sweep(const SweepSpec& spec, int jobs = 1) {
  spec.validate();
  const auto nv = static_cast<std::size_t>(spec.d_v_range.steps);
  const auto ns = static_cast<std::size_t>(spec.d_s_range.steps);
  return parallel_map(nv * ns, jobs, [&](std::size_t idx) {
    const double d_v = spec.d_v_range.at(static_cast<int>(idx / ns));
    const double d_s = spec.d_s_range.at(static_cast<int>(idx % ns));
    return evaluate_cell(spec.scenario, spec.quantity, d_v, d_s);
  });
}

inline CommandResult cmd_sweep(const SweepSpec& spec, const CommonOptions& common = {}) {
  return detail::guarded([&] {
    const std::vector<SweepCell> cells = run_sweep(spec, common.jobs);
    io::Table t{{"d_v", "d_s", "value", "status"}, {}};
    for (const SweepCell& c : cells) {
      io::Cell value = c.value ? io::Cell(*c.value) : io::Cell(std::monostate{});
      t.add_row({c.d_v, c.d_s, value, std::string(to_string(c.status))});
    }
    auto range_json = [](const SweepRange& r) { return nlohmann::ordered_json{{"lo", r.lo}, {"hi", r.hi}, {"steps", r.steps}}; };
    CommandResult r;
    r.output = detail::render(t, common.format, Format::Csv);
    r.record = detail::make_record("sweep",
                                   {{"scenario", to_string(spec.scenario)},
                                    {"quantity", to_string(spec.quantity)},
                                    {"d_v_range", range_json(spec.d_v_range)},
                                    {"d_s_range", range_json(spec.d_s_range)}},
                                   common);
    return r;
  });
}

struct VerifyOptions {
  double d_v = 3.0;
  double d_s = 2.0;
  Scenario scenario = Scenario::FullFractal;
  std::vector<int> n_list;
  double gate = 0.05;
  OracleConfig oracle;
};

inline CommandResult cmd_verify(const VerifyOptions& opt, const CommonOptions& common = {}) {
  return detail::guarded([&] {
    if (!(opt.gate > 0.0)) throw DomainError("verify: --gate must be positive");
    for (int n : opt.n_list) {
      if (n < 1) throw DomainError("verify: every n must be >= 1");
    }
    const WkbConfig cfg = common.wkb();
    opt.oracle.validate();
    const Fractality f = detail::scenario_fractality(opt.d_v, opt.d_s, opt.scenario);
    const double kappa = scenario_kappa(opt.scenario, f);
    if (std::abs(kappa) < kDegenerateKappa) {
      throw DegenerateExponentError("verify: d_v = 2 d_s gives a logarithmic potential (kappa = 0)");
    }
    detail::require_stable(f, kappa, opt.scenario, "verify");

    const ComparisonReport rep = compare_wkb_oracle(f, kappa, opt.n_list, cfg, opt.oracle, common.jobs);
    if (!rep.failures.empty()) {
      std::string msg = "verify: solver failed for";
      for (const auto& fail : rep.failures) msg += "\n  n = " + std::to_string(fail.n) + ": " + fail.message;
      return CommandResult{kSolverError, {}, msg, {}};
    }

    io::Table t{{"n", "wkb", "oracle", "rel_diff"}, {}};
    std::string offending;
    for (const auto& row : rep.rows) {
      t.add_row({static_cast<long long>(row.n), row.wkb_e, row.oracle_e, row.rel_diff});
      if (!(row.rel_diff < opt.gate)) offending += (offending.empty() ? "" : ", ") + std::to_string(row.n);
    }
    CommandResult r;
    r.output = detail::render(t, common.format, Format::Json);
    r.record = detail::make_record("verify",
                                   {{"d_v", opt.d_v},
                                    {"d_s", opt.d_s},
                                    {"scenario", to_string(opt.scenario)},
                                    {"n", opt.n_list},
                                    {"gate", opt.gate}},
                                   common);
    if (!offending.empty()) {
      r.exit_code = kGateFailure;
      r.message = "verify: relative difference at or above gate " + io::format_number(opt.gate) + " for n = " + offending;
    }
    return r;
  });
}

}  // namespace fractatom::cli
