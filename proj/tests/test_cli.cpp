#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "fractatom/cli.hpp"

using namespace fractatom;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRACTATOM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Stability, Examples) {
  auto soil = json::parse(cli::cmd_stability(1.79, 1.48, Scenario::FullFractal).output);
  EXPECT_EQ(soil["classification"], "unstable");
  auto h = cli::cmd_stability(3, 2, Scenario::Embedded);
  EXPECT_EQ(h.exit_code, cli::kOk);
  auto hj = json::parse(h.output);
  EXPECT_EQ(hj["classification"], "stable");
  EXPECT_DOUBLE_EQ(hj["margin"].get<double>(), 1.0);
  for (const char* key : {"scenario", "d_v", "d_s", "kappa", "margin", "classification"}) EXPECT_TRUE(hj.contains(key));
  auto sf = json::parse(cli::cmd_stability(2.4, 1.8, Scenario::FullFractal).output);
  EXPECT_EQ(sf["classification"], "scale-free");
  EXPECT_EQ(cli::cmd_stability(1.0, 2.0, Scenario::FullFractal).exit_code, cli::kInputError);
  EXPECT_EQ(cli::cmd_stability(3.5, 2.0, Scenario::Embedded).exit_code, cli::kInputError);
}

TEST(Exponents, Examples) {
  auto h = json::parse(cli::cmd_exponents(3, 2, Scenario::FullFractal).output);
  EXPECT_NEAR(h["energy_exponent"].get<double>(), -2.0, 1e-12);
  EXPECT_NEAR(h["size_exponent"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(h["theta"].get<double>(), 2.2214415, 1e-7);
  auto a = json::parse(cli::cmd_exponents(2.1, 1.4, Scenario::FullFractal).output);
  EXPECT_NEAR(a["size_exponent"].get<double>(), 2.857142857, 1e-8);
  EXPECT_NEAR(a["theta"].get<double>(), 3.1734, 1e-4);
  auto e = json::parse(cli::cmd_exponents(2.5, 1, Scenario::Embedded).output);
  EXPECT_NEAR(e["energy_exponent"].get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(e["theta"].get<double>(), theta_closed_form(Fractality::make(2.5, 1), 1.0), 1e-12);
  const auto bad = cli::cmd_exponents(1.79, 1.48, Scenario::FullFractal);
  EXPECT_EQ(bad.exit_code, cli::kInputError);
  EXPECT_NE(bad.message.find("margin"), std::string::npos);
}

TEST(Spectrum, HydrogenTable) {
  cli::SpectrumOptions opt;
  opt.scenario = Scenario::Embedded;
  opt.n_max = 50;
  cli::CommonOptions common;
  common.jobs = 4;
  const auto r = cli::cmd_spectrum(opt, common);
  ASSERT_EQ(r.exit_code, cli::kOk) << r.message;
  const auto rows = parse_csv(r.output);
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "e_abs", "r_min", "r_max", "action_residual"}));
  for (int n = 1; n <= 50; ++n) {
    EXPECT_EQ(std::stoi(rows[n][0]), n);
    EXPECT_NEAR(std::stod(rows[n][1]) * 2.0 * n * n, 1.0, 1e-6);
  }
}

TEST(Spectrum, ConfiningSeriesRises) {
  cli::SpectrumOptions opt;
  opt.d_v = 2.5;
  opt.d_s = 1.0;
  opt.n_max = 50;
  opt.with_asymptote = true;
  const auto r = cli::cmd_spectrum(opt);
  ASSERT_EQ(r.exit_code, cli::kOk) << r.message;
  const auto rows = parse_csv(r.output);
  ASSERT_EQ(rows[0].size(), 7u);
  EXPECT_EQ(rows[0][5], "e_asym");
  EXPECT_EQ(rows[0][6], "r_asym");
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_GT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
}

TEST(Spectrum, PhysicalColumnsAndErrors) {
  cli::SpectrumOptions opt;
  opt.n_max = 3;
  opt.physical = cli::PhysicalUnits{};
  const auto rows = parse_csv(cli::cmd_spectrum(opt).output);
  ASSERT_EQ(rows[0].size(), 7u);
  EXPECT_EQ(rows[0][5], "e_abs_phys");
  // (3,2) with |U| = 1/(4 pi): E = |U|^2 / (2 n^2).
  const double u = 1.0 / (4.0 * std::numbers::pi);
  EXPECT_NEAR(std::stod(rows[1][5]), u * u / 2.0, 1e-12);
  opt.n_max = 0;
  EXPECT_EQ(cli::cmd_spectrum(opt).exit_code, cli::kInputError);
  opt.n_max = 5;
  opt.d_v = 1.79;
  opt.d_s = 1.48;
  EXPECT_EQ(cli::cmd_spectrum(opt).exit_code, cli::kInputError);
}

TEST(Sweep, SizeExponentDivergesTowardLocus) {
  cli::SweepSpec spec;
  spec.quantity = cli::SweepQuantity::SizeExponent;
  spec.d_v_range = {1.5, 3.0, 31};
  spec.d_s_range = {1.0, 2.0, 21};
  const auto cells = cli::run_sweep(spec, 4);
  ASSERT_EQ(cells.size(), 31u * 21u);
  // Along d_s = 1.5 the size exponent grows as d_v approaches 2 from above.
  double prev = 0.0;
  for (int i = 30; i >= 0; --i) {
    const auto& c = cells[static_cast<std::size_t>(i) * 21 + 10];
    ASSERT_DOUBLE_EQ(c.d_s, 1.5);
    if (c.status != cli::CellStatus::Ok) {
      if (prev > 0.0) break;
      continue;
    }
    EXPECT_GT(*c.value, prev);
    prev = *c.value;
  }
  EXPECT_GT(prev, 10.0);
}

TEST(Sweep, EmbeddedOutOfBoundsAndEmptyValues) {
  cli::SweepSpec spec;
  spec.scenario = Scenario::Embedded;
  spec.quantity = cli::SweepQuantity::EnergyExponent;
  spec.d_v_range = {2.0, 3.5, 4};
  spec.d_s_range = {1.0, 1.5, 2};
  const auto r = cli::cmd_sweep(spec);
  const auto rows = parse_csv(r.output);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"d_v", "d_s", "value", "status"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][0]) > 3.0) {
      EXPECT_EQ(rows[i][3], "out_of_bounds");
    }
    if (rows[i][3] != "ok") {
      EXPECT_EQ(rows[i][2], "");
    }
  }
  // (2, 1.5) sits on the embedded locus.
  EXPECT_EQ(rows[2][3], "scale_free");
  spec.d_v_range = {3.0, 2.0, 5};
  EXPECT_EQ(cli::cmd_sweep(spec).exit_code, cli::kInputError);
  spec.d_v_range = {2.0, 3.0, 1};
  EXPECT_EQ(cli::cmd_sweep(spec).exit_code, cli::kInputError);
}

TEST(Sweep, StabilityMatchesLoci) {
  for (Scenario sc : {Scenario::FullFractal, Scenario::Embedded}) {
    cli::SweepSpec spec;
    spec.scenario = sc;
    spec.d_v_range = {1.5, 3.0, 61};
    spec.d_s_range = {1.0, 2.0, 61};
    for (const auto& c : cli::run_sweep(spec, 4)) {
      if (c.status == cli::CellStatus::OutOfBounds) {
        EXPECT_LE(c.d_v - c.d_s, 1e-9);
        continue;
      }
      const double gap = sc == Scenario::FullFractal ? c.d_v - scale_free_locus_full(c.d_s)
                                                     : c.d_v - scale_free_locus_embedded(c.d_s);
      const auto expected = gap > 1e-12 ? cli::CellStatus::Ok : (gap < -1e-12 ? cli::CellStatus::Unstable : cli::CellStatus::ScaleFree);
      EXPECT_EQ(c.status, expected) << c.d_v << " " << c.d_s;
    }
  }
}

TEST(Verify, HydrogenAndGate) {
  cli::VerifyOptions opt;
  opt.scenario = Scenario::Embedded;
  opt.n_list = {1, 2, 5, 10};
  const auto r = cli::cmd_verify(opt);
  ASSERT_EQ(r.exit_code, cli::kOk) << r.message;
  const auto j = json::parse(r.output);
  ASSERT_EQ(j.size(), 4u);
  for (const auto& row : j) EXPECT_LE(row["rel_diff"].get<double>(), 1e-5);
  opt.gate = 1e-14;
  opt.n_list = {2};
  const auto gated = cli::cmd_verify(opt);
  EXPECT_EQ(gated.exit_code, cli::kGateFailure);
  EXPECT_NE(gated.message.find("n = 2"), std::string::npos);
  opt.n_list = {};
  const auto empty = cli::cmd_verify(opt);
  EXPECT_EQ(empty.exit_code, cli::kOk);
  EXPECT_EQ(json::parse(empty.output).size(), 0u);
}

TEST(Verify, FractalWithinGate) {
  cli::VerifyOptions opt;
  opt.d_v = 2.1;
  opt.d_s = 1.4;
  opt.n_list = {10, 20, 30};
  cli::CommonOptions common;
  common.jobs = 3;
  const auto r = cli::cmd_verify(opt, common);
  EXPECT_EQ(r.exit_code, cli::kOk) << r.message;
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_cli("stability --dv 3 --ds 2 --scenario embedded"), 0);
  EXPECT_EQ(run_cli("stability --dv 1 --ds 2"), 2);
  EXPECT_EQ(run_cli("spectrum --dv 3 --ds 2 --nmax 0"), 2);
  EXPECT_EQ(run_cli("spectrum --dv 3 --ds 2 --nmax abc"), 2);
  EXPECT_EQ(run_cli("exponents --dv 1.79 --ds 1.48"), 2);
  EXPECT_EQ(run_cli("sweep --dv-range 3 2"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("verify --dv 3 --ds 2 --n 2 --gate 1e-14"), 4);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Binary, OutputWithRecord) {
  const auto dir = std::filesystem::temp_directory_path() / "fractatom_cli_test";
  std::filesystem::create_directories(dir);
  const std::string out = (dir / "spec.csv").string();
  ASSERT_EQ(run_cli("--out " + out + " spectrum --dv 3 --ds 2 --nmax 5"), 0);
  const auto data = io::read_file(out);
  EXPECT_EQ(data.rfind("n,e_abs,r_min,r_max,action_residual\n", 0), 0u);
  const auto rec = json::parse(io::read_file(io::sidecar_path(out)));
  EXPECT_EQ(rec["output_digest"]["hex"], io::sha256_hex(data));
  EXPECT_EQ(rec["command"], "spectrum");
  const std::string js = (dir / "sweep.json").string();
  ASSERT_EQ(run_cli("sweep --steps 3 --format json --out " + js), 0);
  EXPECT_EQ(json::parse(io::read_file(js)).size(), 9u);
  std::filesystem::remove_all(dir);
}
