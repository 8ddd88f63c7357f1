// End-to-end tests of the command-line surface: subcommands, exit codes,
// file formats and reproducibility, driving the built binary as a subprocess.
#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "qsm_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path log = scratch_dir() / "last_run.log";
  const std::string cmd =
      std::string(QSM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

fs::path write_config(const std::string& name, const json& doc) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << doc.dump(2);
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Minimal CSV reader: header map plus rows of doubles.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("missing column " + name);
  }
};

Csv read_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Csv csv;
  std::string line;
  std::getline(in, line);
  std::stringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) csv.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

json two_level_config(double kappa_up, double kappa_down, double horizon) {
  return json{{"model", "quantum"},
              {"levels", 2},
              {"jump_probabilities", {{0.0, 1.0}, {1.0, 0.0}}},
              {"memory_functions",
               {{{"kind", "exponential"}, {"kappa", kappa_up}, {"gamma", 1.0}},
                {{"kind", "exponential"}, {"kappa", kappa_down}, {"gamma", 1.0}}}},
              {"grid", {{"step", 1e-3}, {"horizon", horizon}}},
              {"initial_state", {{"level", 0}}},
              {"seed", 7}};
}

double telegraph_up(double gamma, double kp, double km, double t) {
  const std::complex<double> d = std::sqrt(std::complex<double>(gamma * gamma - 4.0 * (kp + km)));
  const std::complex<double> bracket =
      std::cosh(0.5 * d * t) + gamma / d * std::sinh(0.5 * d * t);
  return km / (kp + km) + kp / (kp + km) * std::exp(-0.5 * gamma * t) * std::real(bracket);
}

}  // namespace

TEST_CASE("evolve writes the closed-form populations for the two-level kernel") {
  const auto config = write_config("evolve_quantum.json", two_level_config(0.1875, 0.12, 10.0));
  const auto out = scratch_dir() / "evolve_quantum.csv";
  const auto run = run_cli("evolve --config " + config.string() + " --out " + out.string());
  REQUIRE(run.exit_code == 0);

  const auto csv = read_csv(out);
  const auto t_col = csv.column("t");
  const auto rho_col = csv.column("rho_pp");
  const auto rho_im = csv.column("rho_pp_im");
  CHECK(csv.rows.size() == 10001);
  double worst = 0.0;
  for (std::size_t r = 0; r < csv.rows.size(); r += 97) {
    const double t = csv.rows[r][t_col];
    worst = std::max(worst, std::abs(csv.rows[r][rho_col] - telegraph_up(1.0, 0.1875, 0.12, t)));
    CHECK(std::abs(csv.rows[r][rho_im]) < 1e-12);
  }
  CHECK(worst <= 1e-6);

  // manifest carries a re-parseable config echo
  const json manifest = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest.at("command") == "evolve");
  CHECK(manifest.at("config").at("levels") == 2);
  CHECK(manifest.at("outputs").at(0) == "evolve_quantum.csv");
}

TEST_CASE("evolve matches the matrix exponential for a memoryless config") {
  const json config = {{"model", "markov"},
                       {"states", 2},
                       {"rates", {{0.0, 0.8}, {1.2, 0.0}}},
                       {"grid", {{"step", 1e-3}, {"horizon", 6.0}}},
                       {"seed", 1}};
  const auto path = write_config("evolve_markov.json", config);
  const auto out = scratch_dir() / "evolve_markov.csv";
  REQUIRE(run_cli("evolve --config " + path.string() + " --out " + out.string()).exit_code == 0);

  const auto csv = read_csv(out);
  Eigen::MatrixXd generator(2, 2);
  generator << -1.2, 0.8, 1.2, -0.8;
  double worst = 0.0;
  for (std::size_t r = 0; r < csv.rows.size(); r += 211) {
    const double t = csv.rows[r][csv.column("t")];
    const Eigen::MatrixXd expected = oracles::expm(Eigen::MatrixXd(generator * t));
    worst = std::max(worst, std::abs(csv.rows[r][csv.column("T_00")] - expected(0, 0)));
    worst = std::max(worst, std::abs(csv.rows[r][csv.column("T_10")] - expected(1, 0)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("malformed configs exit with code 2 and write nothing") {
  const auto out = scratch_dir() / "never_written.csv";

  auto bad_stochastic = two_level_config(0.2, 0.2, 5.0);
  bad_stochastic["jump_probabilities"] = {{0.5, 1.0}, {0.4, 0.0}};
  const auto c1 = write_config("bad_stochastic.json", bad_stochastic);
  auto r = run_cli("evolve --config " + c1.string() + " --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("jump_prob") != std::string::npos);

  auto bad_kind = two_level_config(0.2, 0.2, 5.0);
  bad_kind["memory_functions"][0]["kind"] = "mystery";
  const auto c2 = write_config("bad_kind.json", bad_kind);
  r = run_cli("evolve --config " + c2.string() + " --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("memory_functions[0]") != std::string::npos);

  const auto c3 = scratch_dir() / "not_json.json";
  std::ofstream(c3) << "not json";
  CHECK(run_cli("evolve --config " + c3.string() + " --out " + out.string()).exit_code == 2);

  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("check-cp flags the short-time violation at ratio ten") {
  const auto config =
      write_config("cp_violating.json", two_level_config(0.25, 0.025, 5.0));
  const auto out = scratch_dir() / "cp_violating.json.report";
  REQUIRE(run_cli("check-cp --config " + config.string() + " --out " + out.string()).exit_code ==
          0);
  const json report = json::parse(slurp(out));
  CHECK(report.at("conditions").at("lattice").at("verdict") == "violated");
  const double first = report.at("conditions").at("lattice").at("first_violation_time");
  CHECK(first < 0.5);
  CHECK_FALSE(report.at("semigroup").get<bool>());
  CHECK(report.at("summary").at("verdict") == "violated");
}

TEST_CASE("check-cp reports equal rates and memoryless kernels as CP") {
  const auto equal = write_config("cp_equal.json", two_level_config(0.2, 0.2, 20.0));
  const auto out1 = scratch_dir() / "cp_equal.report";
  REQUIRE(run_cli("check-cp --config " + equal.string() + " --out " + out1.string()).exit_code ==
          0);
  const json report = json::parse(slurp(out1));
  CHECK(report.at("conditions").at("lattice").at("verdict") == "holds");
  CHECK(report.at("conditions").at("factor_matrix").at("verdict") == "holds");
  CHECK(report.at("conditions").at("lattice").at("first_violation_time").is_null());
  CHECK(report.at("summary").at("verdict") == "cp");
  CHECK(report.at("summary").at("sufficient_conditions_hold").get<bool>());

  json markovian = two_level_config(0.2, 0.2, 10.0);
  markovian["memory_functions"] = {{{"kind", "delta"}, {"weight", 0.6}},
                                   {{"kind", "delta"}, {"weight", 0.3}}};
  const auto delta_config = write_config("cp_delta.json", markovian);
  const auto out2 = scratch_dir() / "cp_delta.report";
  REQUIRE(
      run_cli("check-cp --config " + delta_config.string() + " --out " + out2.string()).exit_code ==
      0);
  const json delta_report = json::parse(slurp(out2));
  CHECK(delta_report.at("semigroup").get<bool>());
  CHECK(delta_report.at("conditions").at("lattice").at("verdict") == "holds");
}

TEST_CASE("check-cp rejects classical configs") {
  const json config = {{"model", "classical"},
                       {"states", 2},
                       {"jump_probabilities", {{0.0, 1.0}, {1.0, 0.0}}},
                       {"waiting_times",
                        {{{"kind", "exponential"}, {"rate", 1.0}},
                         {{"kind", "exponential"}, {"rate", 2.0}}}},
                       {"grid", {{"step", 1e-3}, {"horizon", 5.0}}}};
  const auto path = write_config("classical_for_cp.json", config);
  const auto out = scratch_dir() / "cp_classical.report";
  CHECK(run_cli("check-cp --config " + path.string() + " --out " + out.string()).exit_code == 2);
}

TEST_CASE("scan emits the sign map and a boundary estimate near 2+sqrt(3)") {
  const auto out = scratch_dir() / "scan.csv";
  REQUIRE(run_cli("scan --tau 0.01 --resolution 200 --threads 4 --out " + out.string())
              .exit_code == 0);
  const auto csv = read_csv(out);
  CHECK(csv.rows.size() == 200 * 200);
  CHECK(csv.header == std::vector<std::string>{"r_minus", "r_plus", "tau", "delta", "sign"});

  // row-major layout with r_minus varying slowest
  CHECK(csv.rows[0][0] == 0.0);
  CHECK(csv.rows[199][1] == 1.0);
  const json summary = json::parse(slurp(out.string() + ".summary.json"));
  const double estimate = summary.at("boundary_ratio_estimate");
  CHECK(std::abs(estimate - 3.7320508075688772) < 0.05);
  CHECK(summary.at("negative_cells").get<int>() > 0);

  const auto tiny = scratch_dir() / "scan_tiny.csv";
  REQUIRE(run_cli("scan --tau 0.5 --resolution 2 --out " + tiny.string()).exit_code == 0);
  CHECK(read_csv(tiny).rows.size() == 4);

  CHECK(run_cli("scan --tau -1 --out " + out.string()).exit_code == 2);
}

TEST_CASE("scan can sweep the wedge between the critical ratios and report the outcome") {
  const auto out = scratch_dir() / "scan_wedge.csv";
  REQUIRE(run_cli("scan --tau 0.01 --resolution 80 --threads 4 --sufficiency-sweep --out " +
                  out.string())
              .exit_code == 0);
  const json summary = json::parse(slurp(out.string() + ".summary.json"));
  const json& sweep = summary.at("sufficiency_sweep");
  CHECK(sweep.at("tau_max") == 50.0);
  CHECK(sweep.at("points_checked").get<std::size_t>() > 0);
  // the sweep reports the observed status; the shape of the report is the
  // contract, the finding itself is informational
  CHECK(sweep.contains("counterexample"));
  CHECK(sweep.contains("min_gap"));
}

TEST_CASE("simulate is reproducible and thread-count independent") {
  const json config = {{"model", "classical"},
                       {"states", 2},
                       {"jump_probabilities", {{0.0, 1.0}, {1.0, 0.0}}},
                       {"waiting_times",
                        {{{"kind", "special_erlang"}, {"rate", 1.0}, {"stages", 3}},
                         {{"kind", "exponential"}, {"rate", 0.8}}}},
                       {"grid", {{"step", 1e-2}, {"horizon", 5.0}}},
                       {"seed", 11},
                       {"simulation",
                        {{"trajectories", 20000},
                         {"initial_state", 0},
                         {"sample_times", {1.0, 2.0, 3.0, 4.0, 5.0}}}}};
  const auto path = write_config("simulate.json", config);
  const auto out1 = scratch_dir() / "sim1.csv";
  const auto out2 = scratch_dir() / "sim2.csv";
  const auto out3 = scratch_dir() / "sim3.csv";
  REQUIRE(run_cli("simulate --config " + path.string() + " --out " + out1.string()).exit_code ==
          0);
  REQUIRE(run_cli("simulate --config " + path.string() + " --out " + out2.string()).exit_code ==
          0);
  REQUIRE(run_cli("simulate --config " + path.string() + " --threads 4 --out " + out3.string())
              .exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1) == slurp(out3));

  const auto out4 = scratch_dir() / "sim4.csv";
  REQUIRE(
      run_cli("simulate --config " + path.string() + " --seed 12 --out " + out4.string())
          .exit_code == 0);
  CHECK(slurp(out1) != slurp(out4));

  const auto csv = read_csv(out1);
  CHECK(csv.header == std::vector<std::string>{"t", "P_0", "se_0", "P_1", "se_1"});
  for (const auto& row : csv.rows) CHECK(row[1] + row[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evolve outputs are byte-identical across reruns and config echoes") {
  const auto config = write_config("repro.json", two_level_config(0.2, 0.1, 2.0));
  const auto out1 = scratch_dir() / "repro1.csv";
  const auto out2 = scratch_dir() / "repro2.csv";
  REQUIRE(run_cli("evolve --config " + config.string() + " --out " + out1.string()).exit_code ==
          0);
  REQUIRE(run_cli("evolve --config " + config.string() + " --out " + out2.string()).exit_code ==
          0);
  CHECK(slurp(out1) == slurp(out2));

  // round-trip: the config echoed in the manifest reproduces the run exactly
  const json manifest = json::parse(slurp(out1.string() + ".manifest.json"));
  const auto echoed = write_config("repro_echo.json", manifest.at("config"));
  const auto out3 = scratch_dir() / "repro3.csv";
  REQUIRE(run_cli("evolve --config " + echoed.string() + " --out " + out3.string()).exit_code ==
          0);
  CHECK(slurp(out1) == slurp(out3));
  const json manifest3 = json::parse(slurp(out3.string() + ".manifest.json"));
  CHECK(manifest.at("config_hash") == manifest3.at("config_hash"));
}

TEST_CASE("memory functions derived from waiting times reproduce the direct kernel") {
  // a two-stage chain with rates 0.75 and 0.25 carries the memory function
  // 0.1875 e^{-t}: both routes must emit identical bytes
  auto direct = two_level_config(0.1875, 0.12, 3.0);
  auto derived = direct;
  derived["memory_functions"][0] = {
      {"kind", "from_waiting_time"},
      {"waiting_time",
       {{"kind", "generalized_erlang"}, {"rates", {0.75, 0.25}}}}};
  const auto c1 = write_config("memory_direct.json", direct);
  const auto c2 = write_config("memory_derived.json", derived);
  const auto out1 = scratch_dir() / "memory_direct.csv";
  const auto out2 = scratch_dir() / "memory_derived.csv";
  REQUIRE(run_cli("evolve --config " + c1.string() + " --out " + out1.string()).exit_code == 0);
  REQUIRE(run_cli("evolve --config " + c2.string() + " --out " + out2.string()).exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));

  // kinds without a closed-form memory function are named in the error
  auto no_closed_form = derived;
  no_closed_form["memory_functions"][0]["waiting_time"] = {
      {"kind", "special_erlang"}, {"rate", 1.0}, {"stages", 4}};
  const auto c3 = write_config("memory_unavailable.json", no_closed_form);
  const auto r = run_cli("evolve --config " + c3.string() + " --out " +
                         (scratch_dir() / "never.csv").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("no closed form") != std::string::npos);
}

TEST_CASE("grid overrides reshape the output") {
  const auto config = write_config("override.json", two_level_config(0.2, 0.1, 2.0));
  const auto out = scratch_dir() / "override.csv";
  REQUIRE(run_cli("evolve --config " + config.string() +
                  " --grid-h 0.01 --horizon 1.0 --out " + out.string())
              .exit_code == 0);
  const auto csv = read_csv(out);
  CHECK(csv.rows.size() == 101);
  const json manifest = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest.at("grid").at("step") == 0.01);
}

TEST_CASE("validate reports the battery and honors failure injection") {
  const auto report_path = scratch_dir() / "validate_report.json";
  const auto run = run_cli("validate --threads 4 --out " + report_path.string());
  // The literal cubic-law check is a documented defect of its stated target;
  // everything else must pass, and the binary must say so honestly.
  CHECK(run.exit_code == 4);
  const json report = json::parse(slurp(report_path));
  CHECK_FALSE(report.at("all_pass").get<bool>());
  int failures = 0;
  for (const auto& check : report.at("checks")) {
    if (!check.at("pass").get<bool>()) {
      ++failures;
      CHECK(check.at("name") == "4-gap-taylor-cubic-law");
      CHECK(check.at("known_defect").get<bool>());
    }
  }
  CHECK(failures == 1);

  // reruns are byte-identical
  const auto report2 = scratch_dir() / "validate_report2.json";
  REQUIRE(run_cli("validate --threads 4 --out " + report2.string()).exit_code == 4);
  CHECK(slurp(report_path) == slurp(report2));

  // injected failures name the check and flip the exit code; unknown names
  // are configuration errors
  const auto injected = run_cli("validate --threads 4 --inject-failure 6-temperature-threshold");
  CHECK(injected.exit_code == 4);
  CHECK(injected.output.find("[FAIL] 6-temperature-threshold") != std::string::npos);
  CHECK(injected.output.find("failure injected") != std::string::npos);
  CHECK(run_cli("validate --inject-failure no-such-check").exit_code == 2);
}
