#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lrkf/errors.hpp"
#include "lrkf/harness.hpp"
#include "lrkf/rng.hpp"

using namespace lrkf;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Minimal well-formedness check: every element opened is closed in order.
bool balanced_xml(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const auto end = text.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \t\n") -
                                                                   (tag[0] == '/' ? 1 : 0));
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("Rng: fixed sequence and moments") {
  Rng a(123);
  Rng b(123);
  for (int k = 0; k < 10; ++k) CHECK(a.complex_normal() == b.complex_normal());

  Rng rng(7);
  double re = 0.0, im = 0.0, power = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const cdouble z = rng.complex_normal();
    re += z.real();
    im += z.imag();
    power += std::norm(z);
  }
  CHECK(std::abs(re / n) < 0.01);
  CHECK(std::abs(im / n) < 0.01);
  CHECK(std::abs(power / n - 1.0) < 0.05);

  double u_min = 1.0, u_max = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  CHECK(u_min >= 0.0);
  CHECK(u_max < 1.0);
}

TEST_CASE("config defaults and parsing") {
  const ExperimentConfig d = default_config();
  CHECK(d.M == 4);
  CHECK(d.L == 4);
  CHECK(d.N == 3);
  CHECK(d.sigma_v_sq == 0.5);
  CHECK(d.spectral_radius_target == 0.9);
  REQUIRE(d.p_grid.size() == 9);
  CHECK(d.p_grid.front() == 0.5);
  CHECK(d.p_grid.back() == doctest::Approx(8.0));
  CHECK(d.policies == all_sweep_policies());

  const ExperimentConfig cfg = parse(
      "# comment\n"
      "seed = 42\n"
      "M = 3   # trailing comment\n"
      "p_grid = 1, 2, 4\n"
      "policies = vec-minsum, lower-bound\n"
      "window = 50\n");
  CHECK(cfg.seed == 42);
  CHECK(cfg.M == 3);
  CHECK(cfg.p_grid == std::vector<double>{1.0, 2.0, 4.0});
  CHECK(cfg.policies == std::vector<std::string>{"vec-minsum", "lower-bound"});
  CHECK(cfg.window == 50);
}

TEST_CASE("config errors name the line") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("seed = 1\nbogus = 3\n").find("line 2") != std::string::npos);
  CHECK(message("seed 1\n").find("line 1") != std::string::npos);
  CHECK_FALSE(message("p_grid = 2, 1\n").empty());
  CHECK_FALSE(message("p_grid = 1, -2\n").empty());
  CHECK_FALSE(message("policies = \n").empty());
  CHECK_FALSE(message("policies = vec-minsum, nope\n").empty());
  CHECK_FALSE(message("spectral_radius_target = 1.0\n").empty());
  CHECK_FALSE(message("M = 0\n").empty());
  CHECK_FALSE(message("rng = pcg32\n").empty());
  CHECK_FALSE(message("sigma_v_sq = abc\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("the shipped example config matches the defaults") {
  const ExperimentConfig cfg = load_config(LRKF_SOURCE_DIR "/configs/default.cfg");
  const ExperimentConfig d = default_config();
  CHECK(cfg.seed == d.seed);
  CHECK(cfg.p_grid == d.p_grid);
  CHECK(cfg.policies == d.policies);
  CHECK(cfg.sigma_v_sq == d.sigma_v_sq);
}

TEST_CASE("generate_system") {
  const ExperimentConfig cfg = default_config();
  const SystemModel a = generate_system(cfg, ObservationMode::vector, 9);
  const SystemModel b = generate_system(cfg, ObservationMode::vector, 9);
  CHECK(a.F == b.F);
  CHECK(a.G == b.G);
  CHECK(a.G.rows() == 16);
  CHECK(a.G.cols() == 3);
  CHECK(a.Q == CMat::Identity(4, 4));
  const double radius = Eigen::ComplexEigenSolver<CMat>(a.F).eigenvalues().cwiseAbs().maxCoeff();
  CHECK(std::abs(radius - 0.9) <= 1e-9);

  const SystemModel s = generate_system(cfg, ObservationMode::scalar, 9);
  CHECK(s.F == a.F);
  CHECK(s.G.rows() == 4);
  CHECK(s.L == 1);
  CHECK_FALSE(generate_system(cfg, ObservationMode::vector, 10).F == a.F);
}

TEST_CASE("CSV round trip and emit errors") {
  std::vector<SweepRow> rows(2);
  rows[0] = {0.5, "vec-minsum", 5.321830303516252, 1.7, 4.4, 1.1, true, 1, 0.0};
  rows[1] = {0.1 + 0.2, "lower-bound", 1.0 / 3.0, 2.0 / 3.0, 1e-300, 123456789.125, false, 7, 0.0};
  const std::string text = format_csv(rows);
  CHECK(text.rfind("P,policy,sum_mse,max_mse,lower_sum,lower_max,converged,seed\n", 0) == 0);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].P == rows[i].P);
    CHECK(back[i].policy == rows[i].policy);
    CHECK(back[i].sum_mse == rows[i].sum_mse);
    CHECK(back[i].max_mse == rows[i].max_mse);
    CHECK(back[i].lower_sum == rows[i].lower_sum);
    CHECK(back[i].lower_max == rows[i].lower_max);
    CHECK(back[i].converged == rows[i].converged);
    CHECK(back[i].seed == rows[i].seed);
  }
  CHECK(text.find("0.30000000000000004") != std::string::npos);

  CHECK_THROWS_AS(emit_csv({}, temp_path("lrkf_empty.csv")), ConfigError);
  try {
    emit_csv(rows, "/nonexistent-dir/out.csv");
    FAIL("expected an I/O error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
  }
  const std::string path = temp_path("lrkf_rows.csv");
  emit_csv(rows, path);
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == text);
  std::remove(path.c_str());
}

TEST_CASE("SVG has two charts with one polyline per policy") {
  std::vector<SweepRow> rows;
  for (double P : {0.5, 1.0, 2.0}) {
    for (const char* name : {"vec-minsum", "scalar-minsum", "lower-bound"}) {
      for (std::uint64_t seed : {1, 2, 3}) {
        rows.push_back({P, name, 4.0 / (1.0 + P) + 0.1 * seed, 1.0 / (1.0 + P), 1.0, 0.2, true,
                        seed, 0.0});
      }
    }
  }
  const std::string svg = format_svg(rows);
  CHECK(balanced_xml(svg));
  CHECK(count(svg, "<g class=\"chart\"") == 2);
  CHECK(count(svg, "<polyline") == 6);
  CHECK(count(svg, "data-policy=\"scalar-minsum\"") == 2);
  CHECK(svg.find("id=\"sum-mse\"") != std::string::npos);
  CHECK(svg.find("id=\"max-mse\"") != std::string::npos);
  CHECK_THROWS_AS(format_svg({}), ConfigError);
}

TEST_CASE("empty policy list fails before any file is written") {
  ExperimentConfig cfg = default_config();
  cfg.policies.clear();
  cfg.out_csv = temp_path("lrkf_should_not_exist.csv");
  std::remove(cfg.out_csv.c_str());
  CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
  CHECK_FALSE(std::filesystem::exists(cfg.out_csv));
}

TEST_CASE("small sweep: lower-bound invariant and thread independence") {
  ExperimentConfig cfg = default_config();
  cfg.p_grid = {1.0, 4.0};
  cfg.policies = {"vec-minsum", "vec-minmax", "scalar-minsum", "lower-bound"};
  cfg.num_seeds = 2;
  const auto serial = run_sweep(cfg);
  REQUIRE(serial.size() == 2 * 2 * 4);
  for (const auto& r : serial) {
    CHECK(r.sum_mse >= r.lower_sum - 1e-6);
    CHECK(r.max_mse >= r.lower_max - 1e-6);
  }
  cfg.threads = 3;
  CHECK(format_csv(run_sweep(cfg)) == format_csv(serial));
}

TEST_CASE("P = 0 sweep reports the Lyapunov MSE for every policy") {
  ExperimentConfig cfg = default_config();
  cfg.p_grid = {0.0};
  cfg.tol = 1e-12;
  cfg.max_iters = 5000;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == cfg.policies.size());
  for (const auto& r : rows) CHECK(r.sum_mse == doctest::Approx(rows.back().sum_mse).epsilon(1e-9));
}

TEST_CASE("oracle report passes on the default config") {
  for (const auto& check : run_oracles(default_config())) {
    INFO(check.name);
    CHECK(check.pass);
  }
}
