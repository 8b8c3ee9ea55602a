#include "horizon/config.hpp"
#include "horizon/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace horizon;
namespace fs = std::filesystem;

namespace {

int error_line(const std::string& text, std::string* key = nullptr) {
  try {
    parse_config(text, Command::hawking);
  } catch (const ConfigError& e) {
    if (key) *key = e.key();
    return e.line();
  }
  return -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("horizon_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empty hawking section gives the reference defaults") {
  const ExperimentConfig c = parse_config("[hawking]\n", Command::hawking);
  CHECK(c.hawking.n_mid == 400);
  CHECK(c.hawking.n_left == 800);
  CHECK(c.hawking.n_right == 800);
  CHECK(c.hawking.gamma_t == 0.1);
  CHECK(c.hawking.x0 == 1600.0);
  CHECK(c.command == Command::hawking);
}

TEST_CASE("errors name line and key") {
  std::string key;
  CHECK(error_line("# comment\n[hawking]\ngamma_t = -0.1\n", &key) == 3);
  CHECK(key == "gamma_t");
  CHECK(error_line("[hawking]\nbogus = 1\n", &key) == 2);
  CHECK(key == "bogus");
  CHECK(error_line("[hawking]\nn_left = 3.5\n", &key) == 2);
  CHECK(error_line("[hawking]\nn_left = 10\nn_left = 20\n", &key) == 3);
  CHECK(error_line("[nowhere]\n") == 1);
  CHECK(error_line("gamma_t = 0.1\n") == 1);
  CHECK(error_line("[hawking]\ngamma_t\n") == 2);
  CHECK(error_line("[run]\ncommand = lens\n") == 2);
  CHECK_THROWS_AS(parse_config("[hawking]\n"), ConfigError);
  CHECK(parse_config("[run]\ncommand = lens\n").command == Command::lens);
}

TEST_CASE("serialize then parse is the identity on generated configs") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ExperimentConfig c;
    c.command = static_cast<Command>(trial % 5);
    c.out = "out_" + std::to_string(trial);
    c.threads = 1 + trial % 4;
    c.stride = trial % 3;
    c.hawking.snapshot_stride = c.stride;
    c.lens.snapshot_stride = c.stride;
    c.spectrum.vx = 3 * u(rng) - 1.5;
    c.spectrum.beta = -8 - u(rng);
    c.spectrum.dim = trial % 2 ? Dimensionality::chain1d : Dimensionality::grid2d;
    c.hawking.gamma_t = 0.05 + 0.2 * u(rng);
    c.hawking.sigma = 40 + 100 * u(rng);
    c.hawking.omegas = {0.01 + 0.01 * u(rng), 0.05 + 0.01 * u(rng), 0.1 * u(rng) + 0.07};
    c.hawking.which = static_cast<Which>(trial % 3);
    c.hawking.plateau.rel_change = 1e-4 + 1e-3 * u(rng);
    c.lens.gamma = 30 * u(rng);
    c.lens.k0 = 0.1 + 0.4 * u(rng);
    c.lens.side = trial % 2 ? 1 : -1;
    c.lens.snapshot_times = {0.0, 100 * u(rng)};
    c.sweep.gammas = {5 * u(rng), 10 + 5 * u(rng)};
    c.sweep.mirror = trial % 2;
    c.checks.grid = 8 + trial % 9;
    const std::string text = serialize(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("numbers print with enough digits to round-trip") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(num(x)) == x);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(num(true) == "1");
  CHECK(num(42) == "42");
}

TEST_CASE("csv writer uses LF endings and checks the column count") {
  const fs::path dir = scratch("csv");
  {
    CsvWriter w(dir / "a.csv", {"x", "y"});
    w.row({"1", "2"});
    CHECK_THROWS(w.row({"1"}));
    w.close();
  }
  CHECK(slurp(dir / "a.csv") == "x,y\n1,2\n");
  fs::remove_all(dir);
}

TEST_CASE("snapshot files round-trip bit for bit") {
  const fs::path dir = scratch("snap");
  std::vector<double> v;
  for (int i = 0; i < 12; ++i) v.push_back(std::sin(i) * 1e-7 + i);
  write_snapshot(dir / "s.bin", 4, 3, 12.5, v);
  const Snapshot s = read_snapshot(dir / "s.bin");
  CHECK(s.nx == 4);
  CHECK(s.ny == 3);
  CHECK(s.t == 12.5);
  CHECK(s.values == v);
  CHECK(fs::file_size(dir / "s.bin") == 8 + 4 + 4 + 8 + 12 * 8);
  CHECK_THROWS(write_snapshot(dir / "bad.bin", 4, 4, 0.0, v));
  std::ofstream(dir / "junk.bin") << "not a snapshot";
  CHECK_THROWS(read_snapshot(dir / "junk.bin"));
  fs::remove_all(dir);
}
