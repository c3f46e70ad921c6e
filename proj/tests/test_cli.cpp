#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kdv/cli.hpp"
#include "kdv/config.hpp"
#include "kdv/io.hpp"
#include "kdv/numerics.hpp"

using namespace kdv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("kdv_test_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& body) const {
    const fs::path p = path / name;
    std::ofstream(p) << body;
    return p.string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

const char* kSmallConfig = R"({"grid": {"Lbox": 25, "N": 1024, "T": 1, "M": 256},
  "probe": {"count": 4, "N": 64, "M": 32, "length": 32, "period": 4},
  "output": {"x_stride": 16, "t_stride": 16}})";

}  // namespace

TEST_CASE("signal CSV round trip is exact") {
  TimeSignal s(std::vector<cplx>{0.0, 0.1 / 3.0, cplx(2.0 / 7.0, -1e-300), -5e-17, 0.0}, 0.0125, 0.0);
  std::stringstream buf;
  emit_signal(buf, s);
  const TimeSignal back = parse_signal(buf);
  CHECK(back.samples == s.samples);
  CHECK(back.dt == s.dt);
  CHECK(back.t0 == s.t0);
  CHECK(back.causal);
}

TEST_CASE("profile CSV round trip is exact") {
  SpatialProfile p;
  p.x0 = -2.0 + 1.0 / 3.0;
  p.dx = 0.1;
  p.samples = {1.0 / 3.0, std::exp(1.0), -0.0, 1e-200};
  std::stringstream buf;
  emit_profile(buf, p);
  const SpatialProfile back = parse_profile(buf);
  CHECK(back.samples == p.samples);
  CHECK(back.x0 == p.x0);
  CHECK(back.dx == doctest::Approx(p.dx).epsilon(1e-12));
}

TEST_CASE("malformed signals name the offending row") {
  SUBCASE("non-uniform spacing") {
    std::istringstream in("t,value\n0,0\n0.1,1\n0.2,2\n0.31,3\n");
    try {
      parse_signal(in);
      FAIL("expected IngestError");
    } catch (const IngestError& e) {
      CHECK(e.row() == 4);
    }
  }
  SUBCASE("NaN") {
    std::istringstream in("t,value\n0,0\n0.1,nan\n");
    try {
      parse_signal(in);
      FAIL("expected IngestError");
    } catch (const IngestError& e) {
      CHECK(e.row() == 2);
    }
  }
  SUBCASE("bad header") {
    std::istringstream in("time,value\n0,0\n");
    CHECK_THROWS_AS(parse_signal(in), IngestError);
  }
  SUBCASE("profile with the wrong header") {
    std::istringstream in("t,value\n0,0\n0.1,1\n");
    CHECK_THROWS_AS(parse_profile(in), IngestError);
  }
}

TEST_CASE("causality") {
  std::istringstream before("t,value\n-0.2,0\n-0.1,0\n0,0\n0.1,1\n");
  CHECK_FALSE(parse_signal(before).causal);
  std::istringstream jump("t,value\n0,1\n0.1,1\n0.2,1\n");
  const TimeSignal s = parse_signal(jump);
  CHECK(s.causal);
  CHECK_FALSE(s.flags.empty());
}

TEST_CASE("field and column output") {
  SpaceTimeField u(Axis{0.0, 1.0, 4}, Axis{0.0, 0.5, 3});
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = static_cast<double>(i);
  std::ostringstream out;
  emit_field(out, u, 0.5, 10.0, 0.5, 2, 1);
  // Strides count from the first grid node, so only x = 2 is inside (0.5, 10).
  CHECK(out.str() == "x,t,u\n2,0,2\n2,0.5,6\n");
  std::ostringstream cols;
  emit_columns(cols, {"a", "b"}, {{1.0, 2.0}, {3.0, 4.0}});
  CHECK(cols.str() == "a,b\n1,3\n2,4\n");
}

TEST_CASE("configuration") {
  CHECK(parse_config(json::parse(kSmallConfig)).solver.grid.n == 1024);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"gird": {}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"grid": {"Nx": 64}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"grid": {"N": 1000}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"s": 0.5})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"b": 0.5})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"max_iter": "many"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"problem": "torus"})")), ConfigError);
  const RunConfig c = parse_config(json::parse(R"({"s": 0.3, "lambdas": {"lambda3": -0.2}, "scale": 0.5})"));
  CHECK(parse_config(to_json(c)).solver.lambda3 == -0.2);
  CHECK(*parse_config(to_json(c)).solver.scale == 0.5);
}

TEST_CASE("flags escalated by --strict") {
  CHECK(escalated_flag("aliasing: spectral tail above tolerance"));
  CHECK(escalated_flag("jump not resolved"));
  CHECK_FALSE(escalated_flag("outside proven range"));
}

TEST_CASE("command line errors exit with the config code") {
  TempDir tmp;
  std::string err;
  CHECK(run({"--bogus", "verify"}, nullptr, &err) == exit_config);
  CHECK(run({}, nullptr, &err) == exit_config);
  const std::string bad = tmp.file("bad.json", R"({"grid": {"N": 64}, "colour": 1})");
  CHECK(run({"--config", bad, "--out", tmp.path.string(), "probe-bilinear"}, nullptr, &err) == exit_config);
  CHECK(json::parse(err)["error"] == "config");
  CHECK(run({"--config", (tmp.path / "missing.json").string(), "probe-bilinear"}, nullptr, &err) == exit_config);
}

TEST_CASE("probe-bilinear is reproducible") {
  TempDir tmp;
  const std::string cfg = tmp.file("c.json", kSmallConfig);
  for (const char* id : {"a", "b"})
    REQUIRE(run({"--config", cfg, "--seed", "7", "--out", tmp.path.string(), "--run-id", id, "probe-bilinear"}) ==
            exit_ok);
  const std::string a = slurp(tmp.path / "a" / "report.json"), b = slurp(tmp.path / "b" / "report.json");
  CHECK_FALSE(a.empty());
  CHECK(a == b);
  CHECK(json::parse(a)["seed"] == 7);
}

TEST_CASE("solve-right writes its artifacts") {
  TempDir tmp;
  const std::string cfg = tmp.file("c.json", kSmallConfig);
  std::string out;
  REQUIRE(run({"--config", cfg, "--out", tmp.path.string(), "solve-right"}, &out) == exit_ok);
  const fs::path dir = tmp.path / "solve-right";
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep["status"] == "converged");
  CHECK(rep["iterations"].get<int>() >= 1);
  CHECK(rep.contains("energy"));
  CHECK(rep.contains("norms"));
  CHECK(slurp(dir / "field.csv").rfind("x,t,u\n", 0) == 0);
  CHECK(slurp(dir / "traces.csv").find("u(0)_prescribed") != std::string::npos);

  SUBCASE("--strict turns the aliasing flag into exit 4") {
    bool aliased = false;
    for (const auto& f : rep["flags"]) aliased = aliased || escalated_flag(f.get<std::string>());
    REQUIRE(aliased);
    CHECK(run({"--config", cfg, "--strict", "--out", tmp.path.string(), "solve-right"}) == exit_flagged);
  }
}

TEST_CASE("solve with input files diverges for large data") {
  TempDir tmp;
  std::ostringstream phi, f;
  phi << "x,value\n";
  for (int j = 0; j <= 400; ++j) {
    const double x = 0.1 * j, z = (x - 12.0) / 2.0;
    phi << x << ',' << 10.0 * std::exp(-z * z) << '\n';
  }
  f << "t,value\n";
  for (int n = 0; n <= 200; ++n) {
    const double t = 0.005 * n;
    f << t << ',' << (t > 0.0 && t < 1.0 ? 10.0 * std::exp(4.0 - 1.0 / (t * (1.0 - t))) : 0.0) << '\n';
  }
  const std::string p = tmp.file("phi.csv", phi.str()), g = tmp.file("f.csv", f.str());
  const std::string cfg = tmp.file("c.json", R"({"grid": {"Lbox": 25, "N": 1024, "T": 1, "M": 256},
    "inputs": {"phi": ")" + p + R"(", "f": ")" + g + R"("}})");
  CHECK(run({"--config", cfg, "--out", tmp.path.string(), "solve-right"}) == exit_divergence);
  const json rep = json::parse(slurp(tmp.path / "solve-right" / "report.json"));
  CHECK(rep["status"] == "diverged");

  const std::string wrong = tmp.file("w.json", R"({"inputs": {"g1": ")" + g + R"("}})");
  CHECK(run({"--config", wrong, "--out", tmp.path.string(), "solve-right"}) == exit_config);
}

TEST_CASE("tool binary maps errors to exit codes") {
  const std::string cmd = std::string(KDV_TOOL_PATH) + " --no-such-flag verify >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == exit_config);
}
