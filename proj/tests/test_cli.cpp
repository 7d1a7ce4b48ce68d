#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "beltrami/cli.hpp"
#include "beltrami/error.hpp"
#include "beltrami/io.hpp"

using namespace beltrami;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("beltrami_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "beltrami_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) {
    *out = o.str() + e.str();
  }
  return code;
}

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "beltrami_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("field dumps") {
    const auto dir = scratch("dump");
    fs::create_directories(dir);
    const ComplexField zero(GridSpec::square(8, 1.0));
    dump_field(zero, (dir / "z.cfld").string());
    const std::string header = "CFLD1\n";
    const auto bytes = slurp(dir / "z.cfld");
    const auto second_line = bytes.find('\n', header.size());
    REQUIRE(second_line != std::string::npos);
    CHECK(bytes.size() == second_line + 1 + 8 * 8 * 16);
    CHECK(bytes.rfind(header, 0) == 0);

    const auto g = GridSpec::square(17, 2.0);
    const auto f = ComplexField::from_function(g, [](cplx z) { return std::exp(z) / 3.0; });
    dump_field(f, (dir / "f.cfld").string());
    const auto back = read_field((dir / "f.cfld").string());
    CHECK(back.grid() == g);
    CHECK(back.data() == f.data());

    dump_field(ComplexField(GridSpec::square(512, 2.0)), (dir / "big.cfld").string());
    std::ifstream in(dir / "big.cfld", std::ios::binary);
    std::string magic;
    std::getline(in, magic);
    std::size_t nx = 0;
    std::size_t ny = 0;
    double x0 = 0;
    double y0 = 0;
    double dx = 0;
    double dy = 0;
    in >> nx >> ny >> x0 >> y0 >> dx >> dy;
    CHECK(nx == 512);
    CHECK(ny == 512);
    CHECK(x0 == -2.0);
    CHECK(y0 == -2.0);
    CHECK(dx == 4.0 / 511);
    CHECK(dy == 4.0 / 511);
    CHECK_THROWS_AS(read_field((dir / "missing.cfld").string()), IoError);
    std::ofstream((dir / "bad.cfld").string()) << "CFLD1\n8 8 0 0 1 1\nshort";
    CHECK_THROWS_AS(read_field((dir / "bad.cfld").string()), IoError);
  }

  TEST_CASE("csv numbers") {
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(2.0) == "2");
    CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
  }

  TEST_CASE("parsing valid configurations") {
    const auto a = parse({"solve", "--mu", "const:0.3", "--grid", "512"});
    CHECK(a.command == "solve");
    CHECK(a.mu == "const:0.3");
    CHECK(a.grid == 512);
    CHECK(a.seed == 0);
    const auto b = parse({"truncate", "--mu", "example4", "--p", "1.5", "--k", "4,16,64"});
    CHECK(b.k == std::vector<double>{4, 16, 64});
    CHECK(b.p == 1.5);
    const auto c = parse({"holder", "--seed", "18446744073709551615"});
    CHECK(c.seed == 18446744073709551615ull);
  }

  TEST_CASE("parsing reports every invalid field") {
    try {
      parse({"solve", "--mu", "example3", "--alpha", "2.5", "--grid", "4", "--fix-tol", "-1"});
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      // alpha, missing k, grid, fix-tol
      CHECK(e.problems().size() == 4);
    }
    CHECK_THROWS_AS(parse({"solve", "--mu", "const:1.2"}), ValidationError);
    CHECK_THROWS_AS(parse({"solve", "--mu", "example9"}), ValidationError);
    CHECK_THROWS_AS(parse({"solve", "--alpha", "abc"}), ValidationError);
    CHECK_THROWS_AS(parse({"frobnicate"}), ValidationError);
    CHECK_THROWS_AS(parse({"truncate", "--mu", "example4", "--k", "16,4"}), ValidationError);
    std::string out;
    CHECK(run({"solve", "--mu", "example3", "--alpha", "2.5", "--k", "4"}, &out) == 2);
    CHECK(out.find("alpha") != std::string::npos);
  }

  TEST_CASE("config files and overrides") {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << R"({"mu": "const:0.2", "grid": 64, "seed": 9, "k": [3]})";
    const auto cfg = parse({"solve", "--config", (dir / "cfg.json").string(), "--grid", "32"});
    CHECK(cfg.mu == "const:0.2");
    CHECK(cfg.grid == 32);
    CHECK(cfg.seed == 9);
    CHECK(cfg.k == std::vector<double>{3});
    std::ofstream(dir / "bad.json") << R"({"mu": "const:0.2", "colour": 1})";
    CHECK_THROWS_AS(parse({"solve", "--config", (dir / "bad.json").string()}), ValidationError);
    const auto text = parse_config_text(R"({"command": "radial", "profile": "example2", "n": 3})");
    CHECK(text.n == 3);
    const auto echo = parse_config_text(config_json(text));
    CHECK(config_json(echo) == config_json(text));
  }

  TEST_CASE("zero solve writes a passing summary") {
    const auto dir = scratch("zero");
    CHECK(run({"solve", "--grid", "64", "--out", dir.string()}) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["status"] == "pass");
    CHECK(summary["diagnostics"]["residual_linf"].get<double>() < 1e-13);
    CHECK(summary["provenance"]["config"]["grid"] == 64);
    CHECK(summary["provenance"]["instantiates"].size() > 0);
    CHECK(fs::exists(dir / "solve_profile.csv"));
  }

  TEST_CASE("exit codes for failed checks and runtime errors") {
    const auto fail = scratch("fail");
    CHECK(run({"solve", "--mu", "const:0.3", "--grid", "64", "--residual-tol", "1e-12", "--out", fail.string()}) == 1);
    CHECK(nlohmann::json::parse(slurp(fail / "summary.json"))["status"] == "check-failed");
    const auto err = scratch("err");
    CHECK(run({"solve", "--mu", "const:0.9", "--grid", "64", "--max-iter", "3", "--out", err.string()}) == 2);
    const auto summary = nlohmann::json::parse(slurp(err / "summary.json"));
    CHECK(summary["status"] == "error");
    CHECK(summary["error"].get<std::string>().size() > 0);
  }

  TEST_CASE("reruns are byte identical") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"solve", "--mu", "example3", "--k", "6", "--grid", "64", "--dump"},
             {"holder", "--map", "example4", "--j-max", "8", "--pairs-per-scale", "100", "--seed", "5"},
             {"radial", "--profile", "example1", "--m", "6", "--pairs", "5", "--seed", "3"},
             {"dilatation", "--mu", "example3", "--k", "8"}}) {
      const auto a = scratch("rerun_a");
      const auto b = scratch("rerun_b");
      auto with_out = [&](const fs::path& d) {
        auto v = args;
        v.push_back("--out");
        v.push_back(d.string());
        return v;
      };
      const int ca = run(with_out(a));
      const int cb = run(with_out(b));
      CHECK(ca == cb);
      CHECK(ca != 2);
      for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().filename() == "summary.json") {
          continue;
        }
        CAPTURE(entry.path().string());
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
      }
    }
  }
}
