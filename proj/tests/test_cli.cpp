#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ksphere::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ksphere_cli_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("scalar commands print plain values") {
  auto r = run({"count", "--k", "2", "--d", "4", "--lambda", "4"});
  CHECK(r.code == 0);
  CHECK(r.out == "24\n");
  r = run({"weyl", "--N", "100", "--t", "0", "--xi", "0", "--k", "3"});
  CHECK(r.code == 0);
  CHECK(r.out == "100+0i\n");
  CHECK(run({"vinogradov", "--s", "2", "--k", "2", "--N", "3"}).out == "15\n");
  CHECK(run({"count", "--k", "3", "--d", "4", "--lambda", "1", "--method", "mitm"}).out == "8\n");
}

TEST_CASE("json output uses 17 significant digits") {
  const auto r = run({"sigma-ft", "--k", "2", "--d", "3", "--xi", "0.3,0,0", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const double v = doc["value"].get<double>();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  CHECK(r.out.find(buf) != std::string::npos);
}

TEST_CASE("density fit emits a slope") {
  const auto r = run({"density-fit", "--kind", "full", "--k", "2", "--d", "5", "--Lmax", "100000"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["slope"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(doc["rows"].size() == 16);
}

TEST_CASE("help and errors") {
  auto r = run({});
  CHECK(r.code == 0);
  for (const auto& name : ksphere::cli::command_names()) CHECK(r.out.find("  " + name + " ") != std::string::npos);
  CHECK(ksphere::cli::command_names().size() == 25);
  r = run({"--help", "count"});
  CHECK(r.code == 0);
  CHECK(r.out.find("N(r)") != std::string::npos);
  r = run({"cuont"});
  CHECK(r.code == 2);
  CHECK(r.err.find("did you mean 'count'") != std::string::npos);
  CHECK(ksphere::cli::suggest("steckin") == "steckin-fit");
  CHECK(ksphere::cli::suggest("zzzzzzzzzzzzzz").empty());
  CHECK(run({"count", "--k", "1", "--lambda", "4"}).code == 2);
  CHECK(run({"count", "--nonsense", "4"}).code == 2);
  CHECK(run({"count", "--method", "magic"}).code == 2);
  CHECK(run({"count", "--k", "2", "--d", "60", "--lambda", "100000", "--method", "brute"}).code == 3);
  CHECK(run({"count", "--out", "/nonexistent_dir_for_ksphere/x"}).code == 4);
  CHECK(run({"count", "--config", "/nonexistent_dir_for_ksphere/c.cfg"}).code == 4);
}

TEST_CASE("config files with flag overrides") {
  const auto dir = scratch_dir("config");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# sweep settings\ncommand = count\nk = 3\nd = 3\nlambda = 2\n";
  auto r = run({"--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "12\n");
  r = run({"count", "--config", cfg.string(), "--lambda", "1"});
  CHECK(r.out == "6\n");
  std::ofstream(dir / "bad.cfg") << "k 3\n";
  CHECK(run({"count", "--config", (dir / "bad.cfg").string()}).code == 2);
}

TEST_CASE("out prefix writes payloads and a manifest") {
  const auto dir = scratch_dir("out");
  const auto prefix = (dir / "g").string();
  auto r = run({"gauss", "--a", "1", "--q", "5", "--k", "2", "--m", "1,2", "--out", prefix});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(prefix + ".json"));
  CHECK(std::filesystem::exists(prefix + ".csv"));
  const auto manifest = nlohmann::json::parse(slurp(prefix + ".manifest.json"));
  CHECK(manifest["command"] == "gauss");
  CHECK(manifest["config"]["m"] == "1,2");
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(slurp(prefix + ".csv").rfind("re,im,abs\n", 0) == 0);
}

TEST_CASE("grid functions round trip through binary files") {
  const auto dir = scratch_dir("grid");
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  REQUIRE(run({"average", "--d", "2", "--lambda", "1", "--f", "random", "--side", "8", "--out", a}).code == 0);
  CHECK(std::filesystem::file_size(a + ".f64") == 64 * sizeof(double));
  REQUIRE(run({"average", "--d", "2", "--lambda", "0", "--input", a + ".f64", "--out", b}).code == 0);
  CHECK(slurp(a + ".f64") == slurp(b + ".f64"));
  CHECK(run({"average", "--d", "3", "--input", a + ".f64"}).code == 2);
}

TEST_CASE("reruns are byte identical") {
  const auto dir = scratch_dir("determinism");
  const std::vector<std::vector<std::string>> cmds = {
      {"sup-probe", "--N", "300", "--qmax", "8"},
      {"exact-mult", "--d", "3", "--lambda", "9", "--M", "8"},
      {"maximal", "--d", "2", "--f", "indicator", "--side", "12", "--seed", "4"},
      {"rwt-probe", "--max-exponent", "4", "--lambda-max", "8"},
  };
  int i = 0;
  for (auto cmd : cmds) {
    const auto p1 = (dir / ("one" + std::to_string(i))).string(), p2 = (dir / ("two" + std::to_string(i))).string();
    ++i;
    auto c1 = cmd, c2 = cmd;
    c1.insert(c1.end(), {"--out", p1});
    c2.insert(c2.end(), {"--out", p2});
    const auto r1 = run(c1), r2 = run(c2);
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(slurp(p1 + ".json") == slurp(p2 + ".json"));
    CHECK(slurp(p1 + ".csv") == slurp(p2 + ".csv"));
  }
}
