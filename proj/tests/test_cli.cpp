#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace freeprod::cli;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("freeprod_cli_" + std::to_string(counter()++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
    return (dir / name).string();
  }
  std::string read(const fs::path& p) const {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
};

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "freeprod");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kFree3 = R"({"kind":"integer","name":"a"},{"kind":"integer","name":"b"},{"kind":"integer","name":"c"})";
const char* kFree2 = R"({"kind":"integer","name":"a"},{"kind":"integer","name":"b"})";

// Body of a CSV after its provenance line.
std::string strip_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

}  // namespace

TEST_CASE("pattern verdicts through the command line") {
  Sandbox box;
  const auto cfg = box.write("t.json", std::string(R"({"group": [)") + kFree3 + R"(],
    "params": {"sets": [{"words": ["a b", "a c^2", "c a^-1"], "D": 1},
                        {"words": ["a b", "b c"], "D": 1}]}})");
  const auto r = invoke({"pattern", cfg, "--out", (box.dir / "o").string()});
  REQUIRE(r.code == kOk);
  const auto j = nlohmann::json::parse(box.read(box.dir / "o" / "pattern.json"));
  CHECK(j["sets"][0]["avoiding"] == false);
  CHECK(j["sets"][0]["pattern"] == "a");
  CHECK(j["sets"][1]["avoiding"] == true);
  CHECK(j["provenance"]["command"] == "pattern");
  CHECK(r.out.find("not avoiding, pattern a") != std::string::npos);
}

TEST_CASE("rate curve of the simple random walk vanishes at one half") {
  Sandbox box;
  const auto cfg = box.write("r.json", std::string(R"({"group": [)") + kFree2 + R"(],
    "measure": {"kind": "srw"}, "params": {"n": 2000, "x": {"from": 0.1, "to": 0.9, "step": 0.1}}})");
  const auto out = box.dir / "o";
  REQUIRE(invoke({"rate", cfg, "--out", out.string(), "--emit-plot-data"}).code == kOk);
  std::istringstream csv(box.read(out / "rate_n2000.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# command=rate config_hash=", 0) == 0);
  std::getline(csv, line);
  CHECK(line == "x,I,provenance,error_bar");
  bool seen = false;
  while (std::getline(csv, line)) {
    if (line.rfind("0.5,", 0) != 0) continue;
    seen = true;
    const double value = std::stod(line.substr(4));
    CHECK(value >= 0.0);
    CHECK(value < 0.01);
  }
  CHECK(seen);
  CHECK(fs::exists(out / "rate_closed_form.csv"));
  CHECK(fs::exists(out / "rate_n2000.dat"));
  const auto manifest = nlohmann::json::parse(box.read(out / "manifest.json"));
  CHECK(manifest["results"]["max_deviation_from_closed_form"].get<double>() < 0.02);
}

TEST_CASE("Monte Carlo output does not depend on the worker count") {
  Sandbox box;
  const auto cfg = box.write("m.json", R"({"group": [{"kind":"cyclic","name":"x","order":2},
                                                     {"kind":"cyclic","name":"y","order":3}],
    "measure": [{"word":"x","prob":0.5},{"word":"y","prob":0.25},{"word":"y^2","prob":0.25}],
    "params": {"n": 25, "mode": "monte-carlo", "samples": 20000}})");
  const auto one = box.dir / "w1", four = box.dir / "w4", again = box.dir / "again";
  REQUIRE(invoke({"dist", cfg, "--seed", "11", "--workers", "1", "--out", one.string()}).code == kOk);
  REQUIRE(invoke({"dist", cfg, "--seed", "11", "--workers", "4", "--out", four.string()}).code == kOk);
  REQUIRE(invoke({"dist", cfg, "--seed", "11", "--workers", "1", "--out", again.string()}).code == kOk);
  const auto a = box.read(one / "dist.csv");
  CHECK(a == box.read(four / "dist.csv"));
  CHECK(a == box.read(again / "dist.csv"));
  CHECK(strip_first_line(a).rfind("length,count\n", 0) == 0);
  REQUIRE(invoke({"dist", cfg, "--seed", "12", "--out", (box.dir / "other").string()}).code == kOk);
  CHECK(a != box.read(box.dir / "other" / "dist.csv"));
}

TEST_CASE("exact distributions and cone types") {
  Sandbox box;
  const auto cfg = box.write("d.json", std::string(R"({"group": [)") + kFree2 + R"(],
    "measure": {"kind": "srw"}, "params": {"n": 4, "mode": "bruteforce"}})");
  REQUIRE(invoke({"dist", cfg, "--out", (box.dir / "o").string()}).code == kOk);
  CHECK(strip_first_line(box.read(box.dir / "o" / "dist.csv")) ==
        "length,probability,pruned_mass_bound\n0,0.109375,0\n1,0,0\n2,0.46875,0\n3,0,0\n4,0.421875,0\n");

  const auto lattice = box.write("z.json", R"({"lattice": {"dimension": 2}})");
  REQUIRE(invoke({"automaton", lattice, "--out", (box.dir / "z").string()}).code == kOk);
  const auto m = nlohmann::json::parse(box.read(box.dir / "z" / "manifest.json"));
  CHECK(m["results"]["states"] == 9);
  CHECK(m["results"]["spheres_match_enumeration"] == true);
  CHECK(box.read(box.dir / "z" / "automaton.dot").rfind("// command=automaton", 0) == 0);
}

TEST_CASE("error classes map to exit codes") {
  Sandbox box;
  SUBCASE("syntax errors carry a line and column") {
    const auto cfg = box.write("bad.json", "{\"group\": [\n  {\"kind\": \"integer\" \"name\": \"a\"}]}");
    const auto r = invoke({"dist", cfg});
    CHECK(r.code == kBadConfig);
    CHECK(r.err.find("line 2, column") != std::string::npos);
  }
  SUBCASE("unknown fields are rejected with their path") {
    const auto cfg = box.write("u.json", R"({"group": [{"kind":"integer","name":"a","oops":1}]})");
    const auto r = invoke({"dist", cfg});
    CHECK(r.code == kBadConfig);
    CHECK(r.err.find("group[0]: unknown field 'oops'") != std::string::npos);
    const auto top = box.write("top.json", R"({"groups": []})");
    CHECK(invoke({"dist", top}).code == kBadConfig);
    const auto param = box.write("p.json", std::string(R"({"group": [)") + kFree2 +
                                               R"(], "measure": {"kind":"srw"}, "params": {"n": 3, "N": 1}})");
    CHECK(invoke({"dist", param}).err.find("unknown field 'N'") != std::string::npos);
  }
  SUBCASE("malformed words name the measure entry") {
    const auto cfg = box.write("w.json", std::string(R"({"group": [)") + kFree2 +
                                             R"(], "measure": [{"word": "a z", "prob": 1}], "params": {"n": 2}})");
    const auto r = invoke({"dist", cfg});
    CHECK(r.code == kBadConfig);
    CHECK(r.err.find("measure[0]") != std::string::npos);
  }
  SUBCASE("randomized commands need a seed") {
    const auto cfg = box.write("s.json", std::string(R"({"group": [)") + kFree2 +
                                             R"(], "measure": {"kind":"srw"}, "params": {"n": 3, "mode": "monte-carlo"}})");
    CHECK(invoke({"dist", cfg, "--out", box.dir.string()}).code == kUsage);
    CHECK(invoke({"frobnicate", cfg}).code == kUsage);
  }
  SUBCASE("caps and unsupported settings") {
    const auto cfg = box.write("c.json", std::string(R"({"group": [)") + kFree2 +
                                             R"(], "measure": [{"word":"a b","prob":0.5},{"word":"b^-1 a","prob":0.5}],
                                                 "params": {"n": 40, "mode": "bruteforce"}})");
    CHECK(invoke({"dist", cfg, "--cap", "100", "--out", box.dir.string()}).code == kResourceLimit);
    const auto bd = box.write("bd.json", std::string(R"({"group": [)") + kFree2 +
                                             R"(], "measure": [{"word":"a","prob":1}], "params": {"n": 4, "mode": "birth-death"}})");
    CHECK(invoke({"dist", bd, "--out", box.dir.string()}).code == kPrecondition);
  }
}

TEST_CASE("config hashing and grids") {
  CHECK(config_hash("") == "cbf29ce484222325");
  CHECK(config_hash("a") == "af63dc4c8601ec8c");
  const auto cfg = parse_config(R"({"params": {"x": {"from": 0, "to": 1, "count": 5}, "y": [1, 2]}})");
  Params p(cfg.params, "test");
  CHECK(p.grid("x", {}) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(p.grid("y", {}) == std::vector<double>{1, 2});
  CHECK(p.grid("z", {3}) == std::vector<double>{3});
  p.finish();
  const auto bad = parse_config(R"({"params": {"x": {"from": 0, "to": 1}}})");
  Params q(bad.params, "test");
  CHECK_THROWS_AS(q.grid("x", {}), ConfigError);
}
