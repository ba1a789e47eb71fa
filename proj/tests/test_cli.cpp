#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/io.hpp"
#include "doctest.h"

using namespace ctxlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ctxlab_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string write(const std::string& name, const Json& j) const { return write(name, j.dump()); }
  std::string write(const std::string& name, const char* text) const { return write(name, std::string(text)); }
};

}  // namespace

TEST_CASE("check and quantify on the uniform behavior") {
  TempDir d;
  const Scenario s = pom_scenario();
  const std::string sp = d.write("s.json", to_json(s));
  const std::string bp = d.write("b.json", to_json(uniform_behavior(s)));

  const Run check = run({"check", sp, bp});
  REQUIRE(check.code == 0);
  const Json r = parse_json_exact(check.out);
  CHECK(r["noncontextual"] == true);
  CHECK(r.contains("model"));

  const Run cf = run({"quantify", sp, bp, "--measure", "cf"});
  REQUIRE(cf.code == 0);
  CHECK(parse_json_exact(cf.out)["value"] == "0");

  const Run floaty = run({"quantify", sp, bp, "--measure", "rob", "--mode", "float"});
  REQUIRE(floaty.code == 0);
  CHECK(parse_json_exact(floaty.out)["mode"] == "float");
}

TEST_CASE("contextual behavior gets a witness") {
  TempDir d;
  const std::string sp = d.write("s.json", to_json(pom_scenario()));
  const std::string bp = d.write("b.json", to_json(pom_behavior(30)));
  const Run check = run({"check", sp, bp});
  REQUIRE(check.code == 0);
  const Json r = parse_json_exact(check.out);
  CHECK(r["noncontextual"] == false);
  CHECK(r["witness"].is_array());
}

TEST_CASE("input errors exit with 1") {
  TempDir d;
  const std::string sp = d.write("s.json", to_json(pom_scenario()));
  const std::string bad = d.write("bad.json", "{\"p\": [[[0.5, 0.5]],\n  [[0.5 0.5]]]}");
  const Run r = run({"check", sp, bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.json:2:") != std::string::npos);

  const Run missing = run({"check", sp, (d.path / "nope.json").string()});
  CHECK(missing.code == 1);

  // A table that breaks the preparation equivalence.
  Behavior broken = uniform_behavior(pom_scenario());
  broken(0, 0, 0) = 1;
  broken(0, 0, 1) = 0;
  const Run invalid = run({"quantify", sp, d.write("broken.json", to_json(broken)), "--measure", "cf"});
  CHECK(invalid.code == 1);
  CHECK(invalid.err.find("prep-equivalence-broken") != std::string::npos);

  CHECK(run({"quantify", sp, sp, "--measure", "nope"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
}

TEST_CASE("budget exhaustion exits with 2 and leaves no output") {
  TempDir d;
  const std::string sp = d.write("s.json", to_json(pom_scenario()));
  const std::string bp = d.write("b.json", to_json(uniform_behavior(pom_scenario())));
  const fs::path target = d.path / "out.json";
  ::setenv("CTXLAB_BASIS_BUDGET", "1", 1);
  const Run r = run({"check", sp, bp, "-o", target.string()});
  ::unsetenv("CTXLAB_BASIS_BUDGET");
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(target));
  for (const auto& e : fs::directory_iterator(d.path)) CHECK(e.path().extension() == ".json");

  CHECK(run({"check", sp, bp, "-o", target.string()}).code == 0);
  CHECK(fs::exists(target));
}

TEST_CASE("batch keeps going past bad entries") {
  TempDir d;
  d.write("s.json", to_json(pom_scenario()));
  d.write("u.json", to_json(uniform_behavior(pom_scenario())));
  d.write("p.json", to_json(pom_behavior(30)));
  d.write("bad.json", "{\"p\": [");
  const Json manifest = Json::array({
      {{"scenario", "s.json"}, {"behavior", "u.json"}, {"measures", {"cf", "rob"}}},
      {{"scenario", "s.json"}, {"behavior", "bad.json"}, {"measures", {"cf"}}},
      {{"scenario", "s.json"}, {"behavior", "p.json"}, {"measures", {"cf", "l1"}}, {"mode", "float"}},
  });
  const std::string mp = d.write("m.json", manifest);
  const Run first = run({"batch", mp, "--workers", "3"});
  REQUIRE(first.code == 0);
  std::istringstream lines(first.out);
  std::vector<Json> records;
  for (std::string line; std::getline(lines, line);) records.push_back(parse_json_exact(line));
  REQUIRE(records.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) CHECK(records[n]["index"] == n);
  CHECK(records[0]["noncontextual"] == true);
  CHECK(records[0]["results"].size() == 2);
  CHECK(records[1]["error"]["exit"] == 1);
  CHECK(records[2]["noncontextual"] == false);
  CHECK(rational_from_json(records[2]["results"][0]["value"], "value") > Rational(2, 5));

  // Output does not depend on scheduling.
  CHECK(run({"batch", mp, "--workers", "1"}).out == first.out);
  CHECK(run({"batch", mp}).out == first.out);

  const Run empty = run({"batch", d.write("e.json", "[]")});
  CHECK(empty.code == 0);
  CHECK(empty.out.empty());

  const Run all_bad = run({"batch", d.write("b.json", Json::array({manifest[1]}))});
  CHECK(all_bad.code != 0);
}

TEST_CASE("seeded generators are reproducible") {
  TempDir d;
  const std::string sp = d.write("s.json", to_json(pom_scenario()));
  const Run a = run({"random-behavior", sp, "--seed", "5", "--kind", "valid"});
  REQUIRE(a.code == 0);
  CHECK(run({"random-behavior", sp, "--seed", "5", "--kind", "valid"}).out == a.out);
  const Json b = parse_json_exact(a.out);
  CHECK(validate_behavior(pom_scenario(), behavior_from_json(b)).ok());

  const Run op = run({"random-freeop", "--dims", "2,2,2", "--seed", "9"});
  REQUIRE(op.code == 0);
  CHECK(run({"random-freeop", "--dims", "2,2,2", "--seed", "9"}).out == op.out);
  const FreeOperation t = freeop_from_json(parse_json_exact(op.out));
  CHECK(t.target.preparations == 2);
}

TEST_CASE("apply and tensor") {
  TempDir d;
  const Scenario s = pom_scenario();
  const std::string sp = d.write("s.json", to_json(s));
  const std::string bp = d.write("b.json", to_json(pom_behavior(30)));
  FreeOpRequest req;
  req.target_preparations = 4;
  req.target_measurements = 2;
  req.target_outcomes = 2;
  req.source_preparations = 4;
  req.halves_equivalences = true;
  req.permutation_preprocessing = true;
  req.target = s;
  req.seed = 3;
  const FreeOperation t = sample_random_freeop(req);
  const std::string op = d.write("op.json", to_json(t));
  const std::string sb = d.write("sb.json", to_json(uniform_behavior(t.source)));
  const Run applied = run({"apply", op, sb});
  REQUIRE(applied.code == 0);
  CHECK(behavior_from_json(parse_json_exact(applied.out)) == apply_freeop(t, uniform_behavior(t.source)));
  // The behavior must belong to the operation's source scenario.
  const Behavior wrong(1, 1, 2);
  CHECK(run({"apply", op, d.write("w.json", to_json(wrong))}).code == 1);

  const Run prod = run({"tensor", sp, bp, sp, bp});
  REQUIRE(prod.code == 0);
  const Json pj = parse_json_exact(prod.out);
  CHECK(pj["scenario"]["preparations"] == 16);
  CHECK(pj["behavior"]["p"].size() == 16);
}
