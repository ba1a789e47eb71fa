#include <random>
#include <string>

#include "ctxlab/errors.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ctxlab;
using test::q;

TEST_CASE("decimals are read exactly") {
  const Json j = parse_json_exact(R"({"a": 0.1, "b": 3, "c": "2/6", "d": 1e-3, "e": -0.25})");
  CHECK(rational_from_json(j["a"], "a") == q("1/10"));
  CHECK(rational_from_json(j["b"], "b") == 3);
  CHECK(rational_from_json(j["c"], "c") == q("1/3"));
  CHECK(rational_from_json(j["d"], "d") == q("1/1000"));
  CHECK(rational_from_json(j["e"], "e") == q("-1/4"));
  CHECK_THROWS_AS(rational_from_json(Json("x"), "f"), InvalidInput);
  CHECK(to_json(q("2/4")) == Json("1/2"));
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_json_exact("{\n  \"a\": [1, 2,,]\n}", "bad.json");
    FAIL("no exception");
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    CHECK(what.rfind("bad.json:2:", 0) == 0);
  }
}

TEST_CASE("scenario round trip") {
  Scenario s = pom_scenario();
  MeasEquivalence e{std::vector<Rational>(4), std::vector<Rational>(4)};
  e.alpha[s.event(0, 0)] = 1;
  e.beta[s.event(0, 1)] = 1;
  s.meas_equivalences.push_back(e);
  const Scenario back = scenario_from_json(parse_json_exact(to_json(s).dump()));
  CHECK(fingerprint(back) == fingerprint(s));

  // Dense and triple encodings of measurement equivalences agree.
  const Json dense = parse_json_exact(R"({"preparations": 1, "measurements": 2, "outcomes": 2,
    "meas_equivalences": [{"alpha": [1, 0, 0, 0], "beta": [0, 0, 1, 0]}]})");
  const Json triples = parse_json_exact(R"({"preparations": 1, "measurements": 2, "outcomes": 2,
    "meas_equivalences": [{"alpha": [[0, 0, 1]], "beta": [[0, 1, 1]]}]})");
  CHECK(fingerprint(scenario_from_json(dense)) == fingerprint(scenario_from_json(triples)));

  CHECK_THROWS_AS(scenario_from_json(parse_json_exact(R"({"preparations": 2, "measurements": 1})")), InvalidInput);
  CHECK_THROWS_AS(scenario_from_json(parse_json_exact(
                      R"({"preparations": 2, "measurements": 1, "outcomes": 2,
                          "prep_equivalences": [{"alpha": [0.6, 0.3], "beta": [1, 0]}]})")),
                  InvalidInput);
}

TEST_CASE("behavior round trip") {
  const Behavior b = pom_behavior(40);
  CHECK(behavior_from_json(parse_json_exact(to_json(b).dump())) == b);
  CHECK_THROWS_AS(behavior_from_json(parse_json_exact(R"({"p": [[[0.5, 0.5]], [[1]]]})")), InvalidInput);
}

TEST_CASE("operation round trip") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 10; ++n) {
    FreeOpRequest req;
    req.target_preparations = 2 + n % 2;
    req.target_measurements = 1 + n % 3;
    req.target_outcomes = 2;
    req.seed = n + 1;
    const FreeOperation t = sample_random_freeop(req);
    const FreeOperation back = freeop_from_json(parse_json_exact(to_json(t).dump()));
    CHECK(back.q_prep == t.q_prep);
    CHECK(back.q_meas == t.q_meas);
    CHECK(back.q_out == t.q_out);
    CHECK(fingerprint(back.source) == fingerprint(t.source));
  }
}

TEST_CASE("measurement independent outcome maps") {
  Scenario s;
  s.measurements = 2;
  s.outcomes = 2;
  const Json op = {{"q_P", {{1}}},
                   {"q_M", {{1, 0}, {0, 1}}},
                   {"q_O", {{{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}}},
                   {"source", to_json(s)},
                   {"target", to_json(s)}};
  const FreeOperation t = freeop_from_json(op);
  CHECK(t.q_out[0][0] == t.q_out[0][1]);
  // Written back in the compact [j~][k~][k] form.
  const Json written = to_json(t)["q_O"];
  CHECK(written.size() == 2);
  CHECK(written[0][0][0].is_string());
  CHECK(freeop_from_json(to_json(t)).q_out == t.q_out);

  Json bad = op;
  bad["q_O"][0] = {{0.5, 0.25}, {0.25, 0.75}};
  CHECK_THROWS_AS(freeop_from_json(bad), InvalidInput);
}

TEST_CASE("document printer keeps scalar rows inline") {
  const Json doc = parse_json_exact(R"({"p": [[["1/2", "1/2"]]]})");
  const std::string text = dump_document(doc);
  CHECK(text.find("[\"1/2\", \"1/2\"]") != std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(parse_json_exact(text) == doc);
}
