#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "ctxlab/errors.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/io.hpp"
#include "ctxlab/oracle.hpp"

namespace ctxlab::cli {

namespace {

namespace fs = std::filesystem;

// Iteration cap or tolerance not met; maps to exit code 2 like ResourceError.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::vector<std::string> inputs;
  std::string measure;
  std::string ref;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
  std::string mode = "exact";
  std::string output;
  std::string kind = "valid";
  std::string dims;
  std::string source_dims;
  std::size_t prep_equivalences = 1;
  std::size_t meas_equivalences = 0;
  unsigned workers = 0;
};

EnumerationOptions enumeration_options() {
  EnumerationOptions opt;
  if (const char* env = std::getenv("CTXLAB_BASIS_BUDGET"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v >= 1)) {
      throw InvalidInput(std::string("CTXLAB_BASIS_BUDGET: expected a positive number, got '") + env + "'");
    }
    opt.basis_budget = static_cast<std::uint64_t>(std::min(v, 1.8e19));
  }
  return opt;
}

Arithmetic arithmetic(const std::string& mode) {
  if (mode == "exact") return Arithmetic::Exact;
  if (mode == "float") return Arithmetic::Float;
  throw InvalidInput("--mode: expected exact or float, got '" + mode + "'");
}

// Manifest entries may hold either an inline object or a path relative to the
// manifest.
Json load_ref(const Json& j, const fs::path& base, std::string_view what) {
  if (j.is_string()) {
    fs::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_json_file(p);
  }
  if (j.is_object()) return j;
  throw InvalidInput(std::string(what) + ": expected a path or an object");
}

Behavior load_valid_behavior(const Scenario& s, const Json& j) {
  Behavior b = behavior_from_json(j);
  if (!b.fits(s)) {
    throw InvalidInput("behavior: table is " + std::to_string(b.preparations()) + "x" +
                       std::to_string(b.measurements()) + "x" + std::to_string(b.outcomes()) +
                       ", scenario expects " + std::to_string(s.preparations) + "x" +
                       std::to_string(s.measurements) + "x" + std::to_string(s.outcomes));
  }
  const auto report = validate_behavior(s, b);
  if (!report.ok()) throw InvalidInput("behavior: " + report.summary());
  return b;
}

Json quantify_json(Measure m, const Scenario& s, const Behavior& b, const VertexSet& v, Arithmetic mode,
                   const Behavior* ref, double tol) {
  QuantifierOptions qo;
  qo.arithmetic = mode;
  KlOptions ko;
  ko.tolerance = tol;
  const auto report = quantify(m, s, b, v, qo, ref, ko);
  if (m == Measure::RelativeEntropy && !report.converged) {
    throw ConvergenceFailure("kl: gap " + std::to_string(report.gap) + " above tolerance " + std::to_string(tol) +
                             " after " + std::to_string(report.iterations) + " iterations (upper bound " +
                             std::to_string(report.value_float) + ")");
  }
  return to_json(report);
}

std::vector<std::size_t> parse_dims(const std::string& text, const char* flag) {
  std::vector<std::size_t> d;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string part = text.substr(start, comma - start);
    char* end = nullptr;
    const unsigned long v = std::strtoul(part.c_str(), &end, 10);
    if (part.empty() || *end != '\0' || v == 0) {
      throw InvalidInput(std::string(flag) + ": expected I,J,K with positive integers, got '" + text + "'");
    }
    d.push_back(v);
    start = comma + 1;
  }
  if (d.size() != 3) throw InvalidInput(std::string(flag) + ": expected three dimensions, got '" + text + "'");
  return d;
}

Json cmd_vertices(const RunConfig& c) {
  const Scenario s = scenario_from_json(read_json_file(c.inputs.at(0)));
  EnumerationOptions opt = enumeration_options();
  if (c.workers > 0) opt.workers = c.workers;
  return to_json(enumerate_vertices(s, opt));
}

Json cmd_check(const RunConfig& c) {
  const Scenario s = scenario_from_json(read_json_file(c.inputs.at(0)));
  const Behavior b = load_valid_behavior(s, read_json_file(c.inputs.at(1)));
  const VertexSet v = enumerate_vertices(s, enumeration_options());
  return to_json(check_membership(s, b, v));
}

Json cmd_quantify(const RunConfig& c) {
  if (c.measure.empty()) throw InvalidInput("quantify: --measure is required");
  const Measure m = parse_measure(c.measure);
  const Scenario s = scenario_from_json(read_json_file(c.inputs.at(0)));
  const Behavior b = load_valid_behavior(s, read_json_file(c.inputs.at(1)));
  std::optional<Behavior> ref;
  if (m == Measure::RobustnessRef) {
    if (c.ref.empty()) throw InvalidInput("quantify: --ref is required for rob-ref");
    ref = load_valid_behavior(s, read_json_file(c.ref));
  }
  const VertexSet v = enumerate_vertices(s, enumeration_options());
  return quantify_json(m, s, b, v, arithmetic(c.mode), ref ? &*ref : nullptr, c.tolerance);
}

Json cmd_apply(const RunConfig& c) {
  const FreeOperation t = freeop_from_json(read_json_file(c.inputs.at(0)));
  const Behavior b = load_valid_behavior(t.source, read_json_file(c.inputs.at(1)));
  return to_json(apply_freeop(t, b));
}

Json cmd_tensor(const RunConfig& c) {
  const Scenario s1 = scenario_from_json(read_json_file(c.inputs.at(0)));
  const Behavior b1 = load_valid_behavior(s1, read_json_file(c.inputs.at(1)));
  const Scenario s2 = scenario_from_json(read_json_file(c.inputs.at(2)));
  const Behavior b2 = load_valid_behavior(s2, read_json_file(c.inputs.at(3)));
  const auto [s, b] = juxtapose(s1, b1, s2, b2);
  return Json{{"scenario", to_json(s)}, {"behavior", to_json(b)}};
}

Json cmd_random_behavior(const RunConfig& c) {
  const Scenario s = scenario_from_json(read_json_file(c.inputs.at(0)));
  std::mt19937_64 rng(c.seed);
  if (c.kind == "vertex") return to_json(random_behavior_vertex(s, rng));
  const VertexSet v = enumerate_vertices(s, enumeration_options());
  if (c.kind == "nc") return to_json(random_nc_behavior(s, v, rng));
  if (c.kind == "valid") return to_json(random_valid_behavior(s, v, rng));
  throw InvalidInput("--kind: expected nc, valid or vertex, got '" + c.kind + "'");
}

Json cmd_random_freeop(const RunConfig& c) {
  if (c.dims.empty()) throw InvalidInput("random-freeop: --dims=I,J,K is required");
  const auto d = parse_dims(c.dims, "--dims");
  if (c.source_dims.empty()) return to_json(sample_random_freeop(d[0], d[1], d[2], c.seed));
  const auto sd = parse_dims(c.source_dims, "--source-dims");
  FreeOpRequest q;
  q.source_preparations = sd[0];
  q.source_measurements = sd[1];
  q.source_outcomes = sd[2];
  q.target_preparations = d[0];
  q.target_measurements = d[1];
  q.target_outcomes = d[2];
  q.prep_equivalences = c.prep_equivalences;
  q.meas_equivalences = c.meas_equivalences;
  q.seed = c.seed;
  return to_json(sample_random_freeop(q));
}

Json cmd_oracle(const RunConfig& c) {
  const Scenario s = scenario_from_json(read_json_file(c.inputs.at(0)));
  const Behavior b = load_valid_behavior(s, read_json_file(c.inputs.at(1)));
  const VertexSet v = enumerate_vertices(s, enumeration_options());
  const NCBehaviorHull h = enumerate_nc_hull(s, v, enumeration_options());
  const bool member = oracle_membership(h, b);
  Json out;
  out["noncontextual"] = member;
  out["hull_size"] = h.extreme_behaviors.size();
  if (c.measure.empty() || c.measure == "rob") {
    out["robustness"] = to_json(oracle_robustness(h, b, from_double_exact(c.tolerance)));
  } else if (c.measure == "cf") {
    out["contextual_fraction"] = to_json(oracle_contextual_fraction(h, b));
  } else {
    throw InvalidInput("oracle: --measure must be rob or cf");
  }
  return out;
}

// One manifest entry; never throws.
Json batch_entry(const Json& entry, std::size_t index, const fs::path& base, const RunConfig& c) {
  Json out;
  out["index"] = index;
  try {
    if (!entry.is_object()) throw InvalidInput("manifest entry: expected an object");
    const auto find = [&](const char* key) -> const Json& {
      const auto it = entry.find(key);
      if (it == entry.end()) throw InvalidInput(std::string("manifest entry: missing \"") + key + "\"");
      return *it;
    };
    const Scenario s = scenario_from_json(load_ref(find("scenario"), base, "scenario"));
    const Behavior b = load_valid_behavior(s, load_ref(find("behavior"), base, "behavior"));
    std::optional<Behavior> ref;
    if (const auto it = entry.find("ref"); it != entry.end()) ref = load_valid_behavior(s, load_ref(*it, base, "ref"));
    std::vector<Measure> measures;
    if (const auto it = entry.find("measures"); it != entry.end()) {
      if (!it->is_array()) throw InvalidInput("manifest entry: \"measures\" must be an array");
      for (const auto& m : *it) {
        if (!m.is_string()) throw InvalidInput("manifest entry: measure names must be strings");
        measures.push_back(parse_measure(m.get<std::string>()));
      }
    }
    const std::string mode = entry.value("mode", c.mode);
    const double tol = entry.value("tol", c.tolerance);
    const VertexSet v = enumerate_vertices(s, enumeration_options());
    const auto member = check_membership(s, b, v);
    out["noncontextual"] = member.noncontextual;
    Json results = Json::array();
    for (const Measure m : measures) {
      results.push_back(quantify_json(m, s, b, v, arithmetic(mode), ref ? &*ref : nullptr, tol));
    }
    out["results"] = std::move(results);
  } catch (const ResourceError& e) {
    out = Json{{"index", index}, {"error", {{"exit", 2}, {"message", e.what()}}}};
  } catch (const ConvergenceFailure& e) {
    out = Json{{"index", index}, {"error", {{"exit", 2}, {"message", e.what()}}}};
  } catch (const std::exception& e) {
    out = Json{{"index", index}, {"error", {{"exit", 1}, {"message", e.what()}}}};
  }
  return out;
}

int cmd_batch(const RunConfig& c, std::string& text) {
  const fs::path manifest_path = c.inputs.at(0);
  const Json manifest = read_json_file(manifest_path);
  const Json* entries = &manifest;
  if (manifest.is_object()) {
    const auto it = manifest.find("entries");
    if (it == manifest.end()) throw InvalidInput("manifest: expected an array or {\"entries\": [...]}");
    entries = &*it;
  }
  if (!entries->is_array()) throw InvalidInput("manifest: entries must be an array");
  const fs::path base = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");

  const std::size_t n = entries->size();
  std::vector<Json> records(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t t = next++; t < n; t = next++) records[t] = batch_entry((*entries)[t], t, base, c);
  };
  unsigned workers = c.workers > 0 ? c.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::size_t failed = 0;
  for (const auto& r : records) {
    if (r.contains("error")) ++failed;
    text += dump_line(r);
  }
  if (n > 0 && failed == n) return records.front()["error"]["exit"].get<int>();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noncontextuality tests and contextuality monotones for prepare-and-measure scenarios", "ctxlab"};
  app.require_subcommand(1, 1);
  RunConfig c;

  const auto add_output = [&](CLI::App* sub) { sub->add_option("--output,-o", c.output, "Write the result here"); };
  const auto add_inputs = [&](CLI::App* sub, std::size_t n, const char* names) {
    sub->add_option("inputs", c.inputs, names)->required()->expected(static_cast<int>(n));
  };

  auto* vertices = app.add_subcommand("vertices", "Extremal noncontextual measurement assignments");
  add_inputs(vertices, 1, "SCENARIO");
  vertices->add_option("--workers", c.workers, "Enumeration threads");
  add_output(vertices);

  auto* check = app.add_subcommand("check", "Noncontextuality test with model or Farkas witness");
  add_inputs(check, 2, "SCENARIO BEHAVIOR");
  add_output(check);

  auto* quantify_cmd = app.add_subcommand("quantify", "Contextuality monotone");
  add_inputs(quantify_cmd, 2, "SCENARIO BEHAVIOR");
  quantify_cmd->add_option("--measure", c.measure, "cf|rob|rob-ref|l1|uniform-l1|kl")->required();
  quantify_cmd->add_option("--ref", c.ref, "Reference behavior for rob-ref");
  quantify_cmd->add_option("--tol", c.tolerance, "Gap tolerance for kl")->check(CLI::PositiveNumber);
  quantify_cmd->add_option("--mode", c.mode, "exact|float");
  add_output(quantify_cmd);

  auto* apply = app.add_subcommand("apply", "Apply a free operation to a behavior");
  add_inputs(apply, 2, "OPERATION BEHAVIOR");
  add_output(apply);

  auto* tensor = app.add_subcommand("tensor", "Juxtaposition of two behaviors");
  add_inputs(tensor, 4, "SCENARIO1 BEHAVIOR1 SCENARIO2 BEHAVIOR2");
  add_output(tensor);

  auto* random_behavior = app.add_subcommand("random-behavior", "Seeded random behavior of a scenario");
  add_inputs(random_behavior, 1, "SCENARIO");
  random_behavior->add_option("--seed", c.seed);
  random_behavior->add_option("--kind", c.kind, "nc|valid|vertex");
  add_output(random_behavior);

  auto* random_freeop = app.add_subcommand("random-freeop", "Seeded random free operation");
  random_freeop->add_option("--dims", c.dims, "Target I,J,K")->required();
  random_freeop->add_option("--source-dims", c.source_dims, "Source I,J,K (drawn from the seed if absent)");
  random_freeop->add_option("--prep-equivalences", c.prep_equivalences);
  random_freeop->add_option("--meas-equivalences", c.meas_equivalences);
  random_freeop->add_option("--seed", c.seed);
  add_output(random_freeop);

  auto* oracle = app.add_subcommand("oracle", "Brute-force hull check (test tooling)");
  add_inputs(oracle, 2, "SCENARIO BEHAVIOR");
  oracle->add_option("--measure", c.measure, "rob|cf");
  oracle->add_option("--tol", c.tolerance, "Bisection width for rob")->check(CLI::PositiveNumber);
  add_output(oracle);
  oracle->group("");

  auto* batch = app.add_subcommand("batch", "Evaluate a manifest, one JSON line per entry");
  add_inputs(batch, 1, "MANIFEST");
  batch->add_option("--mode", c.mode, "Default arithmetic for entries");
  batch->add_option("--tol", c.tolerance, "Default kl tolerance")->check(CLI::PositiveNumber);
  batch->add_option("--workers", c.workers, "Concurrent entries");
  add_output(batch);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::string text;
    int code = 0;
    if (vertices->parsed()) text = dump_document(cmd_vertices(c));
    if (check->parsed()) text = dump_document(cmd_check(c));
    if (quantify_cmd->parsed()) text = dump_document(cmd_quantify(c));
    if (apply->parsed()) text = dump_document(cmd_apply(c));
    if (tensor->parsed()) text = dump_document(cmd_tensor(c));
    if (random_behavior->parsed()) text = dump_document(cmd_random_behavior(c));
    if (random_freeop->parsed()) text = dump_document(cmd_random_freeop(c));
    if (oracle->parsed()) text = dump_document(cmd_oracle(c));
    if (batch->parsed()) code = cmd_batch(c, text);
    if (code != 0) {
      err << "error: every manifest entry failed\n";
      return code;
    }
    if (c.output.empty()) {
      out << text;
    } else {
      write_file_atomic(c.output, text);
    }
    return 0;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceFailure& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ctxlab::cli
