#include "ctxlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

// Builds an ordered_json tree. Non-integer numbers are stored as their lexeme
// (a JSON string), integers that fit stay integers.
class ExactDomBuilder {
 public:
  using number_integer_t = Json::number_integer_t;
  using number_unsigned_t = Json::number_unsigned_t;
  using number_float_t = Json::number_float_t;
  using string_t = Json::string_t;
  using binary_t = Json::binary_t;

  ExactDomBuilder(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  bool null() { return put(Json(nullptr)); }
  bool boolean(bool v) { return put(Json(v)); }
  bool number_integer(number_integer_t v) { return put(Json(v)); }
  bool number_unsigned(number_unsigned_t v) { return put(Json(v)); }
  bool number_float(number_float_t, const string_t& lexeme) { return put(Json(lexeme)); }
  bool string(string_t& v) { return put(Json(std::move(v))); }
  bool binary(binary_t&) { return put(Json(nullptr)); }

  bool start_object(std::size_t) {
    stack_.push_back(put_ref(Json::object()));
    return true;
  }
  bool key(string_t& k) {
    key_ = std::move(k);
    return true;
  }
  bool end_object() {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    stack_.push_back(put_ref(Json::array()));
    return true;
  }
  bool end_array() {
    stack_.pop_back();
    return true;
  }

  bool parse_error(std::size_t position, const std::string& last_token, const nlohmann::detail::exception& ex) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min(position == 0 ? 0 : position - 1, text_.size());
    for (std::size_t n = 0; n < end; ++n) {
      if (text_[n] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = ex.what();
    // Keep nlohmann's description after its "syntax error ..." prefix.
    if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    throw InvalidInput(std::string(source_) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                       ": malformed JSON near '" + last_token + "': " + what);
  }

  Json take() { return std::move(root_); }

 private:
  bool put(Json v) {
    put_ref(std::move(v));
    return true;
  }
  Json* put_ref(Json v) {
    if (stack_.empty()) {
      root_ = std::move(v);
      return &root_;
    }
    Json* top = stack_.back();
    if (top->is_array()) {
      top->push_back(std::move(v));
      return &top->back();
    }
    auto& slot = (*top)[key_];
    slot = std::move(v);
    return &slot;
  }

  std::string_view text_;
  std::string_view source_;
  Json root_;
  std::vector<Json*> stack_;
  std::string key_;
};

const Json& field(const Json& j, const char* name, std::string_view what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + ": expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) throw InvalidInput(std::string(what) + ": missing field \"" + name + "\"");
  return *it;
}

std::size_t size_from_json(const Json& j, std::string_view where) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer()) {
    if (j.get<long long>() < 0) throw InvalidInput(std::string(where) + ": must be nonnegative");
    return static_cast<std::size_t>(j.get<long long>());
  }
  const Rational q = rational_from_json(j, where);
  if (q.get_den() != 1 || sgn(q) < 0 || !q.get_num().fits_ulong_p()) {
    throw InvalidInput(std::string(where) + ": expected a nonnegative integer");
  }
  return q.get_num().get_ui();
}

const Json& array_of(const Json& j, std::size_t n, std::string_view where) {
  if (!j.is_array()) throw InvalidInput(std::string(where) + ": expected an array");
  if (j.size() != n) {
    throw InvalidInput(std::string(where) + ": expected " + std::to_string(n) + " entries, got " +
                       std::to_string(j.size()));
  }
  return j;
}

std::vector<Rational> vector_from_json(const Json& j, std::size_t n, const std::string& where) {
  array_of(j, n, where);
  std::vector<Rational> v;
  v.reserve(n);
  for (std::size_t t = 0; t < n; ++t) v.push_back(rational_from_json(j[t], where + "[" + std::to_string(t) + "]"));
  return v;
}

Json vector_json(std::span<const Rational> v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

RationalMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InvalidInput(where + ": expected a nonempty matrix");
  const std::size_t rows = j.size(), cols = j[0].size();
  RationalMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = vector_from_json(j[r], cols, where + "[" + std::to_string(r) + "]");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

Json matrix_json(const RationalMatrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r)));
  return out;
}

// Measurement-equivalence side: [[k, j, coeff], ...] or a dense vector over j*K + k.
std::vector<Rational> event_vector_from_json(const Json& j, std::size_t measurements, std::size_t outcomes,
                                             const std::string& where) {
  const std::size_t events = measurements * outcomes;
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  if (j.empty() || !j[0].is_array()) return vector_from_json(j, events, where);
  std::vector<Rational> v(events);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string at = where + "[" + std::to_string(t) + "]";
    array_of(j[t], 3, at);
    const std::size_t k = size_from_json(j[t][0], at + " k");
    const std::size_t jj = size_from_json(j[t][1], at + " j");
    if (k >= outcomes || jj >= measurements) throw InvalidInput(at + ": event (k, j) out of range");
    v[jj * outcomes + k] += rational_from_json(j[t][2], at + " coefficient");
  }
  return v;
}

Json event_vector_json(const std::vector<Rational>& v, std::size_t outcomes) {
  Json out = Json::array();
  for (std::size_t e = 0; e < v.size(); ++e) {
    if (sgn(v[e]) == 0) continue;
    out.push_back(Json::array({e % outcomes, e / outcomes, to_json(v[e])}));
  }
  return out;
}

Json behavior_table(const Behavior& b) {
  Json p = Json::array();
  for (std::size_t i = 0; i < b.preparations(); ++i) {
    Json pi = Json::array();
    for (std::size_t j = 0; j < b.measurements(); ++j) {
      Json pj = Json::array();
      for (std::size_t k = 0; k < b.outcomes(); ++k) pj.push_back(to_json(b(i, j, k)));
      pi.push_back(std::move(pj));
    }
    p.push_back(std::move(pi));
  }
  return p;
}

Json float_table(const FloatBehavior& b) {
  Json p = Json::array();
  for (std::size_t i = 0; i < b.preparations; ++i) {
    Json pi = Json::array();
    for (std::size_t j = 0; j < b.measurements; ++j) {
      Json pj = Json::array();
      for (std::size_t k = 0; k < b.outcomes; ++k) pj.push_back(b.p[(i * b.measurements + j) * b.outcomes + k]);
      pi.push_back(std::move(pj));
    }
    p.push_back(std::move(pi));
  }
  return p;
}

}  // namespace

Json parse_json_exact(std::string_view text, std::string_view source) {
  ExactDomBuilder builder(text, source);
  Json::sax_parse(text.begin(), text.end(), &builder);
  return builder.take();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_exact(buf.str(), path.string());
}

Rational rational_from_json(const Json& j, std::string_view where) {
  try {
    if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<unsigned long long>())));
    if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>())));
    if (j.is_string()) return parse_rational(j.get_ref<const std::string&>());
    if (j.is_number_float()) return from_double_exact(j.get<double>());
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(where) + ": " + e.what());
  }
  throw InvalidInput(std::string(where) + ": expected a number or a \"num/den\" string");
}

Json to_json(const Rational& q) { return to_string(q); }

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.preparations = size_from_json(field(j, "preparations", "scenario"), "scenario.preparations");
  s.measurements = size_from_json(field(j, "measurements", "scenario"), "scenario.measurements");
  s.outcomes = size_from_json(field(j, "outcomes", "scenario"), "scenario.outcomes");
  if (s.preparations == 0 || s.measurements == 0 || s.outcomes == 0) {
    throw InvalidInput("scenario: preparations, measurements and outcomes must be at least 1");
  }
  if (const auto it = j.find("prep_equivalences"); it != j.end()) {
    if (!it->is_array()) throw InvalidInput("scenario.prep_equivalences: expected an array");
    for (std::size_t n = 0; n < it->size(); ++n) {
      const std::string at = "scenario.prep_equivalences[" + std::to_string(n) + "]";
      const Json& e = (*it)[n];
      s.prep_equivalences.push_back({vector_from_json(field(e, "alpha", at), s.preparations, at + ".alpha"),
                                     vector_from_json(field(e, "beta", at), s.preparations, at + ".beta")});
    }
  }
  if (const auto it = j.find("meas_equivalences"); it != j.end()) {
    if (!it->is_array()) throw InvalidInput("scenario.meas_equivalences: expected an array");
    for (std::size_t n = 0; n < it->size(); ++n) {
      const std::string at = "scenario.meas_equivalences[" + std::to_string(n) + "]";
      const Json& e = (*it)[n];
      s.meas_equivalences.push_back(
          {event_vector_from_json(field(e, "alpha", at), s.measurements, s.outcomes, at + ".alpha"),
           event_vector_from_json(field(e, "beta", at), s.measurements, s.outcomes, at + ".beta")});
    }
  }
  const auto report = validate_scenario(s);
  if (!report.ok()) throw InvalidInput("scenario: " + report.summary());
  return s;
}

Json to_json(const Scenario& s) {
  Json out;
  out["preparations"] = s.preparations;
  out["measurements"] = s.measurements;
  out["outcomes"] = s.outcomes;
  out["prep_equivalences"] = Json::array();
  for (const auto& e : s.prep_equivalences) {
    out["prep_equivalences"].push_back({{"alpha", vector_json(e.alpha)}, {"beta", vector_json(e.beta)}});
  }
  out["meas_equivalences"] = Json::array();
  for (const auto& e : s.meas_equivalences) {
    out["meas_equivalences"].push_back(
        {{"alpha", event_vector_json(e.alpha, s.outcomes)}, {"beta", event_vector_json(e.beta, s.outcomes)}});
  }
  return out;
}

Behavior behavior_from_json(const Json& j) {
  const Json& p = field(j, "p", "behavior");
  if (!p.is_array() || p.empty() || !p[0].is_array() || p[0].empty() || !p[0][0].is_array() || p[0][0].empty()) {
    throw InvalidInput("behavior.p: expected a nonempty [i][j][k] array");
  }
  const std::size_t ni = p.size(), nj = p[0].size(), nk = p[0][0].size();
  Behavior b(ni, nj, nk);
  for (std::size_t i = 0; i < ni; ++i) {
    const std::string at_i = "behavior.p[" + std::to_string(i) + "]";
    array_of(p[i], nj, at_i);
    for (std::size_t jj = 0; jj < nj; ++jj) {
      const std::string at = at_i + "[" + std::to_string(jj) + "]";
      const auto row = vector_from_json(p[i][jj], nk, at);
      for (std::size_t k = 0; k < nk; ++k) b(i, jj, k) = row[k];
    }
  }
  return b;
}

Json to_json(const Behavior& b) { return Json{{"p", behavior_table(b)}}; }

FreeOperation freeop_from_json(const Json& j) {
  FreeOperation t;
  t.source = scenario_from_json(field(j, "source", "operation"));
  t.target = scenario_from_json(field(j, "target", "operation"));
  t.q_prep = matrix_from_json(field(j, "q_P", "operation"), "operation.q_P");
  t.q_meas = matrix_from_json(field(j, "q_M", "operation"), "operation.q_M");
  const Json& qo = field(j, "q_O", "operation");
  const std::size_t jt = t.target.measurements, js = t.source.measurements;
  array_of(qo, jt, "operation.q_O");
  t.q_out.assign(jt, std::vector<RationalMatrix>(js));
  for (std::size_t a = 0; a < jt; ++a) {
    const std::string at = "operation.q_O[" + std::to_string(a) + "]";
    const Json& entry = qo[a];
    // [k~][k] rows hold numbers; [j][k~][k] rows hold arrays.
    const bool per_source = entry.is_array() && !entry.empty() && entry[0].is_array() && !entry[0].empty() &&
                            entry[0][0].is_array();
    if (per_source) {
      array_of(entry, js, at);
      for (std::size_t b = 0; b < js; ++b) t.q_out[a][b] = matrix_from_json(entry[b], at + "[" + std::to_string(b) + "]");
    } else {
      const RationalMatrix m = matrix_from_json(entry, at);
      for (std::size_t b = 0; b < js; ++b) t.q_out[a][b] = m;
    }
  }
  const auto report = validate_freeop(t);
  if (!report.ok()) throw InvalidInput("operation: " + report.summary());
  return t;
}

Json to_json(const FreeOperation& t) {
  Json out;
  out["q_P"] = matrix_json(t.q_prep);
  out["q_M"] = matrix_json(t.q_meas);
  Json qo = Json::array();
  const bool compact = t.outcome_maps_measurement_independent();
  for (const auto& per_target : t.q_out) {
    if (compact) {
      qo.push_back(matrix_json(per_target.front()));
    } else {
      Json inner = Json::array();
      for (const auto& m : per_target) inner.push_back(matrix_json(m));
      qo.push_back(std::move(inner));
    }
  }
  out["q_O"] = std::move(qo);
  out["source"] = to_json(t.source);
  out["target"] = to_json(t.target);
  return out;
}

Json to_json(const VertexSet& v) {
  Json out;
  out["vertices"] = Json::array();
  for (const auto& x : v.vertices) out["vertices"].push_back(vector_json(x));
  return out;
}

Json to_json(const NCModel& m) {
  Json mu = Json::array();
  for (std::size_t i = 0; i < m.preparations; ++i) {
    mu.push_back(vector_json(std::span<const Rational>(m.mu).subspan(i * m.vertices, m.vertices)));
  }
  return Json{{"mu", std::move(mu)}};
}

Json to_json(const MembershipResult& r) {
  Json out;
  out["noncontextual"] = r.noncontextual;
  if (r.model) out["model"] = to_json(*r.model);
  if (r.witness) out["witness"] = vector_json(*r.witness);
  return out;
}

Json to_json(const QuantifierReport& r) {
  Json out;
  out["measure"] = to_string(r.measure);
  out["mode"] = r.exact ? "exact" : "float";
  out["defined"] = r.defined;
  if (!r.defined) return out;
  if (r.measure == Measure::RelativeEntropy) {
    out["value"] = r.value_float;
    out["gap"] = r.gap;
    out["converged"] = r.converged;
    out["iterations"] = r.iterations;
    Json w;
    if (r.closest_float) w["closest"] = float_table(*r.closest_float);
    out["witness"] = std::move(w);
    return out;
  }
  if (!r.exact) {
    out["value"] = r.value_float;
    return out;
  }
  out["value"] = to_json(r.value);
  Json w = Json::object();
  if (r.measure == Measure::ContextualFraction || r.measure == Measure::Robustness ||
      r.measure == Measure::RobustnessRef) {
    w["weight"] = to_json(r.weight);
  }
  if (r.nc_part) w["nc_part"] = behavior_table(*r.nc_part);
  if (r.nc_model) w["nc_model"] = to_json(*r.nc_model);
  if (r.residual) w["residual"] = behavior_table(*r.residual);
  if (r.mixture) w["mixture"] = behavior_table(*r.mixture);
  if (r.mixture_model) w["mixture_model"] = to_json(*r.mixture_model);
  if (r.closest) w["closest"] = behavior_table(*r.closest);
  if (r.closest_model) w["closest_model"] = to_json(*r.closest_model);
  out["witness"] = std::move(w);
  return out;
}

std::string dump_line(const Json& j) { return j.dump() + "\n"; }
namespace {

// Objects and arrays of containers go one element per line; arrays of scalars
// stay on one line so tables remain readable.
void dump_pretty(const Json& j, std::size_t depth, std::string& out) {
  const std::string pad((depth + 1) * 2, ' ');
  const std::string close(depth * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    std::size_t n = 0;
    for (const auto& [key, value] : j.items()) {
      out += pad + Json(key).dump() + ": ";
      dump_pretty(value, depth + 1, out);
      out += ++n < j.size() ? ",\n" : "\n";
    }
    out += close + "}";
    return;
  }
  if (j.is_array() && std::any_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); })) {
    out += "[\n";
    for (std::size_t n = 0; n < j.size(); ++n) {
      out += pad;
      dump_pretty(j[n], depth + 1, out);
      out += n + 1 < j.size() ? ",\n" : "\n";
    }
    out += close + "]";
    return;
  }
  if (j.is_array()) {
    out += "[";
    for (std::size_t n = 0; n < j.size(); ++n) out += (n ? ", " : "") + j[n].dump();
    out += "]";
    return;
  }
  out += j.dump();
}

}  // namespace

std::string dump_document(const Json& j) {
  std::string out;
  dump_pretty(j, 0, out);
  return out + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput(path.string() + ": cannot write output");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw InvalidInput(path.string() + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InvalidInput(path.string() + ": cannot move output into place");
  }
}

}  // namespace ctxlab
