#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ctxlab/freeops.hpp"
#include "ctxlab/membership.hpp"
#include "ctxlab/quantifiers.hpp"

namespace ctxlab {

using Json = nlohmann::ordered_json;

/// Parses JSON keeping every non-integer number as its source text, so that
/// "0.1" reaches parse_rational unrounded. Syntax errors throw InvalidInput
/// with "<source>:<line>:<column>: ..." positions.
Json parse_json_exact(std::string_view text, std::string_view source = "<input>");
Json read_json_file(const std::filesystem::path& path);

/// JSON number, numeric string or "num/den" string. `where` names the field in
/// diagnostics.
Rational rational_from_json(const Json& j, std::string_view where);
Json to_json(const Rational& q);

Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& s);

/// {"p": [[[...]]]} indexed [i][j][k].
Behavior behavior_from_json(const Json& j);
Json to_json(const Behavior& b);

/// {"q_P", "q_M", "q_O", "source", "target"}. q_P[i][i~] = q_P(i|i~),
/// q_M[j][j~] = q_M(j|j~). q_O is either [j~][k~][k] or [j~][j][k~][k].
FreeOperation freeop_from_json(const Json& j);
Json to_json(const FreeOperation& t);

Json to_json(const VertexSet& v);
Json to_json(const NCModel& m);
Json to_json(const MembershipResult& r);
Json to_json(const QuantifierReport& r);

/// One-line serialization with a trailing newline.
std::string dump_line(const Json& j);
/// Indented serialization with a trailing newline.
std::string dump_document(const Json& j);

/// Writes through a temporary sibling file and a rename, so a failed run
/// never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ctxlab
