#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "twistlab/action.hpp"
#include "twistlab/cocycle.hpp"
#include "twistlab/convergence.hpp"
#include "twistlab/representation.hpp"

namespace twistlab::cli {

using Json = nlohmann::ordered_json;

/// Deterministic JSON text with doubles at 17 significant digits.
std::string dump(const Json& j, int indent = 2);
std::string format_double(double v);

/// Reads fields from a scenario object, materialising defaults into the
/// resolved copy and rejecting unknown keys on finish().
class Fields {
public:
  Fields(const Json& source, std::string context);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  Json take(const std::string& key, const Json& fallback);
  void put(const std::string& key, Json value) { resolved_[key] = std::move(value); }
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  double number(const std::string& key, double fallback);
  std::string text(const std::string& key, const std::string& fallback);
  bool flag(const std::string& key, bool fallback);
  Json& resolved() { return resolved_; }
  /// Throws ValidationError on unread keys.
  Json finish();
  const std::string& context() const noexcept { return context_; }

private:
  const Json& source_;
  std::string context_;
  std::set<std::string> seen_;
  Json resolved_ = Json::object();
};

// Parsing, with the canonical JSON form written back through `resolved`.
AbelianGroup parse_group(const Json& j);
LatticeElement parse_element(const Json& j, const AbelianGroup& group);
RealMatrix parse_matrix(const Json& j);
IntMatrix parse_int_matrix(const Json& j);
TailModel parse_model(const Json& j);
Json model_json(const TailModel& m);
Complex parse_complex(const Json& j);

/// Cocycle descriptor -> cocycle, with `resolved` receiving the canonical form.
Cocycle parse_cocycle(const Json& j, Json& resolved);
PhaseMap parse_phase_map(const Json& j, const AbelianGroup& group, Json& resolved);
ProjectiveRep parse_rep(const Json& j, Json& resolved);

Json to_json(const LatticeElement& x);
Json to_json(Complex z);
Json to_json(const RealMatrix& m);
Json to_json(const SeriesVerdict& v);
Json to_json(const CoboundaryReport& r);

// Flag shorthands: "1,0" elements, "a,b;c,d" matrices, "re:im" complexes.
Json element_from_text(const std::string& text);
Json matrix_from_text(const std::string& text);
Json number_list_from_text(const std::string& text);

}  // namespace twistlab::cli
