#include "json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "twistlab/errors.hpp"

namespace twistlab::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) return std::signbit(v) ? "-0.0" : "0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // short numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); }) && j.size() <= 16;
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += std::string(nl) + pad;
        dump_into(e, indent, depth + 1, out);
        first = false;
      }
      if (!flat) out += std::string(nl) + close_pad;
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        out += std::string(nl) + pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_into(it.value(), indent, depth + 1, out);
        first = false;
      }
      out += std::string(nl) + close_pad + '}';
      return;
    }
    default: out += j.dump(); return;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad number '" + s + "'");
  }
}

std::int64_t to_integer(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad integer '" + s + "'");
  }
}

double json_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  return j.get<double>();
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

// ---------------------------------------------------------------------------

Fields::Fields(const Json& source, std::string context) : source_(source), context_(std::move(context)) {
  if (!source_.is_object()) throw ValidationError(context_ + " must be a JSON object");
}

bool Fields::has(const std::string& key) const { return source_.contains(key) && !source_.at(key).is_null(); }

const Json& Fields::raw(const std::string& key) {
  seen_.insert(key);
  if (!has(key)) throw ValidationError(context_ + ": missing field '" + key + "'");
  return source_.at(key);
}

Json Fields::take(const std::string& key, const Json& fallback) {
  seen_.insert(key);
  Json v = has(key) ? source_.at(key) : fallback;
  resolved_[key] = v;
  return v;
}

std::int64_t Fields::integer(const std::string& key, std::int64_t fallback) {
  const Json v = take(key, fallback);
  if (!v.is_number_integer()) throw ValidationError(context_ + ": field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

double Fields::number(const std::string& key, double fallback) {
  const Json v = take(key, fallback);
  if (!v.is_number()) throw ValidationError(context_ + ": field '" + key + "' must be a number");
  resolved_[key] = v.get<double>();
  return v.get<double>();
}

std::string Fields::text(const std::string& key, const std::string& fallback) {
  const Json v = take(key, fallback);
  if (!v.is_string()) throw ValidationError(context_ + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

bool Fields::flag(const std::string& key, bool fallback) {
  const Json v = take(key, fallback);
  if (!v.is_boolean()) throw ValidationError(context_ + ": field '" + key + "' must be true or false");
  return v.get<bool>();
}

Json Fields::finish() {
  for (auto it = source_.begin(); it != source_.end(); ++it) {
    if (!seen_.count(it.key())) throw ValidationError(context_ + ": unknown field '" + it.key() + "'");
  }
  return resolved_;
}

// ---------------------------------------------------------------------------

AbelianGroup parse_group(const Json& j) {
  if (!j.is_string()) throw ValidationError("group must be a string such as \"Z^2\" or \"Z2xZ2\"");
  return AbelianGroup::parse(j.get<std::string>());
}

LatticeElement parse_element(const Json& j, const AbelianGroup& group) {
  if (!j.is_array()) throw ValidationError("group elements are integer arrays");
  std::vector<std::int64_t> c;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ValidationError("group element coordinates must be integers");
    c.push_back(e.get<std::int64_t>());
  }
  LatticeElement x(std::move(c));
  group.require_member(x);
  return x;
}

RealMatrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a nonempty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw ValidationError("matrix rows must be nonempty arrays");
  RealMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ValidationError("matrix rows must all have the same length");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = json_number(j[r][c], "matrix entry");
  }
  return m;
}

IntMatrix parse_int_matrix(const Json& j) {
  const RealMatrix m = parse_matrix(j);
  IntMatrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != std::round(m(r, c))) throw ValidationError("exponent matrix entries must be integers");
      out(r, c) = static_cast<std::int64_t>(m(r, c));
    }
  return out;
}

TailModel parse_model(const Json& j) {
  if (j.is_string()) return TailModel::parse(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("tail model must be a string or {\"family\": ...} object");
  Fields f(j, "tail model");
  const std::string family = f.text("family", "");
  if (family == "power") {
    const double c = f.number("c", 1.0), p = f.number("p", 1.0);
    f.finish();
    return TailModel::power(c, p);
  }
  if (family == "geometric") {
    const double c = f.number("c", 1.0), r = f.number("r", 0.5);
    f.finish();
    return TailModel::geometric(c, r);
  }
  if (family == "explicit") {
    const Json values = f.take("values", Json::array());
    f.finish();
    std::vector<double> v;
    for (const auto& e : values) v.push_back(json_number(e, "explicit model value"));
    return TailModel::explicit_values(std::move(v));
  }
  throw ValidationError("unknown tail model family '" + family + "'");
}

Json model_json(const TailModel& m) {
  if (const auto* p = std::get_if<PowerLaw>(&m.law())) return Json{{"family", "power"}, {"c", p->coefficient}, {"p", p->exponent}};
  if (const auto* g = std::get_if<GeometricLaw>(&m.law())) return Json{{"family", "geometric"}, {"c", g->coefficient}, {"r", g->ratio}};
  Json values = Json::array();
  for (double v : std::get<ExplicitValues>(m.law()).values) values.push_back(v);
  return Json{{"family", "explicit"}, {"values", values}};
}

Complex parse_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {json_number(j[0], "real part"), json_number(j[1], "imaginary part")};
  throw ValidationError("complex numbers are written as [re, im]");
}

PhaseMap parse_phase_map(const Json& j, const AbelianGroup& group, Json& resolved) {
  Fields f(j, "phase map");
  const std::string kind = f.text("kind", "quadratic");
  if (kind == "quadratic") {
    const auto n = static_cast<Eigen::Index>(group.rank());
    const Json q = f.take("q", to_json(RealMatrix::Zero(n, n)));
    const Json l = f.take("linear", Json(std::vector<double>(static_cast<std::size_t>(n), 0.0)));
    resolved = f.finish();
    Eigen::VectorXd lin(n);
    if (!l.is_array() || static_cast<Eigen::Index>(l.size()) != n) throw ValidationError("linear part must have one entry per generator");
    for (Eigen::Index k = 0; k < n; ++k) lin[k] = json_number(l[static_cast<std::size_t>(k)], "linear coefficient");
    return PhaseMap::quadratic(group, parse_matrix(q), lin);
  }
  if (kind == "table") {
    const Json a = f.take("angles", Json::array());
    resolved = f.finish();
    std::vector<double> angles;
    for (const auto& e : a) angles.push_back(json_number(e, "angle"));
    return PhaseMap::table(group, std::move(angles));
  }
  throw ValidationError("unknown phase map kind '" + kind + "'");
}

Cocycle parse_cocycle(const Json& j, Json& resolved) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "pauli") {
      resolved = Json{{"variant", "pauli"}};
      return Cocycle::pauli();
    }
    throw ValidationError("unknown cocycle name '" + name + "'; use a descriptor object");
  }
  Fields f(j, "cocycle");
  const std::string variant = f.text("variant", "");
  Cocycle out = Cocycle::trivial(AbelianGroup::lattice(1));
  if (variant == "matrix") {
    out = Cocycle::matrix(parse_matrix(f.take("matrix", Json())));
  } else if (variant == "bilinear") {
    out = lift_bilinear(parse_matrix(f.take("matrix", Json())));
  } else if (variant == "pauli") {
    out = Cocycle::pauli();
  } else if (variant == "trivial") {
    out = Cocycle::trivial(parse_group(f.take("group", "Z")));
  } else if (variant == "table") {
    const auto group = parse_group(f.take("group", Json()));
    std::vector<Complex> values;
    for (const auto& e : f.take("values", Json::array())) values.push_back(parse_complex(e));
    out = Cocycle::table(group, std::move(values));
  } else if (variant == "coboundary") {
    const auto group = parse_group(f.take("group", Json()));
    Json rho_resolved;
    const PhaseMap rho = parse_phase_map(f.raw("rho"), group, rho_resolved);
    f.put("rho", rho_resolved);
    out = Cocycle::coboundary(rho);
  } else if (variant == "product") {
    std::vector<Cocycle> factors;
    Json resolved_factors = Json::array();
    for (const auto& e : f.raw("factors")) {
      Json r;
      factors.push_back(parse_cocycle(e, r));
      resolved_factors.push_back(r);
    }
    f.put("factors", resolved_factors);
    out = Cocycle::product(std::move(factors));
  } else {
    throw ValidationError("unknown cocycle variant '" + variant + "'");
  }
  resolved = f.finish();
  return out;
}

ProjectiveRep parse_rep(const Json& j, Json& resolved) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "pauli") {
      resolved = Json{{"kind", "pauli"}};
      return pauli_rep();
    }
    throw ValidationError("unknown representation name '" + name + "'");
  }
  Fields f(j, "representation");
  const std::string kind = f.text("kind", "");
  if (kind == "pauli") {
    resolved = f.finish();
    return pauli_rep();
  }
  if (kind == "trivial") {
    const auto group = parse_group(f.take("group", Json()));
    const auto dim = f.integer("dimension", 1);
    resolved = f.finish();
    if (dim < 1) throw ValidationError("dimension must be >= 1");
    return trivial_rep(group, static_cast<std::size_t>(dim));
  }
  if (kind == "character") {
    const auto group = parse_group(f.take("group", Json()));
    Json rho_resolved;
    Json table = {{"kind", "table"}, {"angles", f.take("angles", Json::array())}};
    const PhaseMap rho = parse_phase_map(table, group, rho_resolved);
    resolved = f.finish();
    return scalar_rep(rho);
  }
  if (kind == "regular") {
    Json c;
    const Cocycle u = parse_cocycle(f.raw("cocycle"), c);
    f.put("cocycle", c);
    resolved = f.finish();
    return regular_rep(u);
  }
  throw ValidationError("unknown representation kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

Json to_json(const LatticeElement& x) { return Json(x.coords()); }

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const SeriesVerdict& v) {
  Json j{{"verdict", to_string(v.verdict)}, {"partial_sum", v.partial_sum}, {"terms_evaluated", v.terms_evaluated}};
  j["tail_bound"] = v.tail_bound ? Json(*v.tail_bound) : Json();
  j["derivation"] = v.derivation;
  j["witness"] = v.witness ? Json(*v.witness) : Json();
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

Json to_json(const CoboundaryReport& r) {
  Json j{{"verdict", to_string(r.verdict)}, {"max_commutator_defect", r.max_commutator_defect}};
  if (r.witness) {
    j["witness"] = Json::array({to_json(r.witness->x), to_json(r.witness->y)});
    j["kappa"] = to_json(r.witness_value);
  }
  return j;
}

Json element_from_text(const std::string& text) {
  Json out = Json::array();
  for (const auto& s : split(text, ',')) out.push_back(to_integer(s));
  return out;
}

Json matrix_from_text(const std::string& text) {
  Json rows = Json::array();
  for (const auto& row : split(text, ';')) {
    Json r = Json::array();
    for (const auto& s : split(row, ',')) r.push_back(to_number(s));
    rows.push_back(r);
  }
  return rows;
}

Json number_list_from_text(const std::string& text) {
  Json out = Json::array();
  for (const auto& s : split(text, ',')) out.push_back(to_number(s));
  return out;
}

}  // namespace twistlab::cli
