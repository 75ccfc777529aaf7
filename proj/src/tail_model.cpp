#include "twistlab/tail_model.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "twistlab/errors.hpp"
#include "twistlab/numeric.hpp"

namespace twistlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, std::string_view context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad number '" + s + "' in tail model '" + std::string(context) + "'");
  }
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TailModel::TailModel(Law law) : law_(std::move(law)) {
  if (auto* p = std::get_if<PowerLaw>(&law_)) {
    if (!(p->coefficient >= 0.0) || !std::isfinite(p->coefficient) || !std::isfinite(p->exponent)) {
      throw ValidationError("power model needs a finite coefficient c >= 0 and finite exponent");
    }
  } else if (auto* g = std::get_if<GeometricLaw>(&law_)) {
    if (!(g->coefficient >= 0.0) || !(g->ratio >= 0.0) || !std::isfinite(g->coefficient) || !std::isfinite(g->ratio)) {
      throw ValidationError("geometric model needs finite c >= 0 and r >= 0");
    }
  } else {
    for (double v : std::get<ExplicitValues>(law_).values) {
      if (!std::isfinite(v)) throw ValidationError("explicit model values must be finite");
    }
  }
}

TailModel TailModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string family(text.substr(0, colon));
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (family == "explicit") {
    std::vector<double> values;
    if (!rest.empty()) {
      for (const auto& item : split(rest, ',')) values.push_back(parse_double(item, text));
    }
    return explicit_values(std::move(values));
  }
  std::map<std::string, double> params;
  if (!rest.empty()) {
    for (const auto& item : split(rest, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ValidationError("expected key=value in tail model '" + std::string(text) + "'");
      const auto key = item.substr(0, eq);
      if (params.count(key)) throw ValidationError("duplicate key '" + key + "' in tail model");
      params[key] = parse_double(item.substr(eq + 1), text);
    }
  }
  auto take = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
  };
  TailModel model = [&]() -> TailModel {
    if (family == "power") {
      const double c = take("c", 1.0);
      return power(c, take("p", 1.0));
    }
    if (family == "geometric") {
      const double c = take("c", 1.0);
      return geometric(c, take("r", 0.5));
    }
    throw ValidationError("unknown tail model family '" + family + "' (expected power, geometric, explicit)");
  }();
  if (!params.empty()) throw ValidationError("unknown key '" + params.begin()->first + "' in tail model '" + std::string(text) + "'");
  return model;
}

std::string TailModel::family() const {
  switch (law_.index()) {
    case 0: return "power";
    case 1: return "geometric";
    default: return "explicit";
  }
}

std::size_t TailModel::known_terms() const noexcept {
  if (auto* e = std::get_if<ExplicitValues>(&law_)) return e->values.size();
  return std::numeric_limits<std::size_t>::max();
}

double TailModel::value(std::size_t i) const {
  if (i == 0) throw ValidationError("sequence indices start at 1");
  const double di = static_cast<double>(i);
  if (auto* p = std::get_if<PowerLaw>(&law_)) return p->coefficient * std::pow(di, p->exponent);
  if (auto* g = std::get_if<GeometricLaw>(&law_)) return g->coefficient * std::pow(g->ratio, di);
  const auto& values = std::get<ExplicitValues>(law_).values;
  if (i > values.size()) throw ValidationError("explicit model has only " + std::to_string(values.size()) + " terms, index " + std::to_string(i) + " requested");
  return values[i - 1];
}

std::int64_t TailModel::box_side(std::size_t i) const {
  const double v = std::ceil(value(i) - 1e-9);
  if (!(v >= 0.0) || v > 9.0e15) throw ValidationError("box side " + fmt(v) + " at index " + std::to_string(i) + " is not a usable nonnegative integer");
  return static_cast<std::int64_t>(v);
}

std::string TailModel::to_string() const {
  if (auto* p = std::get_if<PowerLaw>(&law_)) return "power:c=" + fmt(p->coefficient) + ",p=" + fmt(p->exponent);
  if (auto* g = std::get_if<GeometricLaw>(&law_)) return "geometric:c=" + fmt(g->coefficient) + ",r=" + fmt(g->ratio);
  std::string s = "explicit:";
  const auto& values = std::get<ExplicitValues>(law_).values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += fmt(values[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------

double PowerGeometricSeries::term(std::size_t i) const {
  if (coefficient == 0.0) return 0.0;
  const double di = static_cast<double>(i);
  return coefficient * std::pow(di, exponent) * std::pow(ratio, di);
}

bool PowerGeometricSeries::summable() const noexcept {
  if (coefficient == 0.0 || ratio == 0.0) return true;
  if (ratio < 1.0) return true;
  return ratio == 1.0 && exponent < -1.0;
}

bool PowerGeometricSeries::divergent() const noexcept { return coefficient > 0.0 && !summable(); }

double PowerGeometricSeries::tail_after(std::size_t n) const {
  if (coefficient == 0.0 || ratio == 0.0) return 0.0;
  if (!summable()) return kInf;
  const double slack = 1.0 + 1e-12;
  if (ratio == 1.0) {
    // sum_{i>n} i^a <= integral_n^inf t^a dt for a < -1
    const double a = exponent;
    const double bound = n == 0 ? 1.0 + 1.0 / (-a - 1.0) : std::pow(static_cast<double>(n), a + 1.0) / (-a - 1.0);
    return coefficient * bound * slack;
  }
  if (exponent <= 0.0) {
    // i^a <= (n+1)^a for i > n
    return term(n + 1) / (1.0 - ratio) * slack;
  }
  // Consecutive-term ratio (1+1/k)^a r drops below one eventually; sum the
  // terms before that explicitly and bound the rest geometrically.
  CompensatedSum head;
  std::size_t k = n + 1;
  constexpr std::size_t kMaxExplicit = 10'000'000;
  while (true) {
    const double q = std::pow(1.0 + 1.0 / static_cast<double>(k), exponent) * ratio;
    if (q < 1.0) {
      head.add(term(k) / (1.0 - q));
      return head.value() * slack;
    }
    head.add(term(k));
    if (++k > n + kMaxExplicit) return kInf;
  }
}

std::string PowerGeometricSeries::describe() const {
  std::string s = fmt(coefficient);
  if (exponent != 0.0) s += "*i^" + fmt(exponent);
  if (ratio != 1.0) s += "*" + fmt(ratio) + "^i";
  return s;
}

}  // namespace twistlab
