#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace twistlab {

/// s_i = c * i^p. Box sides use ceil(c * i^p).
struct PowerLaw {
  double coefficient = 1.0;
  double exponent = 1.0;
};

/// s_i = c * r^i.
struct GeometricLaw {
  double coefficient = 1.0;
  double ratio = 0.5;
};

/// s_1..s_k given verbatim; makes no claim about i > k.
struct ExplicitValues {
  std::vector<double> values;
};

/// Closed-form description of a nonnegative sequence (box sides, matrix
/// norms, or the terms of a series). Only the power and geometric families
/// can certify anything about the tail.
class TailModel {
public:
  using Law = std::variant<PowerLaw, GeometricLaw, ExplicitValues>;

  TailModel(Law law);  // NOLINT(google-explicit-constructor)
  static TailModel power(double coefficient, double exponent) { return TailModel(PowerLaw{coefficient, exponent}); }
  static TailModel geometric(double coefficient, double ratio) { return TailModel(GeometricLaw{coefficient, ratio}); }
  static TailModel explicit_values(std::vector<double> values) { return TailModel(ExplicitValues{std::move(values)}); }
  /// "power:c=1,p=2", "geometric:c=3.14,r=0.5", "explicit:1,2,3".
  static TailModel parse(std::string_view text);

  const Law& law() const noexcept { return law_; }
  std::string family() const;
  bool has_tail() const noexcept { return !std::holds_alternative<ExplicitValues>(law_); }
  /// Number of indices covered (unbounded for closed forms).
  std::size_t known_terms() const noexcept;

  /// s_i for i >= 1.
  double value(std::size_t i) const;
  /// ceil(s_i) as a box side, validated to be a nonnegative integer.
  std::int64_t box_side(std::size_t i) const;

  std::string to_string() const;

private:
  Law law_;
};

/// The comparison series sum_i C i^a r^i (i >= 1) that every certificate in
/// the convergence engine reduces to.
struct PowerGeometricSeries {
  double coefficient = 0.0;
  double exponent = 0.0;
  double ratio = 1.0;

  double term(std::size_t i) const;
  bool summable() const noexcept;
  /// Non-summable with a positive coefficient: usable as a divergent minorant.
  bool divergent() const noexcept;
  /// Upper bound on sum_{i > n} C i^a r^i; +inf when not certified.
  double tail_after(std::size_t n) const;
  /// Exact-form label, e.g. "3*i^2*0.5^i".
  std::string describe() const;
};

}  // namespace twistlab
