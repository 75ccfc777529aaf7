#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace twistlab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Neumaier-compensated accumulator. Order of add() calls fixes the result.
class CompensatedSum {
public:
  void add(double value) noexcept;
  double value() const noexcept { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class CompensatedComplexSum {
public:
  void add(Complex value) noexcept {
    re_.add(value.real());
    im_.add(value.imag());
  }
  Complex value() const noexcept { return {re_.value(), im_.value()}; }

private:
  CompensatedSum re_;
  CompensatedSum im_;
};

double compensated_sum(std::span<const double> values) noexcept;

/// Reduces an angle to the interval (-pi, pi].
double canonical_angle(double theta) noexcept;

/// e^{i theta} on the unit circle.
inline Complex unit_phase(double theta) { return std::polar(1.0, theta); }

/// sum_{k=lo}^{hi} e^{i k theta} in closed form (empty range gives 0).
Complex exponential_sum(std::int64_t lo, std::int64_t hi, double theta);

/// Overflow-checked integer arithmetic; throws OverflowError.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_pow(std::int64_t base, std::int64_t exponent);

}  // namespace twistlab
