#include "twistlab/numeric.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "twistlab/errors.hpp"

namespace twistlab {

void CompensatedSum::add(double value) noexcept {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    carry_ += (sum_ - t) + value;
  } else {
    carry_ += (value - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double canonical_angle(double theta) noexcept {
  if (!std::isfinite(theta)) return theta;
  double r = std::remainder(theta, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

Complex exponential_sum(std::int64_t lo, std::int64_t hi, double theta) {
  if (hi < lo) return {0.0, 0.0};
  const double count = static_cast<double>(hi - lo) + 1.0;
  const double t = canonical_angle(theta);
  if (t == 0.0) return {count, 0.0};
  // e^{i t (lo+hi)/2} sin(count t/2) / sin(t/2)
  const double mid = canonical_angle(t * 0.5 * static_cast<double>(lo + hi));
  const double kernel = std::sin(count * t * 0.5) / std::sin(t * 0.5);
  return unit_phase(mid) * kernel;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw OverflowError("integer overflow in " + std::to_string(a) + " + " + std::to_string(b));
  }
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw OverflowError("integer overflow in " + std::to_string(a) + " * " + std::to_string(b));
  }
  return r;
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exponent) {
  if (exponent < 0) throw OverflowError("negative exponent in integer power");
  std::int64_t r = 1;
  for (std::int64_t k = 0; k < exponent; ++k) r = checked_mul(r, base);
  return r;
}

}  // namespace twistlab
