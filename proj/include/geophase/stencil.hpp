#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace geophase::stencil {

// Fourth-order central differences. Entries within two points of either end
// are left at zero; callers restrict norms to the interior.

template <class T>
std::vector<T> first_derivative(std::span<const T> v, double h) {
  std::vector<T> d(v.size(), T{});
  for (std::size_t i = 2; i + 2 < v.size(); ++i) {
    d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  }
  return d;
}

template <class T>
std::vector<T> second_derivative(std::span<const T> v, double h) {
  std::vector<T> d(v.size(), T{});
  for (std::size_t i = 2; i + 2 < v.size(); ++i) {
    d[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) /
           (12.0 * h * h);
  }
  return d;
}

/// Five-point central first derivative from samples at t-2h, t-h, t+h, t+2h.
template <class T>
T central5(const T& m2, const T& m1, const T& p1, const T& p2, double h) {
  return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}

}  // namespace geophase::stencil
