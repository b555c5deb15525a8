#pragma once

#include <array>

namespace spdc {

template <class F>
double bin_average(F&& f, double a, double b, int panels) {
  static constexpr std::array<double, 4> kNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                0.9602898564975363};
  static constexpr std::array<double, 4> kWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                  0.1012285362903763};
  if (b == a) return f(a);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t k = 0; k < kNodes.size(); ++k)
      sum += kWeights[k] * (f(mid - half * kNodes[k]) + f(mid + half * kNodes[k])) * half;
  }
  return sum / (b - a);
}

}  // namespace spdc
