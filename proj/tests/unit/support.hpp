#pragma once

#include <cmath>
#include <random>

#include "nlpoisson/field.hpp"

namespace testing_support {

// Random trigonometric polynomial sum_s a_s cos(k_s . x / R + phi_s) + c.
struct TrigPoly {
  int terms = 3;
  double amp[4]{};
  double phase[4]{};
  double freq[4][3]{};
  double shift = 0.0;
  double radius = 1.0;

  TrigPoly(std::mt19937_64& rng, double radius_, double max_freq = 3.0) : radius(radius_) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < terms; ++s) {
      amp[s] = u(rng);
      phase[s] = 3.0 * u(rng);
      for (double& f : freq[s]) f = max_freq * u(rng);
    }
    shift = u(rng);
  }

  double operator()(const nlpoisson::Point& x) const {
    double v = shift;
    for (int s = 0; s < terms; ++s) {
      double arg = phase[s];
      for (int k = 0; k < 3; ++k) arg += freq[s][k] * x[k] / radius;
      v += amp[s] * std::cos(arg);
    }
    return v;
  }
};

}  // namespace testing_support
