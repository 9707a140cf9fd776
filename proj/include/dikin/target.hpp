#pragma once

// Value oracle for the convex potential f in pi ~ exp(-f), with the
// regularity class and constant the hyperparameter schedule needs.

#include <functional>

#include "dikin/sparsela.hpp"

namespace dikin {

struct TargetFunction {
  enum class Regularity { Lipschitz, Smooth };

  std::function<double(const Vector&)> eval;
  Regularity regularity = Regularity::Lipschitz;
  double constant = 1.0;  // L for Lipschitz, beta for Smooth

  // f = 0. Treated as 1-Lipschitz so the schedule's eta stays finite.
  static TargetFunction uniform();
  // f = c^T theta, L = ||c||_2.
  static TargetFunction linear(Vector c);
  // f = (lambda/2) ||theta||^2, smooth with beta = lambda.
  static TargetFunction quadratic(double lambda);
  // f = sum_i log(1 + exp(theta . x_i)), L = sum ||x_i||_2.
  static TargetFunction logistic(std::vector<Vector> datapoints);
};

}  // namespace dikin
