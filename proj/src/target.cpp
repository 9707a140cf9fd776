#include "dikin/target.hpp"

#include <cmath>

namespace dikin {

TargetFunction TargetFunction::uniform() {
  return {[](const Vector&) { return 0.0; }, Regularity::Lipschitz, 1.0};
}

TargetFunction TargetFunction::linear(Vector c) {
  const double l = std::max(norm2(c), 1e-12);
  return {[c = std::move(c)](const Vector& theta) { return dot(c, theta); },
          Regularity::Lipschitz, l};
}

TargetFunction TargetFunction::quadratic(double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("target", "quadratic coefficient must be positive");
  return {[lambda](const Vector& theta) {
            double s = 0.0;
            for (double v : theta) s += v * v;
            return 0.5 * lambda * s;
          },
          Regularity::Smooth, lambda};
}

TargetFunction TargetFunction::logistic(std::vector<Vector> datapoints) {
  double l = 0.0;
  for (const auto& x : datapoints) l += norm2(x);
  l = std::max(l, 1e-12);
  return {[xs = std::move(datapoints)](const Vector& theta) {
            double s = 0.0;
            for (const auto& x : xs) {
              const double t = dot(x, theta);
              // log(1 + e^t), stable on both tails
              s += t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
            }
            return s;
          },
          Regularity::Lipschitz, l};
}

}  // namespace dikin
