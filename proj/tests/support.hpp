#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "coarse/kernel.hpp"
#include "coarse/space.hpp"

namespace coarse::testing {

inline double svd_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

/// Dense matrix of the kernel entries themselves (no measure scaling).
inline Eigen::MatrixXcd raw_matrix(const BandKernel& k) {
  const auto n = static_cast<Eigen::Index>(k.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (PointId x = 0; x < k.size(); ++x)
    for (const auto& e : k.row(x)) m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(e.col)) = e.value;
  return m;
}

/// Random complex band kernel with integer propagation up to max_prop.
inline BandKernel random_kernel(const SpacePtr& space, std::mt19937_64& rng, int max_prop = 3,
                                double density = 0.7) {
  std::uniform_int_distribution<int> prop_dist(0, max_prop);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  const int prop = prop_dist(rng);
  KernelBuilder b(space, prop);
  for (PointId x = 0; x < space->size(); ++x)
    for (PointId y : space->ball(x, prop))
      if (keep(rng)) b.add(x, y, Complex(u(rng), u(rng)));
  return std::move(b).build();
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& c : v) c = Complex(g(rng), g(rng));
  return v;
}

}  // namespace coarse::testing
