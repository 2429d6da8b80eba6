#pragma once

#include <Eigen/Dense>

namespace coarse {

/// Largest singular value of a small dense block via the Gram matrix of its
/// shorter side.
double largest_singular_value(const Eigen::MatrixXcd& block);

}  // namespace coarse
