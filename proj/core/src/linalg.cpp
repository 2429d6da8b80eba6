#include "coarse/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace coarse {

double largest_singular_value(const Eigen::MatrixXcd& block) {
  if (block.size() == 0) return 0.0;
  Eigen::MatrixXcd gram = block.rows() <= block.cols() ? Eigen::MatrixXcd(block * block.adjoint())
                                                       : Eigen::MatrixXcd(block.adjoint() * block);
  if (gram.rows() == 1) return std::sqrt(std::max(0.0, gram(0, 0).real()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace coarse
