#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coarse/localization.hpp"

namespace coarse {

enum class Provenance { floquet, finite_section, union_of_localizations };

std::string to_string(Provenance p);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectralPoint {
  double value = 0.0;
  std::size_t multiplicity = 1;
};

/// Closed intervals plus isolated points. After normalize() the intervals
/// are sorted and disjoint and no point lies inside an interval.
struct SpectrumSet {
  std::vector<Interval> intervals;
  std::vector<SpectralPoint> points;
  Provenance provenance = Provenance::finite_section;

  /// Merges intervals closer than tol, sorts points and folds points lying
  /// within tol of an interval into it.
  void normalize(double tol = 1e-9);
  double distance(double x) const;
  bool contains(double x, double tol = 0.0) const { return distance(x) <= tol; }
  /// Points counted with multiplicity.
  std::size_t point_count() const;
  /// Every point value repeated by its multiplicity, ascending.
  std::vector<double> expanded_points() const;
};

/// Symmetric tridiagonal eigenvalues by implicit-shift QL; ascending.
/// `diag` has n entries, `off` n - 1 (off[i] couples i and i + 1).
std::vector<double> eig_tridiagonal(std::span<const double> diag, std::span<const double> off);

struct EigResult {
  std::vector<double> values;  ///< ascending
  Eigen::MatrixXcd vectors;    ///< columns, empty unless requested
  double residual = 0.0;       ///< max ||A v - lambda v|| / max(1, ||A||)
};

/// Hermitian eigensolver: Householder reduction to a complex tridiagonal
/// matrix, a diagonal phase change to make it real, then implicit QL.
/// Throws InvalidInput when A is not self-adjoint to 1e-10 (relative), and
/// ConvergenceError when vectors are requested and a residual exceeds 1e-8.
EigResult eig_sym(const Eigen::MatrixXcd& a, bool vectors = false);

struct FloquetOptions {
  int grid = 512;
  bool refine = true;
  double merge_tol = 1e-9;
};

/// Bands of a periodic self-adjoint band operator on Z. The period is the
/// lcm of the coefficient periods. For d >= 2 the coefficients must be
/// constant and the scalar symbol is scanned on a dense grid of the torus.
/// Throws InvalidInput on aperiodic or non-self-adjoint input.
SpectrumSet floquet_bands(const AsymptoticOperatorSpec& spec, const FloquetOptions& options = {});

struct SectionLimits {
  std::size_t max_points = 20001;       ///< tridiagonal path
  std::size_t max_dense_points = 3000;  ///< general path
};

/// Eigenvalues of the operator restricted to the truncated window [-N, N]^d,
/// returned as points with multiplicity.
SpectrumSet finite_section_spectrum(const AsymptoticOperatorSpec& spec, int radius,
                                    const SectionLimits& limits = {});

/// Closure of the union of the limit-operator spectra over the proxies.
SpectrumSet ess_spectrum_via_localizations(const AsymptoticOperatorSpec& spec,
                                           std::span<const DirectionProxy> proxies,
                                           const LimitOptions& limit_options = {},
                                           const FloquetOptions& floquet_options = {});

struct HausdorffGap {
  double one_sided = 0.0;    ///< sup over sampled a in A of dist(a, B)
  std::size_t outliers = 0;  ///< points of B (with multiplicity) farther than tol from A
};

/// `step` is the sampling step inside the intervals of A.
HausdorffGap hausdorff_gap(const SpectrumSet& a, const SpectrumSet& b, double tol, double step = 1e-4);

}  // namespace coarse
