#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coarse/filters.hpp"
#include "coarse/kernel.hpp"
#include "coarse/space.hpp"

namespace coarse {

/// Closed-form coefficient function c : Z^d -> C. Evaluation is defined on
/// the whole lattice, so limits can be probed far outside any window.
class Coefficient {
 public:
  static Coefficient constant(Complex value);
  /// `left` where x[axis] < at, `right` otherwise.
  static Coefficient step(Complex left, Complex right, std::int64_t at = 0, int axis = 0);
  /// values[x[axis] mod p].
  static Coefficient periodic(std::vector<Complex> values, int axis = 0);
  /// base + amplitude / (1 + |x - center|_1)^power.
  static Coefficient decay(Complex base, Complex amplitude, double power, Coord center = {});
  /// values[x[axis] - start] on the table range, `outside` elsewhere.
  static Coefficient table(std::int64_t start, std::vector<Complex> values, Complex outside, int axis = 0);
  /// a(x) * b(x).
  static Coefficient product(Coefficient a, Coefficient b);

  Complex operator()(const Coord& x) const;
  /// x -> c(x + a).
  Coefficient shifted(const Coord& a) const;
  /// Period along axis 0 when the function is constant or periodic in
  /// x[0] only; nullopt otherwise.
  std::optional<std::int64_t> period() const;
  std::string kind() const;

 private:
  struct Node;
  explicit Coefficient(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  Coord shift_{};
};

struct SpecBand {
  Coord offset{};
  Coefficient coeff = Coefficient::constant(0.0);
};

/// Declared limit coefficients along a proxy; `values` is periodic in x[0]
/// with period values.size() (a single value means constant).
struct DeclaredLimit {
  Coord offset{};
  std::vector<Complex> values;
};

struct ProxyDeclaration {
  DirectionProxy proxy;
  std::vector<DeclaredLimit> limits;
};

/// Band operator on Z^d with kernel k(x, x + offset) = sum of the band
/// coefficients at x.
struct AsymptoticOperatorSpec {
  int dim = 1;
  std::vector<SpecBand> bands;
  std::vector<ProxyDeclaration> proxies;
  bool self_adjoint = false;  ///< declared; verified by check_self_adjoint

  double propagation() const;
  std::vector<Coord> offsets() const;
  /// Summed coefficient of one offset.
  Complex coefficient(const Coord& offset, const Coord& x) const;
  Complex entry(const Coord& x, const Coord& y) const;
};

/// c_{-j}(x + j) == conj(c_j(x)) on a sample of near and far points.
bool check_self_adjoint(const AsymptoticOperatorSpec& spec, double tol = 1e-12);

/// The windowed kernel (wrapped on periodic windows).
BandKernel materialize(const AsymptoticOperatorSpec& spec, const SpacePtr& window);

/// rho_a T rho_a^*: coefficients x -> c(x + a).
AsymptoticOperatorSpec translate(const AsymptoticOperatorSpec& spec, const Coord& shift);
/// k_a(x,y) = k(x + a, y + a) on the overlap of the window and its shift.
/// Throws InvalidInput when the overlap is empty.
BandKernel translate(const BandKernel& k, const Coord& shift);

/// Band-level product: offsets add, coefficients c^A_j(x) c^B_l(x + j).
AsymptoticOperatorSpec compose(const AsymptoticOperatorSpec& a, const AsymptoticOperatorSpec& b);

struct LimitOptions {
  std::int64_t horizon = 1'000'000'000;
  double tol = 1e-8;
  int samples = 10;  ///< Cauchy window
};

struct LimitProbe {
  bool converged = false;
  Complex value;
  double oscillation = 0.0;  ///< max spread of the sampled tail
};

/// Cauchy test on phi(x + a_n) for n = horizon .. horizon + samples - 1.
LimitProbe directional_limit(const std::function<Complex(const Coord&)>& phi, const DirectionProxy& proxy,
                             const Coord& x, const LimitOptions& options = {});
LimitProbe directional_limit(const Coefficient& phi, const DirectionProxy& proxy, const Coord& x,
                             const LimitOptions& options = {});

/// Limit operator along the proxy with constant (d >= 1) or periodic
/// (d == 1) coefficients. Throws Obstruction naming the band and proxy when
/// a coefficient has no limit, InvariantViolation when a declared limit
/// disagrees with the probed one.
AsymptoticOperatorSpec limit_operator(const AsymptoticOperatorSpec& spec, const DirectionProxy& proxy,
                                      const LimitOptions& options = {});

/// n -> ||(tau_{a_n} T - T_k) 1_L|| + ||1_L (tau_{a_n} T - T_k)|| with L the
/// ball of the given radius around the origin.
std::vector<double> local_convergence_check(const AsymptoticOperatorSpec& spec,
                                            const AsymptoticOperatorSpec& limit,
                                            const DirectionProxy& proxy, std::int64_t block_radius,
                                            std::span<const std::int64_t> steps);

}  // namespace coarse
