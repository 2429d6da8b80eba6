#include "coarse/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "coarse/error.hpp"
#include "coarse/parallel.hpp"

namespace coarse {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Implicit QL on a real symmetric tridiagonal matrix. off[i] couples i and
// i + 1; z (if non-null) accumulates the rotations column-wise.
void tql(std::vector<double>& d, std::vector<double> e, Eigen::MatrixXd* z) {
  const std::size_t n = d.size();
  if (n < 2) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > 60) throw ConvergenceError("QL iteration did not converge", std::abs(e[l]));
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z) {
          auto zi = z->col(static_cast<Eigen::Index>(i));
          auto zj = z->col(static_cast<Eigen::Index>(i + 1));
          for (Eigen::Index k = 0; k < z->rows(); ++k) {
            const double t = zj(k);
            zj(k) = s * zi(k) + c * t;
            zi(k) = c * zi(k) - s * t;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

std::vector<SpectralPoint> group_points(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<SpectralPoint> out;
  for (double v : values) {
    if (!out.empty() && std::abs(v - out.back().value) <= 1e-10 * std::max(1.0, std::abs(v))) {
      ++out.back().multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

// Golden-section search for the minimum of f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, int iterations = 60) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  double best = std::min({f(a), f(b), fc, fd});
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    best = std::min({best, fc, fd});
  }
  return best;
}

std::int64_t spec_period(const AsymptoticOperatorSpec& spec) {
  std::int64_t p = 1;
  for (const auto& b : spec.bands) {
    auto q = b.coeff.period();
    if (!q) throw InvalidInput("Floquet bands need periodic coefficients; band " + b.coeff.kind() + " is not");
    p = std::lcm(p, *q);
    if (p > 4096) throw InvalidInput("period exceeds 4096");
  }
  return p;
}

SpectrumSet floquet_1d(const AsymptoticOperatorSpec& spec, const FloquetOptions& options) {
  const std::int64_t period = spec_period(spec);
  const auto p = static_cast<Eigen::Index>(period);
  struct Term {
    Eigen::Index row, col;
    std::int64_t winding;
    Complex value;
  };
  std::vector<Term> terms;
  for (std::int64_t j = 0; j < period; ++j) {
    for (const auto& offset : spec.offsets()) {
      const Complex c = spec.coefficient(offset, make_coord({j}));
      if (c == Complex(0.0)) continue;
      const std::int64_t y = j + offset[0];
      const std::int64_t l = floor_mod(y, period);
      terms.push_back({static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l), (y - l) / period, c});
    }
  }
  auto symbol = [&](double theta) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(p, p);
    for (const auto& t : terms)
      h(t.row, t.col) += t.value * std::polar(1.0, static_cast<double>(t.winding) * theta);
    return h;
  };
  {
    const Eigen::MatrixXcd h = symbol(0.7);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw InvalidInput("Floquet symbol is not self-adjoint");
  }
  auto branches = [&](double theta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(symbol(theta), Eigen::EigenvaluesOnly);
    return Eigen::VectorXd(solver.eigenvalues());
  };

  const int m = options.grid;
  if (m < 4) throw InvalidInput("Floquet grid needs at least 4 points");
  std::vector<Eigen::VectorXd> grid(static_cast<std::size_t>(m));
  parallel_for(grid.size(), [&](std::size_t i) { grid[i] = branches(kTwoPi * static_cast<double>(i) / m); });

  SpectrumSet out;
  out.provenance = Provenance::floquet;
  for (Eigen::Index b = 0; b < p; ++b) {
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (grid[i](b) < grid[imin](b)) imin = i;
      if (grid[i](b) > grid[imax](b)) imax = i;
    }
    double lo = grid[imin](b);
    double hi = grid[imax](b);
    if (options.refine) {
      const double h = kTwoPi / m;
      const double tmin = kTwoPi * static_cast<double>(imin) / m;
      const double tmax = kTwoPi * static_cast<double>(imax) / m;
      lo = std::min(lo, golden_min([&](double t) { return branches(t)(b); }, tmin - h, tmin + h));
      hi = std::max(hi, -golden_min([&](double t) { return -branches(t)(b); }, tmax - h, tmax + h));
    }
    out.intervals.push_back({lo, hi});
  }
  out.normalize(options.merge_tol);
  return out;
}

SpectrumSet floquet_nd(const AsymptoticOperatorSpec& spec, const FloquetOptions& options) {
  std::vector<std::pair<Coord, Complex>> terms;
  for (const auto& offset : spec.offsets()) {
    for (const auto& b : spec.bands)
      if (b.offset == offset && b.coeff.period() != std::optional<std::int64_t>(1))
        throw InvalidInput("limit operators in d >= 2 must have constant coefficients");
    terms.emplace_back(offset, spec.coefficient(offset, Coord{}));
  }
  const int dim = spec.dim;
  auto symbol = [&](const std::array<double, kMaxDim>& theta) {
    Complex s = 0.0;
    for (const auto& [o, c] : terms) {
      double phase = 0.0;
      for (int i = 0; i < dim; ++i) phase += static_cast<double>(o[i]) * theta[i];
      s += c * std::polar(1.0, phase);
    }
    return s;
  };
  for (const auto& [o, c] : terms) {
    const Coord minus = scaled(o, -1);
    auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return t.first == minus; });
    const Complex partner = it == terms.end() ? Complex(0.0) : it->second;
    if (std::abs(c - std::conj(partner)) > 1e-10 * std::max(1.0, std::abs(c)))
      throw InvalidInput("symbol is not real: operator is not self-adjoint");
  }
  const int per_axis = std::max(8, static_cast<int>(std::pow(double(1 << 18), 1.0 / dim)));
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<double> values(total);
  auto theta_of = [&](std::size_t idx) {
    std::array<double, kMaxDim> t{};
    for (int i = 0; i < dim; ++i) {
      t[i] = kTwoPi * static_cast<double>(idx % per_axis) / per_axis;
      idx /= per_axis;
    }
    return t;
  };
  parallel_for(total, [&](std::size_t i) { values[i] = symbol(theta_of(i)).real(); });
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (options.refine) {
    const double h = kTwoPi / per_axis;
    auto polish = [&](std::array<double, kMaxDim> t, double sign) {
      double best = sign * symbol(t).real();
      for (int sweep = 0; sweep < 3; ++sweep)
        for (int i = 0; i < dim; ++i) {
          auto f = [&](double s) {
            auto u = t;
            u[i] = s;
            return sign * symbol(u).real();
          };
          double a = t[i] - h, b = t[i] + h;
          for (int k = 0; k < 60; ++k) {
            const double c1 = a + (b - a) / 3.0, c2 = b - (b - a) / 3.0;
            if (f(c1) < f(c2)) b = c2; else a = c1;
          }
          t[i] = 0.5 * (a + b);
          best = std::min(best, sign * symbol(t).real());
        }
      return sign * best;
    };
    lo = std::min(lo, polish(theta_of(static_cast<std::size_t>(mn - values.begin())), 1.0));
    hi = std::max(hi, polish(theta_of(static_cast<std::size_t>(mx - values.begin())), -1.0));
  }
  SpectrumSet out;
  out.provenance = Provenance::floquet;
  out.intervals.push_back({lo, hi});
  return out;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::floquet: return "floquet";
    case Provenance::finite_section: return "finite_section";
    case Provenance::union_of_localizations: return "union_of_localizations";
  }
  return "unknown";
}

void SpectrumSet::normalize(double tol) {
  for (auto& iv : intervals)
    if (iv.lo > iv.hi) std::swap(iv.lo, iv.hi);
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi + tol) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  intervals = std::move(merged);

  std::sort(points.begin(), points.end(), [](const SpectralPoint& a, const SpectralPoint& b) { return a.value < b.value; });
  std::vector<SpectralPoint> kept;
  for (const auto& pt : points) {
    bool inside = false;
    for (const auto& iv : intervals)
      if (pt.value >= iv.lo - tol && pt.value <= iv.hi + tol) inside = true;
    if (inside) continue;
    if (!kept.empty() && pt.value - kept.back().value <= tol) {
      kept.back().multiplicity += pt.multiplicity;
    } else {
      kept.push_back(pt);
    }
  }
  points = std::move(kept);
}

double SpectrumSet::distance(double x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals) best = std::min(best, x < iv.lo ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0));
  auto it = std::lower_bound(points.begin(), points.end(), x,
                             [](const SpectralPoint& p, double v) { return p.value < v; });
  if (it != points.end()) best = std::min(best, std::abs(it->value - x));
  if (it != points.begin()) best = std::min(best, std::abs(std::prev(it)->value - x));
  return best;
}

std::size_t SpectrumSet::point_count() const {
  std::size_t n = 0;
  for (const auto& p : points) n += p.multiplicity;
  return n;
}

std::vector<double> SpectrumSet::expanded_points() const {
  std::vector<double> out;
  out.reserve(point_count());
  for (const auto& p : points) out.insert(out.end(), p.multiplicity, p.value);
  return out;
}

std::vector<double> eig_tridiagonal(std::span<const double> diag, std::span<const double> off) {
  if (!diag.empty() && off.size() + 1 != diag.size())
    throw InvalidInput("tridiagonal matrix needs n - 1 off-diagonal entries");
  std::vector<double> d(diag.begin(), diag.end());
  tql(d, std::vector<double>(off.begin(), off.end()), nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

EigResult eig_sym(const Eigen::MatrixXcd& input, bool vectors) {
  if (input.rows() != input.cols()) throw InvalidInput("eig_sym needs a square matrix");
  const Eigen::Index n = input.rows();
  EigResult result;
  if (n == 0) return result;
  const double scale = std::max(1.0, input.cwiseAbs().maxCoeff());
  if ((input - input.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidInput("eig_sym needs a self-adjoint matrix");

  // Householder reduction on the lower triangle.
  Eigen::MatrixXcd a = input;
  Eigen::MatrixXcd q;
  if (vectors) q = Eigen::MatrixXcd::Identity(n, n);
  std::vector<Complex> sub(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    Eigen::VectorXcd x = a.col(k).tail(m);
    if (m == 1 || x.tail(m - 1).norm() == 0.0) {
      sub[static_cast<std::size_t>(k)] = x(0);
      continue;
    }
    const double xnorm = x.norm();
    const Complex phase = x(0) == Complex(0.0) ? Complex(1.0) : x(0) / std::abs(x(0));
    const Complex alpha = -phase * xnorm;
    Eigen::VectorXcd v = x;
    v(0) -= alpha;
    v /= v.norm();
    auto block = a.bottomRightCorner(m, m);
    Eigen::VectorXcd p = block.selfadjointView<Eigen::Lower>() * v;
    const Complex kk = v.dot(p);
    Eigen::VectorXcd w = p - kk * v;
    block.selfadjointView<Eigen::Lower>().rankUpdate(v, w, -2.0);
    sub[static_cast<std::size_t>(k)] = alpha;
    if (vectors) {
      auto cols = q.rightCols(m);
      Eigen::VectorXcd qv = cols * v;
      cols.noalias() -= 2.0 * qv * v.adjoint();
    }
  }

  // Diagonal phases make the subdiagonal real and nonnegative.
  std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n - 1));
  std::vector<Complex> delta(static_cast<std::size_t>(n), 1.0);
  for (Eigen::Index k = 0; k < n; ++k) d[static_cast<std::size_t>(k)] = a(k, k).real();
  for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(n); ++k) {
    const double mag = std::abs(sub[k]);
    e[k] = mag;
    delta[k + 1] = mag == 0.0 ? delta[k] : delta[k] * sub[k] / mag;
  }

  if (!vectors) {
    tql(d, e, nullptr);
    std::sort(d.begin(), d.end());
    result.values = std::move(d);
    return result;
  }

  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
  tql(d, e, &z);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return d[static_cast<std::size_t>(i)] < d[static_cast<std::size_t>(j)];
  });
  Eigen::MatrixXcd dz(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) dz(r, c) = delta[static_cast<std::size_t>(r)] * z(r, order[static_cast<std::size_t>(c)]);
  result.vectors = q * dz;
  for (auto i : order) result.values.push_back(d[static_cast<std::size_t>(i)]);

  double norm_a = 0.0;
  for (double v : result.values) norm_a = std::max(norm_a, std::abs(v));
  const Eigen::MatrixXcd av = input * result.vectors;
  for (Eigen::Index c = 0; c < n; ++c) {
    const double r = (av.col(c) - result.values[static_cast<std::size_t>(c)] * result.vectors.col(c)).norm();
    result.residual = std::max(result.residual, r / std::max(1.0, norm_a));
  }
  if (result.residual > 1e-8) throw ConvergenceError("eigenpair residual too large", result.residual);
  return result;
}

SpectrumSet floquet_bands(const AsymptoticOperatorSpec& spec, const FloquetOptions& options) {
  if (spec.bands.empty()) {
    SpectrumSet zero;
    zero.provenance = Provenance::floquet;
    zero.intervals.push_back({0.0, 0.0});
    return zero;
  }
  return spec.dim == 1 ? floquet_1d(spec, options) : floquet_nd(spec, options);
}

SpectrumSet finite_section_spectrum(const AsymptoticOperatorSpec& spec, int radius, const SectionLimits& limits) {
  if (radius < 0) throw InvalidInput("section radius must be >= 0");
  SpectrumSet out;
  out.provenance = Provenance::finite_section;
  if (spec.dim == 1 && spec.propagation() <= 1.0) {
    const std::size_t n = 2 * static_cast<std::size_t>(radius) + 1;
    if (n > limits.max_points) throw InvalidInput("finite section exceeds the point cap");
    std::vector<double> d(n), e(n - 1);
    const Coord one = make_coord({1}), minus = make_coord({-1});
    for (std::size_t i = 0; i < n; ++i) {
      const Coord x = make_coord({static_cast<std::int64_t>(i) - radius});
      const Complex c0 = spec.coefficient(Coord{}, x);
      if (std::abs(c0.imag()) > 1e-10 * std::max(1.0, std::abs(c0)))
        throw InvalidInput("finite section needs a self-adjoint operator");
      d[i] = c0.real();
      if (i + 1 < n) {
        const Complex up = spec.coefficient(one, x);
        const Complex down = spec.coefficient(minus, x + one);
        if (std::abs(up - std::conj(down)) > 1e-10 * std::max(1.0, std::abs(up)))
          throw InvalidInput("finite section needs a self-adjoint operator");
        e[i] = std::abs(up);
      }
    }
    out.points = group_points(eig_tridiagonal(d, e));
    return out;
  }
  std::size_t n = 1;
  for (int i = 0; i < spec.dim; ++i) n *= 2 * static_cast<std::size_t>(radius) + 1;
  if (n > limits.max_dense_points) throw InvalidInput("finite section exceeds the dense point cap");
  const auto window = build_lattice_window(spec.dim, radius, Boundary::truncate);
  out.points = group_points(eig_sym(to_dense(materialize(spec, window))).values);
  return out;
}

SpectrumSet ess_spectrum_via_localizations(const AsymptoticOperatorSpec& spec,
                                           std::span<const DirectionProxy> proxies,
                                           const LimitOptions& limit_options,
                                           const FloquetOptions& floquet_options) {
  if (proxies.empty()) throw InvalidInput("no direction proxies given");
  SpectrumSet out;
  out.provenance = Provenance::union_of_localizations;
  for (const auto& proxy : proxies) {
    const auto limit = limit_operator(spec, proxy, limit_options);
    const auto bands = floquet_bands(limit, floquet_options);
    out.intervals.insert(out.intervals.end(), bands.intervals.begin(), bands.intervals.end());
    out.points.insert(out.points.end(), bands.points.begin(), bands.points.end());
  }
  out.normalize(floquet_options.merge_tol);
  return out;
}

HausdorffGap hausdorff_gap(const SpectrumSet& a, const SpectrumSet& b, double tol, double step) {
  if (!(step > 0.0)) throw InvalidInput("sampling step must be positive");
  HausdorffGap gap;
  auto sample = [&](double x) { gap.one_sided = std::max(gap.one_sided, b.distance(x)); };
  for (const auto& iv : a.intervals) {
    const auto count = static_cast<std::size_t>(std::ceil((iv.hi - iv.lo) / step));
    for (std::size_t i = 0; i < count; ++i) sample(iv.lo + static_cast<double>(i) * step);
    sample(iv.hi);
  }
  for (const auto& p : a.points) sample(p.value);
  for (const auto& p : b.points)
    if (a.distance(p.value) > tol) gap.outliers += p.multiplicity;
  return gap;
}

}  // namespace coarse
