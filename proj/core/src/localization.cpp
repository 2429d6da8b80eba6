#include "coarse/localization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <variant>

#include "coarse/error.hpp"
#include "coarse/linalg.hpp"

namespace coarse {
namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::string offset_label(const Coord& o, int dim) {
  std::string s = "(";
  for (int i = 0; i < dim; ++i) s += (i ? "," : "") + std::to_string(o[i]);
  return s + ")";
}

void check_axis(int axis) {
  if (axis < 0 || axis >= kMaxDim) throw InvalidInput("coefficient axis out of range");
}

}  // namespace

struct Coefficient::Node {
  struct Constant {
    Complex value;
  };
  struct Step {
    Complex left, right;
    std::int64_t at;
    int axis;
  };
  struct Periodic {
    std::vector<Complex> values;
    int axis;
  };
  struct Decay {
    Complex base, amplitude;
    double power;
    Coord center;
  };
  struct Table {
    std::int64_t start;
    std::vector<Complex> values;
    Complex outside;
    int axis;
  };
  struct Product {
    Coefficient a, b;
  };
  std::variant<Constant, Step, Periodic, Decay, Table, Product> data;
};

Coefficient Coefficient::constant(Complex value) {
  return Coefficient(std::make_shared<const Node>(Node{Node::Constant{value}}));
}

Coefficient Coefficient::step(Complex left, Complex right, std::int64_t at, int axis) {
  check_axis(axis);
  return Coefficient(std::make_shared<const Node>(Node{Node::Step{left, right, at, axis}}));
}

Coefficient Coefficient::periodic(std::vector<Complex> values, int axis) {
  check_axis(axis);
  if (values.empty()) throw InvalidInput("periodic coefficient needs at least one value");
  return Coefficient(std::make_shared<const Node>(Node{Node::Periodic{std::move(values), axis}}));
}

Coefficient Coefficient::decay(Complex base, Complex amplitude, double power, Coord center) {
  if (!(power > 0.0)) throw InvalidInput("decay power must be positive");
  return Coefficient(std::make_shared<const Node>(Node{Node::Decay{base, amplitude, power, center}}));
}

Coefficient Coefficient::table(std::int64_t start, std::vector<Complex> values, Complex outside, int axis) {
  check_axis(axis);
  return Coefficient(std::make_shared<const Node>(Node{Node::Table{start, std::move(values), outside, axis}}));
}

Coefficient Coefficient::product(Coefficient a, Coefficient b) {
  return Coefficient(std::make_shared<const Node>(Node{Node::Product{std::move(a), std::move(b)}}));
}

Complex Coefficient::operator()(const Coord& at) const {
  const Coord x = at + shift_;
  struct Visitor {
    const Coord& x;
    Complex operator()(const Node::Constant& c) const { return c.value; }
    Complex operator()(const Node::Step& s) const { return x[s.axis] < s.at ? s.left : s.right; }
    Complex operator()(const Node::Periodic& p) const {
      return p.values[static_cast<std::size_t>(floor_mod(x[p.axis], static_cast<std::int64_t>(p.values.size())))];
    }
    Complex operator()(const Node::Decay& d) const {
      const double dist = static_cast<double>(l1_norm(x - d.center));
      return d.base + d.amplitude / std::pow(1.0 + dist, d.power);
    }
    Complex operator()(const Node::Table& t) const {
      const std::int64_t i = x[t.axis] - t.start;
      if (i < 0 || i >= static_cast<std::int64_t>(t.values.size())) return t.outside;
      return t.values[static_cast<std::size_t>(i)];
    }
    Complex operator()(const Node::Product& p) const { return p.a(x) * p.b(x); }
  };
  return std::visit(Visitor{x}, node_->data);
}

Coefficient Coefficient::shifted(const Coord& a) const {
  Coefficient c = *this;
  c.shift_ = shift_ + a;
  return c;
}

std::optional<std::int64_t> Coefficient::period() const {
  if (std::holds_alternative<Node::Constant>(node_->data)) return 1;
  if (const auto* p = std::get_if<Node::Periodic>(&node_->data)) {
    if (p->axis != 0) return std::nullopt;
    return static_cast<std::int64_t>(p->values.size());
  }
  if (const auto* p = std::get_if<Node::Product>(&node_->data)) {
    auto a = p->a.period();
    auto b = p->b.period();
    if (!a || !b) return std::nullopt;
    return std::lcm(*a, *b);
  }
  return std::nullopt;
}

std::string Coefficient::kind() const {
  static const char* names[] = {"constant", "step", "periodic", "decay", "table", "product"};
  return names[node_->data.index()];
}

// ---------------------------------------------------------------------------

double AsymptoticOperatorSpec::propagation() const {
  double p = 0.0;
  for (const auto& b : bands) p = std::max(p, static_cast<double>(l1_norm(b.offset)));
  return p;
}

std::vector<Coord> AsymptoticOperatorSpec::offsets() const {
  std::vector<Coord> out;
  for (const auto& b : bands)
    if (std::find(out.begin(), out.end(), b.offset) == out.end()) out.push_back(b.offset);
  std::sort(out.begin(), out.end());
  return out;
}

Complex AsymptoticOperatorSpec::coefficient(const Coord& offset, const Coord& x) const {
  Complex acc = 0.0;
  for (const auto& b : bands)
    if (b.offset == offset) acc += b.coeff(x);
  return acc;
}

Complex AsymptoticOperatorSpec::entry(const Coord& x, const Coord& y) const {
  return coefficient(y - x, x);
}

bool check_self_adjoint(const AsymptoticOperatorSpec& spec, double tol) {
  std::vector<Coord> samples;
  for (const auto& o : ball_offsets(spec.dim, spec.dim == 1 ? 24 : 6)) samples.push_back(o);
  for (int axis = 0; axis < spec.dim; ++axis) {
    for (std::int64_t far : {-1'000'003, 1'000'003, -999'999'998, 999'999'998}) {
      Coord c{};
      c[axis] = far;
      samples.push_back(c);
    }
  }
  for (const auto& j : spec.offsets()) {
    const Coord minus_j = scaled(j, -1);
    for (const auto& x : samples) {
      const Complex forward = spec.coefficient(j, x);
      const Complex backward = spec.coefficient(minus_j, x + j);
      if (std::abs(forward - std::conj(backward)) > tol * std::max(1.0, std::abs(forward))) return false;
    }
  }
  return true;
}

BandKernel materialize(const AsymptoticOperatorSpec& spec, const SpacePtr& window) {
  if (window->kind() != Space::Kind::lattice) throw InvalidInput("materialize needs a lattice window");
  if (window->dim() != spec.dim) throw InvalidInput("operator and window dimensions differ");
  KernelBuilder b(window, spec.propagation());
  for (PointId x = 0; x < window->size(); ++x) {
    const Coord& cx = window->coord(x);
    for (const auto& band : spec.bands) {
      if (auto y = window->find(cx + band.offset)) {
        const Complex v = band.coeff(cx);
        if (v != Complex(0.0)) b.add(x, *y, v);
      }
    }
  }
  return std::move(b).build();
}

AsymptoticOperatorSpec translate(const AsymptoticOperatorSpec& spec, const Coord& shift) {
  AsymptoticOperatorSpec out = spec;
  for (auto& b : out.bands) b.coeff = b.coeff.shifted(shift);
  // a proxy sees the same limit after translation, declared limits shift with the operator
  for (auto& decl : out.proxies)
    for (auto& lim : decl.limits) {
      const auto p = static_cast<std::int64_t>(lim.values.size());
      std::vector<Complex> rotated(lim.values.size());
      for (std::int64_t t = 0; t < p; ++t)
        rotated[static_cast<std::size_t>(t)] = lim.values[static_cast<std::size_t>(floor_mod(t + shift[0], p))];
      lim.values = std::move(rotated);
    }
  return out;
}

BandKernel translate(const BandKernel& k, const Coord& shift) {
  const SpacePtr& space = k.space();
  if (space->kind() != Space::Kind::lattice) throw InvalidInput("translate needs a lattice window");
  const auto& win = *space->window();
  if (!space->periodic()) {
    for (int i = 0; i < space->dim(); ++i)
      if (std::abs(shift[i]) > 2 * static_cast<std::int64_t>(win.radius)) {
        throw InvalidInput("shift exceeds window margin");
      }
  }
  KernelBuilder b(space, k.propagation());
  for (PointId x = 0; x < space->size(); ++x) {
    auto src = space->find(space->coord(x) + shift);
    if (!src) continue;
    for (const auto& e : k.row(*src)) {
      if (auto y = space->find(space->coord(e.col) - shift)) b.add(x, *y, e.value);
    }
  }
  return std::move(b).build();
}

AsymptoticOperatorSpec compose(const AsymptoticOperatorSpec& a, const AsymptoticOperatorSpec& b) {
  if (a.dim != b.dim) throw InvalidInput("composed operators have different dimensions");
  AsymptoticOperatorSpec out;
  out.dim = a.dim;
  for (const auto& ba : a.bands)
    for (const auto& bb : b.bands)
      out.bands.push_back({ba.offset + bb.offset, Coefficient::product(ba.coeff, bb.coeff.shifted(ba.offset))});
  return out;
}

// ---------------------------------------------------------------------------

LimitProbe directional_limit(const std::function<Complex(const Coord&)>& phi, const DirectionProxy& proxy,
                             const Coord& x, const LimitOptions& options) {
  if (options.samples < 2) throw InvalidInput("Cauchy window needs at least two samples");
  std::vector<Complex> tail;
  for (int i = 0; i < options.samples; ++i) tail.push_back(phi(x + proxy.point(options.horizon + i)));
  LimitProbe probe;
  for (std::size_t i = 0; i < tail.size(); ++i)
    for (std::size_t j = i + 1; j < tail.size(); ++j)
      probe.oscillation = std::max(probe.oscillation, std::abs(tail[i] - tail[j]));
  probe.converged = probe.oscillation <= options.tol;
  probe.value = tail.back();
  return probe;
}

LimitProbe directional_limit(const Coefficient& phi, const DirectionProxy& proxy, const Coord& x,
                             const LimitOptions& options) {
  return directional_limit([&](const Coord& c) { return phi(c); }, proxy, x, options);
}

AsymptoticOperatorSpec limit_operator(const AsymptoticOperatorSpec& spec, const DirectionProxy& proxy,
                                      const LimitOptions& options) {
  if (l1_norm(proxy.direction) == 0 || proxy.period < 1) throw InvalidInput("degenerate direction proxy");
  const ProxyDeclaration* declared = nullptr;
  for (const auto& d : spec.proxies)
    if (d.proxy.direction == proxy.direction && d.proxy.period == proxy.period) declared = &d;

  AsymptoticOperatorSpec out;
  out.dim = spec.dim;
  out.self_adjoint = spec.self_adjoint;
  const auto offsets = spec.offsets();
  auto fail = [&](const Coord& offset, double osc) {
    throw Obstruction("no limit for band " + offset_label(offset, spec.dim) + " along proxy " +
                      proxy.label(spec.dim) + " (oscillation " + std::to_string(osc) + ")");
  };

  // d = 1: the limit is periodic with the proxy's step, probed per residue
  std::vector<std::vector<Complex>> limits(offsets.size());
  if (spec.dim == 1) {
    const std::int64_t step = std::abs(proxy.period * proxy.direction[0]);
    for (std::size_t b = 0; b < offsets.size(); ++b) {
      auto summed = [&](const Coord& c) { return spec.coefficient(offsets[b], c); };
      for (std::int64_t t = 0; t < step; ++t) {
        const auto probe = directional_limit(summed, proxy, make_coord({t}), options);
        if (!probe.converged) fail(offsets[b], probe.oscillation);
        limits[b].push_back(probe.value);
      }
    }
  } else {
    for (std::size_t b = 0; b < offsets.size(); ++b) {
      auto summed = [&](const Coord& c) { return spec.coefficient(offsets[b], c); };
      const auto probe = directional_limit(summed, proxy, Coord{}, options);
      if (!probe.converged) fail(offsets[b], probe.oscillation);
      for (const auto& o : ball_offsets(spec.dim, 2)) {
        const auto other = directional_limit(summed, proxy, o, options);
        if (!other.converged) fail(offsets[b], other.oscillation);
        if (std::abs(other.value - probe.value) > options.tol) {
          throw Obstruction("limit of band " + offset_label(offsets[b], spec.dim) + " along proxy " +
                            proxy.label(spec.dim) + " is not constant; only d = 1 supports periodic limits");
        }
      }
      limits[b].push_back(probe.value);
    }
  }

  for (std::size_t b = 0; b < offsets.size(); ++b) {
    const Coord& offset = offsets[b];
    auto& values = limits[b];
    if (declared) {
      for (const auto& lim : declared->limits) {
        if (lim.offset != offset) continue;
        const auto p = static_cast<std::int64_t>(lim.values.size());
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(values.size()); ++t) {
          const Complex want = lim.values[static_cast<std::size_t>(floor_mod(t, p))];
          if (std::abs(want - values[static_cast<std::size_t>(t)]) > options.tol) {
            throw InvariantViolation("declared limit of band " + offset_label(offset, spec.dim) +
                                     " disagrees with the probed limit along " + proxy.label(spec.dim));
          }
          values[static_cast<std::size_t>(t)] = want;
        }
      }
    }
    for (std::size_t p = 1; p < values.size(); ++p) {
      if (values.size() % p) continue;
      bool repeats = true;
      for (std::size_t i = p; i < values.size() && repeats; ++i) repeats = values[i] == values[i - p];
      if (repeats) {
        values.resize(p);
        break;
      }
    }
    const bool constant = values.size() == 1;
    if (constant && values.front() == Complex(0.0)) continue;
    out.bands.push_back({offset, constant ? Coefficient::constant(values.front())
                                          : Coefficient::periodic(std::move(values), 0)});
  }
  return out;
}

std::vector<double> local_convergence_check(const AsymptoticOperatorSpec& spec,
                                            const AsymptoticOperatorSpec& limit,
                                            const DirectionProxy& proxy, std::int64_t block_radius,
                                            std::span<const std::int64_t> steps) {
  if (block_radius < 0) throw InvalidInput("block radius must be >= 0");
  const auto reach = static_cast<std::int64_t>(std::max(spec.propagation(), limit.propagation()));
  const auto inner = ball_offsets(spec.dim, block_radius);
  const auto outer = ball_offsets(spec.dim, block_radius + reach);
  std::map<Coord, Eigen::Index> outer_index;
  for (std::size_t i = 0; i < outer.size(); ++i) outer_index[outer[i]] = static_cast<Eigen::Index>(i);
  std::vector<Coord> offsets = spec.offsets();
  for (const auto& o : limit.offsets())
    if (std::find(offsets.begin(), offsets.end(), o) == offsets.end()) offsets.push_back(o);

  std::vector<double> curve;
  for (std::int64_t n : steps) {
    const Coord a = proxy.point(n);
    // difference restricted to rows and columns of the outer ball
    const auto m = static_cast<Eigen::Index>(outer.size());
    Eigen::MatrixXcd diff = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Coord& x = outer[static_cast<std::size_t>(i)];
      for (const auto& j : offsets) {
        auto it = outer_index.find(x + j);
        if (it == outer_index.end()) continue;
        diff(i, it->second) = spec.coefficient(j, x + a) - limit.coefficient(j, x);
      }
    }
    Eigen::MatrixXcd right(m, static_cast<Eigen::Index>(inner.size()));
    Eigen::MatrixXcd left(static_cast<Eigen::Index>(inner.size()), m);
    for (std::size_t c = 0; c < inner.size(); ++c) {
      const Eigen::Index idx = outer_index.at(inner[c]);
      right.col(static_cast<Eigen::Index>(c)) = diff.col(idx);
      left.row(static_cast<Eigen::Index>(c)) = diff.row(idx);
    }
    curve.push_back(largest_singular_value(right) + largest_singular_value(left));
  }
  return curve;
}

}  // namespace coarse
