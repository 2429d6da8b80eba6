// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coarse/error.hpp"
#include "coarse/filters.hpp"
#include "coarse/ideals.hpp"
#include "coarse/kernel.hpp"
#include "coarse/localization.hpp"
#include "coarse/property_a.hpp"
#include "coarse/spectra.hpp"
#include "support.hpp"

namespace {

using namespace coarse;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Coord c1(std::int64_t x) { return make_coord({x}); }

AsymptoticOperatorSpec laplacian_plus(Coefficient diagonal) {
  AsymptoticOperatorSpec s;
  s.self_adjoint = true;
  s.bands = {{c1(0), std::move(diagonal)}, {c1(1), Coefficient::constant(-1.0)}, {c1(-1), Coefficient::constant(-1.0)}};
  return s;
}

std::vector<double> range(double from, double to, double step = 1.0) {
  std::vector<double> out;
  for (double v = from; v <= to + 1e-12; v += step) out.push_back(v);
  return out;
}

// 1. Step potential: localizations give [0,4] u [5,9]; finite sections approach it.
Outcome criterion_step() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto h = laplacian_plus(Coefficient::step(2.0, 7.0));
  const std::vector<DirectionProxy> proxies{{c1(1), 1}, {c1(-1), 1}};
  const auto ess = ess_spectrum_via_localizations(h, proxies);
  const bool exact = ess.intervals.size() == 2 && ess.points.empty() && ess.intervals[0].lo == 0.0 &&
                     ess.intervals[0].hi == 4.0 && ess.intervals[1].lo == 5.0 && ess.intervals[1].hi == 9.0;
  o.require(exact, "localization union is not exactly [0,4] u [5,9]");
  std::size_t previous = 0;
  std::string summary;
  for (int n : {2000, 4000}) {
    const auto section = finite_section_spectrum(h, n);
    const auto gap = hausdorff_gap(ess, section, 0.05);
    o.require(gap.one_sided <= 0.05, "one-sided gap above 0.05 at N=" + std::to_string(n));
    o.require(gap.outliers <= 10, "more than 10 outliers at N=" + std::to_string(n));
    if (n == 4000) o.require(gap.outliers == previous, "outlier count changes as N doubles");
    previous = gap.outliers;
    summary += " N=" + std::to_string(n) + fmt(" gap=%.3g", gap.one_sided) + " outliers=" + std::to_string(gap.outliers);
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime above 60 s");
  if (o.pass) o.detail = "ess=[0,4]u[5,9]" + summary + fmt(" (%.1f s)", secs);
  return o;
}

// 2. Truncation of the adjacency operator by ball witnesses.
Outcome criterion_truncation() {
  Outcome o;
  const auto t0 = Clock::now();
  std::string summary;
  for (int r : {10, 50, 500}) {
    const auto space = build_lattice_window(1, 4 * r);
    const auto a = adjacency_kernel(space);
    const auto rep = truncation_check(a, Witness::ball_average(space, r));
    const double bound = 2.0 / (2.0 * r + 1.0);
    o.require(std::abs(rep.bound - bound) <= 1e-12, "computed bound differs from 2/(2R+1) at R=" + std::to_string(r));
    o.require(rep.measured <= bound + 1e-9, "measured error above bound at R=" + std::to_string(r));
    o.require(rep.measured / bound >= 0.9, "bound not near-sharp at R=" + std::to_string(r));
    summary += " R=" + std::to_string(r) + fmt(" ratio=%.6f", rep.measured / bound);
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime above 30 s");
  if (o.pass) o.detail = summary.substr(1) + fmt(" (%.1f s)", secs);
  return o;
}

// 3. HLS ghost projection with v_n = n.
Outcome criterion_hls() {
  Outcome o;
  std::vector<int> sizes(30);
  for (int n = 0; n < 30; ++n) sizes[static_cast<std::size_t>(n)] = n + 1;
  const auto pi = build_hls(sizes);
  const auto check = verify_hls(pi);
  o.require(check.idempotence_error <= 1e-12, "pi^2 != pi");
  o.require(check.adjoint_error <= 1e-12, "pi* != pi");
  o.require(check.trace == 30.0, "trace is not exactly 30");
  const auto profile = local_norm_profile(pi.kernel(), 1.0);
  double worst = 0.0;
  for (std::size_t n = 1; n < sizes.size(); ++n) {
    const auto block = pi.block(n);
    // points with both neighbours inside X_n
    for (std::size_t i = 1; i + 1 < block.size(); ++i)
      worst = std::max(worst, std::abs(profile[block[i]] - std::sqrt(3.0) / sizes[n]));
  }
  o.require(worst <= 1e-12, "r = 1 profile differs from sqrt(3)/v_n");
  const std::vector<double> radii{1.0};
  const auto ghost = ghost_report(pi.kernel(), radii, 0.06);
  const double final_value = ghost.curves[0].final_value();
  o.require(final_value < 0.06, "final ghost value not below 0.06");
  if (o.pass)
    o.detail = fmt("trace=%.0f", check.trace) + fmt(" profile err=%.1e", worst) + fmt(" final=%.4f", final_value);
  return o;
}

// 4. Kernel calculus on random band kernels.
Outcome criterion_kernels() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  double min_slack = 1e300, worst_interior = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int dim = t < 50 ? 1 : 2;
    // the localization constant reads V(2 d(k) + 4), so windows reach radius 10
    const auto space = build_lattice_window(dim, dim == 1 ? 40 : 10);
    const auto k = testing::random_kernel(space, rng);
    const auto l = testing::random_kernel(space, rng);
    const double nk = operator_norm(k), nl = operator_norm(l);
    const double nkl = operator_norm(op_compose(k, l));
    min_slack = std::min(min_slack, nk * nl - nkl);
    min_slack = std::min(min_slack, schur_bound(k) - nk);
    const auto loc = norm_localization_check(k);
    min_slack = std::min(min_slack, loc.rhs - loc.lhs);

    const Eigen::MatrixXcd dense = testing::raw_matrix(k) * testing::raw_matrix(l);
    const Eigen::MatrixXcd composed = testing::raw_matrix(op_compose(k, l));
    const double reach = k.propagation() + l.propagation();
    for (PointId x = 0; x < space->size(); ++x) {
      if (space->edge_distance(x) <= reach) continue;
      const auto i = static_cast<Eigen::Index>(x);
      worst_interior = std::max(worst_interior, (dense.row(i) - composed.row(i)).cwiseAbs().maxCoeff());
    }
  }
  o.require(min_slack >= -1e-9, "an inequality is violated");
  o.require(worst_interior <= 1e-12, "interior rows of the composition differ");
  if (o.pass) o.detail = fmt("100 kernels, min slack=%.3g", min_slack) + fmt(" interior err=%.1e", worst_interior);
  return o;
}

// 5. Shrink/thicken identities and cutoff Lipschitz bounds on random sets.
Outcome criterion_filters() {
  Outcome o;
  std::mt19937_64 rng(777);
  std::bernoulli_distribution coin(0.85);
  std::size_t checks = 0;
  for (int t = 0; t < 50; ++t) {
    const int dim = t % 2 ? 2 : 1;
    const auto space = build_lattice_window(dim, dim == 1 ? 199 : 9);  // 399 and 361 points
    std::vector<char> a(space->size()), b(space->size());
    for (auto& v : a) v = coin(rng);
    for (auto& v : b) v = coin(rng);
    const auto f = Subset::from_mask(space, a), g = Subset::from_mask(space, b);
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
      o.require(shrink(f.intersect(g), r).same_on_window(shrink(f, r).intersect(shrink(g, r))),
                "shrink does not commute with intersection");
      o.require(thicken(shrink(f, r), r).is_subset_of(f), "thickened shrink escapes F");
      o.require(thicken(shrink(g, r), r).is_subset_of(g), "thickened shrink escapes G");
      for (const Subset* outer : {&f, &g}) {
        const auto inner = shrink(*outer, r);
        if (inner.none()) continue;
        const auto c = cutoff(*outer, inner, r);
        o.require(c.bounds_hold, "cutoff not between indicators");
        o.require(c.lipschitz <= 3.0 / r + 1e-12, "cutoff Lipschitz constant above 3/r");
        ++checks;
      }
    }
  }
  if (o.pass) o.detail = "50 pairs, " + std::to_string(checks) + " cutoffs";
  return o;
}

// 6. The three membership diagnostics agree on a constructed library.
Outcome criterion_ideal_criteria() {
  Outcome o;
  const auto s = build_lattice_window(1, 80);
  auto at = [&](std::int64_t x) { return *s->find(c1(x)); };
  auto xof = [&](PointId p) { return static_cast<double>(s->coord(p)[0]); };
  auto mask = [&](const std::function<bool(std::int64_t)>& keep) {
    std::vector<char> m(s->size());
    for (PointId p = 0; p < s->size(); ++p) m[p] = keep(s->coord(p)[0]);
    return m;
  };
  const auto adj = adjacency_kernel(s);
  std::vector<Band> shift_band{{c1(1), 1.0}};
  const auto shift = lattice_kernel(s, shift_band);

  struct Entry {
    std::string name;
    BandKernel op;
    bool interior;  // kernel vanishes near the window boundary
  };
  std::vector<Entry> library;
  library.push_back({"zero", BandKernel(s, 1), true});
  {
    KernelBuilder b(s, 8);
    for (std::int64_t x = -4; x <= 4; ++x)
      for (std::int64_t y = -4; y <= 4; ++y) b.add(at(x), at(y), 1.0 / (1.0 + std::abs(x - y)));
    library.push_back({"central block", std::move(b).build(), true});
  }
  {
    KernelBuilder b(s, 3);
    b.add(at(0), at(3), 1.0);
    library.push_back({"rank one", std::move(b).build(), true});
  }
  const auto inner = mask([](std::int64_t x) { return std::abs(x) <= 10; });
  library.push_back({"cut adjacency", restrict_cols(restrict_rows(adj, inner), inner), true});
  {
    std::mt19937_64 rng(99);
    const auto mid = mask([](std::int64_t x) { return std::abs(x) <= 20; });
    library.push_back({"random compact", restrict_cols(restrict_rows(testing::random_kernel(s, rng), mid), mid), true});
  }
  library.push_back({"cubic decay", left_multiply([&](PointId p) { return Complex(std::pow(1.0 + std::abs(xof(p)), -3.0)); }, adj), false});
  library.push_back({"gaussian", multiplication_kernel(s, [&](PointId p) { return Complex(std::exp(-xof(p) * xof(p) / 10.0)); }), false});
  library.push_back({"damped shift", left_multiply([&](PointId p) { return Complex(std::exp(-std::abs(xof(p)))); }, shift), false});
  library.push_back({"identity", identity_kernel(s), false});
  library.push_back({"adjacency", adj, false});
  library.push_back({"shift", shift, false});
  library.push_back({"right indicator", multiplication_kernel(s, [&](PointId p) { return Complex(xof(p) >= 0 ? 1.0 : 0.0); }), false});
  library.push_back({"left rows", restrict_rows(adj, mask([](std::int64_t x) { return x < 0; })), false});
  library.push_back({"cosine", multiplication_kernel(s, [&](PointId p) { return Complex(std::cos(xof(p))); }), false});
  library.push_back({"slow decay", left_multiply([&](PointId p) { return Complex(1.0 / (1.0 + std::abs(xof(p)))); }, adj), false});
  const auto right_half = mask([](std::int64_t x) { return x >= 0; });
  library.push_back({"right adjacency", restrict_cols(restrict_rows(adj, right_half), right_half), false});
  const auto step = laplacian_plus(Coefficient::step(2.0, 7.0));
  library.push_back({"step hamiltonian", materialize(step, s), false});
  library.push_back({"left shift", right_multiply(shift, [&](PointId p) { return Complex(xof(p) < -5 ? 1.0 : 0.0); }), false});
  library.push_back({"step minus right limit",
                     add(materialize(step, s), materialize(limit_operator(step, {c1(1), 1}), s), -1.0), false});
  library.push_back({"step minus left limit",
                     add(materialize(step, s), materialize(limit_operator(step, {c1(-1), 1}), s), -1.0), false});

  const std::vector<FilterSpec> filters{FilterSpec::frechet(), FilterSpec::half_space({1.0}),
                                        FilterSpec::half_space({-1.0}), FilterSpec::obstacle({c1(10)})};
  const auto scales = range(0, 70, 2);
  const std::vector<double> radii{1.0, 2.0};
  const double tol = 1e-3;
  std::size_t members = 0;
  double worst_gap = 0.0;
  for (const auto& e : library) {
    for (const auto& f : filters) {
      const auto defect = jxi_defect(e.op, f, scales);
      const bool by_defect = defect.left_defect < tol;
      const bool by_ball = localization_ball_criterion(e.op, f, radii, scales, tol).verdict;
      const bool by_entry = discrete_entry_criterion(e.op, f, scales).value < tol;
      o.require(by_defect == by_ball && by_ball == by_entry, "diagnostics disagree on " + e.name + " / " + f.name());
      members += by_defect;
      if (e.interior) {
        worst_gap = std::max(worst_gap, defect.gap());
        o.require(defect.gap() <= 1e-6, "left/right defects differ on " + e.name + " / " + f.name());
      }
    }
  }
  if (o.pass)
    o.detail = std::to_string(library.size()) + " operators x 4 filters, " + std::to_string(members) +
               " members" + fmt(", defect gap=%.1e", worst_gap);
  return o;
}

// 7. Factorization through the Frechet ideal.
Outcome criterion_factorization() {
  Outcome o;
  const auto s = build_lattice_window(1, 400);
  const auto t = left_multiply(
      [&](PointId x) { return Complex(std::pow(1.0 + std::abs(static_cast<double>(s->coord(x)[0])), -3.0)); },
      adjacency_kernel(s));
  const auto f = factor_through_ideal(t, FilterSpec::frechet(), range(0, 380), 8);
  o.require(f.complete(), "factorization stopped early");
  o.require(f.residual <= 1e-10, "reconstruction residual above 1e-10");
  o.require(f.phi_bound_holds, "phi exceeds 1/m on F_m");
  if (o.pass)
    o.detail = "depth " + std::to_string(f.achieved_depth) + fmt(", residual=%.1e", f.residual);
  return o;
}

// 8. Translation covariance of limits and of windowed spectra.
Outcome criterion_covariance() {
  Outcome o;
  std::vector<AsymptoticOperatorSpec> specs{
      laplacian_plus(Coefficient::step(2.0, 7.0)),
      laplacian_plus(Coefficient::periodic({1.0, 3.0, 5.0})),
      laplacian_plus(Coefficient::product(Coefficient::periodic({1.0, -2.0}), Coefficient::step(0.5, 4.0, 3))),
      laplacian_plus(Coefficient::table(-5, {1.0, 2.0, 3.0, 4.0}, 6.0)),
  };
  // steps respect every coefficient period in the library
  const std::vector<DirectionProxy> proxies{{c1(1), 6}, {c1(-1), 6}, {c1(1), 12}};
  std::size_t compared = 0;
  for (const auto& h : specs)
    for (std::int64_t a : {-7, -1, 3, 12})
      for (const auto& p : proxies) {
        const auto lhs = limit_operator(translate(h, c1(a)), p);
        const auto rhs = translate(limit_operator(h, p), c1(a));
        for (std::int64_t x = -25; x <= 25; ++x)
          for (std::int64_t y = x - 1; y <= x + 1; ++y) {
            o.require(lhs.entry(c1(x), c1(y)) == rhs.entry(c1(x), c1(y)), "limit and translation do not commute");
            ++compared;
          }
      }

  double worst = 0.0;
  const auto window = build_lattice_window(1, 60, Boundary::periodic);
  for (const auto& h : specs) {
    const auto k = materialize(h, window);
    const auto base = eig_sym(to_dense(k)).values;
    for (std::int64_t a : {1, 5, 17, -30}) {
      const auto moved = eig_sym(to_dense(translate(k, c1(a)))).values;
      for (std::size_t i = 0; i < base.size(); ++i) worst = std::max(worst, std::abs(base[i] - moved[i]));
    }
  }
  o.require(worst <= 1e-8, "translated window spectra differ");
  if (o.pass) o.detail = std::to_string(compared) + " entries exact" + fmt(", spectra err=%.1e", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"essential spectrum of the step potential", criterion_step},
      {"truncation error bound", criterion_truncation},
      {"HLS ghost projection", criterion_hls},
      {"kernel calculus on random kernels", criterion_kernels},
      {"coarse filter calculus", criterion_filters},
      {"ideal criteria agreement", criterion_ideal_criteria},
      {"factorization", criterion_factorization},
      {"localization covariance", criterion_covariance},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s: %s\n", out.pass ? "PASS" : "FAIL", index++, name, out.detail.c_str());
    std::fflush(stdout);
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
