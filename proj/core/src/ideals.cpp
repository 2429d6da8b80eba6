#include "coarse/ideals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/LU>

#include "coarse/error.hpp"

namespace coarse {
namespace {

std::vector<char> interior_mask(const Space& s, double r) {
  std::vector<char> mask(s.size(), 0);
  for (PointId x = 0; x < s.size(); ++x) mask[x] = s.edge_distance(x) >= r;
  return mask;
}

std::vector<double> sorted_scales(std::span<const double> scales) {
  std::vector<double> out(scales.begin(), scales.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

GhostReport ghost_report(const BandKernel& op, std::span<const double> radii, double tol) {
  const Space& s = *op.space();
  const PointId o = s.origin();
  GhostReport report;
  report.tol = tol;
  for (double r : radii) {
    const auto profile = local_norm_profile(op, r);
    const auto interior = interior_mask(s, r);
    std::vector<std::pair<double, double>> samples;  // (horizon, value)
    for (PointId x = 0; x < s.size(); ++x)
      if (interior[x]) samples.emplace_back(s.distance(o, x), profile[x]);
    std::sort(samples.begin(), samples.end());
    GhostCurve curve;
    curve.radius = r;
    // suffix maxima, one point per distinct horizon
    double running = 0.0;
    std::vector<std::pair<double, double>> reversed;
    for (std::size_t i = samples.size(); i-- > 0;) {
      running = std::max(running, samples[i].second);
      if (i == 0 || samples[i - 1].first != samples[i].first) reversed.emplace_back(samples[i].first, running);
    }
    curve.points.assign(reversed.rbegin(), reversed.rend());
    report.verdicts.push_back(curve.final_value() < tol);
    report.curves.push_back(std::move(curve));
  }
  report.verdict = !report.verdicts.empty() &&
                   std::all_of(report.verdicts.begin(), report.verdicts.end(), [](bool v) { return v; });
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] == 1.0) report.unit_radius_consistent = report.verdicts[i] == report.verdict;
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<PointId> HlsProjection::block(std::size_t n) const {
  std::vector<PointId> out;
  const std::size_t count = static_cast<std::size_t>(sizes_[n]) * static_cast<std::size_t>(sizes_[n]);
  for (std::size_t i = 0; i < count; ++i) out.push_back(starts_[n] + i);
  return out;
}

std::size_t HlsProjection::component_of(PointId x) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

HlsProjection build_hls(std::span<const int> sizes, double gap_factor) {
  if (sizes.empty()) throw InvalidInput("HLS projection needs at least one block");
  if (!(gap_factor >= 0.0)) throw InvalidInput("gap factor must be >= 0");
  std::size_t total = 0;
  for (std::size_t n = 0; n < sizes.size(); ++n) {
    if (sizes[n] < 1) throw InvalidInput("HLS block sizes must be >= 1");
    if (n > 0 && sizes[n] < sizes[n - 1]) throw InvalidInput("HLS block sizes must be nondecreasing");
    total += static_cast<std::size_t>(sizes[n]) * static_cast<std::size_t>(sizes[n]);
  }
  if (total > (std::size_t{1} << 20)) throw InvalidInput("HLS projection exceeds the point cap");

  std::vector<Coord> points;
  std::vector<PointId> starts;
  std::int64_t position = 0;
  int max_block = 0;
  for (std::size_t n = 0; n < sizes.size(); ++n) {
    starts.push_back(points.size());
    const std::int64_t count = static_cast<std::int64_t>(sizes[n]) * sizes[n];
    for (std::int64_t i = 0; i < count; ++i) points.push_back(make_coord({position + i}));
    position += count;
    const auto gap = static_cast<std::int64_t>(std::ceil(static_cast<double>(n + 1) * gap_factor)) + 1;
    position += gap;
    max_block = std::max<int>(max_block, static_cast<int>(count));
  }
  SpacePtr space = build_point_cloud(1, std::move(points));

  KernelBuilder builder(space, static_cast<double>(max_block - 1));
  for (std::size_t n = 0; n < sizes.size(); ++n) {
    const std::size_t count = static_cast<std::size_t>(sizes[n]) * static_cast<std::size_t>(sizes[n]);
    const double value = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < count; ++j) builder.add(starts[n] + i, starts[n] + j, value);
  }
  HlsProjection pi(space, std::move(builder).build());
  pi.sizes_.assign(sizes.begin(), sizes.end());
  pi.starts_ = std::move(starts);
  pi.gap_factor_ = gap_factor;
  return pi;
}

bool HlsCheck::ok(double tol) const {
  return idempotence_error <= tol && adjoint_error <= tol && block_diagonal && rank > 0 &&
         std::abs(trace - static_cast<double>(rank)) <= tol;
}

HlsCheck verify_hls(const HlsProjection& pi) {
  HlsCheck check;
  const BandKernel& k = pi.kernel();
  check.block_diagonal = true;
  for (PointId x = 0; x < k.size(); ++x)
    for (const auto& e : k.row(x))
      if (pi.component_of(e.col) != pi.component_of(x)) check.block_diagonal = false;

  long double trace = 0.0L;
  for (std::size_t n = 0; n < pi.components(); ++n) {
    const auto ids = pi.block(n);
    const auto m = static_cast<Eigen::Index>(ids.size());
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const Complex v = k.at(ids[i], ids[j]);
        block(i, j) = v.real();
        check.adjoint_error = std::max(check.adjoint_error, std::abs(v - std::conj(k.at(ids[j], ids[i]))));
      }
    const Eigen::MatrixXd square = block * block;
    check.idempotence_error = std::max(check.idempotence_error, (square - block).cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m; ++i) trace += static_cast<long double>(block(i, i));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    lu.setThreshold(1e-10);
    check.rank += static_cast<std::size_t>(lu.rank());
  }
  check.trace = static_cast<double>(trace);
  return check;
}

// ---------------------------------------------------------------------------

DefectReport jxi_defect(const BandKernel& op, const FilterSpec& filter, std::span<const double> scales) {
  if (filter.is_proxy()) throw InvalidInput("jxi_defect needs a coarse filter, not a direction proxy");
  DefectReport report;
  report.left_defect = std::numeric_limits<double>::infinity();
  report.right_defect = std::numeric_limits<double>::infinity();
  for (double scale : sorted_scales(scales)) {
    const Subset gen = filter.generator(op.space(), scale);
    if (gen.none()) continue;
    const double left = operator_norm(restrict_rows(op, gen.mask()));
    const double right = operator_norm(restrict_cols(op, gen.mask()));
    report.scales.push_back(scale);
    report.left.push_back(left);
    report.right.push_back(right);
    report.left_defect = std::min(report.left_defect, left);
    report.right_defect = std::min(report.right_defect, right);
  }
  if (report.scales.empty()) throw Obstruction("horizon exhausted: no generator meets the window");
  return report;
}

BallCriterion localization_ball_criterion(const BandKernel& op, const FilterSpec& filter,
                                          std::span<const double> radii,
                                          std::span<const double> scales, double tol) {
  const Space& s = *op.space();
  BallCriterion out;
  out.verdict = true;
  const auto scale_list = sorted_scales(scales);
  std::vector<Subset> generators;
  for (double scale : scale_list) generators.push_back(filter.generator(op.space(), scale));
  for (double r : radii) {
    const auto profile = local_norm_profile(op, r);
    const auto interior = interior_mask(s, r);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& gen : generators) {
      bool any = false;
      double sup = 0.0;
      for (PointId x = 0; x < s.size(); ++x) {
        if (!gen.contains(x) || !interior[x]) continue;
        any = true;
        sup = std::max(sup, profile[x]);
      }
      if (any) best = std::min(best, sup);
    }
    if (std::isinf(best)) throw Obstruction("horizon exhausted: no generator meets the window interior");
    out.radii.push_back(r);
    out.tail_sup.push_back(best);
    if (!(best < tol)) out.verdict = false;
  }
  return out;
}

EntryCriterion discrete_entry_criterion(const BandKernel& op, const FilterSpec& filter,
                                        std::span<const double> scales) {
  const Space& s = *op.space();
  if (!s.counting_measure()) throw InvalidInput("entry criterion needs counting measure");
  EntryCriterion out;
  out.value = std::numeric_limits<double>::infinity();
  for (double scale : sorted_scales(scales)) {
    const Subset gen = filter.generator(op.space(), scale);
    if (gen.none()) continue;
    double sup = 0.0;
    for (PointId x = 0; x < s.size(); ++x) {
      if (!gen.contains(x)) continue;
      for (const auto& e : op.row(x))
        if (gen.contains(e.col)) sup = std::max(sup, std::abs(e.value));
    }
    out.scales.push_back(scale);
    out.sups.push_back(sup);
    out.value = std::min(out.value, sup);
  }
  if (out.scales.empty()) throw Obstruction("horizon exhausted: no generator meets the window");
  return out;
}

// ---------------------------------------------------------------------------

Factorization factor_through_ideal(const BandKernel& op, const FilterSpec& filter,
                                   std::span<const double> scales, std::size_t depth) {
  if (filter.is_proxy()) throw InvalidInput("factorization needs a coarse filter");
  if (depth == 0) throw InvalidInput("factorization depth must be >= 1");
  const SpacePtr& space = op.space();
  const std::size_t n_points = space->size();
  const auto schedule = sorted_scales(scales);

  std::vector<Subset> outer_sets;
  std::vector<Subset> inner_sets;
  std::vector<double> chosen;
  std::vector<double> defects;
  std::size_t cursor = 0;
  for (std::size_t n = 1; n <= depth; ++n) {
    const double target = 1.0 / static_cast<double>(n * n);
    bool found = false;
    for (; cursor < schedule.size(); ++cursor) {
      Subset candidate = filter.generator(space, schedule[cursor]);
      if (candidate.none()) continue;
      if (n > 1 && !candidate.is_subset_of(shrink(inner_sets.back(), 1.0))) continue;
      const double defect = operator_norm(restrict_rows(op, candidate.mask()));
      if (defect > target) continue;
      Subset inner = shrink(candidate, 1.0);
      chosen.push_back(schedule[cursor]);
      defects.push_back(defect);
      outer_sets.push_back(std::move(candidate));
      inner_sets.push_back(std::move(inner));
      ++cursor;
      found = true;
      break;
    }
    if (!found) break;
  }
  if (outer_sets.empty()) {
    throw Obstruction("decay schedule unattainable within window: achieved depth 0");
  }

  std::vector<double> theta(n_points, 0.0);
  std::size_t achieved = 0;
  for (std::size_t n = 0; n < outer_sets.size(); ++n) {
    Cutoff c;
    try {
      c = cutoff(outer_sets[n], inner_sets[n], 1.0);
    } catch (const InvalidInput&) {
      break;  // G_n empty: the window ran out
    }
    for (PointId x = 0; x < n_points; ++x) theta[x] += c.theta[x];
    ++achieved;
  }
  if (achieved == 0) throw Obstruction("decay schedule unattainable within window: achieved depth 0");

  Factorization out{.phi = std::vector<double>(n_points),
                    .theta = theta,
                    .factor = left_multiply([&](PointId x) { return Complex(1.0 + theta[x]); }, op),
                    .chosen_scales = {},
                    .chosen_defects = {}};
  for (PointId x = 0; x < n_points; ++x) out.phi[x] = 1.0 / (1.0 + theta[x]);
  out.chosen_scales.assign(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(achieved));
  out.chosen_defects.assign(defects.begin(), defects.begin() + static_cast<std::ptrdiff_t>(achieved));
  out.requested_depth = depth;
  out.achieved_depth = achieved;

  for (PointId x = 0; x < n_points; ++x) {
    for (const auto& e : op.row(x)) {
      const Complex rebuilt = out.phi[x] * out.factor.at(x, e.col);
      out.residual = std::max(out.residual, std::abs(rebuilt - e.value));
    }
  }
  out.phi_bound_holds = true;
  for (std::size_t m = 1; m <= achieved; ++m) {
    const Subset& fm = outer_sets[m - 1];
    for (PointId x = 0; x < n_points; ++x)
      if (fm.contains(x) && out.phi[x] > 1.0 / static_cast<double>(m) + 1e-15) out.phi_bound_holds = false;
  }
  return out;
}

}  // namespace coarse
