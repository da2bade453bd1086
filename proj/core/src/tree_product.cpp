#include "morsekit/tree_product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morsekit/rng.hpp"

namespace morsekit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TreeProduct::TreeProduct(std::vector<MetricTree> factors)
    : factors_(std::move(factors)), group_(ReflectionGroup::a1k(int(factors_.size()))) {
  if (factors_.empty()) throw TreeFormatError("tree product needs at least one factor");
}

double TreeProduct::distance(const Point& x, const Point& y) const {
  double s = 0.0;
  for (int i = 0; i < rank(); ++i) {
    double d = factors_[i].distance(x[i], y[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

TreeProduct::Point TreeProduct::interpolate(const Point& x, const Point& y, double t) const {
  Point p(rank());
  for (int i = 0; i < rank(); ++i) {
    double d = factors_[i].distance(x[i], y[i]);
    p[i] = factors_[i].point_on_geodesic(x[i], y[i], t * d);
  }
  return p;
}

Eigen::VectorXd TreeProduct::delta_distance(const Point& x, const Point& y) const {
  Eigen::VectorXd v(rank());
  for (int i = 0; i < rank(); ++i) v(i) = factors_[i].distance(x[i], y[i]);
  return v;
}

Eigen::VectorXd TreeProduct::segment_type(const Point& x, const Point& y) const {
  Eigen::VectorXd v = delta_distance(x, y);
  double n = v.norm();
  if (n <= kNumTol) throw DegenerateSegment("segment_type: x == y");
  return v / n;
}

FaceType TreeProduct::face_of_flag(const ProductFlag& f) const {
  FaceType face;
  for (int i = 0; i < rank(); ++i)
    if (std::find(f.support.begin(), f.support.end(), i) == f.support.end())
      face.wall_subset.insert(i);
  return face;
}

ProductFlag TreeProduct::forward_flag(const Point& x, const Point& y, const FaceType& face) const {
  if (!segment_taumod_regular(x, y, face))
    throw IrregularSegment("forward_flag: segment is not tau_mod-regular");
  ProductFlag flag;
  for (int i = 0; i < rank(); ++i) {
    if (face.wall_subset.count(i)) continue;
    flag.support.push_back(i);
    // Extend the factor geodesic beyond y_i toward some end: pick the end
    // behind y_i as seen from x_i, deterministically the smallest id.
    int chosen = -1;
    for (int e : factors_[i].ends()) {
      if (factors_[i].on_ray(x[i], e, y[i])) {
        chosen = e;
        break;
      }
    }
    if (chosen < 0) throw RayNotRegular("forward_flag: no extendable end beyond the segment");
    flag.ends.push_back(chosen);
  }
  return flag;
}

ProductFlag TreeProduct::backward_flag(const Point& x, const Point& y, const FaceType& face) const {
  return forward_flag(y, x, face);
}

bool TreeProduct::flag_x_opposite(const ProductFlag& a, const ProductFlag& b, const Point& x) const {
  if (a.support != b.support) return false;
  for (size_t s = 0; s < a.support.size(); ++s) {
    int i = a.support[s];
    int ea = a.ends[s], eb = b.ends[s];
    if (ea == eb) return false;
    if (!factors_[i].on_line(x[i], ea, eb)) return false;
  }
  return true;
}

bool TreeProduct::cone_membership(const Point& x, const ProductFlag& tau, const Point& y,
                                  double tol) const {
  for (size_t s = 0; s < tau.support.size(); ++s) {
    int i = tau.support[s];
    if (!factors_[i].on_ray(x[i], tau.ends[s], y[i], tol)) return false;
  }
  return true;
}

double TreeProduct::cone_distance(const Point& x, const ProductFlag& tau, const Point& y) const {
  double s2 = 0.0;
  for (size_t s = 0; s < tau.support.size(); ++s) {
    int i = tau.support[s];
    const MetricTree& T = factors_[i];
    // distance from y_i to the ray [x_i, end): project to a segment from x_i
    // far enough toward the end.
    double reach = T.distance(x[i], y[i]) + 1.0;
    TreePoint far = T.point_toward_end(x[i], tau.ends[s], reach);
    auto [p, d] = T.project_to_segment(y[i], x[i], far);
    (void)p;
    s2 += d * d;
  }
  return std::sqrt(s2);
}

bool TreeProduct::theta_cone_membership(const Point& x, const ProductFlag& tau, const Point& y,
                                        const ThetaCone& theta) const {
  if (!cone_membership(x, tau, y)) return false;
  Eigen::VectorXd d = delta_distance(x, y);
  double n = d.norm();
  if (n <= kNumTol) return true;
  return theta.contains_type(d / n);
}

ProductParallelSet TreeProduct::parallel_set(const ProductFlag& tau_minus,
                                             const ProductFlag& tau_plus) const {
  if (tau_minus.support != tau_plus.support)
    throw EndsNotOpposite("parallel_set: flags have different supports");
  ProductParallelSet P;
  P.support = tau_plus.support;
  for (size_t s = 0; s < P.support.size(); ++s) {
    if (tau_minus.ends[s] == tau_plus.ends[s])
      throw EndsNotOpposite("parallel_set: factor ends coincide, no bi-infinite line");
    P.ends_minus.push_back(tau_minus.ends[s]);
    P.ends_plus.push_back(tau_plus.ends[s]);
  }
  return P;
}

double TreeProduct::parallel_set_distance(const Point& x, const ProductParallelSet& P) const {
  double s2 = 0.0;
  for (size_t s = 0; s < P.support.size(); ++s) {
    int i = P.support[s];
    double d = factors_[i].line_distance(x[i], P.ends_minus[s], P.ends_plus[s]);
    s2 += d * d;
  }
  return std::sqrt(s2);
}

bool TreeProduct::in_parallel_set(const Point& x, const ProductParallelSet& P, double tol) const {
  return parallel_set_distance(x, P) <= tol;
}

TreeProduct::Point TreeProduct::ray_point(const Point& x, const ProductDirection& xi, double t) const {
  Point p(rank());
  for (int i = 0; i < rank(); ++i) {
    double w = xi.weights(i);
    if (w <= 0.0) {
      p[i] = x[i];
    } else {
      p[i] = factors_[i].point_toward_end(x[i], xi.ends[size_t(i)], w * t);
    }
  }
  return p;
}

bool TreeProduct::segment_taumod_regular(const Point& x, const Point& y, const FaceType& face) const {
  if (distance(x, y) <= kNumTol) return false;
  for (int i = 0; i < rank(); ++i) {
    if (face.wall_subset.count(i)) continue;
    if (factors_[i].distance(x[i], y[i]) <= kNumTol) return false;
  }
  return true;
}

SegmentRegularity TreeProduct::segment_regularity(const Point& x, const Point& y,
                                                  const ThetaCone& theta) const {
  if (!segment_taumod_regular(x, y, theta.face())) return SegmentRegularity::irregular;
  Eigen::VectorXd t = segment_type(x, y);
  if (theta.contains_type(t)) return SegmentRegularity::theta_regular;
  return SegmentRegularity::taumod_regular_only;
}

Longitudinality TreeProduct::classify_direction_in_parallel_set(const ProductParallelSet& P,
                                                                const Point& x, const Point& y,
                                                                double tol) const {
  if (!in_parallel_set(x, P, 1e-7) || !in_parallel_set(y, P, 1e-7))
    throw PointOutsideParallelSet("classify: point off the parallel set");
  bool all_fwd = true, all_bwd = true;
  for (size_t s = 0; s < P.support.size(); ++s) {
    int i = P.support[s];
    double d = factors_[i].distance(x[i], y[i]);
    if (d <= tol) {
      all_fwd = all_bwd = false;
      break;
    }
    bool fwd = factors_[i].on_ray(x[i], P.ends_plus[s], y[i], tol);
    bool bwd = factors_[i].on_ray(x[i], P.ends_minus[s], y[i], tol);
    all_fwd = all_fwd && fwd;
    all_bwd = all_bwd && bwd;
  }
  if (all_fwd) return Longitudinality::longitudinal;
  if (all_bwd) return Longitudinality::anti_longitudinal;
  return Longitudinality::non_longitudinal;
}

TreeProduct::Point TreeProduct::sample_point(uint64_t seed, uint64_t index,
                                             double max_overshoot) const {
  Point p(rank());
  for (int i = 0; i < rank(); ++i)
    p[i] = factors_[i].sample_point(seed + uint64_t(i) * 7919u, index, max_overshoot);
  return p;
}

ProductDiamond::ProductDiamond(const TreeProduct& X, ProductPoint x_minus, ProductPoint x_plus,
                               const FaceType& face)
    : space_(&X), x_minus_(std::move(x_minus)), x_plus_(std::move(x_plus)) {
  if (!X.segment_taumod_regular(x_minus_, x_plus_, face))
    throw IrregularSegment("product diamond: tip segment is not tau_mod-regular");
  for (int i = 0; i < X.rank(); ++i)
    if (!face.wall_subset.count(i)) support_.push_back(i);
}

bool ProductDiamond::membership(const ProductPoint& z, double tol) const {
  for (int i : support_) {
    if (!space_->factor(i).on_segment(z[i], x_minus_[i], x_plus_[i], tol)) return false;
  }
  return true;
}

double ProductDiamond::distance(const ProductPoint& z) const {
  double s2 = 0.0;
  for (int i : support_) {
    auto [p, d] = space_->factor(i).project_to_segment(z[i], x_minus_[i], x_plus_[i]);
    (void)p;
    s2 += d * d;
  }
  return std::sqrt(s2);
}

ProductPoint ProductDiamond::project(const ProductPoint& z) const {
  ProductPoint p = z;
  for (int i : support_) {
    p[i] = space_->factor(i).project_to_segment(z[i], x_minus_[i], x_plus_[i]).first;
  }
  return p;
}

double ProductDiamond::theta_membership_margin(const ProductPoint& z, const ThetaCone& theta) const {
  auto tip_margin = [&](const ProductPoint& tip) {
    Eigen::VectorXd d = space_->delta_distance(tip, z);
    double n = d.norm();
    if (n <= kNumTol) return M_PI;  // tips belong by convention
    for (int i : support_) {
      if (!space_->factor(i).on_segment(z[i], x_minus_[i], x_plus_[i], 1e-9)) return -distance(z);
    }
    return theta.type_margin(d / n) - theta.margin();
  };
  return std::min(tip_margin(x_minus_), tip_margin(x_plus_));
}

bool ProductDiamond::hemisphere_case() const {
  return support_.size() == 1 && space_->rank() >= 2;
}

bool ProductDiamond::same_cross_section(const ProductPoint& a, const ProductPoint& b,
                                        double tol) const {
  for (int i : support_) {
    if (space_->factor(i).distance(a[i], b[i]) > tol) return false;
  }
  return true;
}

DiveReport ray_dive_check(const TreeProduct& X, const ProductPoint& x, const ProductDirection& xi,
                          const ProductParallelSet& P, const ThetaCone& theta) {
  DiveReport rep;
  rep.eps0 = theta.eps0();

  // Regularity of the direction: the type must lie in Theta and the
  // supported weights must point to the P-defining forward ends.
  Eigen::VectorXd type = xi.weights / xi.weights.norm();
  if (!theta.contains_type(type))
    throw RayNotRegular("ray_dive_check: direction type outside Theta");
  for (size_t s = 0; s < P.support.size(); ++s) {
    int i = P.support[s];
    if (xi.weights(i) <= 0.0 || xi.ends[size_t(i)] != P.ends_plus[s])
      throw RayNotRegular("ray_dive_check: direction does not point to the set's forward flag");
  }

  rep.distance_to_set = X.parallel_set_distance(x, P);
  rep.bound = rep.distance_to_set / std::sin(theta.eps0());

  // Per-factor entry times: the factor ray reaches the factor line at
  // d(x_i, L_i) / a_i; the product ray enters P at the maximum.
  double t_star = 0.0;
  for (size_t s = 0; s < P.support.size(); ++s) {
    int i = P.support[s];
    double di = X.factor(i).line_distance(x[i], P.ends_minus[s], P.ends_plus[s]);
    t_star = std::max(t_star, di / xi.weights(i));
  }
  rep.entry_time = t_star;

  // Entry angle: the direction back toward x at the entry point, measured
  // against the tangent branches of P. Per factor the backward branch is
  // off the line exactly when x_i projects to the entry coordinate.
  ProductPoint z = X.ray_point(x, xi, t_star);
  double dzx = X.distance(z, x);
  if (dzx <= 1e-12) {
    rep.entry_angle = M_PI / 2.0;
  } else {
    double off2 = 0.0;
    for (size_t s = 0; s < P.support.size(); ++s) {
      int i = P.support[s];
      const MetricTree& T = X.factor(i);
      double dfac = T.distance(z[i], x[i]);
      if (dfac <= 1e-12) continue;
      auto [proj, dline] = T.project_to_line(x[i], P.ends_minus[s], P.ends_plus[s]);
      bool off_line = dline > 1e-9 && T.distance(proj, z[i]) <= 1e-9;
      if (off_line) off2 += (dfac / dzx) * (dfac / dzx);
    }
    rep.entry_angle = std::asin(std::clamp(std::sqrt(off2), 0.0, 1.0));
  }

  bool in_set = X.in_parallel_set(z, P, 1e-7);
  rep.pass = in_set && rep.entry_time <= rep.bound + 1e-9 &&
             (rep.distance_to_set <= 1e-9 || rep.entry_angle >= theta.eps0() - 1e-9);
  return rep;
}

LeaveConeReport ray_leave_cone_check(const TreeProduct& X, const ProductPoint& x,
                                     const ProductDirection& rho, const ProductFlag& cone_flag,
                                     const ThetaCone& theta, double t_max, int grid) {
  LeaveConeReport rep;
  Eigen::VectorXd type = rho.weights / rho.weights.norm();
  if (!theta.contains_type(type))
    throw RayNotRegular("ray_leave_cone_check: ray type outside Theta");

  // Exit time: per supported factor, the divergence distance of the factor
  // ray from the cone ray, divided by the factor speed.
  double t0 = kInf;
  for (size_t s = 0; s < cone_flag.support.size(); ++s) {
    int i = cone_flag.support[s];
    double w = rho.weights(i);
    if (w <= 0.0) continue;  // factor stays at x_i, still on the cone ray
    int ray_end = rho.ends[size_t(i)];
    double div = X.factor(i).ray_divergence(x[i], cone_flag.ends[s], ray_end);
    t0 = std::min(t0, div / w);
  }
  rep.exit_time = t0;
  if (!std::isfinite(t0) || t0 >= t_max) {
    rep.vacuous = true;
    rep.pass = true;
    rep.worst_slack = 0.0;
    return rep;
  }

  double worst = kInf;
  for (int g = 0; g <= grid; ++g) {
    double t = t0 + (t_max - t0) * double(g) / double(grid);
    ProductPoint p = X.ray_point(x, rho, t);
    double d = X.cone_distance(x, cone_flag, p);
    worst = std::min(worst, d - (t - t0) * std::sin(theta.eps0()));
  }
  rep.worst_slack = worst;
  rep.pass = worst >= -1e-9;
  return rep;
}

StabilizationResult truncated_cone_stabilization(const TreeProduct& X, const ProductPoint& x,
                                                 const std::vector<ProductFlag>& flags,
                                                 const std::vector<ProductPoint>& points, double D) {
  if (flags.empty()) throw NotStabilized("no flags given");
  for (size_t n = 1; n < flags.size(); ++n)
    if (flags[n].support != flags[0].support)
      throw NotStabilized("flag supports differ along the sequence");

  // Coincidence radius of the truncated cones of two flags at x: the
  // smallest per-factor ray divergence (scaled by nothing: the factor rays
  // are traversed at full radius in the worst direction).
  auto coincidence_radius = [&](const ProductFlag& a, const ProductFlag& b) {
    double r = kInf;
    for (size_t s = 0; s < a.support.size(); ++s) {
      int i = a.support[s];
      r = std::min(r, X.factor(i).ray_divergence(x[i], a.ends[s], b.ends[s]));
    }
    return r;
  };

  // r_n = min over m >= n of the coincidence radius with later flags; the
  // criterion demands monotone growth over the sample.
  std::vector<double> radii(flags.size(), kInf);
  for (size_t n = 0; n < flags.size(); ++n)
    for (size_t m = n; m < flags.size(); ++m)
      radii[n] = std::min(radii[n], coincidence_radius(flags[n], flags[m]));
  for (size_t n = 1; n < flags.size(); ++n)
    if (radii[n] < radii[n - 1] - 1e-9)
      throw NotStabilized("coincidence radius does not grow monotonically");
  if (!(radii.back() > 0.0))
    throw NotStabilized("contradictory ends persist at the end of the sample");

  StabilizationResult res;
  res.limit = flags.back();
  res.radius_achieved = radii.back();
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, X.cone_distance(x, res.limit, p));
  res.max_cone_distance = worst;
  if (worst > D + 1e-7)
    throw NotStabilized("sample points exceed the D-neighborhood of the limit cone");
  return res;
}

}  // namespace morsekit
