#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <vector>

#include "morsekit/common.hpp"
#include "morsekit/coxeter.hpp"

namespace morsekit {

/// The ModelSpace interface shared by CoxeterFlat and TreeProduct: distance,
/// geodesics, Delta-distance, and the group of the model apartment.
template <class S>
concept ModelSpace = requires(const S& s, const typename S::Point& p, const typename S::Point& q,
                              double t) {
  { s.distance(p, q) } -> std::convertible_to<double>;
  { s.interpolate(p, q, t) } -> std::convertible_to<typename S::Point>;
  { s.delta_distance(p, q) } -> std::convertible_to<Eigen::VectorXd>;
  { s.group() } -> std::convertible_to<const ReflectionGroup&>;
};

/// Finite piecewise-geodesic path: breakpoints with parameters, interpolated
/// by space geodesics.
template <ModelSpace S>
struct PolyPath {
  const S* space = nullptr;
  std::vector<double> times;
  std::vector<typename S::Point> points;

  double t_min() const { return times.front(); }
  double t_max() const { return times.back(); }
  size_t size() const { return points.size(); }

  typename S::Point eval(double t) const {
    if (t <= times.front()) return points.front();
    if (t >= times.back()) return points.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    size_t j = size_t(it - times.begin());
    double t0 = times[j - 1], t1 = times[j];
    double frac = (t1 - t0) <= 0.0 ? 0.0 : (t - t0) / (t1 - t0);
    return space->interpolate(points[j - 1], points[j], frac);
  }

  double length() const {
    double L = 0.0;
    for (size_t i = 0; i + 1 < points.size(); ++i) L += space->distance(points[i], points[i + 1]);
    return L;
  }
};

template <ModelSpace S>
PolyPath<S> make_path(const S& space, std::vector<typename S::Point> points) {
  PolyPath<S> p;
  p.space = &space;
  p.points = std::move(points);
  p.times.resize(p.points.size());
  p.times[0] = 0.0;
  for (size_t i = 1; i < p.points.size(); ++i)
    p.times[i] = p.times[i - 1] + space.distance(p.points[i - 1], p.points[i]);
  return p;
}

/// Default evaluation grid: all breakpoints plus a 4x refinement between
/// consecutive breakpoints.
template <ModelSpace S>
std::vector<double> default_grid(const PolyPath<S>& path, int refine = 4) {
  std::vector<double> g;
  for (size_t i = 0; i + 1 < path.times.size(); ++i) {
    for (int r = 0; r < refine; ++r)
      g.push_back(path.times[i] + (path.times[i + 1] - path.times[i]) * double(r) / refine);
  }
  g.push_back(path.times.back());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

struct QuasiCertificate {
  double L = 1.0;
  double A = 0.0;
};

struct QuasiCheckResult {
  bool pass = true;
  double t1 = 0.0, t2 = 0.0;  // violating pair when !pass
  double worst_lower_slack = 0.0;
  double worst_upper_slack = 0.0;
};

template <ModelSpace S>
QuasiCheckResult check_quasigeodesic(const PolyPath<S>& path, double L, double A,
                                     const std::vector<double>& grid) {
  QuasiCheckResult res;
  res.worst_lower_slack = std::numeric_limits<double>::infinity();
  res.worst_upper_slack = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    auto pi = path.eval(grid[i]);
    for (size_t j = i + 1; j < grid.size(); ++j) {
      auto pj = path.eval(grid[j]);
      double d = path.space->distance(pi, pj);
      double dt = std::abs(grid[j] - grid[i]);
      double lower = dt / L - A;
      double upper = L * dt + A;
      res.worst_lower_slack = std::min(res.worst_lower_slack, d - lower);
      res.worst_upper_slack = std::min(res.worst_upper_slack, upper - d);
      if (d < lower - 1e-9 || d > upper + 1e-9) {
        res.pass = false;
        res.t1 = grid[i];
        res.t2 = grid[j];
        return res;
      }
    }
  }
  return res;
}

struct ChordCheckResult {
  bool pass = true;
  double t1 = 0.0, t2 = 0.0;
  double worst_margin = 0.0;  // min over chords of (type margin - theta margin)
};

template <ModelSpace S>
ChordCheckResult check_theta_regular(const PolyPath<S>& path, const ThetaCone& theta,
                                     const std::vector<double>& grid) {
  ChordCheckResult res;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    auto pi = path.eval(grid[i]);
    for (size_t j = i + 1; j < grid.size(); ++j) {
      auto pj = path.eval(grid[j]);
      Eigen::VectorXd dd = path.space->delta_distance(pi, pj);
      double n = dd.norm();
      if (n <= kNumTol) continue;
      double margin = theta.type_margin(dd / n) - theta.margin();
      if (margin < res.worst_margin) {
        res.worst_margin = margin;
        if (margin < -kNumTol) {
          res.pass = false;
          res.t1 = grid[i];
          res.t2 = grid[j];
        }
      }
    }
  }
  return res;
}

enum class CoarseVerdict { pass, undecided, violation };

struct CoarseCheckResult {
  CoarseVerdict verdict = CoarseVerdict::pass;
  double t1 = 0.0, t2 = 0.0;       // first non-pass chord
  int undecided_count = 0;
  int violation_count = 0;
};

/// Angular distance from the chord type to Theta (0 inside).
inline double type_angle_to_theta(const ThetaCone& theta, const Eigen::VectorXd& type) {
  double margin = theta.type_margin(type);
  return std::max(0.0, theta.margin() - margin);
}

/// Three-valued coarse regularity test. Short chords (d <= 2B) pass with a
/// perturbation witness; long chords pass when the type's angular distance to
/// Theta is below 2 asin(B / (d - 2B)), are violations beyond twice that, and
/// are reported undecided in between.
template <ModelSpace S>
CoarseCheckResult check_coarse_regular(const PolyPath<S>& path, const ThetaCone& theta, double B,
                                       const std::vector<double>& grid) {
  CoarseCheckResult res;
  bool first_flagged = false;
  for (size_t i = 0; i < grid.size(); ++i) {
    auto pi = path.eval(grid[i]);
    for (size_t j = i + 1; j < grid.size(); ++j) {
      auto pj = path.eval(grid[j]);
      double d = path.space->distance(pi, pj);
      CoarseVerdict v;
      if (d <= 2.0 * B + kNumTol) {
        v = CoarseVerdict::pass;
      } else {
        Eigen::VectorXd dd = path.space->delta_distance(pi, pj);
        double alpha = type_angle_to_theta(theta, dd / dd.norm());
        double ratio = std::min(1.0, B / (d - 2.0 * B));
        double thresh = 2.0 * std::asin(ratio);
        if (alpha <= thresh + kNumTol)
          v = CoarseVerdict::pass;
        else if (alpha > 2.0 * thresh + kNumTol)
          v = CoarseVerdict::violation;
        else
          v = CoarseVerdict::undecided;
      }
      if (v != CoarseVerdict::pass) {
        if (v == CoarseVerdict::undecided) ++res.undecided_count;
        if (v == CoarseVerdict::violation) ++res.violation_count;
        if (!first_flagged || (v == CoarseVerdict::violation && res.verdict != CoarseVerdict::violation)) {
          res.t1 = grid[i];
          res.t2 = grid[j];
          first_flagged = true;
        }
        if (v == CoarseVerdict::violation)
          res.verdict = CoarseVerdict::violation;
        else if (res.verdict == CoarseVerdict::pass)
          res.verdict = CoarseVerdict::undecided;
      }
    }
  }
  return res;
}

/// Combine per-chord longitudinality verdicts over all ordered chord pairs of
/// a path into a path verdict.
template <class PointT, class ClassifyFn>
Longitudinality longitudinality_of_path(const std::vector<PointT>& pts, ClassifyFn&& classify_chord) {
  bool all_long = true, all_anti = true, all_non = true;
  bool any = false;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Longitudinality c = classify_chord(pts[i], pts[j]);
      any = true;
      all_long = all_long && c == Longitudinality::longitudinal;
      all_anti = all_anti && c == Longitudinality::anti_longitudinal;
      all_non = all_non && c == Longitudinality::non_longitudinal;
    }
  }
  if (!any) return Longitudinality::non_longitudinal;
  if (all_long) return Longitudinality::longitudinal;
  if (all_anti) return Longitudinality::anti_longitudinal;
  if (all_non) return Longitudinality::non_longitudinal;
  return Longitudinality::mixed;
}

/// Long-chord constant c(Theta, Theta'): every (Theta,B)-regular segment of
/// length >= cB is Theta'-regular. Derived from the Delta-length triangle
/// inequality: sin(alpha/2) <= B/(d-2B).
inline double long_chord_constant(const ThetaCone& theta, const ThetaCone& theta_prime) {
  double de = eps0_pair(theta, theta_prime);
  return 2.0 + 1.0 / std::sin(de / 2.0);
}

struct AsymptoticRegularityReport {
  bool pass = false;
  int tail_start = 0;           // first index from which all types are inside
  double dilation = 0.0;        // tolerance used on the margin
  std::vector<int> outliers;    // indices with types outside the dilated cone
};

/// Tail regularity of direction types of a diverging sequence seen from a
/// basepoint.
template <ModelSpace S>
AsymptoticRegularityReport asymptotic_regularity(const S& space,
                                                 const std::vector<typename S::Point>& sequence,
                                                 const typename S::Point& basepoint,
                                                 const ThetaCone& theta, double dilation = 1e-6) {
  AsymptoticRegularityReport rep;
  rep.dilation = dilation;
  int last_bad = -1;
  for (size_t n = 0; n < sequence.size(); ++n) {
    Eigen::VectorXd dd = space.delta_distance(basepoint, sequence[n]);
    double nn = dd.norm();
    if (nn <= kNumTol) {
      last_bad = int(n);
      continue;
    }
    double margin = theta.type_margin(dd / nn);
    if (margin < theta.margin() - dilation) {
      last_bad = int(n);
      rep.outliers.push_back(int(n));
    }
  }
  rep.tail_start = last_bad + 1;
  // pass when a nonempty tail is Theta-regular (with the dilation slack)
  rep.pass = rep.tail_start < int(sequence.size());
  return rep;
}

}  // namespace morsekit
