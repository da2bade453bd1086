#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "morsekit/finsler.hpp"
#include "morsekit/flat.hpp"
#include "morsekit/regularity.hpp"
#include "morsekit/rng.hpp"
#include "morsekit/tree_product.hpp"

namespace morsekit {

struct NoRegularWitness : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DirectionsOutsideTheta : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- per-space adapters ----------------------------------------------------

inline FlatDiamond make_diamond(const CoxeterFlat& s, const FlatPoint& a, const FlatPoint& b,
                                const FaceType& face) {
  return FlatDiamond(s, a, b, face);
}
inline ProductDiamond make_diamond(const TreeProduct& s, const ProductPoint& a, const ProductPoint& b,
                                   const FaceType& face) {
  return ProductDiamond(s, a, b, face);
}

/// Theta-regular witness pair oriented B-close to (x, y): the chord type is
/// pushed into Theta along the connecting arc. Returns the pair and the
/// larger endpoint perturbation.
struct WitnessQuality {
  double perturbation = 0.0;
  bool theta_regular = false;
};

template <ModelSpace S>
Eigen::VectorXd push_type_into_theta(const S& space, const ThetaCone& theta,
                                     const Eigen::VectorXd& type) {
  if (theta.contains_type(type)) return type;
  Eigen::VectorXd target = theta.barycenter_type();
  double lo = 0.0, hi = 1.0;  // blend toward the barycenter until inside
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    Eigen::VectorXd t = ((1.0 - mid) * type + mid * target).normalized();
    Eigen::VectorXd dom = space.group().chamber_project(t).dominant;
    if (theta.contains_type(dom))
      hi = mid;
    else
      lo = mid;
  }
  return ((1.0 - hi) * type + hi * target).normalized();
}

inline std::pair<std::pair<FlatPoint, FlatPoint>, WitnessQuality> witness_regular_pair(
    const CoxeterFlat& space, const FlatPoint& x, const FlatPoint& y, const ThetaCone& theta) {
  Eigen::VectorXd v = y - x;
  double d = v.norm();
  WitnessQuality q;
  if (d <= kNumTol) {
    // Degenerate chord: a short Theta segment centered at the point.
    Eigen::VectorXd dir = theta.barycenter_type();
    double h = 1e-6;
    q.perturbation = h;
    q.theta_regular = true;
    return {{x - h * dir, y + h * dir}, q};
  }
  ChamberProjection cp = space.group().chamber_project(v / d);
  Eigen::VectorXd pushed = push_type_into_theta(space, theta, cp.dominant);
  Eigen::VectorXd v_star = d * (cp.witness.transpose() * pushed);
  FlatPoint m = 0.5 * (x + y);
  FlatPoint xs = m - 0.5 * v_star;
  FlatPoint ys = m + 0.5 * v_star;
  q.perturbation = std::max((xs - x).norm(), (ys - y).norm());
  q.theta_regular = theta.contains_type(space.group().chamber_project(ys - xs).dominant);
  return {{xs, ys}, q};
}

inline std::pair<std::pair<ProductPoint, ProductPoint>, WitnessQuality> witness_regular_pair(
    const TreeProduct& space, const ProductPoint& x, const ProductPoint& y, const ThetaCone& theta) {
  Eigen::VectorXd dd = space.delta_distance(x, y);
  double d = dd.norm();
  WitnessQuality q;
  if (d <= kNumTol)
    throw NoRegularWitness("witness_regular_pair: degenerate chord in a tree product");
  Eigen::VectorXd pushed = push_type_into_theta(space, theta, Eigen::VectorXd(dd / d));
  // Slide/extend the far endpoint along the factor geodesics to realize the
  // target factor distances d * pushed_i.
  ProductPoint ys = y;
  double pert2 = 0.0;
  for (int i = 0; i < space.rank(); ++i) {
    const MetricTree& T = space.factor(i);
    double want = d * pushed(i);
    double have = dd(i);
    if (std::abs(want - have) <= kNumTol) continue;
    if (want < have) {
      ys[size_t(i)] = T.point_on_geodesic(x[size_t(i)], y[size_t(i)], want);
    } else {
      // extend beyond y_i toward any end visible through y_i
      int chosen = -1;
      for (int e : T.ends()) {
        if (T.on_ray(x[size_t(i)], e, y[size_t(i)], 1e-7)) {
          chosen = e;
          break;
        }
      }
      if (chosen < 0) throw NoRegularWitness("witness_regular_pair: no extendable end to grow along");
      ys[size_t(i)] = T.point_toward_end(x[size_t(i)], chosen, want);
    }
    pert2 += (want - have) * (want - have);
  }
  q.perturbation = std::sqrt(pert2);
  Eigen::VectorXd check = space.delta_distance(x, ys);
  q.theta_regular = theta.contains_type(check / check.norm());
  return {{x, ys}, q};
}

// ---- Morse verification -----------------------------------------------------

struct MorseWindow {
  double t0 = 0.0, t1 = 0.0;
  double D = 0.0;
  double tip_perturbation = 0.0;
};

struct MorseReport {
  std::string path_id;
  double D_measured = 0.0;
  double witness_perturbation = 0.0;
  double L = 1.0, A = 0.0, B = 0.0;
  double theta_margin = 0.0;
  std::vector<MorseWindow> table;
  std::string to_json() const;
};

/// Measure the distance of the path to the diamond of a Theta-regular
/// witness pair B-close to the endpoint chord, plus the dyadic subinterval
/// table. When the generator knows the exact regular witness (noise-free
/// skeleton), pass it; otherwise one is constructed from the chord.
template <ModelSpace S>
MorseReport verify_morse(const PolyPath<S>& path, const ThetaCone& theta, double B,
                         const FaceType& face, double L, double A,
                         std::optional<std::pair<typename S::Point, typename S::Point>> witness =
                             std::nullopt,
                         int window_levels = 5, int samples_per_window = 0) {
  const S& space = *path.space;
  MorseReport rep;
  rep.L = L;
  rep.A = A;
  rep.B = B;
  rep.theta_margin = theta.margin();

  std::pair<typename S::Point, typename S::Point> tips;
  if (witness.has_value()) {
    tips = *witness;
    Eigen::VectorXd dd = space.delta_distance(tips.first, tips.second);
    if (!theta.contains_type(dd / dd.norm()))
      throw NoRegularWitness("verify_morse: supplied witness is not Theta-regular");
    rep.witness_perturbation = std::max(space.distance(tips.first, path.points.front()),
                                        space.distance(tips.second, path.points.back()));
  } else {
    auto [w, q] = witness_regular_pair(space, path.points.front(), path.points.back(), theta);
    if (!q.theta_regular)
      throw NoRegularWitness("verify_morse: failed to construct a Theta-regular witness");
    tips = w;
    rep.witness_perturbation = q.perturbation;
  }
  if (rep.witness_perturbation > 1.05 * B + 1e-9)
    throw NoRegularWitness("verify_morse: witness exceeds the oriented B-closeness budget");

  auto dia = make_diamond(space, tips.first, tips.second, face);
  double worst = 0.0;
  for (const auto& p : path.points) worst = std::max(worst, dia.distance(p));
  rep.D_measured = worst;

  // Dyadic windows: lengths 2^j aligned to the 2^{j-1} grid, largest
  // `window_levels` levels fitting the parameter range.
  double T = path.t_max() - path.t_min();
  int j_hi = int(std::floor(std::log2(std::max(T, 1e-12))));
  int j_lo = std::max(0, j_hi - window_levels + 1);
  for (int j = j_hi; j >= j_lo; --j) {
    double len = std::pow(2.0, j);
    double step = 0.5 * len;
    for (double start = path.t_min(); start + len <= path.t_max() + 1e-9; start += step) {
      double t0 = start, t1 = std::min(start + len, path.t_max());
      MorseWindow win;
      win.t0 = t0;
      win.t1 = t1;
      auto a = path.eval(t0);
      auto b = path.eval(t1);
      typename S::Point wa = a, wb = b;
      try {
        auto [w, q] = witness_regular_pair(space, a, b, theta);
        wa = w.first;
        wb = w.second;
        win.tip_perturbation = q.perturbation;
      } catch (const std::exception&) {
        continue;  // degenerate window chord; skip
      }
      try {
        auto wdia = make_diamond(space, wa, wb, face);
        double wd = 0.0;
        int count = samples_per_window > 0 ? samples_per_window : 16;
        for (int s = 0; s <= count; ++s) {
          double t = t0 + (t1 - t0) * double(s) / double(count);
          wd = std::max(wd, wdia.distance(path.eval(t)));
        }
        win.D = wd;
      } catch (const IrregularSegment&) {
        continue;
      }
      rep.table.push_back(win);
    }
  }
  return rep;
}

// ---- path generators ---------------------------------------------------------

/// Zigzag of segments s_n * v_{n mod 2} from a base point (flat case).
PolyPath<CoxeterFlat> zigzag_generator(const CoxeterFlat& space, const ThetaCone& theta,
                                       const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                       const std::vector<double>& lengths, const FlatPoint& base);

/// Zigzag in a tree product: alternating weight vectors toward fixed ends.
PolyPath<TreeProduct> zigzag_generator(const TreeProduct& space, const ThetaCone& theta,
                                       const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                       const std::vector<double>& lengths, const ProductPoint& base,
                                       const std::vector<int>& ends);

struct RayFit {
  Eigen::VectorXd direction;
  double sup_distance = 0.0;
  int grid = 0;
};

/// Best-fitting geodesic ray from the first breakpoint (coarse direction
/// grid plus local refinement); reports the sup distance of breakpoints to
/// the fitted ray.
RayFit best_ray_fit(const PolyPath<CoxeterFlat>& path);

// ---- ideal endpoints ---------------------------------------------------------

template <class FlagT>
struct IdealEndpoint {
  FlagT flag;
  double stabilization_radius = 0.0;
  double sup_cone_distance = 0.0;
};

IdealEndpoint<FlagPlacement> ideal_endpoint(const PolyPath<CoxeterFlat>& path, const ThetaCone& theta,
                                            double B, const FaceType& face);
IdealEndpoint<ProductFlag> ideal_endpoint(const PolyPath<TreeProduct>& path, const ThetaCone& theta,
                                          double B, const FaceType& face);

template <ModelSpace S>
PolyPath<S> reversed_path(const PolyPath<S>& p) {
  PolyPath<S> r;
  r.space = p.space;
  r.points.assign(p.points.rbegin(), p.points.rend());
  double T = p.t_max();
  for (auto it = p.times.rbegin(); it != p.times.rend(); ++it) r.times.push_back(T - *it);
  return r;
}

struct QuasilineFlatResult {
  FlagPlacement tau_minus, tau_plus;
  bool opposite = false;
  double sup_distance = 0.0;  // to the parallel set (0 in a flat)
};
struct QuasilineProductResult {
  ProductFlag tau_minus, tau_plus;
  bool opposite = false;
  double sup_distance = 0.0;
};

QuasilineFlatResult quasiline_parallel_set(const PolyPath<CoxeterFlat>& path, const ThetaCone& theta,
                                           double B, const FaceType& face);
QuasilineProductResult quasiline_parallel_set(const PolyPath<TreeProduct>& path,
                                              const ThetaCone& theta, double B, const FaceType& face);

// ---- hyperbolicity and antipodality -------------------------------------------

struct HyperbolicityResult {
  double delta = 0.0;
  long long quadruples_checked = 0;
  bool exact = false;
};

/// Four-point condition defect over quadruples of a finite net with the given
/// pairwise distances. Exact enumeration while the quadruple count fits the
/// budget, seeded subsampling beyond.
HyperbolicityResult hyperbolicity_estimate(const Eigen::MatrixXd& distances,
                                           long long max_quadruples = 20000000,
                                           uint64_t seed = 0x4E57);

enum class AntipodalityVerdict { equal, antipodal, violation };

AntipodalityVerdict antipodality_check(const CoxeterFlat& space, const FlagPlacement& a,
                                       const FlagPlacement& b);
AntipodalityVerdict antipodality_check(const TreeProduct& space, const ProductFlag& a,
                                       const ProductFlag& b, const ProductPoint& common_point);

}  // namespace morsekit
