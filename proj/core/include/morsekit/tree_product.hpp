#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "morsekit/common.hpp"
#include "morsekit/coxeter.hpp"
#include "morsekit/tree.hpp"

namespace morsekit {

using ProductPoint = std::vector<TreePoint>;

struct RayNotRegular : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotStabilized : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EndsNotOpposite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PointOutsideParallelSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flag at infinity of a tree product: the supported factors and the chosen
/// end (extendable leaf id) in each supported factor. The face type has
/// wall_subset = complement of the support.
struct ProductFlag {
  std::vector<int> support;             // sorted factor indices
  std::vector<int> ends;                // parallel to support
  bool operator==(const ProductFlag& o) const { return support == o.support && ends == o.ends; }
  bool operator!=(const ProductFlag& o) const { return !(*this == o); }
};

/// Ideal direction: per-factor weights (>= 0, unit norm overall) and a target
/// end for each factor with positive weight. The type map sends this to the
/// weight vector in the A1^k chamber.
struct ProductDirection {
  Eigen::VectorXd weights;
  std::vector<int> ends;  // entry meaningful where weights > 0; -1 elsewhere
};

/// Parallel set of a pair of opposite product flags: a line per supported
/// factor, the whole tree elsewhere.
struct ProductParallelSet {
  std::vector<int> support;
  std::vector<int> ends_minus;
  std::vector<int> ends_plus;
};

/// Product of metric trees as a rank-k model space with Weyl group A1^k.
class TreeProduct {
public:
  using Point = ProductPoint;

  explicit TreeProduct(std::vector<MetricTree> factors);

  int rank() const { return int(factors_.size()); }
  const MetricTree& factor(int i) const { return factors_[size_t(i)]; }
  const ReflectionGroup& group() const { return group_; }
  std::string name() const { return "T^" + std::to_string(rank()); }

  double distance(const Point& x, const Point& y) const;
  Point interpolate(const Point& x, const Point& y, double t) const;

  /// Delta-distance: the vector of factor distances, which lies in the A1^k
  /// chamber (the positive orthant).
  Eigen::VectorXd delta_distance(const Point& x, const Point& y) const;
  Eigen::VectorXd segment_type(const Point& x, const Point& y) const;

  FaceType face_of_flag(const ProductFlag& f) const;
  /// The forward flag of a segment: supported factors are those with
  /// positive displacement; ends extend the factor geodesics beyond y.
  ProductFlag forward_flag(const Point& x, const Point& y, const FaceType& face) const;
  ProductFlag backward_flag(const Point& x, const Point& y, const FaceType& face) const;

  bool flag_x_opposite(const ProductFlag& a, const ProductFlag& b, const Point& x) const;

  bool cone_membership(const Point& x, const ProductFlag& tau, const Point& y, double tol = 1e-9) const;
  double cone_distance(const Point& x, const ProductFlag& tau, const Point& y) const;
  bool theta_cone_membership(const Point& x, const ProductFlag& tau, const Point& y,
                             const ThetaCone& theta) const;

  ProductParallelSet parallel_set(const ProductFlag& tau_minus, const ProductFlag& tau_plus) const;
  double parallel_set_distance(const Point& x, const ProductParallelSet& P) const;
  bool in_parallel_set(const Point& x, const ProductParallelSet& P, double tol = 1e-9) const;

  /// Unit-speed ray from x with the given ideal direction.
  Point ray_point(const Point& x, const ProductDirection& xi, double t) const;

  /// Segment-regularity against a face: positive displacement on every
  /// supported factor.
  bool segment_taumod_regular(const Point& x, const Point& y, const FaceType& face) const;
  SegmentRegularity segment_regularity(const Point& x, const Point& y, const ThetaCone& theta) const;

  Longitudinality classify_direction_in_parallel_set(const ProductParallelSet& P, const Point& x,
                                                     const Point& y, double tol = 1e-9) const;

  Point sample_point(uint64_t seed, uint64_t index, double max_overshoot = 2.0) const;

private:
  std::vector<MetricTree> factors_;
  ReflectionGroup group_;
};

/// Diamond in a tree product: a factor segment on supported factors, the
/// whole tree elsewhere.
class ProductDiamond {
public:
  ProductDiamond(const TreeProduct& X, ProductPoint x_minus, ProductPoint x_plus, const FaceType& face);

  const ProductPoint& tip_minus() const { return x_minus_; }
  const ProductPoint& tip_plus() const { return x_plus_; }
  const std::vector<int>& support() const { return support_; }
  const TreeProduct& space() const { return *space_; }

  bool membership(const ProductPoint& z, double tol = 1e-9) const;
  double distance(const ProductPoint& z) const;
  ProductPoint project(const ProductPoint& z) const;
  double theta_membership_margin(const ProductPoint& z, const ThetaCone& theta) const;

  /// Hemisphere case: exactly one supported factor in a product of >= 2.
  bool hemisphere_case() const;
  /// Do two members lie in a common cross section (hemisphere case)?
  bool same_cross_section(const ProductPoint& a, const ProductPoint& b, double tol = 1e-9) const;

private:
  const TreeProduct* space_;
  ProductPoint x_minus_, x_plus_;
  std::vector<int> support_;
};

struct DiveReport {
  double entry_time = 0.0;
  double bound = 0.0;
  double distance_to_set = 0.0;
  double entry_angle = 0.0;
  double eps0 = 0.0;
  bool pass = false;
};

/// Prop-style diving estimate: a Theta-regular ray toward the parallel set's
/// forward flag enters the set within (sin eps0)^{-1} d(x, P), with entry
/// angle at least eps0.
DiveReport ray_dive_check(const TreeProduct& X, const ProductPoint& x, const ProductDirection& xi,
                          const ProductParallelSet& P, const ThetaCone& theta);

struct LeaveConeReport {
  double exit_time = 0.0;   // +inf when the ray stays in the cone
  bool vacuous = false;
  double worst_slack = 0.0;  // min over grid of d(rho(t),V) - (t-t0) sin eps0
  bool pass = false;
};

LeaveConeReport ray_leave_cone_check(const TreeProduct& X, const ProductPoint& x,
                                     const ProductDirection& rho, const ProductFlag& cone_flag,
                                     const ThetaCone& theta, double t_max, int grid);

struct StabilizationResult {
  ProductFlag limit;
  double radius_achieved = 0.0;
  double max_cone_distance = 0.0;
};

/// Flag-convergence criterion: truncated cones of the flag sequence must
/// coincide on radii growing monotonically over the sample; the points x_n
/// must stay within D of the limit cone.
StabilizationResult truncated_cone_stabilization(const TreeProduct& X, const ProductPoint& x,
                                                 const std::vector<ProductFlag>& flags,
                                                 const std::vector<ProductPoint>& points, double D);

}  // namespace morsekit
