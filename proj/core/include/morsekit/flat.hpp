#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "morsekit/common.hpp"
#include "morsekit/coxeter.hpp"
#include "morsekit/polyhedral.hpp"

namespace morsekit {

using FlatPoint = Eigen::VectorXd;

/// A placed flag in the model flat: the face type plus a group element whose
/// image of the fundamental face is the placement.
struct FlagPlacement {
  FaceType face;
  Eigen::MatrixXd witness;
};

/// The model flat of a finite reflection group, with the Delta-distance and
/// the cone/diamond machinery realized as explicit polyhedra.
class CoxeterFlat {
public:
  using Point = FlatPoint;

  explicit CoxeterFlat(ReflectionGroup group) : group_(std::move(group)) {}

  const ReflectionGroup& group() const { return group_; }
  int rank() const { return group_.rank(); }
  const std::string& name() const { return group_.name(); }

  double distance(const Point& x, const Point& y) const { return (y - x).norm(); }
  Point interpolate(const Point& x, const Point& y, double t) const { return x + t * (y - x); }

  Eigen::VectorXd delta_distance(const Point& x, const Point& y) const {
    return group_.chamber_project(y - x).dominant;
  }
  /// Unit chamber type of the segment x -> y.
  Eigen::VectorXd segment_type(const Point& x, const Point& y) const;

  SegmentRegularity segment_regularity(const Point& x, const Point& y, const ThetaCone& theta) const;
  bool segment_taumod_regular(const Point& x, const Point& y, const FaceType& face) const;

  /// Placement of the type `face` flag whose open star contains y - x.
  /// Requires tau_mod-regularity of the segment.
  FlagPlacement forward_flag(const Point& x, const Point& y, const FaceType& face) const;
  /// Placement (of the iota face type) whose open star contains x - y.
  FlagPlacement backward_flag(const Point& x, const Point& y, const FaceType& face) const;

  FlagPlacement opposite_flag(const FlagPlacement& pl) const;
  bool flags_equal(const FlagPlacement& a, const FlagPlacement& b) const;
  bool flags_opposite(const FlagPlacement& a, const FlagPlacement& b) const;

  bool cone_membership(const Point& x, const FlagPlacement& tau, const Point& y) const;
  bool theta_cone_membership(const Point& x, const FlagPlacement& tau, const Point& y,
                             const ThetaCone& theta) const;
  /// Distance from y to the Weyl cone V(x, st(tau)).
  double cone_distance(const Point& x, const FlagPlacement& tau, const Point& y) const;

  Longitudinality classify_direction(const FlagPlacement& tau_plus, const FlagPlacement& tau_minus,
                                     const Eigen::VectorXd& dir) const;

private:
  ReflectionGroup group_;
};

/// Diamond in the flat: intersection of the two tip cones, stored as a union
/// of convex polyhedral pieces (one per chamber pair in the two stars).
class FlatDiamond {
public:
  FlatDiamond(const CoxeterFlat& flat, FlatPoint x_minus, FlatPoint x_plus, const FaceType& face);

  const FlatPoint& tip_minus() const { return x_minus_; }
  const FlatPoint& tip_plus() const { return x_plus_; }
  const FaceType& face() const { return face_; }
  const FlagPlacement& flag_plus() const { return tau_plus_; }
  const FlagPlacement& flag_minus() const { return tau_minus_; }
  const std::vector<Polyhedron>& pieces() const { return pieces_; }
  const CoxeterFlat& flat() const { return *flat_; }

  bool membership(const FlatPoint& y, double tol = kNumTol) const;
  double distance(const FlatPoint& y) const;
  ProjectionResult project(const FlatPoint& y) const;

  /// Membership in the Theta-diamond with a signed angular margin: >= 0
  /// inside (the worst type margin over the two tips minus the Theta margin),
  /// negative when outside a tip cone.
  double theta_membership_margin(const FlatPoint& y, const ThetaCone& theta) const;

  Longitudinality classify_segment(const FlatPoint& a, const FlatPoint& b) const;

  /// Deterministic sample points (piece vertices plus interior mixtures).
  std::vector<FlatPoint> sample_points(int interior_per_piece, uint64_t seed) const;

  /// Vertex/facet lists of the pieces as a JSON string, for plotting.
  std::string to_json() const;

private:
  const CoxeterFlat* flat_;
  FlatPoint x_minus_, x_plus_;
  FaceType face_;
  FlagPlacement tau_plus_, tau_minus_;
  std::vector<Polyhedron> pieces_;
};

struct ThicknessReport {
  double b_mid = 0.0;          // max wall functional at the midpoint
  double bound = 0.0;          // -(1/2) d(x-,x+) sin eps0
  bool pass = false;
};

ThicknessReport diamond_thickness_check(const CoxeterFlat& flat, const FlatPoint& x_minus,
                                        const FlatPoint& x_plus, const FaceType& face,
                                        const ThetaCone& theta);

struct CrossSectionReport {
  bool trivial_splitting = false;  // irreducible case: check ran on the whole diamond
  double diameter = 0.0;
  double bound = 0.0;
  double rho0 = 0.0;
  double cross_tip_distance = 0.0;  // d(x1-, x1+)
  bool pass = false;
};

CrossSectionReport cross_section_diameter_check(const CoxeterFlat& flat, const FlatPoint& x_minus,
                                                const FlatPoint& x_plus, const FaceType& face,
                                                const ThetaCone& theta);

struct ContinuityReport {
  double perturbation = 0.0;
  double hausdorff = 0.0;
  double constant_used = 0.0;
  bool within_scale = false;  // perturbation <= delta * d(x1-, x1+)
  bool pass = false;
};

ContinuityReport diamond_continuity_check(const CoxeterFlat& flat, const FlatPoint& x_minus,
                                          const FlatPoint& x_plus, const FlatPoint& xp_minus,
                                          const FlatPoint& xp_plus, const FaceType& face,
                                          const ThetaCone& theta, int samples = 64);

/// Weyl hull of a segment whose type is interior to the face: the flat
/// parallelepiped spanned by the placed face vertex directions.
class WeylHull {
public:
  WeylHull(const CoxeterFlat& flat, FlatPoint x_minus, FlatPoint x_plus, const FaceType& face);

  const std::vector<FlatPoint>& vertices() const { return vertices_; }
  bool membership(const FlatPoint& y, double tol = kNumTol) const;
  bool degenerate() const { return degenerate_; }

private:
  const CoxeterFlat* flat_;
  FlatPoint x_minus_, x_plus_;
  bool degenerate_ = false;
  std::vector<Eigen::VectorXd> axes_;   // scaled edge vectors
  std::vector<double> coefficients_;
  std::vector<FlatPoint> vertices_;
  Eigen::MatrixXd basis_;  // columns: unit axes
};

struct StraightPathReport {
  bool straight = false;
  int violating_vertex = -1;
  bool chords_theta_regular = false;
  bool vertices_in_diamond = false;
  double worst_chord_margin = 0.0;    // min over chords of type margin - theta margin
  double worst_membership_margin = 0.0;
  bool pass = false;
};

StraightPathReport straight_path_check(const CoxeterFlat& flat, const std::vector<FlatPoint>& points,
                                       const FaceType& face, const ThetaCone& theta);

/// L(Theta) = 1 / cos(rho(Theta, xi)) with xi the face barycenter type.
double bounded_detour_constant(const ThetaCone& theta);

struct DetourReport {
  double length = 0.0;
  double endpoint_distance = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool pass = false;
};

DetourReport detour_check(const CoxeterFlat& flat, const std::vector<FlatPoint>& points,
                          const FaceType& face, const ThetaCone& theta);

struct SectorCoincidenceReport {
  double hausdorff_estimate = 0.0;  // truncated sectors up to radius R
  bool hypothesis = false;          // R sin eps0 >= r + D
  bool coincide_up_to_r = false;
  bool pass = false;  // hypothesis implies coincidence
};

SectorCoincidenceReport sector_coincidence_check(const CoxeterFlat& flat, const FlatPoint& tip,
                                                 const FlagPlacement& tau1, const FlagPlacement& tau2,
                                                 const ThetaCone& theta, double R, double r,
                                                 int samples = 256);

}  // namespace morsekit
