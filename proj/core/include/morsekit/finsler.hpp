#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "morsekit/common.hpp"
#include "morsekit/flat.hpp"
#include "morsekit/tree_product.hpp"

namespace morsekit {

struct PointOutsideDiamond : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResolutionTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SegmentMeetsDiamond : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two-sided estimate of the modified diamond metric d_dia between two
/// diamond points: `upper` is the length of a constructed admissible
/// (piecewise non-longitudinal) path, `lower` a Busemann-slope bound.
/// `infinite` flags pairs with no admissible connection (hemisphere case,
/// different cross sections).
struct FinslerEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool infinite = false;
};

/// Is the star of this face a closed hemisphere? True exactly when the face
/// misses a single wall of a reducible group whose component at that wall is
/// a 0-sphere factor (A1 join factor).
bool star_is_hemisphere(const ReflectionGroup& group, const FaceType& face);

/// Expansion constant C(type) > 1 for longitudinal directions: the modified
/// metric satisfies d_dia >= C d along directions of this type. Computed by
/// exact maximization of the Busemann slope over the star-boundary cones.
double expansion_constant(const ReflectionGroup& group, const FaceType& face,
                          const Eigen::VectorXd& direction_type);

FinslerEstimate finsler_upper(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y);
FinslerEstimate finsler_upper(const ProductDiamond& dia, const ProductPoint& x,
                              const ProductPoint& y);

struct OracleResult {
  double value = 0.0;
  bool infinite = false;
  int resolution = 0;
};

/// Shortest piecewise non-longitudinal path over an n-per-axis grid graph.
/// Converges to d_dia from above as n grows.
OracleResult finsler_oracle(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y, int n);
OracleResult finsler_oracle(const ProductDiamond& dia, const ProductPoint& x, const ProductPoint& y,
                            int n);

struct ContractionReport {
  double segment_length = 0.0;       // d(x, y)
  double min_clearance = 0.0;        // min sampled distance from the segment to the diamond
  double projected_estimate = 0.0;   // d_dia bound between the projections
  bool used_oracle = false;
  bool hemisphere = false;
  bool cross_section_match = true;   // hemisphere case: projections share a cross section
  double ratio = 0.0;                // estimate / d(x,y)
  bool pass = false;
};

constexpr double kContractionSlack = 1e-6;

ContractionReport contraction_check(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y,
                                    int oracle_n = 0);
ContractionReport contraction_check(const ProductDiamond& dia, const ProductPoint& x,
                                    const ProductPoint& y, int oracle_n = 0);

}  // namespace morsekit
