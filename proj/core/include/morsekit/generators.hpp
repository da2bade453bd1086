#pragma once

#include <Eigen/Dense>
#include <vector>

#include "morsekit/coxeter.hpp"
#include "morsekit/morse.hpp"
#include "morsekit/regularity.hpp"
#include "morsekit/rng.hpp"
#include "morsekit/tree.hpp"
#include "morsekit/tree_product.hpp"

namespace morsekit {

/// Random tree by preferential attachment with edge lengths in [0.2, 2];
/// every leaf is flagged extendable so lines and rays always exist.
MetricTree random_tree(PhiloxRng& rng, int num_vertices);

TreeProduct random_tree_product(PhiloxRng& rng, int num_factors, int max_vertices);

/// Uniform chamber type with Theta margin at least theta's margin
/// (rejection sampling over the chamber simplex).
Eigen::VectorXd random_theta_type(PhiloxRng& rng, const ThetaCone& theta);

/// Random flat point with coordinates in [-scale, scale].
FlatPoint random_flat_point(PhiloxRng& rng, int rank, double scale);

/// Noisy zigzag in a flat: alternating Theta directions with per-breakpoint
/// perturbations of size at most `noise`. Returns the noisy path and the
/// clean endpoint pair (the regularity witness).
struct NoisyZigzagFlat {
  PolyPath<CoxeterFlat> path;
  FlatPoint clean_start, clean_end;
};
NoisyZigzagFlat noisy_zigzag_flat(const CoxeterFlat& space, const ThetaCone& theta,
                                  const Eigen::VectorXd& v1, const Eigen::VectorXd& v2, int steps,
                                  double step_len, double noise, PhiloxRng& rng);

struct NoisyZigzagProduct {
  PolyPath<TreeProduct> path;
  ProductPoint clean_start, clean_end;
};
NoisyZigzagProduct noisy_zigzag_product(const TreeProduct& space, const ThetaCone& theta,
                                        const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                        int steps, double step_len, double noise, PhiloxRng& rng);

/// Theta-regular embedded tripod in a product of tripod trees: three legs
/// from a common branch vertex toward pairwise-diverging end tuples, each
/// traversed with the balanced weight vector. Points sample the legs;
/// `intrinsic` carries the path metric of the image.
struct EmbeddedTripod {
  TreeProduct space;
  std::vector<ProductPoint> points;
  std::vector<int> leg;        // leg index per point; -1 for the center
  std::vector<double> arc;     // arc-length parameter per point
  Eigen::MatrixXd intrinsic;   // intrinsic path-metric distances
  Eigen::VectorXd chord_type;  // common Delta-type of every ordered chord
};
EmbeddedTripod embedded_tripod(int rank, double leg_length, int samples_per_leg);

}  // namespace morsekit
