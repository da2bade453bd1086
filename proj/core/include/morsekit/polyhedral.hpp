#pragma once

#include <Eigen/Dense>
#include <vector>

namespace morsekit {

/// Convex polyhedron { x : A x <= b } in dimension <= ~6.
///
/// Projections are exact: the active constraint set is enumerated over all
/// subsets of size <= dim, each candidate solved as an equality-constrained
/// least-squares problem, and the nearest feasible candidate wins. At the
/// scale of this library (few constraints, tiny dimension) this beats an
/// iterative QP both on reliability and on code size.
struct Polyhedron {
  Eigen::MatrixXd A;  // m x d
  Eigen::VectorXd b;  // m

  int dim() const { return int(A.cols()); }
  int num_constraints() const { return int(A.rows()); }

  bool contains(const Eigen::VectorXd& x, double tol) const;
  /// Signed violation: max_i (A x - b)_i  (<= 0 inside).
  double violation(const Eigen::VectorXd& x) const;
};

struct ProjectionResult {
  Eigen::VectorXd point;
  double distance = 0.0;
};

/// Exact Euclidean projection of y onto the polyhedron. The polyhedron must
/// be nonempty; callers in this library only build nonempty ones.
ProjectionResult project_onto_polyhedron(const Polyhedron& P, const Eigen::VectorXd& y);

/// Exact Euclidean projection of y onto the polyhedral cone { x : A x >= 0 }
/// translated to the apex. Equivalent to project_onto_polyhedron with b = 0
/// and flipped signs; kept as a convenience.
ProjectionResult project_onto_cone(const Eigen::MatrixXd& inward_normals,
                                   const Eigen::VectorXd& apex,
                                   const Eigen::VectorXd& y);

/// Angle between the direction v and a polyhedral cone C = { A x >= 0, x in
/// span constraints }, i.e. the angular distance from v/|v| to C cap S^{d-1}.
/// Pi/2 when the projection of v onto C vanishes. `equalities` rows force
/// <n, x> = 0 (used for cone faces that live inside walls).
double angle_to_cone(const Eigen::MatrixXd& inequality_normals,
                     const Eigen::MatrixXd& equality_normals,
                     const Eigen::VectorXd& v);

/// Vertices of a bounded polyhedron (brute-force over d-subsets of facets).
std::vector<Eigen::VectorXd> polyhedron_vertices(const Polyhedron& P, double tol = 1e-9);

}  // namespace morsekit
