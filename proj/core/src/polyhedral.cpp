#include "morsekit/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace morsekit {

namespace {

// Enumerate subsets of {0..m-1} of size <= k, calling f(subset).
template <class F>
void for_each_subset_upto(int m, int k, F&& f) {
  std::vector<int> subset;
  f(subset);  // empty set
  std::function<void(int)> rec = [&](int start) {
    if (int(subset.size()) == k) return;
    for (int i = start; i < m; ++i) {
      subset.push_back(i);
      f(subset);
      rec(i + 1);
      subset.pop_back();
    }
  };
  rec(0);
}

}  // namespace

bool Polyhedron::contains(const Eigen::VectorXd& x, double tol) const {
  return violation(x) <= tol;
}

double Polyhedron::violation(const Eigen::VectorXd& x) const {
  if (A.rows() == 0) return 0.0;
  return (A * x - b).maxCoeff();
}

ProjectionResult project_onto_polyhedron(const Polyhedron& P, const Eigen::VectorXd& y) {
  const double feas_tol = 1e-9;
  if (P.contains(y, feas_tol)) {
    return {y, 0.0};
  }
  const int d = P.dim();
  const int m = P.num_constraints();
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_pt = y;

  for_each_subset_upto(m, d, [&](const std::vector<int>& J) {
    if (J.empty()) return;  // y itself already ruled out
    Eigen::MatrixXd AJ(int(J.size()), d);
    Eigen::VectorXd bJ(int(J.size()));
    for (size_t r = 0; r < J.size(); ++r) {
      AJ.row(int(r)) = P.A.row(J[r]);
      bJ(int(r)) = P.b(J[r]);
    }
    // minimize |x - y|^2 s.t. AJ x = bJ  ->  x = y - AJ^T lambda,
    // (AJ AJ^T) lambda = AJ y - bJ  (least squares for rank deficiency)
    Eigen::MatrixXd G = AJ * AJ.transpose();
    Eigen::VectorXd rhs = AJ * y - bJ;
    Eigen::VectorXd lambda = G.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd x = y - AJ.transpose() * lambda;
    if ((AJ * x - bJ).cwiseAbs().maxCoeff() > 1e-7) return;  // inconsistent subset
    if (!P.contains(x, 1e-8)) return;
    double dist = (x - y).norm();
    if (dist < best) {
      best = dist;
      best_pt = x;
    }
  });
  return {best_pt, best};
}

ProjectionResult project_onto_cone(const Eigen::MatrixXd& inward_normals,
                                   const Eigen::VectorXd& apex,
                                   const Eigen::VectorXd& y) {
  Polyhedron P;
  P.A = -inward_normals;
  P.b = -inward_normals * apex;
  return project_onto_polyhedron(P, y);
}

double angle_to_cone(const Eigen::MatrixXd& inequality_normals,
                     const Eigen::MatrixXd& equality_normals,
                     const Eigen::VectorXd& v) {
  const int d = int(v.size());
  int mi = int(inequality_normals.rows());
  int me = int(equality_normals.rows());
  Polyhedron P;
  P.A.resize(mi + 2 * me, d);
  P.b = Eigen::VectorXd::Zero(mi + 2 * me);
  if (mi > 0) P.A.topRows(mi) = -inequality_normals;
  for (int i = 0; i < me; ++i) {
    P.A.row(mi + 2 * i) = equality_normals.row(i);
    P.A.row(mi + 2 * i + 1) = -equality_normals.row(i);
  }
  double n = v.norm();
  if (n == 0.0) return 0.0;
  Eigen::VectorXd u = v / n;
  ProjectionResult pr = project_onto_polyhedron(P, u);
  double pn = pr.point.norm();
  if (pn <= 1e-12) return M_PI / 2.0;
  double c = u.dot(pr.point) / pn;
  c = std::clamp(c, -1.0, 1.0);
  double ang = std::acos(c);
  return std::min(ang, M_PI / 2.0);
}

std::vector<Eigen::VectorXd> polyhedron_vertices(const Polyhedron& P, double tol) {
  const int d = P.dim();
  const int m = P.num_constraints();
  std::vector<Eigen::VectorXd> verts;
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;

  std::vector<int> comb(d);
  std::function<void(int, int)> rec = [&](int start, int chosen) {
    if (chosen == d) {
      Eigen::MatrixXd AJ(d, d);
      Eigen::VectorXd bJ(d);
      for (int r = 0; r < d; ++r) {
        AJ.row(r) = P.A.row(comb[r]);
        bJ(r) = P.b(comb[r]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(AJ);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(bJ);
      if (!P.contains(x, tol)) return;
      for (const auto& w : verts)
        if ((w - x).norm() <= tol) return;
      verts.push_back(x);
      return;
    }
    for (int i = start; i < m; ++i) {
      comb[chosen] = i;
      rec(i + 1, chosen + 1);
    }
  };
  if (d <= m) rec(0, 0);
  return verts;
}

}  // namespace morsekit
