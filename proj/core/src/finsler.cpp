#include "morsekit/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace morsekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Free walls of the face (the support coordinates for A1^k).
std::vector<int> free_walls(const ReflectionGroup& G, const FaceType& face) {
  std::vector<int> out;
  for (int i = 0; i < G.rank(); ++i)
    if (!face.wall_subset.count(i)) out.push_back(i);
  return out;
}

bool group_is_a1k(const ReflectionGroup& G) {
  return int(G.diagram_components().size()) == G.rank();
}

// ----- generic box oracle -------------------------------------------------
//
// Box [0, L_1] x ... x [0, L_k] with `oriented` coordinate mask: a step is
// longitudinal iff every oriented delta is strictly positive,
// anti-longitudinal iff every oriented delta is strictly negative; admissible
// steps are the rest. Free coordinates never affect admissibility.
struct BoxOracleProblem {
  Eigen::VectorXd box;            // side lengths
  std::vector<bool> oriented;
  Eigen::VectorXd a, b;           // endpoints in box coordinates
};

bool box_step_admissible(const std::vector<bool>& oriented, const Eigen::VectorXd& delta) {
  bool all_pos = true, all_neg = true;
  bool any_oriented = false;
  for (int i = 0; i < delta.size(); ++i) {
    if (!oriented[size_t(i)]) continue;
    any_oriented = true;
    if (delta(i) <= 0.0) all_pos = false;
    if (delta(i) >= 0.0) all_neg = false;
  }
  if (!any_oriented) return true;
  return !all_pos && !all_neg;
}

OracleResult box_finsler_oracle(const BoxOracleProblem& prob, int n) {
  const int k = int(prob.box.size());
  if (k > 3) throw std::invalid_argument("box oracle supports rank <= 3");
  if (n < 2) throw ResolutionTooCoarse("box oracle: grid too coarse");

  // Lattice indices per axis: n+1 nodes, plus exact endpoint coordinates
  // snapped in (the endpoints are lattice-aligned for the acceptance
  // queries; generic points get their own fractional layer on each axis).
  std::vector<std::vector<double>> axis(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= n; ++j) axis[i].push_back(prob.box(i) * double(j) / double(n));
    axis[i].push_back(std::clamp(prob.a(i), 0.0, prob.box(i)));
    axis[i].push_back(std::clamp(prob.b(i), 0.0, prob.box(i)));
    std::sort(axis[i].begin(), axis[i].end());
    axis[i].erase(std::unique(axis[i].begin(), axis[i].end(),
                              [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                  axis[i].end());
  }
  std::vector<int> dims(k);
  long long total = 1;
  for (int i = 0; i < k; ++i) {
    dims[i] = int(axis[i].size());
    total *= dims[i];
  }
  auto flatten = [&](const std::vector<int>& idx) {
    long long f = 0;
    for (int i = 0; i < k; ++i) f = f * dims[i] + idx[i];
    return f;
  };
  auto coords = [&](const std::vector<int>& idx) {
    Eigen::VectorXd c(k);
    for (int i = 0; i < k; ++i) c(i) = axis[i][size_t(idx[i])];
    return c;
  };
  auto locate = [&](const Eigen::VectorXd& p) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) {
      double best = kInf;
      for (int j = 0; j < dims[i]; ++j) {
        double d = std::abs(axis[i][size_t(j)] - p(i));
        if (d < best) {
          best = d;
          idx[i] = j;
        }
      }
      if (best > 1e-9) throw ResolutionTooCoarse("box oracle: endpoint off the lattice");
    }
    return idx;
  };

  // Steps: all nonzero offsets in {-1,0,1}^k that are admissible in sign
  // pattern (signs are what matters, not sizes).
  std::vector<std::vector<int>> steps;
  std::vector<int> off(k, -1);
  while (true) {
    bool nonzero = false;
    for (int i = 0; i < k; ++i) nonzero = nonzero || off[i] != 0;
    if (nonzero) {
      Eigen::VectorXd d(k);
      for (int i = 0; i < k; ++i) d(i) = off[i];
      if (box_step_admissible(prob.oriented, d)) steps.push_back(off);
    }
    int i = 0;
    for (; i < k; ++i) {
      if (off[i] < 1) {
        ++off[i];
        break;
      }
      off[i] = -1;
    }
    if (i == k) break;
  }

  long long src = flatten(locate(prob.a));
  long long dst = flatten(locate(prob.b));
  std::vector<double> dist(size_t(total), kInf);
  using QE = std::pair<double, long long>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  dist[size_t(src)] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[size_t(u)] + 1e-15) continue;
    if (u == dst) break;
    // unflatten
    std::vector<int> idx(k);
    long long rem = u;
    for (int i = k - 1; i >= 0; --i) {
      idx[i] = int(rem % dims[i]);
      rem /= dims[i];
    }
    Eigen::VectorXd cu = coords(idx);
    for (const auto& st : steps) {
      std::vector<int> jdx = idx;
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        jdx[i] += st[i];
        if (jdx[i] < 0 || jdx[i] >= dims[i]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Eigen::VectorXd cv = coords(jdx);
      // re-check sign admissibility with the true deltas (non-uniform axes)
      if (!box_step_admissible(prob.oriented, cv - cu)) continue;
      double w = (cv - cu).norm();
      long long v = flatten(jdx);
      if (du + w < dist[size_t(v)] - 1e-15) {
        dist[size_t(v)] = du + w;
        pq.push({du + w, v});
      }
    }
  }
  OracleResult res;
  res.resolution = n;
  if (!std::isfinite(dist[size_t(dst)])) {
    res.infinite = true;
    res.value = kInf;
  } else {
    res.value = dist[size_t(dst)];
  }
  return res;
}

// Box-coordinate chart of an A1^k flat diamond: signed offsets from the
// minus tip, oriented coordinates on the face's free walls.
BoxOracleProblem flat_box_chart(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y) {
  const CoxeterFlat& flat = dia.flat();
  const ReflectionGroup& G = flat.group();
  const int k = G.rank();
  Eigen::VectorXd d = dia.tip_plus() - dia.tip_minus();
  BoxOracleProblem prob;
  prob.box.resize(k);
  prob.oriented.assign(size_t(k), false);
  prob.a.resize(k);
  prob.b.resize(k);
  auto fw = free_walls(G, dia.face());
  std::vector<double> sign(size_t(k), 1.0);
  for (int i : fw) {
    sign[size_t(i)] = d(i) >= 0 ? 1.0 : -1.0;
    prob.oriented[size_t(i)] = true;
  }
  for (int i = 0; i < k; ++i) {
    if (prob.oriented[size_t(i)]) {
      prob.box(i) = std::abs(d(i));
      prob.a(i) = sign[size_t(i)] * (x(i) - dia.tip_minus()(i));
      prob.b(i) = sign[size_t(i)] * (y(i) - dia.tip_minus()(i));
    } else {
      // Free coordinate: bound the lattice by the query range.
      double lo = std::min(x(i), y(i)), hi = std::max(x(i), y(i));
      double pad = 0.25 * std::max(1e-9, hi - lo);
      prob.box(i) = (hi - lo) + 2 * pad;
      prob.a(i) = x(i) - lo + pad;
      prob.b(i) = y(i) - lo + pad;
    }
  }
  return prob;
}

// ----- rank-2 polygon oracle ----------------------------------------------

OracleResult polygon_finsler_oracle(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y,
                                    int n) {
  // Bounding box over piece vertices and query points.
  std::vector<Eigen::VectorXd> verts;
  for (const auto& piece : dia.pieces())
    for (const auto& v : polyhedron_vertices(piece)) verts.push_back(v);
  verts.push_back(x);
  verts.push_back(y);
  Eigen::Vector2d lo = verts[0], hi = verts[0];
  for (const auto& v : verts) {
    lo = lo.cwiseMin(Eigen::Vector2d(v));
    hi = hi.cwiseMax(Eigen::Vector2d(v));
  }
  Eigen::Vector2d span = hi - lo;
  double h = std::max(span(0), span(1)) / double(n);
  if (h <= 0) throw ResolutionTooCoarse("polygon oracle: degenerate bounding box");
  int nx = int(std::ceil(span(0) / h)) + 1;
  int ny = int(std::ceil(span(1) / h)) + 1;

  auto inside = [&](const Eigen::Vector2d& p) { return dia.membership(p); };

  // Nodes: lattice points inside the diamond, plus the two query points.
  std::vector<Eigen::Vector2d> nodes;
  std::vector<int> id(size_t(nx * ny), -1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      Eigen::Vector2d p = lo + Eigen::Vector2d(i * h, j * h);
      p = p.cwiseMin(hi);
      if (inside(p)) {
        id[size_t(i * ny + j)] = int(nodes.size());
        nodes.push_back(p);
      }
    }
  }
  int src = int(nodes.size());
  nodes.push_back(x);
  int dst = int(nodes.size());
  nodes.push_back(y);

  auto admissible = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    if ((b - a).norm() <= 1e-15) return false;
    return dia.classify_segment(a, b) == Longitudinality::non_longitudinal;
  };

  std::vector<std::vector<std::pair<int, double>>> adj(nodes.size());
  auto connect = [&](int u, int v) {
    if (u == v) return;
    if (!admissible(nodes[size_t(u)], nodes[size_t(v)])) return;
    double w = (nodes[size_t(u)] - nodes[size_t(v)]).norm();
    adj[size_t(u)].push_back({v, w});
  };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      int u = id[size_t(i * ny + j)];
      if (u < 0) continue;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          int i2 = i + di, j2 = j + dj;
          if (i2 < 0 || i2 >= nx || j2 < 0 || j2 >= ny) continue;
          int v = id[size_t(i2 * ny + j2)];
          if (v >= 0) connect(u, v);
        }
      }
    }
  }
  // Query points connect to nearby lattice nodes.
  for (int q : {src, dst}) {
    for (int u = 0; u < int(nodes.size()); ++u) {
      if (u == q) continue;
      if ((nodes[size_t(u)] - nodes[size_t(q)]).norm() <= 1.6 * h) {
        connect(q, u);
        connect(u, q);
      }
    }
  }
  connect(src, dst);
  connect(dst, src);

  std::vector<double> dist(nodes.size(), kInf);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  dist[size_t(src)] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[size_t(u)] + 1e-15) continue;
    for (auto [v, w] : adj[size_t(u)]) {
      if (du + w < dist[size_t(v)] - 1e-15) {
        dist[size_t(v)] = du + w;
        pq.push({du + w, v});
      }
    }
  }
  OracleResult res;
  res.resolution = n;
  if (!std::isfinite(dist[size_t(dst)])) {
    if ((x - y).norm() <= 1e-12) {
      res.value = 0.0;
      return res;
    }
    throw ResolutionTooCoarse("polygon oracle: admissible graph is disconnected at this resolution");
  }
  res.value = dist[size_t(dst)];
  return res;
}

double busemann_slope_max(const ReflectionGroup& G, const FaceType& face, const Eigen::VectorXd& xi) {
  // max over non-longitudinal unit directions u of <xi, u>; the maximum over
  // the closed complement of the open stars is attained on the star
  // boundary, handled exactly by the cone projections.
  double best = -1.0;
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(G.rank(), G.rank());
  for (int si : G.face_stabilizer(face)) {
    const Eigen::MatrixXd& w = G.element(si);
    for (int i = 0; i < G.rank(); ++i) {
      if (face.wall_subset.count(i)) continue;
      Eigen::MatrixXd ineq(G.rank() - 1, G.rank());
      int r = 0;
      for (int j = 0; j < G.rank(); ++j) {
        if (j == i) continue;
        ineq.row(r++) = (w * G.simple_roots()[j]).transpose();
      }
      Eigen::MatrixXd eq(1, G.rank());
      eq.row(0) = (w * G.simple_roots()[i]).transpose();
      double ang = angle_to_cone(ineq, eq, xi);
      best = std::max(best, std::cos(ang));
    }
  }
  return best;
}

}  // namespace

bool star_is_hemisphere(const ReflectionGroup& group, const FaceType& face) {
  auto fw = free_walls(group, face);
  if (fw.size() != 1) return false;
  // The single free wall must be its own diagram component (A1 join factor).
  for (const auto& comp : group.diagram_components()) {
    if (std::find(comp.begin(), comp.end(), fw[0]) != comp.end())
      return comp.size() == 1 && group.rank() >= 2;
  }
  return false;
}

double expansion_constant(const ReflectionGroup& group, const FaceType& face,
                          const Eigen::VectorXd& direction_type) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(group.rank(), group.rank());
  if (!group.in_open_star(face, id, direction_type))
    throw NotLongitudinal("expansion_constant: direction type is not longitudinal for this face");
  Eigen::VectorXd xi = direction_type / direction_type.norm();
  double M = busemann_slope_max(group, face, xi);
  if (M <= 0.0) return kInf;  // hemisphere-like: no admissible progress at all
  return 1.0 / M;
}

namespace {

FinslerEstimate finsler_lower_bound(const ReflectionGroup& G, const FaceType& face,
                                    const Eigen::VectorXd& type_vec, double d,
                                    Longitudinality cls) {
  FinslerEstimate est;
  if (cls == Longitudinality::non_longitudinal || d <= kNumTol) {
    est.lower = d;
    return est;
  }
  double M = busemann_slope_max(G, face, type_vec);
  est.lower = M <= 0.0 ? kInf : d / M;
  return est;
}

}  // namespace

FinslerEstimate finsler_upper(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y) {
  const CoxeterFlat& flat = dia.flat();
  const ReflectionGroup& G = flat.group();
  if (!dia.membership(x) || !dia.membership(y))
    throw PointOutsideDiamond("finsler_upper: point outside the diamond");

  double d = (y - x).norm();
  Longitudinality cls = dia.classify_segment(x, y);
  Eigen::VectorXd dir = d <= kNumTol ? Eigen::VectorXd(Eigen::VectorXd::Zero(G.rank()))
                                     : Eigen::VectorXd((y - x) / d);
  Eigen::VectorXd type_vec = d <= kNumTol ? dir : Eigen::VectorXd(G.chamber_project(dir).dominant);

  FinslerEstimate est = finsler_lower_bound(G, dia.face(), type_vec, d, cls);
  if (cls == Longitudinality::non_longitudinal || d <= kNumTol) {
    est.upper = d;
    return est;
  }

  if (star_is_hemisphere(G, dia.face())) {
    // Cross sections: constant coordinate on the single free wall.
    int i = free_walls(G, dia.face())[0];
    if (std::abs(x(i) - y(i)) <= kNumTol) {
      Eigen::VectorXd diff = y - x;
      diff(i) = 0.0;
      est.upper = diff.norm();
      est.lower = est.upper;
    } else {
      est.infinite = true;
      est.upper = kInf;
      est.lower = kInf;
    }
    return est;
  }

  // Orient so that the pair is longitudinal.
  const FlatPoint& p = cls == Longitudinality::anti_longitudinal ? y : x;
  const FlatPoint& q = cls == Longitudinality::anti_longitudinal ? x : y;

  double best = kInf;
  auto try_mid = [&](const FlatPoint& z) {
    if (!dia.membership(z)) return;
    if (dia.classify_segment(p, z) == Longitudinality::longitudinal) return;
    if (dia.classify_segment(p, z) == Longitudinality::anti_longitudinal) return;
    if (dia.classify_segment(z, q) == Longitudinality::longitudinal) return;
    if (dia.classify_segment(z, q) == Longitudinality::anti_longitudinal) return;
    best = std::min(best, (z - p).norm() + (q - z).norm());
  };

  if (group_is_a1k(G)) {
    // Staircase corners: split the displacement over a proper subset of the
    // oriented coordinates.
    auto fw = free_walls(G, dia.face());
    Eigen::VectorXd delta = q - p;
    int k = int(fw.size());
    for (int mask = 1; mask < (1 << k) - 1; ++mask) {
      FlatPoint z = p;
      for (int c = 0; c < k; ++c)
        if (mask & (1 << c)) z(fw[size_t(c)]) += delta(fw[size_t(c)]);
      // free coordinates ride along with the first leg
      for (int i = 0; i < G.rank(); ++i)
        if (!dia.face().wall_subset.empty() && dia.face().wall_subset.count(i)) z(i) = q(i);
      try_mid(z);
    }
  }
  if (G.rank() == 2) {
    // Boundary-ray intersections of the two tip cones translated to p and q.
    auto boundary_dirs = [&](const FlagPlacement& tau) {
      std::vector<Eigen::Vector2d> dirs;
      for (int si : G.face_stabilizer(tau.face)) {
        Eigen::MatrixXd g = tau.witness * G.element(si).transpose();
        for (int i = 0; i < 2; ++i) {
          if (tau.face.wall_subset.count(i)) continue;
          // boundary ray of chamber g Delta on wall i: the other vertex dir
          for (int j = 0; j < 2; ++j) {
            if (j == i) continue;
            dirs.push_back(Eigen::Vector2d(g * G.vertex_directions()[j]));
          }
        }
      }
      return dirs;
    };
    for (const auto& u : boundary_dirs(dia.flag_plus())) {
      for (const auto& v : boundary_dirs(dia.flag_minus())) {
        // p + s u = q + t v, s,t >= 0
        Eigen::Matrix2d A;
        A.col(0) = u;
        A.col(1) = -v;
        if (std::abs(A.determinant()) < 1e-12) continue;
        Eigen::Vector2d st = A.inverse() * (Eigen::Vector2d(q - p));
        if (st(0) < -1e-12 || st(1) < -1e-12) continue;
        FlatPoint z = p + st(0) * Eigen::VectorXd(u);
        try_mid(z);
      }
    }
  }
  est.upper = best;
  if (!std::isfinite(best)) est.infinite = true;
  return est;
}

FinslerEstimate finsler_upper(const ProductDiamond& dia, const ProductPoint& x,
                              const ProductPoint& y) {
  const TreeProduct& X = dia.space();
  if (!dia.membership(x, 1e-7) || !dia.membership(y, 1e-7))
    throw PointOutsideDiamond("finsler_upper: point outside the diamond");

  double d = X.distance(x, y);
  FinslerEstimate est;
  if (dia.hemisphere_case()) {
    if (dia.same_cross_section(x, y)) {
      double s2 = 0.0;
      for (int i = 0; i < X.rank(); ++i) {
        if (std::find(dia.support().begin(), dia.support().end(), i) != dia.support().end()) continue;
        double di = X.factor(i).distance(x[i], y[i]);
        s2 += di * di;
      }
      est.upper = est.lower = std::sqrt(s2);
    } else {
      est.infinite = true;
      est.upper = est.lower = kInf;
    }
    return est;
  }

  // Segment classification by factor displacement signs along the diamond
  // orientation.
  bool all_fwd = true, all_bwd = true, any_move = false;
  std::vector<double> seg(dia.support().size());
  for (size_t s = 0; s < dia.support().size(); ++s) {
    int i = dia.support()[s];
    const MetricTree& T = X.factor(i);
    double cx = T.distance(dia.tip_minus()[i], x[i]);
    double cy = T.distance(dia.tip_minus()[i], y[i]);
    seg[s] = cy - cx;
    if (std::abs(seg[s]) > kNumTol) any_move = true;
    if (seg[s] <= kNumTol) all_fwd = false;
    if (seg[s] >= -kNumTol) all_bwd = false;
  }
  bool longitudinal_pair = any_move && (all_fwd || all_bwd);
  // off-support displacement is never longitudinal
  double off2 = 0.0;
  for (int i = 0; i < X.rank(); ++i) {
    if (std::find(dia.support().begin(), dia.support().end(), i) != dia.support().end()) continue;
    double di = X.factor(i).distance(x[i], y[i]);
    off2 += di * di;
  }
  est = FinslerEstimate{};
  if (!longitudinal_pair) {
    est.lower = est.upper = d;
    return est;
  }
  Eigen::VectorXd type_vec = X.delta_distance(x, y);
  type_vec /= type_vec.norm();
  est = finsler_lower_bound(X.group(), X.face_of_flag(ProductFlag{dia.support(), {}}), type_vec, d,
                            Longitudinality::longitudinal);

  // Staircase over factor subsets, carrying the off-support displacement on
  // the first leg.
  int k = int(dia.support().size());
  double best = kInf;
  for (int mask = 1; mask < (1 << k) - 1; ++mask) {
    double leg1 = off2, leg2 = 0.0;
    for (int c = 0; c < k; ++c) {
      double t = seg[size_t(c)] * seg[size_t(c)];
      if (mask & (1 << c))
        leg1 += t;
      else
        leg2 += t;
    }
    best = std::min(best, std::sqrt(leg1) + std::sqrt(leg2));
  }
  est.upper = best;
  if (!std::isfinite(best)) est.infinite = true;
  return est;
}

OracleResult finsler_oracle(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y, int n) {
  const ReflectionGroup& G = dia.flat().group();
  if (!dia.membership(x) || !dia.membership(y))
    throw PointOutsideDiamond("finsler_oracle: point outside the diamond");
  if (star_is_hemisphere(G, dia.face())) {
    FinslerEstimate est = finsler_upper(dia, x, y);
    OracleResult res;
    res.resolution = n;
    res.value = est.upper;
    res.infinite = est.infinite;
    return res;
  }
  if (group_is_a1k(G)) return box_finsler_oracle(flat_box_chart(dia, x, y), n);
  if (G.rank() == 2) return polygon_finsler_oracle(dia, x, y, n);
  throw std::invalid_argument("finsler_oracle: unsupported diamond geometry");
}

OracleResult finsler_oracle(const ProductDiamond& dia, const ProductPoint& x, const ProductPoint& y,
                            int n) {
  const TreeProduct& X = dia.space();
  if (!dia.membership(x, 1e-7) || !dia.membership(y, 1e-7))
    throw PointOutsideDiamond("finsler_oracle: point outside the diamond");
  if (dia.hemisphere_case()) {
    FinslerEstimate est = finsler_upper(dia, x, y);
    OracleResult res;
    res.resolution = n;
    res.value = est.upper;
    res.infinite = est.infinite;
    return res;
  }
  if (int(dia.support().size()) != X.rank())
    throw std::invalid_argument("finsler_oracle: partial-support product diamonds not supported");
  // Full support: the diamond is a box in factor arc-length coordinates.
  BoxOracleProblem prob;
  int k = X.rank();
  prob.box.resize(k);
  prob.oriented.assign(size_t(k), true);
  prob.a.resize(k);
  prob.b.resize(k);
  for (int i = 0; i < k; ++i) {
    const MetricTree& T = X.factor(i);
    prob.box(i) = T.distance(dia.tip_minus()[i], dia.tip_plus()[i]);
    prob.a(i) = T.distance(dia.tip_minus()[i], x[i]);
    prob.b(i) = T.distance(dia.tip_minus()[i], y[i]);
  }
  return box_finsler_oracle(prob, n);
}

namespace {

template <class DiamondT, class PointT, class SpaceDist>
ContractionReport contraction_core(const DiamondT& dia, const PointT& x, const PointT& y,
                                   SpaceDist&& space_distance, int segment_samples, int oracle_n) {
  ContractionReport rep;
  rep.segment_length = space_distance(x, y);

  rep.min_clearance = kInf;
  for (int s = 0; s <= segment_samples; ++s) {
    double t = double(s) / double(segment_samples);
    rep.min_clearance = std::min(rep.min_clearance, dia.distance_interp(x, y, t));
  }
  if (rep.min_clearance <= 1e-9)
    throw SegmentMeetsDiamond("contraction_check: the segment meets the diamond");

  auto px = dia.project_point(x);
  auto py = dia.project_point(y);
  rep.hemisphere = dia.is_hemisphere();
  if (rep.hemisphere) {
    rep.cross_section_match = dia.same_section(px, py);
    rep.projected_estimate = rep.cross_section_match ? dia.upper_between(px, py) : kInf;
    rep.pass = rep.cross_section_match &&
               rep.projected_estimate <= (1.0 + kContractionSlack) * rep.segment_length + 1e-12;
  } else {
    double est = dia.upper_between(px, py);
    if (oracle_n > 0) {
      est = std::min(est, dia.oracle_between(px, py, oracle_n));
      rep.used_oracle = true;
    }
    rep.projected_estimate = est;
    rep.pass = est <= (1.0 + kContractionSlack) * rep.segment_length + 1e-12;
  }
  rep.ratio = rep.projected_estimate / std::max(rep.segment_length, 1e-300);
  return rep;
}

struct FlatDiamondOps {
  const FlatDiamond& dia;
  const CoxeterFlat& flat;
  double distance_interp(const FlatPoint& x, const FlatPoint& y, double t) const {
    return dia.distance(x + t * (y - x));
  }
  FlatPoint project_point(const FlatPoint& p) const { return dia.project(p).point; }
  bool is_hemisphere() const { return star_is_hemisphere(flat.group(), dia.face()); }
  bool same_section(const FlatPoint& a, const FlatPoint& b) const {
    for (int i = 0; i < flat.group().rank(); ++i) {
      if (dia.face().wall_subset.count(i)) continue;
      if (std::abs(a(i) - b(i)) > 1e-7) return false;
    }
    return true;
  }
  double upper_between(const FlatPoint& a, const FlatPoint& b) const {
    return finsler_upper(dia, a, b).upper;
  }
  double oracle_between(const FlatPoint& a, const FlatPoint& b, int n) const {
    return finsler_oracle(dia, a, b, n).value;
  }
};

struct ProductDiamondOps {
  const ProductDiamond& dia;
  const TreeProduct& X;
  double distance_interp(const ProductPoint& x, const ProductPoint& y, double t) const {
    return dia.distance(X.interpolate(x, y, t));
  }
  ProductPoint project_point(const ProductPoint& p) const { return dia.project(p); }
  bool is_hemisphere() const { return dia.hemisphere_case(); }
  bool same_section(const ProductPoint& a, const ProductPoint& b) const {
    return dia.same_cross_section(a, b, 1e-7);
  }
  double upper_between(const ProductPoint& a, const ProductPoint& b) const {
    return finsler_upper(dia, a, b).upper;
  }
  double oracle_between(const ProductPoint& a, const ProductPoint& b, int n) const {
    return finsler_oracle(dia, a, b, n).value;
  }
};

}  // namespace

ContractionReport contraction_check(const FlatDiamond& dia, const FlatPoint& x, const FlatPoint& y,
                                    int oracle_n) {
  FlatDiamondOps ops{dia, dia.flat()};
  return contraction_core(ops, x, y,
                          [&](const FlatPoint& a, const FlatPoint& b) { return (a - b).norm(); }, 64,
                          oracle_n);
}

ContractionReport contraction_check(const ProductDiamond& dia, const ProductPoint& x,
                                    const ProductPoint& y, int oracle_n) {
  const TreeProduct& X = dia.space();
  ProductDiamondOps ops{dia, X};
  return contraction_core(ops, x, y,
                          [&](const ProductPoint& a, const ProductPoint& b) { return X.distance(a, b); },
                          64, oracle_n);
}

}  // namespace morsekit
