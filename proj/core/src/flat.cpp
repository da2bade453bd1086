#include "morsekit/flat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "morsekit/rng.hpp"

namespace morsekit {

namespace {

// Inward normal rows of the chamber cone g * Delta.
Eigen::MatrixXd placed_chamber_normals(const ReflectionGroup& G, const Eigen::MatrixXd& g) {
  Eigen::MatrixXd N(G.rank(), G.rank());
  for (int i = 0; i < G.rank(); ++i) N.row(i) = (g * G.simple_roots()[i]).transpose();
  return N;
}

}  // namespace

Eigen::VectorXd CoxeterFlat::segment_type(const Point& x, const Point& y) const {
  Eigen::VectorXd d = y - x;
  double n = d.norm();
  if (n <= kNumTol) throw DegenerateSegment("segment_type: x == y");
  return group_.chamber_project(d / n).dominant;
}

SegmentRegularity CoxeterFlat::segment_regularity(const Point& x, const Point& y,
                                                  const ThetaCone& theta) const {
  Eigen::VectorXd t = segment_type(x, y);
  FaceType carrier = group_.face_of(t);
  // tau_mod-regular iff the carrier face's walls all belong to the face.
  bool taumod = std::includes(theta.face().wall_subset.begin(), theta.face().wall_subset.end(),
                              carrier.wall_subset.begin(), carrier.wall_subset.end());
  if (!taumod) return SegmentRegularity::irregular;
  if (theta.contains_type(t)) return SegmentRegularity::theta_regular;
  return SegmentRegularity::taumod_regular_only;
}

bool CoxeterFlat::segment_taumod_regular(const Point& x, const Point& y, const FaceType& face) const {
  Eigen::VectorXd d = y - x;
  if (d.norm() <= kNumTol) return false;
  Eigen::VectorXd t = group_.chamber_project(d).dominant;
  FaceType carrier = group_.face_of(t);
  return std::includes(face.wall_subset.begin(), face.wall_subset.end(),
                       carrier.wall_subset.begin(), carrier.wall_subset.end());
}

FlagPlacement CoxeterFlat::forward_flag(const Point& x, const Point& y, const FaceType& face) const {
  if (!segment_taumod_regular(x, y, face))
    throw IrregularSegment("forward_flag: segment is not tau_mod-regular");
  ChamberProjection cp = group_.chamber_project(y - x);
  return FlagPlacement{face, cp.witness.transpose()};
}

FlagPlacement CoxeterFlat::backward_flag(const Point& x, const Point& y, const FaceType& face) const {
  if (!segment_taumod_regular(x, y, face))
    throw IrregularSegment("backward_flag: segment is not tau_mod-regular");
  ChamberProjection cp = group_.chamber_project(x - y);
  return FlagPlacement{group_.iota_face(face), cp.witness.transpose()};
}

FlagPlacement CoxeterFlat::opposite_flag(const FlagPlacement& pl) const {
  Eigen::VectorXd b = group_.face_barycenter(pl.face);
  Eigen::VectorXd v = -(pl.witness * b);
  ChamberProjection cp = group_.chamber_project(v);
  FaceType f = group_.face_of(cp.dominant);
  return FlagPlacement{f, cp.witness.transpose()};
}

bool CoxeterFlat::flags_equal(const FlagPlacement& a, const FlagPlacement& b) const {
  if (a.face != b.face) return false;
  // Same placement iff b.witness^{-1} a.witness fixes the face pointwise,
  // i.e. the placed vertex directions agree.
  for (int j = 0; j < rank(); ++j) {
    if (a.face.wall_subset.count(j)) continue;
    Eigen::VectorXd wa = a.witness * group_.vertex_directions()[j];
    Eigen::VectorXd wb = b.witness * group_.vertex_directions()[j];
    if ((wa - wb).norm() > 1e-8) return false;
  }
  return true;
}

bool CoxeterFlat::flags_opposite(const FlagPlacement& a, const FlagPlacement& b) const {
  return flags_equal(opposite_flag(a), b);
}

bool CoxeterFlat::cone_membership(const Point& x, const FlagPlacement& tau, const Point& y) const {
  Eigen::VectorXd d = y - x;
  if (d.norm() <= kNumTol) return true;
  return group_.in_star(tau.face, tau.witness, d);
}

bool CoxeterFlat::theta_cone_membership(const Point& x, const FlagPlacement& tau, const Point& y,
                                        const ThetaCone& theta) const {
  Eigen::VectorXd d = y - x;
  if (d.norm() <= kNumTol) return true;
  if (!group_.in_star(tau.face, tau.witness, d)) return false;
  return group_.angle_to_star_boundary(tau.face, tau.witness, d) >= theta.margin() - kNumTol;
}

double CoxeterFlat::cone_distance(const Point& x, const FlagPlacement& tau, const Point& y) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i : group_.face_stabilizer(tau.face)) {
    Eigen::MatrixXd g = tau.witness * group_.element(i).transpose();
    Polyhedron piece;
    Eigen::MatrixXd N = placed_chamber_normals(group_, g);
    piece.A = -N;
    piece.b = -N * x;
    best = std::min(best, project_onto_polyhedron(piece, y).distance);
    if (best <= 0.0) return 0.0;
  }
  return best;
}

Longitudinality CoxeterFlat::classify_direction(const FlagPlacement& tau_plus,
                                                const FlagPlacement& tau_minus,
                                                const Eigen::VectorXd& dir) const {
  if (dir.norm() <= kNumTol) return Longitudinality::non_longitudinal;
  if (group_.in_open_star(tau_plus.face, tau_plus.witness, dir)) return Longitudinality::longitudinal;
  if (group_.in_open_star(tau_minus.face, tau_minus.witness, dir))
    return Longitudinality::anti_longitudinal;
  return Longitudinality::non_longitudinal;
}

FlatDiamond::FlatDiamond(const CoxeterFlat& flat, FlatPoint x_minus, FlatPoint x_plus,
                         const FaceType& face)
    : flat_(&flat), x_minus_(std::move(x_minus)), x_plus_(std::move(x_plus)), face_(face) {
  if (!flat.segment_taumod_regular(x_minus_, x_plus_, face))
    throw IrregularSegment("diamond: tip segment is not tau_mod-regular");
  tau_plus_ = flat.forward_flag(x_minus_, x_plus_, face);
  tau_minus_ = flat.backward_flag(x_minus_, x_plus_, face);

  const ReflectionGroup& G = flat.group();
  auto stab_plus = G.face_stabilizer(face_);
  auto stab_minus = G.face_stabilizer(tau_minus_.face);
  for (int i : stab_plus) {
    Eigen::MatrixXd gp = tau_plus_.witness * G.element(i).transpose();
    Eigen::MatrixXd Np = placed_chamber_normals(G, gp);
    for (int j : stab_minus) {
      Eigen::MatrixXd gm = tau_minus_.witness * G.element(j).transpose();
      Eigen::MatrixXd Nm = placed_chamber_normals(G, gm);
      Polyhedron piece;
      piece.A.resize(2 * G.rank(), G.rank());
      piece.b.resize(2 * G.rank());
      piece.A.topRows(G.rank()) = -Np;
      piece.b.head(G.rank()) = -Np * x_minus_;
      piece.A.bottomRows(G.rank()) = -Nm;
      piece.b.tail(G.rank()) = -Nm * x_plus_;
      pieces_.push_back(std::move(piece));
    }
  }
}

bool FlatDiamond::membership(const FlatPoint& y, double tol) const {
  (void)tol;
  return flat_->cone_membership(x_minus_, tau_plus_, y) &&
         flat_->cone_membership(x_plus_, tau_minus_, y);
}

double FlatDiamond::distance(const FlatPoint& y) const {
  return project(y).distance;
}

ProjectionResult FlatDiamond::project(const FlatPoint& y) const {
  ProjectionResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces_) {
    ProjectionResult pr = project_onto_polyhedron(piece, y);
    if (pr.distance < best.distance) best = pr;
    if (best.distance == 0.0) break;
  }
  return best;
}

double FlatDiamond::theta_membership_margin(const FlatPoint& y, const ThetaCone& theta) const {
  const ReflectionGroup& G = flat_->group();
  auto tip_margin = [&](const FlatPoint& tip, const FlagPlacement& tau) {
    Eigen::VectorXd d = y - tip;
    if (d.norm() <= kNumTol) return M_PI;  // tips belong by convention
    if (!G.in_star(tau.face, tau.witness, d)) {
      return -flat_->cone_distance(tip, tau, y);
    }
    return G.angle_to_star_boundary(tau.face, tau.witness, d) - theta.margin();
  };
  return std::min(tip_margin(x_minus_, tau_plus_), tip_margin(x_plus_, tau_minus_));
}

Longitudinality FlatDiamond::classify_segment(const FlatPoint& a, const FlatPoint& b) const {
  return flat_->classify_direction(tau_plus_, tau_minus_, b - a);
}

std::vector<FlatPoint> FlatDiamond::sample_points(int interior_per_piece, uint64_t seed) const {
  std::vector<FlatPoint> pts;
  PhiloxRng rng(seed, 21);
  for (const auto& piece : pieces_) {
    auto verts = polyhedron_vertices(piece);
    for (const auto& v : verts) pts.push_back(v);
    // Interior mixtures of vertices (bounded pieces only contribute here).
    for (int it = 0; it < interior_per_piece && verts.size() >= 2; ++it) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(piece.dim());
      double total = 0.0;
      for (const auto& v : verts) {
        double c = rng.uniform();
        w += c * v;
        total += c;
      }
      pts.push_back(w / total);
    }
  }
  pts.push_back(x_minus_);
  pts.push_back(x_plus_);
  pts.push_back(0.5 * (x_minus_ + x_plus_));
  return pts;
}

std::string FlatDiamond::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"tips\":[[";
  for (int i = 0; i < x_minus_.size(); ++i) os << (i ? "," : "") << x_minus_(i);
  os << "],[";
  for (int i = 0; i < x_plus_.size(); ++i) os << (i ? "," : "") << x_plus_(i);
  os << "]],\"pieces\":[";
  for (size_t p = 0; p < pieces_.size(); ++p) {
    if (p) os << ",";
    os << "{\"vertices\":[";
    auto verts = polyhedron_vertices(pieces_[p]);
    for (size_t v = 0; v < verts.size(); ++v) {
      if (v) os << ",";
      os << "[";
      for (int i = 0; i < verts[v].size(); ++i) os << (i ? "," : "") << verts[v](i);
      os << "]";
    }
    os << "],\"facets\":[";
    for (int r = 0; r < pieces_[p].A.rows(); ++r) {
      if (r) os << ",";
      os << "{\"normal\":[";
      for (int i = 0; i < pieces_[p].A.cols(); ++i) os << (i ? "," : "") << pieces_[p].A(r, i);
      os << "],\"offset\":" << pieces_[p].b(r) << "}";
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

ThicknessReport diamond_thickness_check(const CoxeterFlat& flat, const FlatPoint& x_minus,
                                        const FlatPoint& x_plus, const FaceType& face,
                                        const ThetaCone& theta) {
  if (flat.segment_regularity(x_minus, x_plus, theta) != SegmentRegularity::theta_regular)
    throw IrregularSegment("thickness check: segment is not Theta-regular");
  FlatDiamond dia(flat, x_minus, x_plus, face);
  const ReflectionGroup& G = flat.group();

  // Wall functionals: unit root normals nu with the star cone inside
  // {<nu, .> >= 0}, one family per tip, normalized to vanish at that tip.
  auto star_in_halfspace = [&](const FlagPlacement& tau, const Eigen::VectorXd& nu) {
    for (int i : G.face_stabilizer(tau.face)) {
      Eigen::MatrixXd g = tau.witness * G.element(i).transpose();
      for (const auto& w : G.vertex_directions()) {
        if (nu.dot(g * w) < -1e-9) return false;
      }
    }
    return true;
  };
  FlatPoint m = 0.5 * (x_minus + x_plus);
  double b = -std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto& root : G.all_roots()) {
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd nu = s * root;
      if (star_in_halfspace(dia.flag_plus(), nu)) {
        b = std::max(b, -nu.dot(m - x_minus));
        ++count;
      }
      if (star_in_halfspace(dia.flag_minus(), nu)) {
        b = std::max(b, -nu.dot(m - x_plus));
        ++count;
      }
    }
  }
  ThicknessReport rep;
  rep.b_mid = b;
  rep.bound = -0.5 * (x_plus - x_minus).norm() * std::sin(theta.eps0());
  rep.pass = (count > 0) && (b <= rep.bound + kNumTol);
  return rep;
}

namespace {

// Wall index sets of the join factor sigma^1: diagram components not fully
// contained in the face's wall set.
std::vector<int> cross_section_coordinates(const ReflectionGroup& G, const FaceType& face) {
  std::vector<int> walls;
  for (const auto& comp : G.diagram_components()) {
    bool contained = true;
    for (int w : comp)
      if (!face.wall_subset.count(w)) contained = false;
    if (!contained)
      for (int w : comp) walls.push_back(w);
  }
  return walls;
}

}  // namespace

CrossSectionReport cross_section_diameter_check(const CoxeterFlat& flat, const FlatPoint& x_minus,
                                                const FlatPoint& x_plus, const FaceType& face,
                                                const ThetaCone& theta) {
  if (flat.segment_regularity(x_minus, x_plus, theta) != SegmentRegularity::theta_regular)
    throw IrregularSegment("cross section check: segment is not Theta-regular");
  const ReflectionGroup& G = flat.group();
  CrossSectionReport rep;

  std::vector<int> walls1 = cross_section_coordinates(G, face);
  rep.trivial_splitting = int(walls1.size()) == G.rank();

  // Projector onto the sigma^1 factor: span of the roots of its components.
  Eigen::MatrixXd B(G.rank(), int(walls1.size()));
  for (size_t c = 0; c < walls1.size(); ++c) B.col(int(c)) = G.simple_roots()[walls1[c]];
  Eigen::MatrixXd proj = B * (B.transpose() * B).inverse() * B.transpose();

  Eigen::VectorXd d1 = proj * (x_plus - x_minus);
  rep.cross_tip_distance = d1.norm();

  // rho0: sampled maximization of rad(sigma^1, .) over Theta cap sigma^1.
  // For the supported splittings the sigma^1 chamber is spanned by the vertex
  // directions of walls1-complement... the factor chamber vertices are the
  // projections of the chamber vertex directions into the factor.
  std::vector<Eigen::VectorXd> factor_vertices;
  for (int j = 0; j < G.rank(); ++j) {
    Eigen::VectorXd w = proj * G.vertex_directions()[j];
    if (w.norm() > 1e-9) factor_vertices.push_back(w.normalized());
  }
  PhiloxRng rng(0xD1A, 9);
  double rho0 = 0.0;
  for (int it = 0; it < 4096; ++it) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(G.rank());
    for (const auto& w : factor_vertices) t += rng.uniform() * w;
    if (t.norm() < 1e-9) continue;
    t.normalize();
    if (!theta.contains_type(flat.group().chamber_project(t).dominant)) continue;
    for (const auto& w : factor_vertices) {
      double c = std::clamp(t.dot(w), -1.0, 1.0);
      rho0 = std::max(rho0, std::acos(c));
    }
  }
  rho0 = std::min(rho0, M_PI / 2.0 - 1e-6);
  rep.rho0 = rho0;
  rep.bound = 2.0 / std::cos(rho0) * rep.cross_tip_distance;

  // Sampled diameter of the cross section diamond: project diamond samples.
  FlatDiamond dia(flat, x_minus, x_plus, face);
  auto pts = dia.sample_points(4, 0xD1A2);
  double diam = 0.0;
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b)
      diam = std::max(diam, (proj * (pts[a] - pts[b])).norm());
  rep.diameter = diam;
  rep.pass = diam <= rep.bound + kNumTol;
  return rep;
}

ContinuityReport diamond_continuity_check(const CoxeterFlat& flat, const FlatPoint& x_minus,
                                          const FlatPoint& x_plus, const FlatPoint& xp_minus,
                                          const FlatPoint& xp_plus, const FaceType& face,
                                          const ThetaCone& theta, int samples) {
  FlatDiamond d1(flat, x_minus, x_plus, face);
  FlatDiamond d2(flat, xp_minus, xp_plus, face);
  if (!flat.flags_equal(d1.flag_plus(), d2.flag_plus()) ||
      !flat.flags_equal(d1.flag_minus(), d2.flag_minus()))
    throw IrregularSegment("continuity check: the two segments have different placements");

  ContinuityReport rep;
  rep.perturbation = std::max((x_minus - xp_minus).norm(), (x_plus - xp_plus).norm());

  auto half_hausdorff = [&](const FlatDiamond& from, const FlatDiamond& to) {
    auto pts = from.sample_points(samples / 8, 0xC0);
    double h = 0.0;
    for (const auto& p : pts) h = std::max(h, to.distance(p));
    return h;
  };
  rep.hausdorff = std::max(half_hausdorff(d1, d2), half_hausdorff(d2, d1));

  const ReflectionGroup& G = flat.group();
  std::vector<int> walls1 = cross_section_coordinates(G, face);
  Eigen::MatrixXd B(G.rank(), int(walls1.size()));
  for (size_t c = 0; c < walls1.size(); ++c) B.col(int(c)) = G.simple_roots()[walls1[c]];
  Eigen::MatrixXd proj = B * (B.transpose() * B).inverse() * B.transpose();
  double d1len = (proj * (x_plus - x_minus)).norm();

  double rho0 = cross_section_diameter_check(flat, x_minus, x_plus, face, theta).rho0;
  rep.constant_used = 1.0 + 4.0 / (std::sin(theta.eps0()) * std::cos(rho0));
  double delta = 0.25 * std::sin(theta.eps0());
  rep.within_scale = rep.perturbation <= delta * d1len;
  rep.pass = !rep.within_scale || rep.hausdorff <= rep.constant_used * rep.perturbation + kNumTol;
  return rep;
}

WeylHull::WeylHull(const CoxeterFlat& flat, FlatPoint x_minus, FlatPoint x_plus, const FaceType& face)
    : flat_(&flat), x_minus_(std::move(x_minus)), x_plus_(std::move(x_plus)) {
  const ReflectionGroup& G = flat.group();
  Eigen::VectorXd d = x_plus_ - x_minus_;
  if (d.norm() <= kNumTol) {
    // Degenerate convention: Q(x, x) = {x}.
    degenerate_ = true;
    vertices_.push_back(x_minus_);
    return;
  }
  ChamberProjection cp = G.chamber_project(d);
  FaceType carrier = G.face_of(cp.dominant);
  if (carrier != face)
    throw TypeNotInteriorToFace("weyl_hull: segment type is not interior to the face");
  Eigen::MatrixXd w = cp.witness.transpose();

  // Solve d = sum_j c_j * (w omega_j) over the face vertex directions.
  std::vector<int> free_walls;
  for (int j = 0; j < G.rank(); ++j)
    if (!face.wall_subset.count(j)) free_walls.push_back(j);
  Eigen::MatrixXd A(G.rank(), int(free_walls.size()));
  for (size_t c = 0; c < free_walls.size(); ++c) A.col(int(c)) = w * G.vertex_directions()[free_walls[c]];
  Eigen::VectorXd coef = A.completeOrthogonalDecomposition().solve(d);
  if ((A * coef - d).norm() > 1e-8)
    throw TypeNotInteriorToFace("weyl_hull: segment does not lie in the face span");
  basis_ = A;
  for (int c = 0; c < coef.size(); ++c) {
    coefficients_.push_back(coef(c));
    axes_.push_back(A.col(c) * coef(c));
  }
  int k = int(axes_.size());
  for (int mask = 0; mask < (1 << k); ++mask) {
    FlatPoint v = x_minus_;
    for (int c = 0; c < k; ++c)
      if (mask & (1 << c)) v += axes_[c];
    vertices_.push_back(v);
  }
}

bool WeylHull::membership(const FlatPoint& y, double tol) const {
  if (degenerate_) return (y - x_minus_).norm() <= tol;
  Eigen::VectorXd rel = y - x_minus_;
  Eigen::VectorXd a = basis_.completeOrthogonalDecomposition().solve(rel);
  if ((basis_ * a - rel).norm() > tol * std::max(1.0, rel.norm())) return false;  // off the face span
  for (int c = 0; c < a.size(); ++c) {
    if (a(c) < -tol || a(c) > coefficients_[size_t(c)] + tol) return false;
  }
  return true;
}

StraightPathReport straight_path_check(const CoxeterFlat& flat, const std::vector<FlatPoint>& points,
                                       const FaceType& face, const ThetaCone& theta) {
  if (points.size() < 2) throw std::invalid_argument("straight_path_check: need at least 2 points");
  StraightPathReport rep;
  // Piecewise Theta-regularity.
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    if (flat.segment_regularity(points[i], points[i + 1], theta) != SegmentRegularity::theta_regular) {
      rep.straight = false;
      rep.violating_vertex = int(i);
      return rep;
    }
  }
  // Straightness: adjacent tau_{+-}-directions opposite at interior vertices.
  for (size_t i = 1; i + 1 < points.size(); ++i) {
    FlagPlacement fwd = flat.forward_flag(points[i], points[i + 1], face);
    FlagPlacement back = flat.forward_flag(points[i], points[i - 1], flat.group().iota_face(face));
    if (!flat.flags_opposite(fwd, back)) {
      rep.straight = false;
      rep.violating_vertex = int(i);
      return rep;
    }
  }
  rep.straight = true;
  rep.violating_vertex = -1;

  // All chords Theta-regular.
  double worst_chord = std::numeric_limits<double>::infinity();
  bool chords_ok = true;
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i + 1; j < points.size(); ++j) {
      Eigen::VectorXd t = flat.segment_type(points[i], points[j]);
      double margin = theta.type_margin(t) - theta.margin();
      worst_chord = std::min(worst_chord, margin);
      if (margin < -kNumTol) chords_ok = false;
    }
  }
  rep.chords_theta_regular = chords_ok;
  rep.worst_chord_margin = worst_chord;

  // All vertices inside the Theta-diamond of the endpoints.
  FlatDiamond dia(flat, points.front(), points.back(), face);
  double worst_mem = std::numeric_limits<double>::infinity();
  bool members = true;
  for (const auto& p : points) {
    double m = dia.theta_membership_margin(p, theta);
    worst_mem = std::min(worst_mem, m);
    if (m < -kNumTol) members = false;
  }
  rep.vertices_in_diamond = members;
  rep.worst_membership_margin = worst_mem;
  rep.pass = rep.straight && chords_ok && members;
  return rep;
}

double bounded_detour_constant(const ThetaCone& theta) {
  Eigen::VectorXd xi = theta.group().face_barycenter(theta.face());
  double rho = theta.radius_bound(xi);
  return 1.0 / std::cos(rho);
}

DetourReport detour_check(const CoxeterFlat& flat, const std::vector<FlatPoint>& points,
                          const FaceType& face, const ThetaCone& theta) {
  StraightPathReport sp = straight_path_check(flat, points, face, theta);
  if (!sp.straight)
    throw NotLongitudinal("detour_check: path is not Theta-straight (hence not longitudinal)");
  DetourReport rep;
  for (size_t i = 0; i + 1 < points.size(); ++i) rep.length += (points[i + 1] - points[i]).norm();
  rep.endpoint_distance = (points.back() - points.front()).norm();
  rep.bound = bounded_detour_constant(theta);
  rep.ratio = rep.length / std::max(rep.endpoint_distance, 1e-300);
  rep.pass = rep.ratio <= rep.bound + 1e-9;
  return rep;
}

SectorCoincidenceReport sector_coincidence_check(const CoxeterFlat& flat, const FlatPoint& tip,
                                                 const FlagPlacement& tau1, const FlagPlacement& tau2,
                                                 const ThetaCone& theta, double R, double r,
                                                 int samples) {
  const ReflectionGroup& G = flat.group();
  SectorCoincidenceReport rep;

  // Truncated sector Hausdorff distance, sampled over sector directions.
  auto sector_points = [&](const FlagPlacement& tau) {
    std::vector<FlatPoint> pts;
    PhiloxRng rng(0x5EC7, 13);
    std::vector<int> free_walls;
    for (int j = 0; j < G.rank(); ++j)
      if (!tau.face.wall_subset.count(j)) free_walls.push_back(j);
    for (int it = 0; it < samples; ++it) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(G.rank());
      for (int j : free_walls) dir += rng.uniform() * (tau.witness * G.vertex_directions()[j]);
      if (dir.norm() < 1e-9) continue;
      dir.normalize();
      pts.push_back(tip + rng.uniform(0.0, R) * dir);
    }
    return pts;
  };
  auto sector_distance = [&](const FlagPlacement& tau, const FlatPoint& y) {
    // distance to V(tip, tau) = simplicial cone over the face vertex dirs
    std::vector<int> free_walls;
    for (int j = 0; j < G.rank(); ++j)
      if (!tau.face.wall_subset.count(j)) free_walls.push_back(j);
    // represent as { x : dir-span constraints } via projection on the cone
    Eigen::MatrixXd gens(G.rank(), int(free_walls.size()));
    for (size_t c = 0; c < free_walls.size(); ++c)
      gens.col(int(c)) = tau.witness * G.vertex_directions()[free_walls[c]];
    // Cone {sum c_i g_i, c_i >= 0}: project by active-set over generator subsets.
    double best = std::numeric_limits<double>::infinity();
    int k = int(free_walls.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::vector<int> idx;
      for (int c = 0; c < k; ++c)
        if (mask & (1 << c)) idx.push_back(c);
      Eigen::MatrixXd Bm(G.rank(), int(idx.size()));
      for (size_t c = 0; c < idx.size(); ++c) Bm.col(int(c)) = gens.col(idx[c]);
      Eigen::VectorXd rel = y - tip;
      Eigen::VectorXd coef =
          idx.empty() ? Eigen::VectorXd() : Eigen::VectorXd(Bm.completeOrthogonalDecomposition().solve(rel));
      if (coef.size() > 0 && coef.minCoeff() < -1e-12) continue;
      Eigen::VectorXd p = idx.empty() ? Eigen::VectorXd(Eigen::VectorXd::Zero(G.rank()))
                                      : Eigen::VectorXd(Bm * coef);
      best = std::min(best, (rel - p).norm());
    }
    return best;
  };

  double h = 0.0;
  for (const auto& p : sector_points(tau1)) h = std::max(h, sector_distance(tau2, p));
  for (const auto& p : sector_points(tau2)) h = std::max(h, sector_distance(tau1, p));
  rep.hausdorff_estimate = h;
  rep.hypothesis = R * std::sin(theta.eps0()) >= r + h;

  // Coincidence up to radius r: sampled directions scaled into B(tip, r).
  bool coincide = true;
  for (const auto& p : sector_points(tau1)) {
    FlatPoint q = tip + (p - tip) * std::min(1.0, r / std::max((p - tip).norm(), 1e-12));
    if (sector_distance(tau2, q) > 1e-7) coincide = false;
  }
  for (const auto& p : sector_points(tau2)) {
    FlatPoint q = tip + (p - tip) * std::min(1.0, r / std::max((p - tip).norm(), 1e-12));
    if (sector_distance(tau1, q) > 1e-7) coincide = false;
  }
  rep.coincide_up_to_r = coincide;
  rep.pass = !rep.hypothesis || coincide;
  return rep;
}

}  // namespace morsekit
