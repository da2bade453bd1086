#include "morsekit/coxeter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "morsekit/polyhedral.hpp"
#include "morsekit/rng.hpp"

namespace morsekit {

namespace {

Eigen::MatrixXd reflection_matrix(const Eigen::VectorXd& unit_normal) {
  int d = int(unit_normal.size());
  return Eigen::MatrixXd::Identity(d, d) - 2.0 * unit_normal * unit_normal.transpose();
}

bool matrices_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol = 1e-9) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Canonical ordering key: entries rounded to a grid much coarser than the
// dedup tolerance but much finer than entry gaps of the supported groups.
std::vector<long long> matrix_key(const Eigen::MatrixXd& m) {
  std::vector<long long> key;
  key.reserve(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) key.push_back(llround(m(i, j) * 1e6));
  return key;
}

}  // namespace

std::string FaceType::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int w : wall_subset) {
    if (!first) os << ",";
    os << w;
    first = false;
  }
  os << "}";
  return os.str();
}

ReflectionGroup ReflectionGroup::from_name(const std::string& name) {
  if (name == "A2") return a2();
  if (name == "B2") return b2();
  if (name.rfind("A1", 0) == 0) {
    if (name == "A1") return a1k(1);
    if (name.size() > 3 && name[2] == '^') {
      int k = std::stoi(name.substr(3));
      return a1k(k);
    }
  }
  throw std::invalid_argument("unknown reflection group name: " + name);
}

ReflectionGroup ReflectionGroup::a1k(int k) {
  if (k < 1 || k > 6) throw std::invalid_argument("A1^k supported for 1 <= k <= 6");
  ReflectionGroup g;
  g.name_ = (k == 1) ? "A1" : ("A1^" + std::to_string(k));
  g.rank_ = k;
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
    r(i) = 1.0;
    g.simple_roots_.push_back(r);
  }
  g.finalize();
  return g;
}

ReflectionGroup ReflectionGroup::a2() {
  ReflectionGroup g;
  g.name_ = "A2";
  g.rank_ = 2;
  Eigen::VectorXd a1(2), a2v(2);
  a1 << 1.0, 0.0;
  a2v << -0.5, std::sqrt(3.0) / 2.0;
  g.simple_roots_ = {a1, a2v};
  g.finalize();
  return g;
}

ReflectionGroup ReflectionGroup::b2() {
  ReflectionGroup g;
  g.name_ = "B2";
  g.rank_ = 2;
  Eigen::VectorXd a1(2), a2v(2);
  a1 << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  a2v << 0.0, 1.0;
  g.simple_roots_ = {a1, a2v};
  g.finalize();
  return g;
}

void ReflectionGroup::finalize() {
  const int d = rank_;

  // Element list: closure of the generators, deduplicated, canonically sorted.
  std::vector<Eigen::MatrixXd> elems;
  elems.push_back(Eigen::MatrixXd::Identity(d, d));
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& r : simple_roots_) gens.push_back(reflection_matrix(r));
  bool grew = true;
  while (grew) {
    grew = false;
    size_t n = elems.size();
    for (size_t i = 0; i < n; ++i) {
      for (const auto& s : gens) {
        Eigen::MatrixXd m = s * elems[i];
        bool known = false;
        for (const auto& e : elems)
          if (matrices_equal(e, m)) {
            known = true;
            break;
          }
        if (!known) {
          elems.push_back(m);
          grew = true;
        }
      }
    }
  }
  std::sort(elems.begin(), elems.end(), [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return matrix_key(x) < matrix_key(y);
  });
  elements_ = std::move(elems);

  // Root set: orbit of the simple roots.
  for (const auto& w : elements_) {
    for (const auto& r : simple_roots_) {
      Eigen::VectorXd v = w * r;
      bool known = false;
      for (const auto& q : all_roots_)
        if ((q - v).norm() <= 1e-9) {
          known = true;
          break;
        }
      if (!known) all_roots_.push_back(v);
    }
  }

  // Chamber vertex directions: dual basis to the simple-root normals.
  Eigen::MatrixXd N(d, d);
  for (int i = 0; i < d; ++i) N.row(i) = simple_roots_[i].transpose();
  Eigen::MatrixXd Ninv = N.inverse();
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd w = Ninv.col(j);
    vertex_dirs_.push_back(w / w.norm());
  }

  // Longest element: the one sending the chamber interior to its negative.
  Eigen::VectorXd interior = Eigen::VectorXd::Zero(d);
  for (const auto& w : vertex_dirs_) interior += w;
  interior.normalize();
  w0_ = Eigen::MatrixXd::Identity(d, d);
  bool found = false;
  for (const auto& w : elements_) {
    if (in_chamber(-(w * interior), 1e-9)) {
      w0_ = w;
      found = true;
      break;
    }
  }
  if (!found) throw std::logic_error("longest element not found");

  // Coxeter diagram components.
  std::vector<int> comp(d, -1);
  int nc = 0;
  for (int i = 0; i < d; ++i) {
    if (comp[i] != -1) continue;
    std::vector<int> stack{i};
    comp[i] = nc;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < d; ++v) {
        if (comp[v] == -1 && std::abs(simple_roots_[u].dot(simple_roots_[v])) > 1e-9) {
          comp[v] = nc;
          stack.push_back(v);
        }
      }
    }
    ++nc;
  }
  components_.assign(nc, {});
  for (int i = 0; i < d; ++i) components_[comp[i]].push_back(i);
}

bool ReflectionGroup::in_chamber(const Eigen::VectorXd& v, double tol) const {
  for (const auto& n : simple_roots_)
    if (n.dot(v) < -tol) return false;
  return true;
}

ChamberProjection ReflectionGroup::chamber_project(const Eigen::VectorXd& v) const {
  // Deterministic choice: maximize the worst wall margin, ties by element
  // order. Boundary points land on the closed side of every wall.
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < order(); ++i) {
    Eigen::VectorXd u = elements_[i] * v;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& n : simple_roots_) m = std::min(m, n.dot(u));
    if (m > best + 1e-12) {
      best = m;
      best_i = i;
    }
  }
  ChamberProjection cp;
  cp.witness = elements_[best_i];
  cp.witness_index = best_i;
  cp.dominant = cp.witness * v;
  // Clean up tiny negative wall values from round-off.
  return cp;
}

Eigen::VectorXd ReflectionGroup::iota(const Eigen::VectorXd& t) const {
  return chamber_project(-t).dominant;
}

FaceType ReflectionGroup::iota_face(const FaceType& f) const {
  Eigen::VectorXd b = face_barycenter(f);
  Eigen::VectorXd ib = iota(b);
  return face_of(ib);
}

FaceType ReflectionGroup::face_of(const Eigen::VectorXd& t) const {
  if (t.norm() <= kNumTol) throw ZeroVector("face_of: zero vector");
  if (!in_chamber(t, 1e-7)) throw std::invalid_argument("face_of: point not in chamber");
  FaceType f;
  for (int i = 0; i < rank_; ++i)
    if (std::abs(simple_roots_[i].dot(t)) <= kNumTol * std::max(1.0, t.norm())) f.wall_subset.insert(i);
  if (int(f.wall_subset.size()) == rank_)
    throw ZeroVector("face_of: all walls vanish");
  return f;
}

std::vector<int> ReflectionGroup::face_stabilizer(const FaceType& f) const {
  std::vector<int> out;
  for (int i = 0; i < order(); ++i) {
    bool fixes = true;
    for (int j = 0; j < rank_; ++j) {
      if (f.wall_subset.count(j)) continue;  // spanned by vertex dirs off the walls
      Eigen::VectorXd w = vertex_dirs_[j];
      if ((elements_[i] * w - w).norm() > 1e-9) {
        fixes = false;
        break;
      }
    }
    if (fixes) out.push_back(i);
  }
  return out;
}

bool ReflectionGroup::in_star(const FaceType& f, const Eigen::MatrixXd& witness,
                              const Eigen::VectorXd& v) const {
  Eigen::VectorXd u = witness.transpose() * v;  // back to the fundamental placement
  for (int i : face_stabilizer(f)) {
    if (in_chamber(elements_[i] * u)) return true;
  }
  return false;
}

bool ReflectionGroup::in_open_star(const FaceType& f, const Eigen::MatrixXd& witness,
                                   const Eigen::VectorXd& v) const {
  if (v.norm() <= kNumTol) return false;
  Eigen::VectorXd u = witness.transpose() * v;
  for (int i : face_stabilizer(f)) {
    Eigen::VectorXd c = elements_[i] * u;
    if (!in_chamber(c)) continue;
    // open star: the carrier face of c must contain the face, i.e. the
    // vanishing walls of c lie inside f.wall_subset.
    bool ok = true;
    for (int j = 0; j < rank_; ++j) {
      if (std::abs(simple_roots_[j].dot(c)) <= kNumTol * std::max(1.0, c.norm()) &&
          !f.wall_subset.count(j)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool ReflectionGroup::star_boundary_empty(const FaceType& f) const {
  for (int i = 0; i < rank_; ++i)
    if (!f.wall_subset.count(i)) return false;  // wall i contributes boundary faces
  return true;
}

double ReflectionGroup::angle_to_star_boundary(const FaceType& f, const Eigen::MatrixXd& witness,
                                               const Eigen::VectorXd& v) const {
  if (star_boundary_empty(f)) throw std::invalid_argument("star boundary is empty");
  Eigen::VectorXd u = witness.transpose() * v;
  double best = M_PI;
  // Boundary faces: w * (chamber-wall-i face) for w in the face stabilizer
  // and walls i not containing the face.
  for (int si : face_stabilizer(f)) {
    const Eigen::MatrixXd& w = elements_[si];
    for (int i = 0; i < rank_; ++i) {
      if (f.wall_subset.count(i)) continue;
      Eigen::MatrixXd ineq(rank_ - 1, rank_);
      int r = 0;
      for (int j = 0; j < rank_; ++j) {
        if (j == i) continue;
        ineq.row(r++) = (w * simple_roots_[j]).transpose();
      }
      Eigen::MatrixXd eq(1, rank_);
      eq.row(0) = (w * simple_roots_[i]).transpose();
      best = std::min(best, angle_to_cone(ineq, eq, u));
    }
  }
  return best;
}

double ReflectionGroup::max_margin(const FaceType& f) const {
  // The margin maximizer over the chamber portion of the star; the face
  // barycenter is not always optimal, so refine over a sampled chamber grid.
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(rank_, rank_);
  PhiloxRng rng(0xC0FFEE, 77);
  double best = angle_to_star_boundary(f, id, face_barycenter(f));
  for (int it = 0; it < 2048; ++it) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(rank_);
    for (int j = 0; j < rank_; ++j) t += rng.uniform() * vertex_dirs_[j];
    if (t.norm() < 1e-9) continue;
    t.normalize();
    best = std::max(best, angle_to_star_boundary(f, id, t));
  }
  return best;
}

std::vector<Eigen::VectorXd> ReflectionGroup::sample_star_directions(
    const FaceType& f, const Eigen::MatrixXd& witness, int count, uint64_t seed) const {
  PhiloxRng rng(seed, 11);
  std::vector<int> stab = face_stabilizer(f);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  while (int(out.size()) < count) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(rank_);
    for (int j = 0; j < rank_; ++j) t += rng.uniform() * vertex_dirs_[j];
    if (t.norm() < 1e-9) continue;
    t.normalize();
    int i = stab[rng.uniform_index(stab.size())];
    out.push_back(witness * elements_[i].transpose() * t);
  }
  return out;
}

Eigen::VectorXd ReflectionGroup::face_barycenter(const FaceType& f) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rank_);
  for (int j = 0; j < rank_; ++j)
    if (!f.wall_subset.count(j)) b += vertex_dirs_[j];
  if (b.norm() <= kNumTol) throw std::invalid_argument("face has empty interior");
  return b / b.norm();
}

int ReflectionGroup::find_element(const Eigen::MatrixXd& m) const {
  for (int i = 0; i < order(); ++i)
    if (matrices_equal(elements_[i], m)) return i;
  return -1;
}

ThetaCone::ThetaCone(const ReflectionGroup& group, FaceType face, double margin)
    : group_(&group), face_(std::move(face)), margin_(margin) {
  if (group.star_boundary_empty(face_))
    throw std::invalid_argument("ThetaCone: star boundary is empty (rank-1 star)");
  if (margin_ <= 0.0) throw std::invalid_argument("ThetaCone: margin must be positive");
  double mm = group.max_margin(face_);
  if (margin_ >= mm - 1e-12)
    throw std::invalid_argument("ThetaCone: margin exceeds the achievable maximum");

  // Construction-time Weyl-convexity check of the symmetrized region:
  // sampled pairs of symmetrized Theta points must have their spherical
  // midpoint inside again.
  auto dirs = group.sample_star_directions(face_, Eigen::MatrixXd::Identity(group.rank(), group.rank()),
                                           256, 0x7E7A);
  std::vector<Eigen::VectorXd> inside;
  for (const auto& v : dirs) {
    if (group.angle_to_star_boundary(face_, Eigen::MatrixXd::Identity(group.rank(), group.rank()), v) >=
        margin_)
      inside.push_back(v);
  }
  for (size_t a = 0; a + 1 < inside.size() && a < 64; ++a) {
    for (size_t b = a + 1; b < inside.size() && b < a + 16; ++b) {
      Eigen::VectorXd m = inside[a] + inside[b];
      if (m.norm() < 1e-9) continue;
      m.normalize();
      double f = group.angle_to_star_boundary(face_, Eigen::MatrixXd::Identity(group.rank(), group.rank()), m);
      if (f < margin_ - 1e-7)
        throw std::invalid_argument("ThetaCone: symmetrized region fails the convexity check");
    }
  }
}

bool ThetaCone::contains_type(const Eigen::VectorXd& t, double tol) const {
  return type_margin(t) >= margin_ - tol;
}

double ThetaCone::type_margin(const Eigen::VectorXd& t) const {
  // Chamber types always lie in the star, so the boundary angle is the margin.
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(group_->rank(), group_->rank());
  return group_->angle_to_star_boundary(face_, id, t);
}

Eigen::VectorXd ThetaCone::barycenter_type() const {
  // Maximize the boundary margin over the chamber; good enough to pick a
  // deep interior type deterministically.
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(group_->rank(), group_->rank());
  Eigen::VectorXd best = group_->face_barycenter(face_);
  double bestf = group_->angle_to_star_boundary(face_, id, best);
  PhiloxRng rng(0xBA27, 3);
  for (int it = 0; it < 1024; ++it) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(group_->rank());
    for (int j = 0; j < group_->rank(); ++j) t += rng.uniform() * group_->vertex_directions()[j];
    if (t.norm() < 1e-9) continue;
    t.normalize();
    double f = group_->angle_to_star_boundary(face_, id, t);
    if (f > bestf) {
      bestf = f;
      best = t;
    }
  }
  return best;
}

double ThetaCone::radius_bound(const Eigen::VectorXd& xi, int samples) const {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(group_->rank(), group_->rank());
  auto dirs = group_->sample_star_directions(face_, id, samples, 0x57AB);
  double rho = 0.0;
  Eigen::VectorXd xin = xi / xi.norm();
  for (const auto& v : dirs) {
    if (group_->angle_to_star_boundary(face_, id, v) < margin_) continue;
    double c = std::clamp(xin.dot(v), -1.0, 1.0);
    rho = std::max(rho, std::acos(c));
  }
  // The chamber portion contains the extreme types as well.
  PhiloxRng rng(0x51D, 5);
  for (int it = 0; it < samples; ++it) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(group_->rank());
    for (int j = 0; j < group_->rank(); ++j) t += rng.uniform() * group_->vertex_directions()[j];
    if (t.norm() < 1e-9) continue;
    t.normalize();
    if (group_->angle_to_star_boundary(face_, id, t) < margin_) continue;
    double c = std::clamp(xin.dot(t), -1.0, 1.0);
    rho = std::max(rho, std::acos(c));
  }
  return rho;
}

StarClass star_classify(const ReflectionGroup& group, const FaceType& face,
                        const Eigen::MatrixXd& witness, const Eigen::VectorXd& v,
                        const ThetaCone* theta) {
  if (!group.in_star(face, witness, v)) return StarClass::outside;
  bool open = group.in_open_star(face, witness, v);
  if (!open) return StarClass::in_closed_star_only;
  if (theta != nullptr) {
    double f = group.angle_to_star_boundary(face, witness, v);
    if (f >= theta->margin() - kNumTol) return StarClass::in_theta_star;
  }
  return StarClass::in_open_star;
}

double eps0(const ThetaCone& theta) { return theta.margin(); }

double eps0_pair(const ThetaCone& theta, const ThetaCone& theta_prime, int samples) {
  if (theta.face() != theta_prime.face())
    throw NotNested("eps0_pair: cones live on different faces");
  if (theta.margin() <= theta_prime.margin() + 1e-12)
    throw NotNested("eps0_pair: Theta must lie in the interior of Theta'");
  const ReflectionGroup& g = theta.group();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(g.rank(), g.rank());
  auto dirs = g.sample_star_directions(theta.face(), id, samples, 0xE05);

  // Partition samples by margin level and take the min pairwise angle between
  // the Theta side and the complement-of-Theta' side, with local refinement
  // along the connecting arcs.
  std::vector<Eigen::VectorXd> in_theta, out_thetap;
  for (const auto& v : dirs) {
    double f = g.angle_to_star_boundary(theta.face(), id, v);
    if (f >= theta.margin()) in_theta.push_back(v);
    if (f < theta_prime.margin()) out_thetap.push_back(v);
  }
  double best = M_PI;
  Eigen::VectorXd ba, bb;
  for (const auto& a : in_theta) {
    for (const auto& b : out_thetap) {
      double c = std::clamp(a.dot(b), -1.0, 1.0);
      double ang = std::acos(c);
      if (ang < best) {
        best = ang;
        ba = a;
        bb = b;
      }
    }
  }
  if (in_theta.empty() || out_thetap.empty()) return best;

  // Refinement: bisect along the arc from the best Theta point to the best
  // complement point for the two level-set crossings, then measure the angle
  // between the crossings.
  auto arc_point = [&](double t) {
    Eigen::VectorXd v = (1.0 - t) * ba + t * bb;
    return Eigen::VectorXd(v.normalized());
  };
  auto margin_at = [&](double t) {
    return g.angle_to_star_boundary(theta.face(), id, arc_point(t));
  };
  // Last parameter still at Theta level.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (margin_at(mid) >= theta.margin()) lo = mid;
    else hi = mid;
  }
  double t_theta = lo;
  // First parameter below the Theta' level.
  lo = t_theta;
  hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (margin_at(mid) < theta_prime.margin()) hi = mid;
    else lo = mid;
  }
  double t_out = hi;
  Eigen::VectorXd pa = arc_point(t_theta), pb = arc_point(t_out);
  double c = std::clamp(pa.dot(pb), -1.0, 1.0);
  best = std::min(best, std::acos(c));
  return best;
}

}  // namespace morsekit
