#include "morsekit/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morsekit {

std::string MorseReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"path_id\":\"" << path_id << "\",\"D_measured\":" << D_measured
     << ",\"witness_perturbation\":" << witness_perturbation << ",\"L\":" << L << ",\"A\":" << A
     << ",\"B\":" << B << ",\"theta_margin\":" << theta_margin << ",\"windows\":[";
  for (size_t i = 0; i < table.size(); ++i) {
    if (i) os << ",";
    os << "{\"t0\":" << table[i].t0 << ",\"t1\":" << table[i].t1 << ",\"D\":" << table[i].D
       << ",\"tip_perturbation\":" << table[i].tip_perturbation << "}";
  }
  os << "]}";
  return os.str();
}

PolyPath<CoxeterFlat> zigzag_generator(const CoxeterFlat& space, const ThetaCone& theta,
                                       const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                       const std::vector<double>& lengths, const FlatPoint& base) {
  Eigen::VectorXd u1 = v1 / v1.norm(), u2 = v2 / v2.norm();
  if ((u1 - u2).norm() <= 1e-9)
    throw DirectionsOutsideTheta("zigzag_generator: the two directions coincide");
  if (!theta.contains_type(space.group().chamber_project(u1).dominant) ||
      !theta.contains_type(space.group().chamber_project(u2).dominant))
    throw DirectionsOutsideTheta("zigzag_generator: directions outside Theta");
  std::vector<FlatPoint> pts{base};
  for (size_t n = 0; n < lengths.size(); ++n) {
    const Eigen::VectorXd& u = (n % 2 == 0) ? u1 : u2;
    pts.push_back(pts.back() + lengths[n] * u);
  }
  return make_path(space, std::move(pts));
}

PolyPath<TreeProduct> zigzag_generator(const TreeProduct& space, const ThetaCone& theta,
                                       const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                       const std::vector<double>& lengths, const ProductPoint& base,
                                       const std::vector<int>& ends) {
  Eigen::VectorXd u1 = v1 / v1.norm(), u2 = v2 / v2.norm();
  if ((u1 - u2).norm() <= 1e-9)
    throw DirectionsOutsideTheta("zigzag_generator: the two directions coincide");
  if (!theta.contains_type(u1) || !theta.contains_type(u2))
    throw DirectionsOutsideTheta("zigzag_generator: directions outside Theta");
  if (u1.minCoeff() < 0 || u2.minCoeff() < 0)
    throw DirectionsOutsideTheta("zigzag_generator: weights must be nonnegative");
  std::vector<ProductPoint> pts{base};
  for (size_t n = 0; n < lengths.size(); ++n) {
    const Eigen::VectorXd& u = (n % 2 == 0) ? u1 : u2;
    ProductPoint next = pts.back();
    for (int i = 0; i < space.rank(); ++i) {
      if (u(i) <= 0) continue;
      next[size_t(i)] = space.factor(i).point_toward_end(next[size_t(i)], ends[size_t(i)],
                                                         lengths[n] * u(i));
    }
    pts.push_back(std::move(next));
  }
  return make_path(space, std::move(pts));
}

RayFit best_ray_fit(const PolyPath<CoxeterFlat>& path) {
  const CoxeterFlat& space = *path.space;
  const int d = space.rank();
  const FlatPoint& origin = path.points.front();

  auto sup_dist = [&](const Eigen::VectorXd& u) {
    double worst = 0.0;
    for (const auto& p : path.points) {
      Eigen::VectorXd rel = p - origin;
      double t = std::max(0.0, rel.dot(u));
      worst = std::max(worst, (rel - t * u).norm());
    }
    return worst;
  };

  Eigen::VectorXd best_u = Eigen::VectorXd::Zero(d);
  double best = std::numeric_limits<double>::infinity();
  int grid = 0;
  if (d == 2) {
    grid = 1440;
    for (int i = 0; i < grid; ++i) {
      double a = 2.0 * M_PI * double(i) / grid;
      Eigen::VectorXd u(2);
      u << std::cos(a), std::sin(a);
      double s = sup_dist(u);
      if (s < best) {
        best = s;
        best_u = u;
      }
    }
    // golden-section refinement around the best angle
    double a0 = std::atan2(best_u(1), best_u(0));
    double lo = a0 - 2.0 * M_PI / grid, hi = a0 + 2.0 * M_PI / grid;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    auto at = [&](double a) {
      Eigen::VectorXd u(2);
      u << std::cos(a), std::sin(a);
      return sup_dist(u);
    };
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = at(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = at(x2);
      }
    }
    double a_best = 0.5 * (lo + hi);
    Eigen::VectorXd u(2);
    u << std::cos(a_best), std::sin(a_best);
    if (at(a_best) < best) {
      best = at(a_best);
      best_u = u;
    }
  } else {
    grid = 8192;
    PhiloxRng rng(0xF17, 2);
    for (int i = 0; i < grid; ++i) {
      Eigen::VectorXd u(d);
      for (int c = 0; c < d; ++c) u(c) = rng.normal();
      if (u.norm() < 1e-12) continue;
      u.normalize();
      double s = sup_dist(u);
      if (s < best) {
        best = s;
        best_u = u;
      }
    }
    // local refinement
    double step = 0.1;
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd u(d);
      for (int c = 0; c < d; ++c) u(c) = best_u(c) + step * rng.normal();
      if (u.norm() < 1e-12) continue;
      u.normalize();
      double s = sup_dist(u);
      if (s < best) {
        best = s;
        best_u = u;
      } else {
        step *= 0.98;
      }
    }
  }
  RayFit fit;
  fit.direction = best_u;
  fit.sup_distance = best;
  fit.grid = grid;
  return fit;
}

IdealEndpoint<FlagPlacement> ideal_endpoint(const PolyPath<CoxeterFlat>& path, const ThetaCone& theta,
                                            double B, const FaceType& face) {
  const CoxeterFlat& space = *path.space;
  const FlatPoint& base = path.points.front();
  if (path.points.size() < 3) throw NotStabilized("ideal_endpoint: too few samples");

  // Chord placements from the basepoint; they must stabilize along the tail.
  std::vector<FlagPlacement> pls;
  for (size_t n = 1; n < path.points.size(); ++n) {
    if (space.distance(base, path.points[n]) <= kNumTol) continue;
    if (!space.segment_taumod_regular(base, path.points[n], face)) continue;
    pls.push_back(space.forward_flag(base, path.points[n], face));
  }
  if (pls.empty()) throw NotStabilized("ideal_endpoint: no regular chords from the basepoint");
  const FlagPlacement& limit = pls.back();
  size_t tail = pls.size() / 2;
  for (size_t n = tail; n < pls.size(); ++n)
    if (!space.flags_equal(pls[n], limit))
      throw NotStabilized("ideal_endpoint: chord placements do not stabilize");

  IdealEndpoint<FlagPlacement> out{limit, 0.0, 0.0};
  for (const auto& p : path.points)
    out.sup_cone_distance = std::max(out.sup_cone_distance, space.cone_distance(base, limit, p));
  out.stabilization_radius = space.distance(base, path.points.back());
  if (out.sup_cone_distance > out.stabilization_radius + B + 1e-6)
    throw NotStabilized("ideal_endpoint: samples stray from the limit cone");
  (void)theta;
  return out;
}

IdealEndpoint<ProductFlag> ideal_endpoint(const PolyPath<TreeProduct>& path, const ThetaCone& theta,
                                          double B, const FaceType& face) {
  const TreeProduct& space = *path.space;
  const ProductPoint& base = path.points.front();
  if (path.points.size() < 3) throw NotStabilized("ideal_endpoint: too few samples");

  std::vector<ProductFlag> flags;
  std::vector<ProductPoint> pts;
  for (size_t n = 1; n < path.points.size(); ++n) {
    if (!space.segment_taumod_regular(base, path.points[n], face)) continue;
    flags.push_back(space.forward_flag(base, path.points[n], face));
    pts.push_back(path.points[n]);
  }
  if (flags.size() < 2) throw NotStabilized("ideal_endpoint: no regular chords from the basepoint");
  double D = B + 1e-9;
  // D grows to the measured neighborhood: first measure against the last flag.
  for (const auto& p : pts)
    D = std::max(D, space.cone_distance(base, flags.back(), p));
  StabilizationResult st = truncated_cone_stabilization(space, base, flags, pts, D + 1e-9);
  IdealEndpoint<ProductFlag> out{st.limit, st.radius_achieved, st.max_cone_distance};
  (void)theta;
  return out;
}

QuasilineFlatResult quasiline_parallel_set(const PolyPath<CoxeterFlat>& path, const ThetaCone& theta,
                                           double B, const FaceType& face) {
  auto fwd = ideal_endpoint(path, theta, B, face);
  auto rev = ideal_endpoint(reversed_path(path), theta, B, path.space->group().iota_face(face));
  QuasilineFlatResult res;
  res.tau_plus = fwd.flag;
  res.tau_minus = rev.flag;
  res.opposite = path.space->flags_opposite(res.tau_plus, res.tau_minus);
  if (!res.opposite)
    throw EndsNotOpposite("quasiline_parallel_set: the two ideal endpoints are not opposite");
  res.sup_distance = 0.0;  // a flat is its own parallel set
  return res;
}

QuasilineProductResult quasiline_parallel_set(const PolyPath<TreeProduct>& path,
                                              const ThetaCone& theta, double B,
                                              const FaceType& face) {
  const TreeProduct& space = *path.space;
  auto fwd = ideal_endpoint(path, theta, B, face);
  auto rev = ideal_endpoint(reversed_path(path), theta, B, face);
  QuasilineProductResult res;
  res.tau_plus = fwd.flag;
  res.tau_minus = rev.flag;
  // Opposition at a witness interior point: the midpoint breakpoint.
  const ProductPoint& mid = path.points[path.points.size() / 2];
  res.opposite = space.flag_x_opposite(res.tau_minus, res.tau_plus, mid);
  if (!res.opposite)
    throw EndsNotOpposite("quasiline_parallel_set: the two ideal endpoints are not opposite");
  ProductParallelSet P = space.parallel_set(res.tau_minus, res.tau_plus);
  for (const auto& p : path.points)
    res.sup_distance = std::max(res.sup_distance, space.parallel_set_distance(p, P));
  return res;
}

HyperbolicityResult hyperbolicity_estimate(const Eigen::MatrixXd& distances, long long max_quadruples,
                                           uint64_t seed) {
  const int n = int(distances.rows());
  HyperbolicityResult res;
  auto defect = [&](int a, int b, int c, int d) {
    double s1 = distances(a, b) + distances(c, d);
    double s2 = distances(a, c) + distances(b, d);
    double s3 = distances(a, d) + distances(b, c);
    double mx = std::max({s1, s2, s3});
    double mn = std::min({s1, s2, s3});
    double mid = s1 + s2 + s3 - mx - mn;
    return 0.5 * (mx - mid);
  };
  long long total = n >= 4 ? (long long)n * (n - 1) * (n - 2) * (n - 3) / 24 : 0;
  if (total <= max_quadruples) {
    res.exact = true;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c)
          for (int d = c + 1; d < n; ++d) {
            res.delta = std::max(res.delta, defect(a, b, c, d));
            ++res.quadruples_checked;
          }
  } else {
    PhiloxRng rng(seed, 1);
    for (long long it = 0; it < max_quadruples; ++it) {
      int a = int(rng.uniform_index(n)), b = int(rng.uniform_index(n));
      int c = int(rng.uniform_index(n)), d = int(rng.uniform_index(n));
      if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
      res.delta = std::max(res.delta, defect(a, b, c, d));
      ++res.quadruples_checked;
    }
  }
  return res;
}

AntipodalityVerdict antipodality_check(const CoxeterFlat& space, const FlagPlacement& a,
                                       const FlagPlacement& b) {
  if (space.flags_equal(a, b)) return AntipodalityVerdict::equal;
  if (space.flags_opposite(a, b)) return AntipodalityVerdict::antipodal;
  return AntipodalityVerdict::violation;
}

AntipodalityVerdict antipodality_check(const TreeProduct& space, const ProductFlag& a,
                                       const ProductFlag& b, const ProductPoint& common_point) {
  if (a == b) return AntipodalityVerdict::equal;
  if (space.flag_x_opposite(a, b, common_point)) return AntipodalityVerdict::antipodal;
  return AntipodalityVerdict::violation;
}

}  // namespace morsekit
