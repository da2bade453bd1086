#include "morsekit/generators.hpp"

#include <algorithm>
#include <cmath>

namespace morsekit {

MetricTree random_tree(PhiloxRng& rng, int num_vertices) {
  int n = std::max(2, num_vertices);
  std::vector<std::tuple<int, int, double>> edges;
  for (int v = 1; v < n; ++v) {
    int u = int(rng.uniform_index(uint64_t(v)));
    double len = rng.uniform(0.2, 2.0);
    edges.emplace_back(u, v, len);
  }
  // degree count to find leaves
  std::vector<int> deg(size_t(n), 0);
  for (auto& [u, v, l] : edges) {
    ++deg[size_t(u)];
    ++deg[size_t(v)];
    (void)l;
  }
  std::vector<int> leaves;
  for (int v = 0; v < n; ++v)
    if (deg[size_t(v)] == 1) leaves.push_back(v);
  return MetricTree(n, edges, leaves);
}

TreeProduct random_tree_product(PhiloxRng& rng, int num_factors, int max_vertices) {
  std::vector<MetricTree> factors;
  for (int i = 0; i < num_factors; ++i) {
    int n = 2 + int(rng.uniform_index(uint64_t(std::max(1, max_vertices - 1))));
    factors.push_back(random_tree(rng, n));
  }
  return TreeProduct(std::move(factors));
}

Eigen::VectorXd random_theta_type(PhiloxRng& rng, const ThetaCone& theta) {
  const ReflectionGroup& G = theta.group();
  for (int tries = 0; tries < 100000; ++tries) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(G.rank());
    for (int j = 0; j < G.rank(); ++j) t += rng.uniform() * G.vertex_directions()[j];
    if (t.norm() < 1e-9) continue;
    t.normalize();
    if (theta.contains_type(t)) return t;
  }
  return theta.barycenter_type();
}

FlatPoint random_flat_point(PhiloxRng& rng, int rank, double scale) {
  FlatPoint p(rank);
  for (int i = 0; i < rank; ++i) p(i) = rng.uniform(-scale, scale);
  return p;
}

NoisyZigzagFlat noisy_zigzag_flat(const CoxeterFlat& space, const ThetaCone& theta,
                                  const Eigen::VectorXd& v1, const Eigen::VectorXd& v2, int steps,
                                  double step_len, double noise, PhiloxRng& rng) {
  std::vector<double> lengths(size_t(steps), step_len);
  FlatPoint base = Eigen::VectorXd::Zero(space.rank());
  PolyPath<CoxeterFlat> clean = zigzag_generator(space, theta, v1, v2, lengths, base);
  NoisyZigzagFlat out{clean, clean.points.front(), clean.points.back()};
  if (noise > 0.0) {
    std::vector<FlatPoint> pts = clean.points;
    for (size_t i = 0; i < pts.size(); ++i) {
      Eigen::VectorXd u(space.rank());
      for (int c = 0; c < space.rank(); ++c) u(c) = rng.normal();
      if (u.norm() > 1e-12) pts[i] += rng.uniform(0.0, noise) * u.normalized();
    }
    out.path = make_path(space, std::move(pts));
  }
  return out;
}

NoisyZigzagProduct noisy_zigzag_product(const TreeProduct& space, const ThetaCone& theta,
                                        const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                        int steps, double step_len, double noise, PhiloxRng& rng) {
  // Base: a deterministic sample point; ends: the first extendable leaf per
  // factor reachable ahead of the base.
  ProductPoint base(size_t(space.rank()));
  std::vector<int> ends(size_t(space.rank()));
  for (int i = 0; i < space.rank(); ++i) {
    base[size_t(i)] = space.factor(i).vertex_point(0);
    ends[size_t(i)] = space.factor(i).ends().front();
  }
  std::vector<double> lengths(size_t(steps), step_len);
  PolyPath<TreeProduct> clean = zigzag_generator(space, theta, v1, v2, lengths, base, ends);
  NoisyZigzagProduct out{clean, clean.points.front(), clean.points.back()};
  if (noise > 0.0) {
    std::vector<ProductPoint> pts = clean.points;
    for (size_t p = 0; p < pts.size(); ++p) {
      for (int i = 0; i < space.rank(); ++i) {
        const MetricTree& T = space.factor(i);
        double amp = rng.uniform(0.0, noise / std::sqrt(double(space.rank())));
        const auto& tends = T.ends();
        int e = tends[size_t(rng.uniform_index(uint64_t(tends.size())))];
        pts[p][size_t(i)] = T.point_toward_end(pts[p][size_t(i)], e, amp);
      }
    }
    out.path = make_path(space, std::move(pts));
  }
  return out;
}

EmbeddedTripod embedded_tripod(int rank, double leg_length, int samples_per_leg) {
  // Factor tree: center 0 with three long arms 1,2,3, all extendable.
  double arm = 2.0 * leg_length + 5.0;
  std::vector<std::tuple<int, int, double>> edges = {{0, 1, arm}, {0, 2, arm}, {0, 3, arm}};
  std::vector<MetricTree> factors;
  for (int i = 0; i < rank; ++i) factors.emplace_back(4, edges, std::vector<int>{1, 2, 3});
  TreeProduct space(std::move(factors));

  Eigen::VectorXd w = Eigen::VectorXd::Constant(rank, 1.0 / std::sqrt(double(rank)));
  ProductPoint center(size_t(rank));
  for (int i = 0; i < rank; ++i) center[size_t(i)] = space.factor(i).vertex_point(0);

  std::vector<ProductPoint> points{center};
  std::vector<int> leg{-1};
  std::vector<double> arc{0.0};
  for (int l = 0; l < 3; ++l) {
    for (int s = 1; s <= samples_per_leg; ++s) {
      double t = leg_length * double(s) / double(samples_per_leg);
      ProductPoint p(size_t(rank));
      for (int i = 0; i < rank; ++i)
        p[size_t(i)] = space.factor(i).point_toward_end(center[size_t(i)], l + 1, w(i) * t);
      points.push_back(std::move(p));
      leg.push_back(l);
      arc.push_back(t);
    }
  }
  int n = int(points.size());
  Eigen::MatrixXd intr(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) {
        intr(a, b) = 0.0;
      } else if (leg[size_t(a)] == leg[size_t(b)]) {
        intr(a, b) = std::abs(arc[size_t(a)] - arc[size_t(b)]);
      } else {
        intr(a, b) = arc[size_t(a)] + arc[size_t(b)];
      }
    }
  }
  EmbeddedTripod out{std::move(space), std::move(points), std::move(leg), std::move(arc),
                     std::move(intr), std::move(w)};
  return out;
}

}  // namespace morsekit
