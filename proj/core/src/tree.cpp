#include "morsekit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "morsekit/rng.hpp"

namespace morsekit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MetricTree::MetricTree(int num_vertices, const std::vector<std::tuple<int, int, double>>& edges,
                       const std::vector<int>& extendable_leaves)
    : n_(num_vertices), extendable_leaves_(extendable_leaves) {
  for (auto [u, v, len] : edges) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_ || u == v)
      throw TreeFormatError("tree edge endpoints out of range");
    if (!(len > 0.0)) throw TreeFormatError("tree edge lengths must be positive");
    edges_.push_back({u, v, len});
  }
  if (int(edges_.size()) != n_ - 1) throw TreeFormatError("a tree on n vertices needs n-1 edges");
  build();
}

void MetricTree::build() {
  adj_.assign(n_, {});
  total_len_ = 0.0;
  for (int e = 0; e < int(edges_.size()); ++e) {
    adj_[edges_[e].u].push_back({e, edges_[e].v});
    adj_[edges_[e].v].push_back({e, edges_[e].u});
    total_len_ += edges_[e].len;
  }

  // Connectivity (acyclicity follows from the edge count).
  {
    std::vector<char> seen(n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (auto [e, v] : adj_[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++cnt;
          q.push(v);
        }
    }
    if (cnt != n_) throw TreeFormatError("tree is not connected");
  }

  ray_edge_of_leaf_.assign(n_, -1);
  for (int leaf : extendable_leaves_) {
    if (leaf < 0 || leaf >= n_) throw TreeFormatError("extendable leaf id out of range");
    if (adj_[leaf].size() != 1) throw TreeFormatError("extendable leaf is not a leaf");
    int e = int(edges_.size());
    edges_.push_back({leaf, -1, kInf});
    ray_edge_of_leaf_[leaf] = e;
    adj_[leaf].push_back({e, -1});
  }

  // All-pairs vertex distances and next hops (trees are tiny here).
  vdist_.assign(n_, std::vector<double>(n_, kInf));
  hop_.assign(n_, std::vector<int>(n_, -1));
  for (int s = 0; s < n_; ++s) {
    vdist_[s][s] = 0.0;
    std::vector<int> parent(n_, -1);
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (auto [e, v] : adj_[u]) {
        if (v < 0) continue;  // ray edge
        if (vdist_[s][v] != kInf) continue;
        vdist_[s][v] = vdist_[s][u] + edges_[e].len;
        parent[v] = u;
        q.push(v);
      }
    }
    for (int t = 0; t < n_; ++t) {
      if (t == s) continue;
      int cur = t;
      while (parent[cur] != s && parent[cur] != -1) cur = parent[cur];
      hop_[s][t] = cur;
    }
  }
}

MetricTree MetricTree::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("vertices").get<int>();
  std::vector<std::tuple<int, int, double>> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
  std::vector<int> leaves;
  if (j.contains("extendable_leaves"))
    for (const auto& l : j.at("extendable_leaves")) leaves.push_back(l.get<int>());
  return MetricTree(n, edges, leaves);
}

std::string MetricTree::to_json() const {
  nlohmann::json j;
  j["vertices"] = n_;
  auto edges = nlohmann::json::array();
  for (const auto& e : edges_)
    if (e.v >= 0) edges.push_back({e.u, e.v, e.len});
  j["edges"] = edges;
  j["extendable_leaves"] = extendable_leaves_;
  return j.dump();
}

TreePoint MetricTree::vertex_point(int v) const {
  for (auto [e, w] : adj_[v]) {
    if (edges_[e].u == v) return {e, 0.0};
    if (edges_[e].v == v) return {e, edges_[e].len};
  }
  throw TreeFormatError("isolated vertex");
}

TreePoint MetricTree::end_point(int end, double overshoot) const {
  int e = ray_edge_of_leaf_[end];
  if (e < 0) throw TreeFormatError("not an extendable leaf");
  return {e, overshoot};
}

bool MetricTree::is_vertex(const TreePoint& p, int v, double tol) const {
  return to_vertex(p, v) <= tol;
}

double MetricTree::to_vertex(const TreePoint& p, int v) const {
  const Edge& e = edges_[p.edge];
  double via_u = p.offset + vdist_[e.u][v];
  if (e.v < 0) return via_u;  // ray edge: only exit through the leaf
  return std::min(via_u, (e.len - p.offset) + vdist_[e.v][v]);
}

double MetricTree::distance(const TreePoint& a, const TreePoint& b) const {
  if (a.edge == b.edge) return std::abs(a.offset - b.offset);
  const Edge& ea = edges_[a.edge];
  const Edge& eb = edges_[b.edge];
  double best = kInf;
  // exit a through one endpoint, enter b through one endpoint
  for (int ai = 0; ai < 2; ++ai) {
    int av = ai == 0 ? ea.u : ea.v;
    if (av < 0) continue;
    double da = ai == 0 ? a.offset : ea.len - a.offset;
    for (int bi = 0; bi < 2; ++bi) {
      int bv = bi == 0 ? eb.u : eb.v;
      if (bv < 0) continue;
      double db = bi == 0 ? b.offset : eb.len - b.offset;
      best = std::min(best, da + vdist_[av][bv] + db);
    }
  }
  return best;
}

TreePoint MetricTree::point_on_geodesic(const TreePoint& a, const TreePoint& b, double s) const {
  double total = distance(a, b);
  s = std::clamp(s, 0.0, total);
  if (a.edge == b.edge) {
    double dir = b.offset >= a.offset ? 1.0 : -1.0;
    return {a.edge, a.offset + dir * s};
  }
  // Determine the exit endpoint of a's edge on the geodesic.
  const Edge& ea = edges_[a.edge];
  auto leg = [&](int av, double da) {
    // distance via exit vertex av
    double rest = kInf;
    const Edge& eb = edges_[b.edge];
    for (int bi = 0; bi < 2; ++bi) {
      int bv = bi == 0 ? eb.u : eb.v;
      if (bv < 0) continue;
      double db = bi == 0 ? b.offset : eb.len - b.offset;
      rest = std::min(rest, vdist_[av][bv] + db);
    }
    return da + rest;
  };
  int exit_v;
  double exit_d;
  if (ea.v < 0) {
    exit_v = ea.u;
    exit_d = a.offset;
  } else {
    double via_u = leg(ea.u, a.offset);
    double via_v = leg(ea.v, ea.len - a.offset);
    if (via_u <= via_v) {
      exit_v = ea.u;
      exit_d = a.offset;
    } else {
      exit_v = ea.v;
      exit_d = ea.len - a.offset;
    }
  }
  if (s <= exit_d) {
    // still on a's edge, moving toward exit_v
    double off = a.offset + (exit_v == ea.u ? -s : s);
    return {a.edge, off};
  }
  s -= exit_d;
  // Walk vertices toward b's edge.
  int cur = exit_v;
  while (true) {
    const Edge& eb = edges_[b.edge];
    // If b's edge hangs off cur, finish on it.
    if (eb.u == cur || (eb.v >= 0 && eb.v == cur)) {
      double db_cur = eb.u == cur ? b.offset : eb.len - b.offset;
      if (s <= db_cur + 1e-12) {
        double off = eb.u == cur ? s : eb.len - s;
        return {b.edge, off};
      }
    }
    // Step toward the endpoint of b's edge nearest through the tree.
    int target = eb.u;
    if (eb.v >= 0) {
      double via_u = vdist_[cur][eb.u] + b.offset;
      double via_v = vdist_[cur][eb.v] + eb.len - b.offset;
      target = via_u <= via_v ? eb.u : eb.v;
    }
    if (cur == target) {
      // b is on a ray edge beyond cur, or numerical snap: land on b's edge.
      double off = eb.u == cur ? s : eb.len - s;
      return {b.edge, off};
    }
    int nxt = hop_[cur][target];
    // find edge cur-nxt
    int eid = -1;
    for (auto [e, w] : adj_[cur])
      if (w == nxt) {
        eid = e;
        break;
      }
    const Edge& estep = edges_[eid];
    if (s <= estep.len + 1e-12) {
      double off = estep.u == cur ? s : estep.len - s;
      return {eid, off};
    }
    s -= estep.len;
    cur = nxt;
  }
}

TreePoint MetricTree::point_toward_end(const TreePoint& x, int end, double t) const {
  double gx = end_offset(x, end);  // d(x, far) = S + gx
  double S = std::max(0.0, t - gx) + 1.0;
  TreePoint far = end_point(end, S);
  return point_on_geodesic(x, far, t);
}

double MetricTree::ray_divergence(const TreePoint& x, int e, int f) const {
  if (e == f) return kInf;
  // 1/2 (d(x, le) + d(x, lf) - d(le, lf)) with leaf overshoot 0, then both
  // rays continue: divergence is the Gromov product of the two far points.
  double ge = end_offset(x, e);
  double gf = end_offset(x, f);
  double d_ef = vdist_[e][f];  // between the leaf vertices; rays diverge at/before ends
  return 0.5 * (ge + gf - d_ef);
}

double MetricTree::end_offset(const TreePoint& p, int end) const {
  int re = ray_edge_of_leaf_[end];
  if (re < 0) throw TreeFormatError("not an extendable leaf");
  if (p.edge == re) return -p.offset;
  return to_vertex(p, end);
}

std::pair<TreePoint, double> MetricTree::project_to_segment(const TreePoint& x, const TreePoint& a,
                                                            const TreePoint& b) const {
  double dab = distance(a, b);
  double t = 0.5 * (distance(a, x) + dab - distance(x, b));
  t = std::clamp(t, 0.0, dab);
  TreePoint p = point_on_geodesic(a, b, t);
  return {p, distance(x, p)};
}

std::pair<TreePoint, double> MetricTree::project_to_line(const TreePoint& x, int end_minus,
                                                         int end_plus) const {
  double d = line_distance(x, end_minus, end_plus);
  // The geodesic from x toward either end reaches the line at the projection.
  TreePoint p = point_toward_end(x, end_plus, d);
  return {p, d};
}

double MetricTree::line_distance(const TreePoint& x, int end_minus, int end_plus) const {
  if (end_minus == end_plus) throw TreeFormatError("line needs two distinct ends");
  double g1 = end_offset(x, end_minus);
  double g2 = end_offset(x, end_plus);
  double d = 0.5 * (g1 + g2 - vdist_[end_minus][end_plus]);
  return std::max(0.0, d);
}

bool MetricTree::on_line(const TreePoint& x, int end_minus, int end_plus, double tol) const {
  return line_distance(x, end_minus, end_plus) <= tol;
}

bool MetricTree::on_segment(const TreePoint& x, const TreePoint& a, const TreePoint& b,
                            double tol) const {
  return distance(a, x) + distance(x, b) <= distance(a, b) + tol;
}

bool MetricTree::on_ray(const TreePoint& x, int end, const TreePoint& y, double tol) const {
  // y on [x, end): d(x,y) + g_end(y) == g_end(x)
  return std::abs(distance(x, y) + end_offset(y, end) - end_offset(x, end)) <= tol;
}

double MetricTree::four_point_delta_vertices() const {
  double delta = 0.0;
  for (int a = 0; a < n_; ++a)
    for (int b = a + 1; b < n_; ++b)
      for (int c = b + 1; c < n_; ++c)
        for (int d = c + 1; d < n_; ++d) {
          double s1 = vdist_[a][b] + vdist_[c][d];
          double s2 = vdist_[a][c] + vdist_[b][d];
          double s3 = vdist_[a][d] + vdist_[b][c];
          double mx = std::max({s1, s2, s3});
          double mid = s1 + s2 + s3 - mx - std::min({s1, s2, s3});
          delta = std::max(delta, 0.5 * (mx - mid));
        }
  return delta;
}

TreePoint MetricTree::sample_point(uint64_t seed, uint64_t index, double max_overshoot) const {
  PhiloxRng rng(seed, index);
  int e = int(rng.uniform_index(uint64_t(edges_.size())));
  const Edge& ed = edges_[e];
  double len = ed.v < 0 ? max_overshoot : ed.len;
  return {e, rng.uniform(0.0, len)};
}

}  // namespace morsekit
