#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace morsekit {

/// A point of a metric tree: position along an edge, measured from the
/// edge's first endpoint. Edges include one synthetic ray edge per
/// extendable leaf, so points beyond a flagged leaf are ordinary points
/// with the overshoot as offset.
struct TreePoint {
  int edge = 0;
  double offset = 0.0;
};

/// Finite metric tree with extendable leaves standing in for infinite rays.
///
/// All geodesic and projection routines transparently extend beyond flagged
/// leaves. Ends are identified with extendable leaf vertex ids.
class MetricTree {
public:
  struct Edge {
    int u;
    int v;       // -1 for a ray edge at an extendable leaf
    double len;  // infinite for ray edges (stored as +inf)
  };

  MetricTree(int num_vertices, const std::vector<std::tuple<int, int, double>>& edges,
             const std::vector<int>& extendable_leaves);

  /// Load from JSON: {"vertices": n, "edges": [[u,v,len],...],
  /// "extendable_leaves": [ids]}.
  static MetricTree from_json(const std::string& text);
  std::string to_json() const;

  int num_vertices() const { return n_; }
  int num_edges() const { return int(edges_.size()); }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<int>& ends() const { return extendable_leaves_; }
  double total_edge_length() const { return total_len_; }

  TreePoint vertex_point(int v) const;
  /// Point at `overshoot` beyond the extendable leaf `end`.
  TreePoint end_point(int end, double overshoot) const;
  bool is_vertex(const TreePoint& p, int v, double tol = 1e-9) const;

  double distance(const TreePoint& a, const TreePoint& b) const;
  double vertex_distance(int a, int b) const { return vdist_[a][b]; }

  /// Point at distance s from a toward b (s <= d(a,b)).
  TreePoint point_on_geodesic(const TreePoint& a, const TreePoint& b, double s) const;

  /// Point at distance t from x along the ray toward the end (extends past
  /// the leaf).
  TreePoint point_toward_end(const TreePoint& x, int end, double t) const;

  /// Distance at which the rays from x toward ends e and f separate
  /// (+inf when e == f).
  double ray_divergence(const TreePoint& x, int e, int f) const;

  /// g_e(p) with d(p, far point on end e at S) = S + g_e(p).
  double end_offset(const TreePoint& p, int end) const;

  /// Nearest point of x on the geodesic segment [a, b], and the distance.
  std::pair<TreePoint, double> project_to_segment(const TreePoint& x, const TreePoint& a,
                                                  const TreePoint& b) const;

  /// Nearest point of x on the line through the two (distinct) ends.
  std::pair<TreePoint, double> project_to_line(const TreePoint& x, int end_minus, int end_plus) const;
  double line_distance(const TreePoint& x, int end_minus, int end_plus) const;
  bool on_line(const TreePoint& x, int end_minus, int end_plus, double tol = 1e-9) const;

  bool on_segment(const TreePoint& x, const TreePoint& a, const TreePoint& b, double tol = 1e-9) const;
  /// y on the ray [x, end)?
  bool on_ray(const TreePoint& x, int end, const TreePoint& y, double tol = 1e-9) const;

  /// Exact four-point hyperbolicity defect over all vertex quadruples.
  double four_point_delta_vertices() const;

  /// Deterministic random point within the finite part (plus bounded
  /// overshoot on ray edges).
  TreePoint sample_point(uint64_t seed, uint64_t index, double max_overshoot = 2.0) const;

private:
  void build();
  // Distance from p to the vertex v.
  double to_vertex(const TreePoint& p, int v) const;
  // Walks from vertex a toward vertex b.
  int next_hop(int a, int b) const { return hop_[a][b]; }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> extendable_leaves_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // vertex -> (edge, other vertex)
  std::vector<std::vector<double>> vdist_;
  std::vector<std::vector<int>> hop_;
  std::vector<int> ray_edge_of_leaf_;  // leaf vertex -> ray edge index, -1 otherwise
  double total_len_ = 0.0;
};

struct TreeFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace morsekit
