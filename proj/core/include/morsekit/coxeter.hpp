#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace morsekit {

constexpr double kNumTol = 1e-9;  // boundary points resolve to the closed side

class ReflectionGroup;

/// A face of the model chamber, recorded by the set of chamber walls that
/// contain it. The empty set is the full chamber.
struct FaceType {
  std::set<int> wall_subset;

  bool operator==(const FaceType& o) const { return wall_subset == o.wall_subset; }
  bool operator!=(const FaceType& o) const { return !(*this == o); }
  bool is_full_chamber() const { return wall_subset.empty(); }
  std::string to_string() const;
};

struct ChamberProjection {
  Eigen::VectorXd dominant;
  Eigen::MatrixXd witness;  // witness * v == dominant
  int witness_index = 0;
};

enum class StarClass { in_theta_star, in_open_star, in_closed_star_only, outside };

/// Finite reflection group acting on the model flat, with explicit element
/// list. Supported types: A1^k (k <= 6), A2, B2.
class ReflectionGroup {
public:
  static ReflectionGroup from_name(const std::string& name);  // "A1^3", "A2", "B2"
  static ReflectionGroup a1k(int k);
  static ReflectionGroup a2();
  static ReflectionGroup b2();

  int rank() const { return rank_; }
  const std::string& name() const { return name_; }
  const std::vector<Eigen::VectorXd>& simple_roots() const { return simple_roots_; }
  const std::vector<Eigen::VectorXd>& all_roots() const { return all_roots_; }
  const std::vector<Eigen::MatrixXd>& elements() const { return elements_; }
  const Eigen::MatrixXd& element(int i) const { return elements_[i]; }
  int order() const { return int(elements_.size()); }

  /// Inward unit normals of the fundamental chamber (= simple roots here).
  const std::vector<Eigen::VectorXd>& chamber_normals() const { return simple_roots_; }
  /// Unit chamber vertex directions: <n_i, omega_j> = 0 for i != j, > 0 for i == j.
  const std::vector<Eigen::VectorXd>& vertex_directions() const { return vertex_dirs_; }

  /// Longest element w_o (sends the chamber to its negative).
  const Eigen::MatrixXd& longest_element() const { return w0_; }

  /// Connected components of the Coxeter diagram, as wall index sets.
  const std::vector<std::vector<int>>& diagram_components() const { return components_; }

  bool in_chamber(const Eigen::VectorXd& v, double tol = kNumTol) const;

  ChamberProjection chamber_project(const Eigen::VectorXd& v) const;

  /// iota = -w_o on the chamber.
  Eigen::VectorXd iota(const Eigen::VectorXd& t) const;

  /// iota image of a face type (set of walls vanishing on -w_o(face)).
  FaceType iota_face(const FaceType& f) const;

  /// Walls vanishing at t (t must be in the chamber and nonzero).
  FaceType face_of(const Eigen::VectorXd& t) const;

  /// Elements fixing the face pointwise (standard parabolic W_S), as indices
  /// into elements().
  std::vector<int> face_stabilizer(const FaceType& f) const;

  /// Membership of a direction v in the star / open star of the face placed
  /// by `witness` (placement = witness * face). Scale-invariant in v.
  bool in_star(const FaceType& f, const Eigen::MatrixXd& witness, const Eigen::VectorXd& v) const;
  bool in_open_star(const FaceType& f, const Eigen::MatrixXd& witness, const Eigen::VectorXd& v) const;

  /// Angular distance from v to the star boundary of the placed face.
  /// Negative values are never returned; v need not lie in the star (then the
  /// value is the distance to the boundary as a subset of the sphere).
  double angle_to_star_boundary(const FaceType& f, const Eigen::MatrixXd& witness,
                                const Eigen::VectorXd& v) const;
  bool star_boundary_empty(const FaceType& f) const;

  /// Largest achievable margin for ThetaCone at this face.
  double max_margin(const FaceType& f) const;

  /// Sample unit directions in the star of the placed face. Deterministic.
  std::vector<Eigen::VectorXd> sample_star_directions(const FaceType& f,
                                                      const Eigen::MatrixXd& witness,
                                                      int count, uint64_t seed) const;

  /// Barycenter direction of the face (unit).
  Eigen::VectorXd face_barycenter(const FaceType& f) const;

  /// Index of an element equal to m (tolerance), -1 if absent.
  int find_element(const Eigen::MatrixXd& m) const;

private:
  ReflectionGroup() = default;
  void finalize();

  std::string name_;
  int rank_ = 0;
  std::vector<Eigen::VectorXd> simple_roots_;
  std::vector<Eigen::VectorXd> all_roots_;
  std::vector<Eigen::MatrixXd> elements_;
  std::vector<Eigen::VectorXd> vertex_dirs_;
  Eigen::MatrixXd w0_;
  std::vector<std::vector<int>> components_;
};

/// Uniform-regularity region in a star: unit types with angular margin at
/// least `margin` from the star boundary.
class ThetaCone {
public:
  ThetaCone(const ReflectionGroup& group, FaceType face, double margin);

  const ReflectionGroup& group() const { return *group_; }
  const FaceType& face() const { return face_; }
  double margin() const { return margin_; }

  /// eps_0: angular margin from the star boundary. Equals margin by
  /// construction.
  double eps0() const { return margin_; }

  /// Membership of a chamber type point (t in the fundamental chamber).
  bool contains_type(const Eigen::VectorXd& t, double tol = kNumTol) const;
  /// Angular margin of a chamber type point over the star boundary.
  double type_margin(const Eigen::VectorXd& t) const;

  /// A type in the deep interior of Theta (margin maximizer direction).
  Eigen::VectorXd barycenter_type() const;

  /// Radius bound rho(Theta, xi): max angle from xi (a type in the face) to
  /// Theta, estimated by sampled maximization.
  double radius_bound(const Eigen::VectorXd& xi, int samples = 4096) const;

private:
  const ReflectionGroup* group_;
  FaceType face_;
  double margin_;
};

StarClass star_classify(const ReflectionGroup& group, const FaceType& face,
                        const Eigen::MatrixXd& witness, const Eigen::VectorXd& v,
                        const ThetaCone* theta = nullptr);

double eps0(const ThetaCone& theta);

/// eps_0(Theta, Theta'): angular distance between Theta and the star
/// complement of Theta', estimated by minimization over sampled pairs.
/// Requires nested cones on the same face (Theta inside the interior of
/// Theta'). For margin-parametrized cones this equals margin - margin'.
double eps0_pair(const ThetaCone& theta, const ThetaCone& theta_prime, int samples = 4096);

struct NotNested : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroVector : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace morsekit
