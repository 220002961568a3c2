#pragma once

// P2 triangular meshes of the truncated strip (-Z, Z) x (0, H) with two
// zero-thickness screens at z = -L and z = +L. Screen points outside the
// apertures carry two vertices, one per face.

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace screenwave::mesh {

using Index = std::int32_t;
/// (z, y): axial coordinate first.
using Point = Eigen::Vector2d;

/// Open interval (lo, hi) removed from a screen.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval centered(double center, double width) {
    return {center - 0.5 * width, center + 0.5 * width};
  }
  double width() const noexcept { return hi - lo; }
  double center() const noexcept { return 0.5 * (lo + hi); }
};

struct Screen {
  bool present = true;
  std::vector<Interval> holes;  // empty: fully closed

  static Screen none() { return {false, {}}; }
  static Screen closed() { return {true, {}}; }
  static Screen with_holes(std::vector<Interval> holes) {
    return {true, std::move(holes)};
  }

  /// True if y lies on the screen material (closed set minus closed holes).
  bool blocks(double y, double height, double tol = 1e-12) const;
};

struct WaveguideGeometry2D {
  double height = 1.0;
  double L = 0.5;  // screens at z = -L (left) and z = +L (right)
  Screen left;
  Screen right;
  double Z = 1.5;  // artificial boundaries at z = -Z and z = +Z

  void validate() const;
  /// Smallest aperture width over both screens (or height if none).
  double min_feature() const;
};

enum class BoundaryTag : std::uint8_t {
  interior,
  wall,
  screen_face,
  gamma_minus,
  gamma_plus
};

const char* to_string(BoundaryTag tag);

struct Edge {
  Index a = -1;
  Index b = -1;
  Index mid = -1;  // P2 node at the midpoint
  BoundaryTag tag = BoundaryTag::interior;
  std::array<Index, 2> owners{-1, -1};

  int owner_count() const noexcept {
    return int(owners[0] >= 0) + int(owners[1] >= 0);
  }
};

/// Two nodes at the same location on a screen, one per face.
struct SeamPair {
  Index left = -1;
  Index right = -1;
};

struct Mesh {
  WaveguideGeometry2D geometry;
  /// Vertices in [0, n_vertices), then one midpoint node per edge.
  std::vector<Point> nodes;
  Index n_vertices = 0;
  /// Counter-clockwise vertex triples.
  std::vector<std::array<Index, 3>> triangles;
  /// Edge indices of (v0 v1), (v1 v2), (v2 v0).
  std::vector<std::array<Index, 3>> triangle_edges;
  std::vector<Edge> edges;
  std::vector<SeamPair> seam_table;

  Index n_nodes() const noexcept { return Index(nodes.size()); }
  /// v0 v1 v2 m01 m12 m20
  std::array<Index, 6> p2_nodes(std::size_t t) const;
  double area() const;

  /// Derive edges, midpoint nodes, boundary tags and owners from the
  /// triangle list. Drops any previously stored midpoint nodes.
  void build_edges();
};

struct MeshOptions {
  double h = 0.05;
  double tip_grading = 0.5;
  int tip_layers = 4;
};

/// Quadtree-graded triangulation aligned with z = 0, +-L, +-Z and y = H/2;
/// aperture endpoints are mesh vertices.
Mesh build_mesh(const WaveguideGeometry2D& geom, const MeshOptions& options);

struct MeshReport {
  bool orientation_ok = false;
  bool conformity_ok = false;
  double min_angle_deg = 0.0;
  std::size_t seam_count = 0;
  bool boundary_closed = false;

  bool ok() const {
    return orientation_ok && conformity_ok && boundary_closed;
  }
};

MeshReport validate_mesh(const Mesh& mesh);

/// Euler characteristic of the slit strip implied by the geometry:
/// 1 plus one per fully closed screen, minus one per interior screen segment.
int expected_euler_characteristic(const WaveguideGeometry2D& geom);

/// Plain-text listing: `v z y`, `t i j k`, `s left right`, `b a b tag`.
void write_mesh(std::ostream& os, const Mesh& mesh);

/// Uniform bucket grid over triangle bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  struct Hit {
    std::size_t triangle = 0;
    std::array<double, 3> bary{};
  };
  std::optional<Hit> locate(const Point& p) const;

 private:
  const Mesh* mesh_;
  Point lo_, hi_;
  int nz_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace screenwave::mesh
