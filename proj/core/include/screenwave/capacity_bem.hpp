#pragma once

// Harmonic capacity and dipole moment of a flat crack in R^3 from a
// first-kind single-layer equation with piecewise-constant collocation.

#include <Eigen/Core>
#include <vector>

namespace screenwave::bem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class ShapeKind { disk, rectangle, polygon };

/// Planar hole shape in the crack plane (third coordinate zero).
class CrackShape {
 public:
  static CrackShape disk(double radius, Vec2 center = Vec2::Zero());
  static CrackShape rectangle(double width, double height,
                              Vec2 center = Vec2::Zero());
  /// Simple polygon, either orientation; stored counter-clockwise.
  static CrackShape polygon(std::vector<Vec2> vertices);

  ShapeKind kind() const noexcept { return kind_; }
  double area() const;
  /// Largest distance between two points of the shape.
  double diameter() const;
  /// Same shape scaled by `a` about the origin.
  CrackShape scaled(double a) const;

  const Vec2& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }

 private:
  CrackShape() = default;

  ShapeKind kind_ = ShapeKind::disk;
  Vec2 center_ = Vec2::Zero();
  double radius_ = 0.0;
  double width_ = 0.0;
  double height_ = 0.0;
  std::vector<Vec2> vertices_;
};

/// Straight-edged convex cell, 3 or 4 vertices, counter-clockwise.
struct Panel {
  std::vector<Vec2> vertices;
  Vec2 centroid = Vec2::Zero();
  double area = 0.0;

  static Panel from_vertices(std::vector<Vec2> vertices);
  double diameter() const;
};

struct CrackPanels {
  std::vector<Panel> panels;

  std::size_t size() const noexcept { return panels.size(); }
  double total_area() const;
  /// Bounding extent of all panel vertices.
  double diameter() const;
};

/// Edge-graded panel covering with roughly `n` cells; n >= 4.
CrackPanels panelize(const CrackShape& shape, int n);

/// Splits every panel into four; the result partitions the input exactly.
CrackPanels refine(const CrackPanels& panels);

/// Integral of 1/|x - y| over the panel, for x in the panel's plane.
/// Exact (edge-wise asinh formula), valid for x inside, outside or on edges.
double inverse_distance_integral(const Panel& panel, const Vec2& x);

/// A(i, j) = (4 pi)^-1 * integral over panel j of 1/|c_i - y|.
Eigen::MatrixXd collocation_matrix(const CrackPanels& panels);

struct CapacityResult {
  double capacity = 0.0;
  /// First moments of the density; third component is identically zero.
  Vec2 dipole = Vec2::Zero();
  /// Single-layer density per panel.
  std::vector<double> density;
};

CapacityResult solve_capacity(const CrackPanels& panels);

/// Single-layer potential of the solved density at a far point
/// (|point| > 3 * diameter of the crack).
double eval_far_field(const CapacityResult& result, const CrackPanels& panels,
                      const Vec3& point);

/// capacity/|xi| + dipole . grad Phi(xi), Phi = -1/(4 pi |xi|).
double far_field_expansion(const CapacityResult& result, const Vec3& point);

}  // namespace screenwave::bem
