#include "screenwave/capacity_bem.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "screenwave/errors.hpp"

namespace screenwave::bem {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

Vec2 area_centroid(const std::vector<Vec2>& v) {
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(d) <= 1e-14 * scale) return 0;
  return d > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                        const Vec2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool is_simple(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

// Breakpoints on [0, 1]. With enough cells the outermost uniform cell at each
// graded end is replaced by layers of relative size 1/2, 1/4, 1/8, 1/8.
std::vector<double> graded_breaks(int cells, bool grade_low, bool grade_high) {
  const int extra = 3 * (int(grade_low) + int(grade_high));
  const int min_uniform = 2 + int(grade_low) + int(grade_high);
  const bool graded = extra > 0 && cells - extra >= min_uniform;
  const int uniform = graded ? cells - extra : cells;
  const double du = 1.0 / uniform;

  std::vector<double> b{0.0};
  auto push_rel = [&](double x) { b.push_back(b.back() + x * du); };
  for (int k = 0; k < uniform; ++k) {
    if (graded && grade_low && k == 0) {
      for (double f : {0.125, 0.125, 0.25, 0.5}) push_rel(f);
    } else if (graded && grade_high && k == uniform - 1) {
      for (double f : {0.5, 0.25, 0.125, 0.125}) push_rel(f);
    } else {
      push_rel(1.0);
    }
  }
  b.back() = 1.0;
  return b;
}

// Radial fan covering of a star-shaped polygon around `c`; each boundary
// edge is split `per_edge` times, `rings` layers graded toward the boundary.
CrackPanels fan_panels(const Vec2& c, const std::vector<Vec2>& boundary,
                       int rings, int per_edge) {
  const auto s = graded_breaks(rings, false, true);
  const std::size_t nv = boundary.size();
  auto point = [&](double sr, std::size_t edge, double tau) -> Vec2 {
    const Vec2& a = boundary[edge];
    const Vec2& b = boundary[(edge + 1) % nv];
    return c + sr * (a + tau * (b - a) - c);
  };

  CrackPanels out;
  for (std::size_t e = 0; e < nv; ++e) {
    for (int t = 0; t < per_edge; ++t) {
      const double t0 = double(t) / per_edge;
      const double t1 = double(t + 1) / per_edge;
      out.panels.push_back(
          Panel::from_vertices({c, point(s[1], e, t0), point(s[1], e, t1)}));
      for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        out.panels.push_back(Panel::from_vertices(
            {point(s[k], e, t0), point(s[k + 1], e, t0), point(s[k + 1], e, t1),
             point(s[k], e, t1)}));
      }
    }
  }
  return out;
}

}  // namespace

CrackShape CrackShape::disk(double radius, Vec2 center) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidArgument("disk radius must be positive");
  CrackShape s;
  s.kind_ = ShapeKind::disk;
  s.radius_ = radius;
  s.center_ = center;
  return s;
}

CrackShape CrackShape::rectangle(double width, double height, Vec2 center) {
  if (!(width > 0.0) || !(height > 0.0))
    throw InvalidArgument("rectangle sides must be positive");
  CrackShape s;
  s.kind_ = ShapeKind::rectangle;
  s.width_ = width;
  s.height_ = height;
  s.center_ = center;
  return s;
}

CrackShape CrackShape::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3)
    throw InvalidArgument("polygon needs at least three vertices");
  const double a = signed_area(vertices);
  if (!(std::abs(a) > 0.0)) throw InvalidArgument("polygon has zero area");
  if (a < 0.0) std::reverse(vertices.begin(), vertices.end());
  if (!is_simple(vertices))
    throw InvalidArgument("polygon boundary self-intersects");
  CrackShape s;
  s.kind_ = ShapeKind::polygon;
  s.center_ = area_centroid(vertices);
  s.vertices_ = std::move(vertices);
  return s;
}

double CrackShape::area() const {
  switch (kind_) {
    case ShapeKind::disk:
      return kPi * radius_ * radius_;
    case ShapeKind::rectangle:
      return width_ * height_;
    case ShapeKind::polygon:
      return signed_area(vertices_);
  }
  return 0.0;
}

double CrackShape::diameter() const {
  switch (kind_) {
    case ShapeKind::disk:
      return 2.0 * radius_;
    case ShapeKind::rectangle:
      return std::hypot(width_, height_);
    case ShapeKind::polygon: {
      double d = 0.0;
      for (const auto& p : vertices_)
        for (const auto& q : vertices_) d = std::max(d, (p - q).norm());
      return d;
    }
  }
  return 0.0;
}

CrackShape CrackShape::scaled(double a) const {
  if (!(a > 0.0)) throw InvalidArgument("scale factor must be positive");
  CrackShape s = *this;
  s.center_ *= a;
  s.radius_ *= a;
  s.width_ *= a;
  s.height_ *= a;
  for (auto& v : s.vertices_) v *= a;
  return s;
}

Panel Panel::from_vertices(std::vector<Vec2> vertices) {
  Panel p;
  double a = signed_area(vertices);
  if (a < 0.0) {
    std::reverse(vertices.begin(), vertices.end());
    a = -a;
  }
  if (!(a > 0.0)) throw InvalidArgument("degenerate panel");
  p.area = a;
  p.centroid = area_centroid(vertices);
  p.vertices = std::move(vertices);
  return p;
}

double Panel::diameter() const {
  double d = 0.0;
  for (const auto& a : vertices)
    for (const auto& b : vertices) d = std::max(d, (a - b).norm());
  return d;
}

double CrackPanels::total_area() const {
  double s = 0.0;
  for (const auto& p : panels) s += p.area;
  return s;
}

double CrackPanels::diameter() const {
  if (panels.empty()) return 0.0;
  Vec2 lo = panels.front().vertices.front();
  Vec2 hi = lo;
  for (const auto& p : panels)
    for (const auto& v : p.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  return (hi - lo).norm();
}

CrackPanels panelize(const CrackShape& shape, int n) {
  if (n < 4) throw InvalidArgument("panel count target must be >= 4");

  switch (shape.kind()) {
    case ShapeKind::rectangle: {
      const double w = shape.width();
      const double h = shape.height();
      const int nx = std::max(2, int(std::lround(std::sqrt(n * w / h))));
      const int ny = std::max(2, int(std::lround(double(n) / nx)));
      const auto bx = graded_breaks(nx, true, true);
      const auto by = graded_breaks(ny, true, true);
      const Vec2 origin = shape.center() - Vec2(0.5 * w, 0.5 * h);
      CrackPanels out;
      out.panels.reserve(std::size_t(nx) * ny);
      for (std::size_t j = 0; j + 1 < by.size(); ++j)
        for (std::size_t i = 0; i + 1 < bx.size(); ++i) {
          const double x0 = origin.x() + w * bx[i], x1 = origin.x() + w * bx[i + 1];
          const double y0 = origin.y() + h * by[j], y1 = origin.y() + h * by[j + 1];
          out.panels.push_back(Panel::from_vertices(
              {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)}));
        }
      return out;
    }
    case ShapeKind::disk: {
      // Polar layout: `rings` radial layers, 4*rings sectors.
      const int rings = std::max(1, int(std::lround(std::sqrt(n / 4.0))));
      const int sectors = 4 * rings;
      std::vector<Vec2> boundary;
      boundary.reserve(sectors);
      for (int j = 0; j < sectors; ++j) {
        const double th = 2.0 * kPi * j / sectors;
        boundary.push_back(shape.center() +
                           shape.radius() * Vec2(std::cos(th), std::sin(th)));
      }
      return fan_panels(shape.center(), boundary, rings, 1);
    }
    case ShapeKind::polygon: {
      const auto& v = shape.vertices();
      const Vec2 c = shape.center();
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!(cross(v[i] - c, v[(i + 1) % v.size()] - c) > 0.0))
          throw InvalidArgument(
              "polygon must be star-shaped with respect to its centroid");
      const int rings =
          std::max(1, int(std::lround(std::sqrt(double(n) / v.size()))));
      return fan_panels(c, v, rings, rings);
    }
  }
  throw InvalidArgument("unknown shape kind");
}

CrackPanels refine(const CrackPanels& panels) {
  CrackPanels out;
  out.panels.reserve(4 * panels.size());
  for (const auto& p : panels.panels) {
    const auto& v = p.vertices;
    if (v.size() == 3) {
      const Vec2 m01 = 0.5 * (v[0] + v[1]);
      const Vec2 m12 = 0.5 * (v[1] + v[2]);
      const Vec2 m20 = 0.5 * (v[2] + v[0]);
      out.panels.push_back(Panel::from_vertices({v[0], m01, m20}));
      out.panels.push_back(Panel::from_vertices({m01, v[1], m12}));
      out.panels.push_back(Panel::from_vertices({m20, m12, v[2]}));
      out.panels.push_back(Panel::from_vertices({m01, m12, m20}));
    } else if (v.size() == 4) {
      const Vec2 mid = 0.25 * (v[0] + v[1] + v[2] + v[3]);
      std::array<Vec2, 4> m;
      for (int k = 0; k < 4; ++k) m[k] = 0.5 * (v[k] + v[(k + 1) % 4]);
      out.panels.push_back(Panel::from_vertices({v[0], m[0], mid, m[3]}));
      out.panels.push_back(Panel::from_vertices({m[0], v[1], m[1], mid}));
      out.panels.push_back(Panel::from_vertices({mid, m[1], v[2], m[2]}));
      out.panels.push_back(Panel::from_vertices({m[3], mid, m[2], v[3]}));
    } else {
      throw InvalidArgument("panels must be triangles or quadrilaterals");
    }
  }
  return out;
}

double inverse_distance_integral(const Panel& panel, const Vec2& x) {
  // Sum over edges of the signed fan triangle (x, a, b):
  //   h * [asinh(s_b/|h|) - asinh(s_a/|h|)].
  const auto& v = panel.vertices;
  const double scale = panel.diameter();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const Vec2 e = b - a;
    const double len = e.norm();
    const Vec2 t = e / len;
    const double h = cross(t, x - a);
    if (std::abs(h) <= 1e-15 * scale) continue;
    const double sa = (a - x).dot(t);
    const double sb = (b - x).dot(t);
    const double ah = std::abs(h);
    total += h * (std::asinh(sb / ah) - std::asinh(sa / ah));
  }
  return total;
}

Eigen::MatrixXd collocation_matrix(const CrackPanels& panels) {
  const Eigen::Index n = Eigen::Index(panels.size());
  Eigen::MatrixXd a(n, n);
  const double inv4pi = 1.0 / (4.0 * kPi);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Panel& pj = panels.panels[std::size_t(j)];
    for (Eigen::Index i = 0; i < n; ++i)
      a(i, j) = inv4pi *
                inverse_distance_integral(pj, panels.panels[std::size_t(i)].centroid);
  }
  return a;
}

CapacityResult solve_capacity(const CrackPanels& panels) {
  if (panels.size() == 0) throw InvalidArgument("no panels");
  const Eigen::MatrixXd a = collocation_matrix(panels);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    std::ostringstream os;
    os << "collocation matrix is numerically singular (rcond estimate "
       << rcond << "); check for coincident panel centroids";
    throw NumericalFailure(os.str());
  }
  const Eigen::VectorXd sigma =
      lu.solve(Eigen::VectorXd::Ones(Eigen::Index(panels.size())));
  if (!sigma.allFinite())
    throw NumericalFailure("non-finite single-layer density");

  CapacityResult r;
  r.density.assign(sigma.data(), sigma.data() + sigma.size());
  double charge = 0.0;
  Vec2 moment = Vec2::Zero();
  for (std::size_t j = 0; j < panels.size(); ++j) {
    const Panel& p = panels.panels[j];
    charge += sigma[Eigen::Index(j)] * p.area;
    moment += sigma[Eigen::Index(j)] * p.area * p.centroid;
  }
  r.capacity = charge / (4.0 * kPi);
  r.dipole = moment;
  return r;
}

double eval_far_field(const CapacityResult& result, const CrackPanels& panels,
                      const Vec3& point) {
  if (result.density.size() != panels.size())
    throw InvalidArgument("density does not match panels");
  if (!(point.norm() > 3.0 * panels.diameter()))
    throw InvalidArgument(
        "evaluation point too close to the crack for far-field quadrature");

  // Three-point (degree 2) rule on each triangle of a fan split.
  static constexpr double kBary[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6},
                                         {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                         {1.0 / 6, 1.0 / 6, 2.0 / 3}};
  double sum = 0.0;
  for (std::size_t j = 0; j < panels.size(); ++j) {
    const auto& v = panels.panels[j].vertices;
    double local = 0.0;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
      const double area = 0.5 * std::abs(cross(v[k] - v[0], v[k + 1] - v[0]));
      for (const auto& w : kBary) {
        const Vec2 y = w[0] * v[0] + w[1] * v[k] + w[2] * v[k + 1];
        const Vec3 d(point.x() - y.x(), point.y() - y.y(), point.z());
        local += area / 3.0 / d.norm();
      }
    }
    sum += result.density[j] * local;
  }
  return sum / (4.0 * kPi);
}

double far_field_expansion(const CapacityResult& result, const Vec3& point) {
  const double r = point.norm();
  const Vec3 grad_phi = point / (4.0 * kPi * r * r * r);
  return result.capacity / r + result.dipole.x() * grad_phi.x() +
         result.dipole.y() * grad_phi.y();
}

}  // namespace screenwave::bem
