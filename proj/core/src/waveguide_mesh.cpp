#include "screenwave/waveguide_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "screenwave/errors.hpp"

namespace screenwave::mesh {

namespace {

constexpr int kMaxLevel = 40;

struct CellKey {
  int level = 0;
  std::int64_t gz = 0;
  std::int64_t gy = 0;

  auto operator<=>(const CellKey&) const = default;
};

// Uniform split of each breakpoint segment into pieces no longer than h.
std::vector<double> subdivide(const std::vector<double>& breaks, double h) {
  std::vector<double> out{breaks.front()};
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    const int n = std::max(1, int(std::ceil((b - a) / h - 1e-9)));
    for (int i = 1; i < n; ++i) out.push_back(a + (b - a) * i / n);
    out.push_back(b);
  }
  return out;
}

struct Tip {
  double z;
  double y;
};

class Quadtree {
 public:
  Quadtree(std::vector<double> zb, std::vector<double> yb)
      : zb_(std::move(zb)), yb_(std::move(yb)) {
    for (std::int64_t i = 0; i + 1 < std::int64_t(zb_.size()); ++i)
      for (std::int64_t j = 0; j + 1 < std::int64_t(yb_.size()); ++j)
        leaves_.insert({0, i, j});
  }

  std::int64_t nz() const { return std::int64_t(zb_.size()) - 1; }
  std::int64_t ny() const { return std::int64_t(yb_.size()) - 1; }
  const std::set<CellKey>& leaves() const { return leaves_; }

  double z_at(std::int64_t gz, int level) const {
    return coord(zb_, gz, level);
  }
  double y_at(std::int64_t gy, int level) const {
    return coord(yb_, gy, level);
  }

  // Cell bounds [z0, z1] x [y0, y1].
  std::array<double, 4> bounds(const CellKey& c) const {
    return {z_at(c.gz, c.level), z_at(c.gz + 1, c.level), y_at(c.gy, c.level),
            y_at(c.gy + 1, c.level)};
  }

  bool inside(int level, std::int64_t gz, std::int64_t gy) const {
    return gz >= 0 && gy >= 0 && gz < (nz() << level) && gy < (ny() << level);
  }

  // Leaf covering the level-`level` cell (gz, gy), if it is that cell or
  // coarser. Empty when the region is subdivided further.
  std::optional<CellKey> covering_leaf(int level, std::int64_t gz,
                                       std::int64_t gy) const {
    for (int d = 0; d <= level; ++d) {
      const CellKey k{level - d, gz >> d, gy >> d};
      if (leaves_.count(k)) return k;
    }
    return std::nullopt;
  }

  void split(const CellKey& c) {
    if (c.level + 1 > kMaxLevel)
      throw ResourceError("mesh refinement exceeds the maximum quadtree depth");
    leaves_.erase(c);
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        leaves_.insert({c.level + 1, 2 * c.gz + dz, 2 * c.gy + dy});
  }

  template <class Pred>
  void refine_while(Pred need) {
    std::deque<CellKey> work(leaves_.begin(), leaves_.end());
    while (!work.empty()) {
      const CellKey c = work.front();
      work.pop_front();
      if (!leaves_.count(c) || !need(c)) continue;
      split(c);
      for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
          work.push_back({c.level + 1, 2 * c.gz + dz, 2 * c.gy + dy});
    }
  }

  // 2:1 balance across edges.
  void balance() {
    static constexpr int kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    std::deque<CellKey> work(leaves_.begin(), leaves_.end());
    while (!work.empty()) {
      const CellKey c = work.front();
      work.pop_front();
      if (!leaves_.count(c) || c.level < 2) continue;
      for (const auto& d : kDirs) {
        const std::int64_t nzc = c.gz + d[0], nyc = c.gy + d[1];
        if (!inside(c.level, nzc, nyc)) continue;
        const auto leaf = covering_leaf(c.level, nzc, nyc);
        if (leaf && leaf->level < c.level - 1) {
          split(*leaf);
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              work.push_back({leaf->level + 1, 2 * leaf->gz + a, 2 * leaf->gy + b});
          work.push_back(c);
        }
      }
    }
  }

 private:
  static double coord(const std::vector<double>& b, std::int64_t g, int level) {
    const std::int64_t n = std::int64_t(b.size()) - 1;
    const std::int64_t base = g >> level;
    if (base >= n) return b.back();
    const std::int64_t frac = g - (base << level);
    return b[std::size_t(base)] +
           (b[std::size_t(base) + 1] - b[std::size_t(base)]) *
               std::ldexp(double(frac), -level);
  }

  std::vector<double> zb_, yb_;
  std::set<CellKey> leaves_;
};

double triangle_min_angle(const Point& a, const Point& b, const Point& c) {
  auto angle = [](const Point& p, const Point& q, const Point& r) {
    const Point u = q - p, v = r - p;
    const double cr = u.x() * v.y() - u.y() * v.x();
    return std::atan2(std::abs(cr), u.dot(v));
  };
  const double m = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
  return m * 180.0 / std::numbers::pi;
}

double signed_area2(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

}  // namespace

bool Screen::blocks(double y, double height, double tol) const {
  if (!present) return false;
  if (y < -tol || y > height + tol) return false;
  for (const auto& h : holes)
    if (y >= h.lo - tol && y <= h.hi + tol) return false;
  return true;
}

void WaveguideGeometry2D::validate() const {
  if (!(height > 0.0) || !std::isfinite(height))
    throw InvalidArgument("strip height must be positive");
  if (!(L > 0.0) || !(Z > L) || !std::isfinite(Z))
    throw InvalidArgument("need 0 < L < Z");
  for (const Screen* s : {&left, &right}) {
    std::vector<Interval> holes = s->holes;
    std::sort(holes.begin(), holes.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t k = 0; k < holes.size(); ++k) {
      const auto& h = holes[k];
      if (!(h.hi > h.lo))
        throw InvalidArgument("aperture must have positive width");
      if (!(h.lo > 0.0) || !(h.hi < height))
        throw InvalidArgument("aperture must lie strictly inside the strip");
      if (k > 0 && !(h.lo > holes[k - 1].hi))
        throw InvalidArgument("apertures overlap or touch");
    }
  }
}

double WaveguideGeometry2D::min_feature() const {
  double m = height;
  for (const Screen* s : {&left, &right}) {
    if (!s->present) continue;
    std::vector<double> pts{0.0, height};
    for (const auto& h : s->holes) {
      m = std::min(m, h.width());
      pts.push_back(h.lo);
      pts.push_back(h.hi);
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
      if (pts[k + 1] > pts[k]) m = std::min(m, pts[k + 1] - pts[k]);
  }
  return m;
}

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::interior: return "interior";
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::screen_face: return "screen_face";
    case BoundaryTag::gamma_minus: return "gamma_minus";
    case BoundaryTag::gamma_plus: return "gamma_plus";
  }
  return "unknown";
}

std::array<Index, 6> Mesh::p2_nodes(std::size_t t) const {
  const auto& v = triangles[t];
  const auto& e = triangle_edges[t];
  return {v[0], v[1], v[2], edges[std::size_t(e[0])].mid,
          edges[std::size_t(e[1])].mid, edges[std::size_t(e[2])].mid};
}

double Mesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles)
    a += 0.5 * signed_area2(nodes[std::size_t(t[0])], nodes[std::size_t(t[1])],
                            nodes[std::size_t(t[2])]);
  return a;
}

void Mesh::build_edges() {
  nodes.resize(std::size_t(n_vertices));
  edges.clear();
  triangle_edges.assign(triangles.size(), {-1, -1, -1});

  std::map<std::pair<Index, Index>, Index> lookup;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const Index a = triangles[t][std::size_t(k)];
      const Index b = triangles[t][std::size_t((k + 1) % 3)];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second},
                                               Index(edges.size()));
      if (inserted) {
        Edge e;
        e.a = key.first;
        e.b = key.second;
        edges.push_back(e);
      }
      Edge& e = edges[std::size_t(it->second)];
      if (e.owners[0] < 0)
        e.owners[0] = Index(t);
      else if (e.owners[1] < 0)
        e.owners[1] = Index(t);
      else
        e.owners[1] = Index(t);  // over-shared; validate_mesh reports it
      triangle_edges[t][std::size_t(k)] = it->second;
    }
  }

  const double tol = 1e-12 * std::max(geometry.Z, geometry.height);
  auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  for (auto& e : edges) {
    const Point p = nodes[std::size_t(e.a)];
    const Point q = nodes[std::size_t(e.b)];
    const Point m = 0.5 * (p + q);
    e.mid = Index(nodes.size());
    nodes.push_back(m);
    if (e.owner_count() != 1) continue;
    if (near(p.x(), -geometry.Z) && near(q.x(), -geometry.Z))
      e.tag = BoundaryTag::gamma_minus;
    else if (near(p.x(), geometry.Z) && near(q.x(), geometry.Z))
      e.tag = BoundaryTag::gamma_plus;
    else if ((near(p.y(), 0.0) && near(q.y(), 0.0)) ||
             (near(p.y(), geometry.height) && near(q.y(), geometry.height)))
      e.tag = BoundaryTag::wall;
    else if (near(p.x(), q.x()) &&
             ((near(p.x(), -geometry.L) &&
               geometry.left.blocks(m.y(), geometry.height)) ||
              (near(p.x(), geometry.L) &&
               geometry.right.blocks(m.y(), geometry.height))))
      e.tag = BoundaryTag::screen_face;
  }
}

Mesh build_mesh(const WaveguideGeometry2D& geom, const MeshOptions& options) {
  geom.validate();
  if (!(options.h > 0.0)) throw InvalidArgument("mesh size h must be positive");
  if (!(options.tip_grading > 0.0 && options.tip_grading <= 1.0))
    throw InvalidArgument("tip_grading must lie in (0, 1]");
  if (options.tip_layers < 0)
    throw InvalidArgument("tip_layers must be >= 0");

  const double H = geom.height;
  const double h = options.h;
  Quadtree tree(subdivide({-geom.Z, -geom.L, 0.0, geom.L, geom.Z}, h),
                subdivide({0.0, 0.5 * H, H}, h));

  std::vector<Tip> tips;
  for (const auto& [screen, z] :
       {std::pair{&geom.left, -geom.L}, std::pair{&geom.right, geom.L}}) {
    if (!screen->present) continue;
    for (const auto& hole : screen->holes) {
      tips.push_back({z, hole.lo});
      tips.push_back({z, hole.hi});
    }
  }

  // A cell of size s is refined if it touches a tip or its centre lies
  // within kGradingRadius * H * s / h of one, so the graded zone has a fixed
  // physical extent and halving h refines the whole mesh self-similarly.
  constexpr double kGradingRadius = 0.4;

  // Finest cell size at the tips. At the reference size kReferenceH * H it is
  // half the smallest aperture or gap, then tip_layers further geometric
  // steps; it scales with h so that the whole size function does.
  constexpr double kReferenceH = 0.05;
  const double feature = 0.5 * geom.min_feature();
  const double tip_size =
      std::min(h * std::min(1.0, feature / (kReferenceH * H)), feature) *
      std::pow(options.tip_grading, options.tip_layers);

  if (!tips.empty()) {
    tree.refine_while([&](const CellKey& c) {
      const auto b = tree.bounds(c);
      const double size = std::max(b[1] - b[0], b[3] - b[2]);
      if (size <= tip_size * (1.0 + 1e-9)) return false;
      for (const auto& t : tips) {
        const bool touches = b[0] <= t.z && t.z <= b[1] && b[2] <= t.y && t.y <= b[3];
        const double dc = std::hypot(0.5 * (b[0] + b[1]) - t.z, 0.5 * (b[2] + b[3]) - t.y);
        if (touches || dc < kGradingRadius * H * size / h) return true;
      }
      return false;
    });
    tree.balance();
  }

  int max_level = 0;
  for (const auto& c : tree.leaves()) max_level = std::max(max_level, c.level);
  const int M = max_level + 1;  // cell centers need one more level

  Mesh mesh;
  mesh.geometry = geom;

  // Vertices keyed by integer coordinates at level M.
  std::map<std::pair<std::int64_t, std::int64_t>, Index> vertex_of;
  std::vector<std::pair<std::int64_t, std::int64_t>> keys;
  auto vertex = [&](std::int64_t kz, std::int64_t ky) -> Index {
    auto [it, inserted] = vertex_of.try_emplace({kz, ky}, Index(keys.size()));
    if (inserted) {
      keys.push_back({kz, ky});
      mesh.nodes.push_back(Point(tree.z_at(kz, M), tree.y_at(ky, M)));
    }
    return it->second;
  };

  for (const auto& c : tree.leaves()) {
    const int s = M - c.level;
    const std::int64_t z0 = c.gz << s, z1 = (c.gz + 1) << s;
    const std::int64_t y0 = c.gy << s, y1 = (c.gy + 1) << s;
    const std::int64_t zm = (2 * c.gz + 1) << (s - 1);
    const std::int64_t ym = (2 * c.gy + 1) << (s - 1);

    auto hanging = [&](std::int64_t nz, std::int64_t ny) {
      return tree.inside(c.level, nz, ny) &&
             !tree.covering_leaf(c.level, nz, ny).has_value();
    };
    const bool hb = hanging(c.gz, c.gy - 1);
    const bool hr = hanging(c.gz + 1, c.gy);
    const bool ht = hanging(c.gz, c.gy + 1);
    const bool hl = hanging(c.gz - 1, c.gy);

    const Index v00 = vertex(z0, y0), v10 = vertex(z1, y0);
    const Index v11 = vertex(z1, y1), v01 = vertex(z0, y1);

    if (!(hb || hr || ht || hl)) {
      // Diagonal orientation mirrors with the cell position so the
      // triangulation is symmetric under z -> -z and y -> H - y.
      const auto b = tree.bounds(c);
      const bool main_diag =
          ((b[0] + b[1]) > 0.0) == ((b[2] + b[3]) > H);
      if (main_diag) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
      continue;
    }

    std::vector<Index> ring{v00};
    if (hb) ring.push_back(vertex(zm, y0));
    ring.push_back(v10);
    if (hr) ring.push_back(vertex(z1, ym));
    ring.push_back(v11);
    if (ht) ring.push_back(vertex(zm, y1));
    ring.push_back(v01);
    if (hl) ring.push_back(vertex(z0, ym));
    const Index center = vertex(zm, ym);
    for (std::size_t k = 0; k < ring.size(); ++k)
      mesh.triangles.push_back({center, ring[k], ring[(k + 1) % ring.size()]});
  }

  // Screen lines in key space.
  std::vector<std::pair<const Screen*, std::int64_t>> lines;
  {
    const auto zb = subdivide({-geom.Z, -geom.L, 0.0, geom.L, geom.Z}, h);
    auto key_of = [&](double z) {
      const auto it = std::find(zb.begin(), zb.end(), z);
      return std::int64_t(it - zb.begin()) << M;
    };
    if (geom.left.present) lines.push_back({&geom.left, key_of(-geom.L)});
    if (geom.right.present) lines.push_back({&geom.right, key_of(geom.L)});
  }

  // Snap the nearest on-line vertex onto each aperture endpoint.
  for (const auto& [screen, kz] : lines) {
    std::vector<Index> on_line;
    for (std::size_t v = 0; v < keys.size(); ++v)
      if (keys[v].first == kz) on_line.push_back(Index(v));
    std::sort(on_line.begin(), on_line.end(), [&](Index a, Index b) {
      return keys[std::size_t(a)].second < keys[std::size_t(b)].second;
    });
    std::set<Index> used;
    for (const auto& hole : screen->holes) {
      for (double y : {hole.lo, hole.hi}) {
        auto best = std::min_element(
            on_line.begin(), on_line.end(), [&](Index a, Index b) {
              return std::abs(mesh.nodes[std::size_t(a)].y() - y) <
                     std::abs(mesh.nodes[std::size_t(b)].y() - y);
            });
        const Index v = *best;
        const double old_y = mesh.nodes[std::size_t(v)].y();
        if (used.count(v) || old_y <= 0.0 || old_y >= H)
          throw InvalidArgument("aperture endpoints not resolvable by the mesh");
        used.insert(v);
        mesh.nodes[std::size_t(v)].y() = y;
      }
    }
    for (std::size_t k = 0; k + 1 < on_line.size(); ++k)
      if (!(mesh.nodes[std::size_t(on_line[k])].y() <
            mesh.nodes[std::size_t(on_line[k + 1])].y()))
        throw InvalidArgument("aperture snapping inverted the screen line");
  }

  // Duplicate screen vertices outside the apertures; elements right of the
  // screen take the copy.
  const Index n_original = Index(mesh.nodes.size());
  std::vector<Index> right_copy(std::size_t(n_original), -1);
  for (auto& tri : mesh.triangles) {
    const Point c = (mesh.nodes[std::size_t(tri[0])] + mesh.nodes[std::size_t(tri[1])] +
                     mesh.nodes[std::size_t(tri[2])]) /
                    3.0;
    for (auto& v : tri) {
      if (v >= n_original) continue;
      for (const auto& [screen, kz] : lines) {
        if (keys[std::size_t(v)].first != kz) continue;
        const Point p = mesh.nodes[std::size_t(v)];
        if (!screen->blocks(p.y(), H) || c.x() < p.x()) continue;
        Index& copy = right_copy[std::size_t(v)];
        if (copy < 0) {
          copy = Index(mesh.nodes.size());
          mesh.nodes.push_back(p);
          mesh.seam_table.push_back({v, copy});
        }
        v = copy;
        break;  // a vertex lies on at most one screen line
      }
    }
  }
  mesh.n_vertices = Index(mesh.nodes.size());
  mesh.build_edges();

  // Pair the midpoint nodes of the two faces of each screen edge.
  std::map<std::pair<double, double>, std::array<Index, 2>> faces;
  for (const auto& e : mesh.edges) {
    if (e.tag != BoundaryTag::screen_face) continue;
    const Point& m = mesh.nodes[std::size_t(e.mid)];
    const auto& tri = mesh.triangles[std::size_t(e.owners[0])];
    const double cz = (mesh.nodes[std::size_t(tri[0])].x() +
                       mesh.nodes[std::size_t(tri[1])].x() +
                       mesh.nodes[std::size_t(tri[2])].x()) /
                      3.0;
    auto& slot = faces[{m.x(), m.y()}];
    if (cz < m.x())
      slot = {e.mid, slot[1]};
    else
      slot = {slot[0], e.mid};
  }
  for (const auto& [pos, pair] : faces) {
    (void)pos;
    mesh.seam_table.push_back({pair[0], pair[1]});
  }
  return mesh;
}

MeshReport validate_mesh(const Mesh& mesh) {
  MeshReport r;
  r.seam_count = mesh.seam_table.size();

  r.orientation_ok = true;
  r.min_angle_deg = mesh.triangles.empty() ? 0.0 : 180.0;
  for (const auto& t : mesh.triangles) {
    const Point& a = mesh.nodes[std::size_t(t[0])];
    const Point& b = mesh.nodes[std::size_t(t[1])];
    const Point& c = mesh.nodes[std::size_t(t[2])];
    if (!(signed_area2(a, b, c) > 0.0)) r.orientation_ok = false;
    r.min_angle_deg = std::min(r.min_angle_deg, triangle_min_angle(a, b, c));
  }

  // Owner counts recomputed from the triangles.
  std::map<std::pair<Index, Index>, int> owners;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(t[std::size_t(k)], t[std::size_t((k + 1) % 3)]);
      ++owners[{key.first, key.second}];
    }

  const auto& g = mesh.geometry;
  const double tol = 1e-12 * std::max(g.Z, g.height);
  auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  auto on_boundary = [&](const Point& p, const Point& q) {
    const Point m = 0.5 * (p + q);
    if (near(p.x(), q.x()) && (near(p.x(), -g.Z) || near(p.x(), g.Z)))
      return true;
    if (near(p.y(), q.y()) && (near(p.y(), 0.0) || near(p.y(), g.height)))
      return true;
    if (near(p.x(), q.x()) && near(p.x(), -g.L) && g.left.blocks(m.y(), g.height))
      return true;
    if (near(p.x(), q.x()) && near(p.x(), g.L) && g.right.blocks(m.y(), g.height))
      return true;
    return false;
  };

  r.conformity_ok = true;
  for (const auto& [key, count] : owners) {
    if (count > 2) r.conformity_ok = false;
    if (count == 1 &&
        !on_boundary(mesh.nodes[std::size_t(key.first)],
                     mesh.nodes[std::size_t(key.second)]))
      r.conformity_ok = false;
  }
  // Coincident vertices are only allowed as declared seam pairs.
  {
    std::set<Index> seam_nodes;
    for (const auto& s : mesh.seam_table) {
      seam_nodes.insert(s.left);
      seam_nodes.insert(s.right);
    }
    std::map<std::pair<double, double>, int> seen;
    for (Index v = 0; v < mesh.n_vertices; ++v) {
      if (seam_nodes.count(v)) continue;
      const Point& p = mesh.nodes[std::size_t(v)];
      if (++seen[{p.x(), p.y()}] > 1) r.conformity_ok = false;
    }
  }

  // Boundary edges (tagged, or listed without owners) must form closed loops.
  r.boundary_closed = true;
  std::map<Index, int> degree;
  for (const auto& e : mesh.edges) {
    const auto key = std::minmax(e.a, e.b);
    const auto it = owners.find({key.first, key.second});
    const int count = it == owners.end() ? 0 : it->second;
    if (count == 0) r.boundary_closed = false;
    if (count == 1 || e.tag != BoundaryTag::interior) {
      ++degree[e.a];
      ++degree[e.b];
    }
  }
  for (const auto& [v, d] : degree) {
    (void)v;
    if (d % 2 != 0) r.boundary_closed = false;
  }
  return r;
}

int expected_euler_characteristic(const WaveguideGeometry2D& geom) {
  int chi = 1;
  for (const Screen* s : {&geom.left, &geom.right}) {
    if (!s->present) continue;
    if (s->holes.empty())
      chi += 1;
    else
      chi -= int(s->holes.size()) - 1;
  }
  return chi;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  const auto prec = os.precision(17);
  for (Index v = 0; v < mesh.n_vertices; ++v)
    os << "v " << mesh.nodes[std::size_t(v)].x() << ' '
       << mesh.nodes[std::size_t(v)].y() << '\n';
  for (const auto& t : mesh.triangles)
    os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& s : mesh.seam_table)
    os << "s " << s.left << ' ' << s.right << '\n';
  for (const auto& e : mesh.edges)
    if (e.tag != BoundaryTag::interior)
      os << "b " << e.a << ' ' << e.b << ' ' << to_string(e.tag) << '\n';
  os.precision(prec);
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  lo_ = Point(-mesh.geometry.Z, 0.0);
  hi_ = Point(mesh.geometry.Z, mesh.geometry.height);
  const double n = std::max<double>(1.0, std::sqrt(double(mesh.triangles.size())));
  const double aspect = (hi_.x() - lo_.x()) / (hi_.y() - lo_.y());
  nz_ = std::max(1, int(n * std::sqrt(aspect)));
  ny_ = std::max(1, int(n / std::sqrt(aspect)));
  buckets_.assign(std::size_t(nz_) * std::size_t(ny_), {});
  auto bucket = [&](double v, double lo, double hi, int n_) {
    return std::clamp(int((v - lo) / (hi - lo) * n_), 0, n_ - 1);
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Point a = mesh.nodes[std::size_t(mesh.triangles[t][0])];
    Point b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(mesh.nodes[std::size_t(mesh.triangles[t][std::size_t(k)])]);
      b = b.cwiseMax(mesh.nodes[std::size_t(mesh.triangles[t][std::size_t(k)])]);
    }
    const int i0 = bucket(a.x(), lo_.x(), hi_.x(), nz_);
    const int i1 = bucket(b.x(), lo_.x(), hi_.x(), nz_);
    const int j0 = bucket(a.y(), lo_.y(), hi_.y(), ny_);
    const int j1 = bucket(b.y(), lo_.y(), hi_.y(), ny_);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        buckets_[std::size_t(i) * std::size_t(ny_) + std::size_t(j)].push_back(t);
  }
}

std::optional<PointLocator::Hit> PointLocator::locate(const Point& p) const {
  if (p.x() < lo_.x() || p.x() > hi_.x() || p.y() < lo_.y() || p.y() > hi_.y())
    return std::nullopt;
  const int i = std::clamp(int((p.x() - lo_.x()) / (hi_.x() - lo_.x()) * nz_), 0, nz_ - 1);
  const int j = std::clamp(int((p.y() - lo_.y()) / (hi_.y() - lo_.y()) * ny_), 0, ny_ - 1);
  const double tol = -1e-12;
  for (std::size_t t : buckets_[std::size_t(i) * std::size_t(ny_) + std::size_t(j)]) {
    const auto& tri = mesh_->triangles[t];
    const Point& a = mesh_->nodes[std::size_t(tri[0])];
    const Point& b = mesh_->nodes[std::size_t(tri[1])];
    const Point& c = mesh_->nodes[std::size_t(tri[2])];
    const double area = signed_area2(a, b, c);
    const double l0 = signed_area2(p, b, c) / area;
    const double l1 = signed_area2(a, p, c) / area;
    const double l2 = 1.0 - l0 - l1;
    if (l0 >= tol && l1 >= tol && l2 >= tol) return Hit{t, {l0, l1, l2}};
  }
  return std::nullopt;
}

}  // namespace screenwave::mesh
