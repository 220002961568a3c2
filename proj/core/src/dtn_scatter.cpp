#include "screenwave/dtn_scatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "screenwave/errors.hpp"

namespace screenwave::scatter {

namespace {

using std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Gauss-Legendre on [0, 1].
struct Rule1D {
  double t, w;
};

constexpr double kX8[4] = {0.1834346424956498, 0.5255324099163290,
                           0.7966664774136267, 0.9602898564975363};
constexpr double kW8[4] = {0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

std::array<Rule1D, 8> gauss8() {
  std::array<Rule1D, 8> r{};
  for (int k = 0; k < 4; ++k) {
    r[std::size_t(2 * k)] = {0.5 * (1 - kX8[k]), 0.5 * kW8[k]};
    r[std::size_t(2 * k + 1)] = {0.5 * (1 + kX8[k]), 0.5 * kW8[k]};
  }
  return r;
}

constexpr Rule1D kGauss3[3] = {{0.5 - 0.3872983346207417, 5.0 / 18},
                               {0.5, 8.0 / 18},
                               {0.5 + 0.3872983346207417, 5.0 / 18}};

bool has_tag(const mesh::Mesh& mesh, mesh::BoundaryTag tag) {
  return std::any_of(mesh.edges.begin(), mesh.edges.end(),
                     [tag](const mesh::Edge& e) { return e.tag == tag; });
}

}  // namespace

double ModalBasis::phi(int n, double y) const {
  if (n == 0) return 1.0 / std::sqrt(height);
  return std::sqrt(2.0 / height) * std::cos(n * pi * y / height);
}

ModalBasis modal_rates(double kappa, int n_modes, double height) {
  if (!(height > 0.0)) throw InvalidArgument("height must be positive");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (kappa >= pi / height)
    throw UnsupportedRegime("kappa >= pi/H: more than one propagating mode");
  if (n_modes < 1) throw InvalidArgument("n_modes must be at least 1");
  ModalBasis b;
  b.n_modes = n_modes;
  b.kappa = kappa;
  b.height = height;
  b.gammas.resize(std::size_t(n_modes));
  b.gammas[0] = -kI * kappa;
  for (int n = 1; n < n_modes; ++n) {
    const double kn = n * pi / height;
    b.gammas[std::size_t(n)] = std::sqrt((kn - kappa) * (kn + kappa));
  }
  return b;
}

Eigen::VectorXd modal_functional(const mesh::Mesh& mesh, mesh::BoundaryTag side,
                                 const ModalBasis& basis, int n) {
  static const auto rule = gauss8();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (const auto& e : mesh.edges) {
    if (e.tag != side) continue;
    const auto& pa = mesh.nodes[std::size_t(e.a)];
    const auto& pb = mesh.nodes[std::size_t(e.b)];
    const double len = (pb - pa).norm();
    for (const auto& q : rule) {
      const double t = q.t;
      const double y = pa.y() + t * (pb.y() - pa.y());
      const double f = basis.phi(n, y) * q.w * len;
      c[e.a] += (1 - t) * (1 - 2 * t) * f;
      c[e.b] += t * (2 * t - 1) * f;
      c[e.mid] += 4 * t * (1 - t) * f;
    }
  }
  return c;
}

fem::SparseComplexSystem attach_dtn_and_rhs(fem::SparseComplexSystem system,
                                            const mesh::Mesh& mesh,
                                            const ModalBasis& basis, double L,
                                            Incidence incidence) {
  using mesh::BoundaryTag;
  if (!has_tag(mesh, BoundaryTag::gamma_minus) || !has_tag(mesh, BoundaryTag::gamma_plus))
    throw InvalidArgument("mesh lacks gamma_minus/gamma_plus boundary tags");
  if (system.matrix.rows() != mesh.n_nodes())
    throw InvalidArgument("system size does not match mesh");

  std::vector<Eigen::Triplet<Complex>> trips;
  for (const auto side : {BoundaryTag::gamma_minus, BoundaryTag::gamma_plus}) {
    std::vector<Eigen::VectorXd> cs;
    std::vector<Eigen::Index> support;
    for (int n = 0; n < basis.n_modes; ++n) cs.push_back(modal_functional(mesh, side, basis, n));
    for (Eigen::Index i = 0; i < cs[0].size(); ++i)
      for (const auto& c : cs)
        if (c[i] != 0.0) {
          support.push_back(i);
          break;
        }
    for (const auto i : support)
      for (const auto j : support) {
        Complex v = 0.0;
        for (int n = 0; n < basis.n_modes; ++n)
          v += basis.gammas[std::size_t(n)] * cs[std::size_t(n)][i] * cs[std::size_t(n)][j];
        trips.emplace_back(i, j, v);
      }
  }
  fem::ComplexMatrix dtn(system.matrix.rows(), system.matrix.cols());
  dtn.setFromTriplets(trips.begin(), trips.end());
  system.matrix += dtn;
  system.matrix.makeCompressed();

  // Incident amplitude on the entry boundary, in units of phi_0.
  const double Z = mesh.geometry.Z;
  const Complex g = std::exp(kI * basis.kappa * (L - Z));
  const auto entry = incidence == Incidence::from_left ? BoundaryTag::gamma_minus
                                                       : BoundaryTag::gamma_plus;
  system.rhs = (-2.0 * kI * basis.kappa * g) *
               modal_functional(mesh, entry, basis, 0).cast<Complex>();
  return system;
}

std::optional<Complex> interpolate(const mesh::Mesh& mesh,
                                   const mesh::PointLocator& locator,
                                   const Eigen::VectorXcd& field,
                                   const mesh::Point& p) {
  const auto hit = locator.locate(p);
  if (!hit) return std::nullopt;
  const auto n = fem::p2_shape(hit->bary);
  const auto dofs = mesh.p2_nodes(hit->triangle);
  Complex v = 0.0;
  for (int k = 0; k < 6; ++k) v += n[std::size_t(k)] * field[dofs[std::size_t(k)]];
  return v;
}

Complex piston_component(const mesh::Mesh& mesh, const mesh::PointLocator& locator,
                         const Eigen::VectorXcd& field, double z) {
  // Break the line at every edge crossing so each piece is one P2 trace.
  const double H = mesh.geometry.height;
  std::vector<double> ys{0.0, H};
  for (const auto& e : mesh.edges) {
    const auto& a = mesh.nodes[std::size_t(e.a)];
    const auto& b = mesh.nodes[std::size_t(e.b)];
    const double da = a.x() - z, db = b.x() - z;
    if (da == 0.0) ys.push_back(a.y());
    if (db == 0.0) ys.push_back(b.y());
    if ((da < 0 && db > 0) || (da > 0 && db < 0))
      ys.push_back(a.y() + da / (da - db) * (b.y() - a.y()));
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end(),
                       [](double u, double v) { return v - u < 1e-13; }),
           ys.end());

  Complex sum = 0.0;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double y0 = std::max(0.0, ys[k]), y1 = std::min(H, ys[k + 1]);
    if (y1 <= y0) continue;
    for (const auto& q : kGauss3) {
      const auto v = interpolate(mesh, locator, field, {z, y0 + q.t * (y1 - y0)});
      if (!v) throw InvalidArgument("cross-section lies outside the mesh");
      sum += *v * q.w * (y1 - y0);
    }
  }
  return sum / std::sqrt(H);
}

namespace {

// Piston amplitude inside the resonator: fit p(z) = a cos(k(z+L)) + b sin(k(z+L))
// through two cross-sections and return a.
Complex resonator_amplitude(const mesh::Mesh& mesh, const Eigen::VectorXcd& u,
                            double kappa) {
  const auto& g = mesh.geometry;
  if (!g.left.present && !g.right.present) return {};
  const double d = std::min(pi / (2 * kappa), g.L);
  const double z1 = -0.5 * d, z2 = 0.5 * d;
  const mesh::PointLocator loc(mesh);
  const Complex p1 = piston_component(mesh, loc, u, z1);
  const Complex p2 = piston_component(mesh, loc, u, z2);
  const double t1 = kappa * (z1 + g.L), t2 = kappa * (z2 + g.L);
  const double det = std::cos(t1) * std::sin(t2) - std::sin(t1) * std::cos(t2);
  return (p1 * std::sin(t2) - p2 * std::sin(t1)) / det;
}

}  // namespace

ScatteringResult solve_on_mesh(std::shared_ptr<const mesh::Mesh> mesh_ptr,
                               double kappa, const SolveOptions& options) {
  if (!mesh_ptr) throw InvalidArgument("null mesh");
  const auto& mesh = *mesh_ptr;
  const auto& g = mesh.geometry;
  const auto basis = modal_rates(kappa, options.n_modes, g.height);

  auto sys = attach_dtn_and_rhs(fem::assemble(mesh, kappa), mesh, basis, g.L,
                                options.incidence);
  fem::SolveReport report;
  Eigen::VectorXcd u = fem::solve_linear(sys, &report);

  const auto cm = modal_functional(mesh, mesh::BoundaryTag::gamma_minus, basis, 0);
  const auto cp = modal_functional(mesh, mesh::BoundaryTag::gamma_plus, basis, 0);
  const Complex am = cm.cast<Complex>().dot(u);  // real weights: no conjugation issue
  const Complex ap = cp.cast<Complex>().dot(u);
  const Complex back = std::exp(-kI * kappa * (g.Z - g.L));
  const Complex inc = std::exp(kI * kappa * (g.L - g.Z));

  ScatteringResult r;
  if (options.incidence == Incidence::from_left) {
    r.R = (am - inc) * back;
    r.T = ap * back;
  } else {
    r.R = (ap - inc) * back;
    r.T = am * back;
  }
  r.energy_residual = std::abs(1.0 - std::norm(r.R) - std::norm(r.T));
  r.amplitude_mid = resonator_amplitude(mesh, u, kappa);
  r.kappa = kappa;
  r.relative_residual = report.relative_residual;
  r.n_dofs = std::size_t(u.size());
  if (options.want_field) r.field = std::move(u);
  r.mesh = std::move(mesh_ptr);
  return r;
}

ScatteringResult solve_scattering(const mesh::WaveguideGeometry2D& geom,
                                  double kappa, const SolveOptions& options) {
  geom.validate();
  modal_rates(kappa, options.n_modes, geom.height);  // fail before meshing
  auto m = std::make_shared<const mesh::Mesh>(mesh::build_mesh(geom, options.mesh));
  return solve_on_mesh(std::move(m), kappa, options);
}

ScatteringResult solve_scattering(const mesh::WaveguideGeometry2D& geom,
                                  double kappa, double h, int n_modes,
                                  bool want_field) {
  SolveOptions o;
  o.mesh.h = h;
  o.n_modes = n_modes;
  o.want_field = want_field;
  return solve_scattering(geom, kappa, o);
}

FieldSamples export_field(const ScatteringResult& result, const mesh::Mesh& mesh,
                          int nz, int ny, FieldPart part, double L) {
  if (!result.field) throw InvalidState("result carries no field (want_field was false)");
  if (nz < 2 || ny < 2) throw InvalidArgument("field grid needs at least 2 x 2 points");
  const auto& u = *result.field;
  if (u.size() != mesh.n_nodes()) throw InvalidArgument("field does not match mesh");

  const auto& g = mesh.geometry;
  const mesh::PointLocator loc(mesh);
  const double ztol = 1e-12 * std::max(1.0, g.Z);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  FieldSamples s;
  s.nz = nz;
  s.ny = ny;
  s.z.reserve(std::size_t(nz * ny));
  for (int i = 0; i < nz; ++i) {
    const double z = -g.Z + 2 * g.Z * i / (nz - 1);
    for (int j = 0; j < ny; ++j) {
      const double y = g.height * j / (ny - 1);
      s.z.push_back(z);
      s.y.push_back(y);
      const bool on_left = std::abs(z + g.L) <= ztol && g.left.blocks(y, g.height);
      const bool on_right = std::abs(z - g.L) <= ztol && g.right.blocks(y, g.height);
      const auto v = (on_left || on_right) ? std::nullopt : interpolate(mesh, loc, u, {z, y});
      if (!v) {
        s.value.push_back(nan);
        continue;
      }
      Complex w = *v;
      if (part == FieldPart::scattered_real || part == FieldPart::scattered_imag)
        w -= std::exp(kI * result.kappa * (z + L)) / std::sqrt(g.height);
      s.value.push_back(part == FieldPart::real || part == FieldPart::scattered_real
                            ? w.real()
                            : w.imag());
    }
  }
  return s;
}

void write_field(std::ostream& os, const FieldSamples& s) {
  char buf[96];
  for (int i = 0; i < s.nz; ++i) {
    for (int j = 0; j < s.ny; ++j) {
      const auto k = std::size_t(i * s.ny + j);
      if (std::isnan(s.value[k]))
        std::snprintf(buf, sizeof buf, "%.12g %.12g nan\n", s.z[k], s.y[k]);
      else
        std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", s.z[k], s.y[k], s.value[k]);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace screenwave::scatter
