#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "screenwave/dtn_scatter.hpp"
#include "screenwave/errors.hpp"
#include "screenwave/sweep.hpp"

using namespace screenwave;
using namespace screenwave::scatter;
using mesh::BoundaryTag;
using mesh::Interval;
using mesh::Screen;
using mesh::WaveguideGeometry2D;
using std::numbers::pi;

namespace {

const double kKappa = 0.8 * pi;

WaveguideGeometry2D symmetric(double eps, double L, double Z_offset = 1.0) {
  WaveguideGeometry2D g;
  g.L = L;
  g.Z = L + Z_offset;
  g.left = Screen::with_holes({Interval::centered(0.5, eps)});
  g.right = Screen::with_holes({Interval::centered(0.5, eps)});
  return g;
}

WaveguideGeometry2D empty_guide(double L) {
  WaveguideGeometry2D g;
  g.L = L;
  g.Z = L + 1.0;
  g.left = Screen::none();
  g.right = Screen::none();
  return g;
}

std::set<mesh::Index> boundary_nodes(const mesh::Mesh& m, BoundaryTag tag) {
  std::set<mesh::Index> s;
  for (const auto& e : m.edges)
    if (e.tag == tag) s.insert({e.a, e.b, e.mid});
  return s;
}

}  // namespace

TEST_CASE("modal rates") {
  const auto b = modal_rates(kKappa, 15);
  REQUIRE(b.gammas.size() == 15);
  CHECK(std::abs(b.gammas[0] - std::complex<double>(0, -kKappa)) < 1e-15);
  CHECK(std::abs(b.gammas[1] - 0.6 * pi) < 1e-13);
  for (int n = 1; n < 15; ++n) {
    CHECK(b.gammas[std::size_t(n)].imag() == 0.0);
    CHECK(b.gammas[std::size_t(n)].real() > 0.0);
  }
  CHECK(b.gammas[14].real() / (14 * pi) == doctest::Approx(1.0).epsilon(2e-3));
  // Approaching the first cutoff the first evanescent rate vanishes.
  const auto near = modal_rates(pi * (1 - 1e-8), 3);
  CHECK(near.gammas[1].real() < 1e-3);
  CHECK(b.phi(0, 0.3) == doctest::Approx(1.0));
  CHECK(b.phi(2, 0.0) == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(modal_rates(pi), UnsupportedRegime);
  CHECK_THROWS_AS(modal_rates(4.0), UnsupportedRegime);
  CHECK_THROWS_AS(modal_rates(0.0), InvalidArgument);
  CHECK_THROWS_AS(modal_rates(1.0, 0), InvalidArgument);
}

TEST_CASE("modal functionals reproduce the transverse modes") {
  const auto m = mesh::build_mesh(symmetric(0.05, 0.6), {0.05, 0.5, 4});
  const auto b = modal_rates(kKappa, 6);
  for (const auto side : {BoundaryTag::gamma_minus, BoundaryTag::gamma_plus}) {
    for (int n = 0; n < 6; ++n) {
      const auto c = modal_functional(m, side, b, n);
      REQUIRE(c.size() == m.n_nodes());
      for (int k = 0; k < 6; ++k) {
        Eigen::VectorXd phi(m.n_nodes());
        for (mesh::Index i = 0; i < m.n_nodes(); ++i) phi[i] = b.phi(k, m.nodes[std::size_t(i)].y());
        // Exact up to the P2 interpolation error of cos(k pi y).
        CHECK(std::abs(c.dot(phi) - (n == k ? 1.0 : 0.0)) < 1e-3);
      }
    }
  }
  const auto support = boundary_nodes(m, BoundaryTag::gamma_minus);
  const auto c = modal_functional(m, BoundaryTag::gamma_minus, b, 3);
  for (mesh::Index i = 0; i < m.n_nodes(); ++i)
    if (!support.count(i)) CHECK(c[i] == 0.0);
}

TEST_CASE("source lives on the incident boundary only") {
  const auto m = mesh::build_mesh(symmetric(0.05, 0.6), {0.1, 0.5, 4});
  const auto b = modal_rates(kKappa);
  for (const auto inc : {Incidence::from_left, Incidence::from_right}) {
    const auto sys = attach_dtn_and_rhs(fem::assemble(m, kKappa), m, b, 0.6, inc);
    const auto support = boundary_nodes(
        m, inc == Incidence::from_left ? BoundaryTag::gamma_minus : BoundaryTag::gamma_plus);
    int nonzero = 0;
    for (mesh::Index i = 0; i < m.n_nodes(); ++i) {
      if (sys.rhs[i] == std::complex<double>(0)) continue;
      ++nonzero;
      CHECK(support.count(i) == 1);
    }
    CHECK(nonzero > 0);
    // DtN keeps the system complex symmetric.
    const fem::ComplexMatrix asym = sys.matrix - fem::ComplexMatrix(sys.matrix.transpose());
    double a = 0;
    for (Eigen::Index k = 0; k < asym.outerSize(); ++k)
      for (fem::ComplexMatrix::InnerIterator it(asym, k); it; ++it) a = std::max(a, std::abs(it.value()));
    CHECK(a <= 1e-12);
  }
  auto bare = m;
  for (auto& e : bare.edges)
    if (e.tag == BoundaryTag::gamma_plus) e.tag = BoundaryTag::wall;
  CHECK_THROWS_AS(attach_dtn_and_rhs(fem::assemble(bare, kKappa), bare, b, 0.6), InvalidArgument);
}

TEST_CASE("empty guide transmits with the travel phase") {
  for (double L : {0.3, 0.6, 0.77}) {
    const auto r = solve_scattering(empty_guide(L), kKappa, 0.05);
    CHECK(std::abs(r.T) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(std::remainder(std::arg(r.T) - 2 * kKappa * L, 2 * pi)) < 1e-4);
    CHECK(std::abs(r.R) < 1e-5);
    CHECK(r.amplitude_mid == std::complex<double>(0));
  }
}

TEST_CASE("closed screens reflect everything") {
  auto g = symmetric(0.1, 0.6);
  g.left = Screen::closed();
  g.right = Screen::closed();
  const auto r = solve_scattering(g, kKappa, 0.1);
  CHECK(std::abs(r.R) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(r.T) <= 1e-10);
  CHECK(r.energy_residual < 1e-8);
}

TEST_CASE("truncation does not move the coefficients") {
  const auto g = symmetric(0.02, 0.66);
  const auto a = solve_scattering(g, kKappa, 0.05, 15);
  const auto b = solve_scattering(g, kKappa, 0.05, 30);
  CHECK(std::abs(a.R - b.R) <= 1e-6);
  CHECK(std::abs(a.T - b.T) <= 1e-6);
  // Extending the truncated region by a mesh-aligned distance.
  const auto c = solve_scattering(symmetric(0.02, 0.66, 1.5), kKappa, 0.05, 15);
  CHECK(std::abs(a.R - c.R) <= 1e-6);
  CHECK(std::abs(a.T - c.T) <= 1e-6);
}

TEST_CASE("reciprocity between the two incidences") {
  WaveguideGeometry2D g = symmetric(0.02, 0.65);
  g.left = Screen::with_holes({Interval::centered(0.1, 0.06)});
  g.right = Screen::with_holes({Interval::centered(0.7, 0.02)});
  SolveOptions left;
  left.mesh.h = 0.05;
  SolveOptions right = left;
  right.incidence = Incidence::from_right;
  const auto a = solve_scattering(g, kKappa, left);
  const auto b = solve_scattering(g, kKappa, right);
  CHECK(std::abs(std::abs(a.T) - std::abs(b.T)) <= 1e-8);
  CHECK(std::abs(a.T - b.T) <= 1e-8);
  CHECK(a.energy_residual <= 1e-8);
  CHECK(b.energy_residual <= 1e-8);
}

TEST_CASE("energy residual on a refinement pair") {
  const auto g = symmetric(0.02, 0.64);
  const auto coarse = solve_scattering(g, kKappa, 0.1);
  const auto fine = solve_scattering(g, kKappa, 0.05);
  CHECK(coarse.energy_residual <= 5e-3);
  CHECK(fine.energy_residual <= 5e-3);
  // Both sit at round-off: the discrete scheme is conservative.
  CHECK((fine.energy_residual <= coarse.energy_residual || fine.energy_residual < 1e-10));
  CHECK(fine.relative_residual <= 1e-10);
}

TEST_CASE("narrower holes give a sharper peak") {
  auto width = [](double eps, double lo, double hi) {
    // Full width at half maximum of |T|^2 on a fine L grid.
    std::vector<double> Ls, t2;
    const int n = 61;
    for (int i = 0; i < n; ++i) {
      const double L = lo + (hi - lo) * i / (n - 1);
      Ls.push_back(L);
      t2.push_back(std::norm(solve_scattering(symmetric(eps, L), kKappa, 0.1).T));
    }
    const double peak = *std::max_element(t2.begin(), t2.end());
    double first = 0, last = 0;
    for (int i = 0; i < n; ++i)
      if (t2[std::size_t(i)] >= peak / 2) {
        if (first == 0) first = Ls[std::size_t(i)];
        last = Ls[std::size_t(i)];
      }
    return last - first;
  };
  const double w02 = width(0.02, 0.64, 0.74);
  const double w01 = width(0.01, 0.64, 0.72);
  MESSAGE("FWHM eps=0.02: " << w02 << ", eps=0.01: " << w01);
  CHECK(w02 > w01);
  CHECK(w01 > 0.0);
}

TEST_CASE("field export") {
  const auto g = symmetric(0.1, 0.6);
  const auto r = solve_scattering(g, kKappa, 0.1, 15, true);
  REQUIRE(r.field);

  // A constant dof vector interpolates to the constant everywhere.
  auto unit = r;
  unit.field = Eigen::VectorXcd::Ones(r.field->size());
  const int nz = 17, ny = 21;
  const auto s = export_field(unit, *r.mesh, nz, ny, FieldPart::real, g.L);
  REQUIRE(s.value.size() == std::size_t(nz * ny));
  int gaps = 0;
  for (int i = 0; i < nz; ++i)
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = std::size_t(i * ny + j);
      const bool on_screen = (std::abs(std::abs(s.z[k]) - g.L) < 1e-12) &&
                             std::abs(s.y[k] - 0.5) > 0.05 + 1e-12;
      if (std::isnan(s.value[k])) {
        ++gaps;
        CHECK(on_screen);
      } else {
        CHECK(!on_screen);
        CHECK(s.value[k] == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  CHECK(gaps > 0);  // z = +-0.6 are grid lines
  CHECK(s.z.front() == doctest::Approx(-g.Z));
  CHECK(s.z.back() == doctest::Approx(g.Z));

  auto none = r;
  none.field.reset();
  CHECK_THROWS_AS(export_field(none, *r.mesh, nz, ny, FieldPart::real, g.L), InvalidState);

  std::ostringstream os;
  write_field(os, export_field(r, *r.mesh, 3, 2, FieldPart::imag, g.L));
  std::istringstream is(os.str());
  std::string line;
  int data = 0, blank = 0;
  while (std::getline(is, line)) {
    if (line.empty()) {
      ++blank;
      continue;
    }
    ++data;
    std::istringstream ls(line);
    std::string a, b, c, extra;
    CHECK(static_cast<bool>(ls >> a >> b >> c));
    CHECK_FALSE(static_cast<bool>(ls >> extra));
  }
  CHECK(data == 6);
  CHECK(blank == 3);
}

TEST_CASE("scattered field is trapped in a resonant cavity") {
  // At the transmission peak for eps = 0.01 the reflected wave vanishes, so
  // the scattered field lives in the resonator.
  const auto f = [](double L) { return std::abs(solve_scattering(symmetric(0.01, L), kKappa, 0.05).T); };
  const auto peak = sweep::golden_section_max(f, 0.67, 0.70, 1e-5);
  const auto g = symmetric(0.01, peak.x);
  const auto r = solve_scattering(g, kKappa, 0.05, 15, true);
  const auto s = export_field(r, *r.mesh, 161, 41, FieldPart::scattered_imag, g.L);
  // The trunk starts half a guide height before the screen: closer in, the
  // aperture near field carries the cavity field through the hole.
  double inside = 0, trunk = 0;
  for (std::size_t k = 0; k < s.value.size(); ++k) {
    if (std::isnan(s.value[k])) continue;
    const double v = std::abs(s.value[k]);
    if (std::abs(s.z[k]) < g.L) inside = std::max(inside, v);
    if (s.z[k] <= -g.L - 0.5 * g.height) trunk = std::max(trunk, v);
  }
  MESSAGE("L* " << peak.x << ": max |Im u_s| resonator " << inside << ", left trunk " << trunk);
  CHECK(inside >= 50 * trunk);
  CHECK(std::abs(r.amplitude_mid.imag()) > 3 * std::abs(r.amplitude_mid.real()));
}
