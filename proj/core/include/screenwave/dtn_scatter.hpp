#pragma once

// Modal Dirichlet-to-Neumann truncation, piston-mode incidence and
// extraction of the reflection/transmission coefficients.

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "screenwave/helmholtz_fem.hpp"
#include "screenwave/waveguide_mesh.hpp"

namespace screenwave::scatter {

using Complex = std::complex<double>;

/// Transverse Neumann modes of (0, H): phi_0 = 1/sqrt(H),
/// phi_n = sqrt(2/H) cos(n pi y / H). Mode n decays like exp(-gamma_n |z|)
/// with gamma_0 = -i kappa (propagating) and gamma_n = sqrt((n pi/H)^2 - kappa^2).
struct ModalBasis {
  int n_modes = 15;
  double kappa = 0.0;
  double height = 1.0;
  std::vector<Complex> gammas;

  double phi(int n, double y) const;
};

/// Throws UnsupportedRegime unless 0 < kappa < pi/H.
ModalBasis modal_rates(double kappa, int n_modes = 15, double height = 1.0);

enum class Incidence { from_left, from_right };

/// For each truncation boundary adds  sum_n gamma_n (u, phi_n)(v, phi_n)
/// and the piston-mode source entering through the incident side. The
/// incident wave is exp(i kappa (z + L)) / sqrt(H) from the left, and
/// exp(-i kappa (z - L)) / sqrt(H) from the right.
fem::SparseComplexSystem attach_dtn_and_rhs(fem::SparseComplexSystem system,
                                            const mesh::Mesh& mesh,
                                            const ModalBasis& basis, double L,
                                            Incidence incidence = Incidence::from_left);

/// (u, phi_n) on the boundary with the given tag, as a dense dof vector.
Eigen::VectorXd modal_functional(const mesh::Mesh& mesh, mesh::BoundaryTag side,
                                 const ModalBasis& basis, int n);

struct ScatteringResult {
  Complex R;
  Complex T;
  /// |1 - |R|^2 - |T|^2|
  double energy_residual = 0.0;
  /// Coefficient of cos(kappa (z + L)) in the piston component of the
  /// field inside the resonator.
  Complex amplitude_mid;
  double kappa = 0.0;
  double relative_residual = 0.0;
  std::size_t n_dofs = 0;
  std::optional<Eigen::VectorXcd> field;
  std::shared_ptr<const mesh::Mesh> mesh;
};

struct SolveOptions {
  mesh::MeshOptions mesh;
  int n_modes = 15;
  bool want_field = false;
  Incidence incidence = Incidence::from_left;
};

/// Total-field solve on a prebuilt mesh. R multiplies the outgoing piston
/// mode referenced at the incident-side screen, T the one at the far screen.
ScatteringResult solve_on_mesh(std::shared_ptr<const mesh::Mesh> mesh,
                               double kappa, const SolveOptions& options);

ScatteringResult solve_scattering(const mesh::WaveguideGeometry2D& geom,
                                  double kappa, const SolveOptions& options);

ScatteringResult solve_scattering(const mesh::WaveguideGeometry2D& geom,
                                  double kappa, double h, int n_modes = 15,
                                  bool want_field = false);

/// Piston component (u(z, .), phi_0) of a solved field on the cross-section z.
Complex piston_component(const mesh::Mesh& mesh, const mesh::PointLocator& locator,
                         const Eigen::VectorXcd& field, double z);

/// P2 interpolation of a dof vector; nullopt outside the mesh.
std::optional<Complex> interpolate(const mesh::Mesh& mesh,
                                   const mesh::PointLocator& locator,
                                   const Eigen::VectorXcd& field,
                                   const mesh::Point& p);

enum class FieldPart { real, imag, scattered_real, scattered_imag };

struct FieldSamples {
  int nz = 0;
  int ny = 0;
  /// Row-major in z: sample (i, j) at index i * ny + j. NaN marks a gap.
  std::vector<double> z, y, value;
};

/// Uniform nz x ny grid over [-Z, Z] x [0, H]. Points on screen material are
/// gaps. The scattered parts subtract exp(i kappa (z + L)) / sqrt(H).
FieldSamples export_field(const ScatteringResult& result, const mesh::Mesh& mesh,
                          int nz, int ny, FieldPart part, double L);

/// `z y value` lines, blank line after each z column, `nan` for gaps.
void write_field(std::ostream& os, const FieldSamples& samples);

}  // namespace screenwave::scatter
