#pragma once

// P2 Galerkin discretization of  Laplace(u) + kappa^2 u = 0  with natural
// (Neumann) conditions on every mesh boundary.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <complex>
#include <iosfwd>

#include "screenwave/waveguide_mesh.hpp"

namespace screenwave::fem {

using Complex = std::complex<double>;
using RealMatrix = Eigen::SparseMatrix<double>;
using ComplexMatrix = Eigen::SparseMatrix<Complex>;

/// Node to degree-of-freedom table. Seam duplication already lives in the
/// mesh, so every P2 node (vertex or midpoint, per face) owns one dof.
struct DofMap {
  std::vector<mesh::Index> node_to_dof;
  mesh::Index n_dofs = 0;

  static DofMap for_mesh(const mesh::Mesh& mesh);
};

/// A = S - kappa^2 M (+ boundary terms). Complex symmetric, not Hermitian;
/// with a symmetric matrix the compressed-column storage doubles as
/// compressed-row storage.
struct SparseComplexSystem {
  ComplexMatrix matrix;
  Eigen::VectorXcd rhs;
  double kappa = 0.0;
};

struct ElementMatrices {
  Eigen::Matrix<double, 6, 6> stiffness;
  Eigen::Matrix<double, 6, 6> mass;
};

/// Local P2 matrices on the affine triangle (a, b, c); node order
/// v0 v1 v2 m01 m12 m20. Six-point rule, exact for degree 4.
ElementMatrices p2_element_matrices(const mesh::Point& a, const mesh::Point& b,
                                    const mesh::Point& c);

RealMatrix assemble_stiffness(const mesh::Mesh& mesh);
RealMatrix assemble_mass(const mesh::Mesh& mesh);

/// matrix = S - kappa^2 M, rhs = 0.
SparseComplexSystem assemble(const mesh::Mesh& mesh, double kappa);

struct SolveReport {
  double relative_residual = 0.0;
  int refinement_steps = 0;
};

/// Sparse LU with COLAMD ordering plus up to three steps of iterative
/// refinement; throws NumericalFailure unless ||Ax - b|| <= 1e-10 ||b||.
Eigen::VectorXcd solve_linear(const SparseComplexSystem& system,
                              SolveReport* report = nullptr);

/// Matrix-market coordinate listing (1-based), for debugging.
void write_matrix_market(std::ostream& os, const ComplexMatrix& matrix);

/// P2 basis values at barycentric coordinates, node order as above.
std::array<double, 6> p2_shape(const std::array<double, 3>& bary);

}  // namespace screenwave::fem
