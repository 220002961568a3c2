#include "screenwave/helmholtz_fem.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "screenwave/errors.hpp"

namespace screenwave::fem {

namespace {

struct QuadPoint {
  double l0, l1, l2, w;
};

// Symmetric six-point rule on the triangle, degree 4; weights sum to 1.
constexpr double kA1 = 0.445948490915965, kB1 = 1.0 - 2.0 * kA1;
constexpr double kA2 = 0.091576213509771, kB2 = 1.0 - 2.0 * kA2;
constexpr double kW1 = 0.223381589678011, kW2 = 0.109951743655322;
constexpr QuadPoint kRule[6] = {
    {kB1, kA1, kA1, kW1}, {kA1, kB1, kA1, kW1}, {kA1, kA1, kB1, kW1},
    {kB2, kA2, kA2, kW2}, {kA2, kB2, kA2, kW2}, {kA2, kA2, kB2, kW2},
};

template <class Scalar>
Eigen::SparseMatrix<Scalar> assemble_with(
    const mesh::Mesh& mesh,
    const std::function<void(const ElementMatrices&,
                             Eigen::Matrix<Scalar, 6, 6>&)>& combine) {
  const auto n = std::size_t(mesh.n_nodes());
  if (n > std::size_t(std::numeric_limits<int>::max() / 64))
    throw ResourceError("degree-of-freedom count overflows sparse indices");

  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(mesh.triangles.size() * 36);
  Eigen::Matrix<Scalar, 6, 6> local;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& v = mesh.triangles[t];
    const auto em = p2_element_matrices(mesh.nodes[std::size_t(v[0])],
                                        mesh.nodes[std::size_t(v[1])],
                                        mesh.nodes[std::size_t(v[2])]);
    combine(em, local);
    const auto dofs = mesh.p2_nodes(t);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        trips.emplace_back(dofs[std::size_t(i)], dofs[std::size_t(j)], local(i, j));
  }
  Eigen::SparseMatrix<Scalar> a{Eigen::Index(n), Eigen::Index(n)};
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

}  // namespace

DofMap DofMap::for_mesh(const mesh::Mesh& mesh) {
  DofMap d;
  d.n_dofs = mesh.n_nodes();
  d.node_to_dof.resize(std::size_t(d.n_dofs));
  for (mesh::Index i = 0; i < d.n_dofs; ++i) d.node_to_dof[std::size_t(i)] = i;
  return d;
}

std::array<double, 6> p2_shape(const std::array<double, 3>& l) {
  return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
          4 * l[0] * l[1],       4 * l[1] * l[2],       4 * l[2] * l[0]};
}

ElementMatrices p2_element_matrices(const mesh::Point& a, const mesh::Point& b,
                                    const mesh::Point& c) {
  const double det = (b.x() - a.x()) * (c.y() - a.y()) -
                     (b.y() - a.y()) * (c.x() - a.x());
  const double area = 0.5 * std::abs(det);
  // Gradients of the barycentric coordinates (constant on the element).
  Eigen::Matrix<double, 3, 2> g;
  g << b.y() - c.y(), c.x() - b.x(),
       c.y() - a.y(), a.x() - c.x(),
       a.y() - b.y(), b.x() - a.x();
  g /= det;

  ElementMatrices out;
  out.stiffness.setZero();
  out.mass.setZero();
  for (const auto& q : kRule) {
    const std::array<double, 3> l{q.l0, q.l1, q.l2};
    const auto n = p2_shape(l);
    Eigen::Matrix<double, 6, 2> dn;
    for (int k = 0; k < 3; ++k) dn.row(k) = (4 * l[std::size_t(k)] - 1) * g.row(k);
    dn.row(3) = 4 * (l[0] * g.row(1) + l[1] * g.row(0));
    dn.row(4) = 4 * (l[1] * g.row(2) + l[2] * g.row(1));
    dn.row(5) = 4 * (l[2] * g.row(0) + l[0] * g.row(2));
    const double w = q.w * area;
    out.stiffness.noalias() += w * dn * dn.transpose();
    Eigen::Map<const Eigen::Matrix<double, 6, 1>> nv(n.data());
    out.mass.noalias() += w * nv * nv.transpose();
  }
  return out;
}

RealMatrix assemble_stiffness(const mesh::Mesh& mesh) {
  return assemble_with<double>(
      mesh, [](const ElementMatrices& e, Eigen::Matrix<double, 6, 6>& out) {
        out = e.stiffness;
      });
}

RealMatrix assemble_mass(const mesh::Mesh& mesh) {
  return assemble_with<double>(
      mesh, [](const ElementMatrices& e, Eigen::Matrix<double, 6, 6>& out) {
        out = e.mass;
      });
}

SparseComplexSystem assemble(const mesh::Mesh& mesh, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double k2 = kappa * kappa;
  SparseComplexSystem sys;
  sys.kappa = kappa;
  sys.matrix = assemble_with<Complex>(
      mesh, [k2](const ElementMatrices& e, Eigen::Matrix<Complex, 6, 6>& out) {
        out = (e.stiffness - k2 * e.mass).cast<Complex>();
      });
  sys.rhs = Eigen::VectorXcd::Zero(sys.matrix.rows());
  return sys;
}

Eigen::VectorXcd solve_linear(const SparseComplexSystem& system,
                              SolveReport* report) {
  const auto& a = system.matrix;
  if (a.rows() != a.cols() || a.rows() != system.rhs.size())
    throw InvalidArgument("system dimensions do not match");

  Eigen::SparseLU<ComplexMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw NumericalFailure("sparse LU factorization failed: " + lu.lastErrorMessage());

  const double bnorm = system.rhs.norm();
  Eigen::VectorXcd x = lu.solve(system.rhs);
  if (bnorm == 0.0) {
    if (report) *report = {0.0, 0};
    return x;
  }
  Eigen::VectorXcd r = system.rhs - a * x;
  double rel = r.norm() / bnorm;
  int steps = 0;
  while (rel > 1e-12 && steps < 3 && x.allFinite()) {
    x += lu.solve(r);
    r = system.rhs - a * x;
    rel = r.norm() / bnorm;
    ++steps;
  }
  if (!x.allFinite() || !(rel <= 1e-10)) {
    std::ostringstream os;
    os << "linear solve did not converge: relative residual " << rel
       << ", log|det A| = " << lu.logAbsDeterminant()
       << " (matrix numerically singular?)";
    throw NumericalFailure(os.str());
  }
  if (report) *report = {rel, steps};
  return x;
}

void write_matrix_market(std::ostream& os, const ComplexMatrix& matrix) {
  const auto prec = os.precision(17);
  os << "%%MatrixMarket matrix coordinate complex general\n"
     << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  for (Eigen::Index k = 0; k < matrix.outerSize(); ++k)
    for (ComplexMatrix::InnerIterator it(matrix, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
  os.precision(prec);
}

}  // namespace screenwave::fem
