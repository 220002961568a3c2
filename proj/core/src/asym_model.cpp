#include "screenwave/asym_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "screenwave/errors.hpp"

namespace screenwave::asym {

namespace {

double total_capacity(const ScreenSide3D& side) {
  return std::accumulate(side.hole_capacities.begin(),
                         side.hole_capacities.end(), 0.0);
}

double parity_sign(int q) { return (q % 2 == 1) ? 1.0 : -1.0; }  // (-1)^(q+1)

}  // namespace

void ScreenSide3D::validate() const {
  if (hole_capacities.empty())
    throw InvalidArgument("screen side needs at least one hole");
  for (double c : hole_capacities)
    if (!(c > 0.0) || !std::isfinite(c))
      throw InvalidArgument("hole capacities must be positive and finite");
  if (!(cross_section_area > 0.0) || !std::isfinite(cross_section_area))
    throw InvalidArgument("cross-section area must be positive");
}

void ResonatorSpec::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw InvalidArgument("kappa must be positive");
  if (q < 1) throw InvalidArgument("resonance index q must be >= 1");
  left.validate();
  right.validate();
  if (!(resonator_area >=
        std::max(left.cross_section_area, right.cross_section_area)))
    throw InvalidArgument(
        "resonator cross-section must contain both trunk cross-sections");
}

double critical_length(double kappa, int q) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (q < 1) throw InvalidArgument("resonance index q must be >= 1");
  return std::numbers::pi * q / (2.0 * kappa);
}

double side_coupling_K(const ScreenSide3D& side) {
  side.validate();
  return std::numbers::pi * total_capacity(side) /
         std::sqrt(side.cross_section_area);
}

double first_order_shift(const ResonatorSpec& spec) {
  spec.validate();
  const double capa = total_capacity(spec.left) + total_capacity(spec.right);
  return std::numbers::pi / (2.0 * spec.kappa * spec.kappa *
                             spec.resonator_area) *
         capa;
}

LimitScattering limit_scattering(double K_plus, double K_minus, double kappa,
                                 int q, double beta) {
  if (!(K_plus > 0.0) || !(K_minus > 0.0))
    throw InvalidArgument("couplings must be positive");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (q < 1) throw InvalidArgument("resonance index q must be >= 1");
  if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");

  const Complex detune(0.0, -kappa * beta);
  const double kp2 = K_plus * K_plus;
  const double km2 = K_minus * K_minus;
  const Complex denom = kp2 + km2 + detune;

  LimitScattering out;
  out.R0 = (kp2 - km2 + detune) / denom;
  out.T0 = 2.0 * parity_sign(q) * K_plus * K_minus / denom;
  out.a0 = Complex(0.0, 2.0 * kappa * K_minus) / denom;
  return out;
}

LimitScattering limit_scattering(const ResonatorSpec& spec,
                                 DetuningParam detuning) {
  spec.validate();
  return limit_scattering(side_coupling_K(spec.right),
                          side_coupling_K(spec.left), spec.kappa, spec.q,
                          detuning.beta);
}

bool is_complete_transmission_possible(const ResonatorSpec& spec,
                                       double rel_tol) {
  if (!(rel_tol >= 0.0)) throw InvalidArgument("rel_tol must be >= 0");
  const double km = side_coupling_K(spec.left);
  const double kp = side_coupling_K(spec.right);
  return std::abs(km - kp) <= rel_tol * std::max(km, kp);
}

double reflection_floor(double K_plus, double K_minus) {
  if (!(K_plus > 0.0) || !(K_minus > 0.0))
    throw InvalidArgument("couplings must be positive");
  // Ratio form: exact for exact ratios and free of over/underflow in K^2.
  const double r = std::max(K_plus, K_minus) / std::min(K_plus, K_minus);
  if (r > 1e150) return 1.0;
  return (r * r - 1.0) / (r * r + 1.0);
}

}  // namespace screenwave::asym
