#pragma once

// Closed-form limit of the scattering coefficients of a resonator formed by
// two thin perforated screens, as the hole size goes to zero.

#include <complex>
#include <vector>

namespace screenwave::asym {

using Complex = std::complex<double>;

/// Holes of one screen and the cross-section of the trunk behind it.
/// Capacities are harmonic capacities of the unit-scale hole shapes.
struct ScreenSide3D {
  std::vector<double> hole_capacities;
  double cross_section_area = 1.0;

  /// Throws InvalidArgument on an empty list, a non-positive capacity or area.
  void validate() const;
};

struct ResonatorSpec {
  double kappa = 0.0;
  int q = 1;
  double resonator_area = 1.0;
  ScreenSide3D left;
  ScreenSide3D right;

  void validate() const;
};

/// Leading-order reflection, transmission and resonator amplitude.
struct LimitScattering {
  Complex R0;
  Complex T0;
  Complex a0;
};

/// beta = alpha1 + alpha2 * L''. The constants alpha1, alpha2 are not
/// available in closed form, so the detuning is the free coordinate.
struct DetuningParam {
  double beta = 0.0;
};

/// pi q / (2 kappa): lengths where kappa^2 is a Neumann eigenvalue of the
/// closed resonator.
double critical_length(double kappa, int q);

/// K = pi * sum(capacities) / sqrt(area).
double side_coupling_K(const ScreenSide3D& side);

/// First-order length correction L' = pi/(2 kappa^2 |omega0|) * total capacity.
double first_order_shift(const ResonatorSpec& spec);

LimitScattering limit_scattering(const ResonatorSpec& spec,
                                 DetuningParam detuning);

/// Same formulas from the couplings directly.
LimitScattering limit_scattering(double K_plus, double K_minus, double kappa,
                                 int q, double beta);

/// |K- - K+| <= rel_tol * max(K-, K+).
bool is_complete_transmission_possible(const ResonatorSpec& spec,
                                       double rel_tol = 1e-9);

/// min over real beta of |R0(beta)|, reached at beta = 0.
double reflection_floor(double K_plus, double K_minus);

}  // namespace screenwave::asym
