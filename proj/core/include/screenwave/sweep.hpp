#pragma once

// L-sweeps of the scattering coefficients and golden-section localization
// of the transmission peak.

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "screenwave/run_config.hpp"

namespace screenwave::sweep {

using Complex = std::complex<double>;

struct SweepRow {
  double L = 0.0;
  Complex R;
  Complex T;
  double energy_residual = 0.0;
  std::string error;  // empty on success; coefficients are NaN otherwise

  bool ok() const { return error.empty(); }
};

/// One solve of the configured geometry at screen half-distance L. Solver
/// failures are recorded in the row, never thrown.
SweepRow solve_row(const config::RunConfig& cfg, double L);

/// L_min + (L_max - L_min) i / (n_steps - 1).
std::vector<double> sweep_grid(const config::RunConfig& cfg);

/// Rows in L order, computed by a pool of cfg.workers threads
/// (0: hardware concurrency).
std::vector<SweepRow> run_sweep(const config::RunConfig& cfg);

/// Header row, then L,re_R,im_R,abs_R,re_T,im_T,abs_T,energy_residual,error.
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// L,re_R,im_R,re_T,im_T: both loci of the complex plane per row.
void write_locus(std::ostream& os, const std::vector<SweepRow>& rows);

/// Fixed 12-significant-digit rendering used by every output file.
std::string format_number(double v);

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Largest number of objective evaluations golden_section_max may spend.
int golden_evaluation_bound(double width, double tol);

/// Maximizes f on [lo, hi] to absolute tolerance tol, evaluating only
/// interior points. Throws BracketError if the maximum is pushed to an end.
GoldenResult golden_section_max(const std::function<double(double)>& f,
                                double lo, double hi, double tol);

struct Resonance {
  double L_star = 0.0;
  Complex T;
  Complex R;
  double energy_residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int evaluations = 0;
};

/// Bracket from [resonance] if given, otherwise the sweep argmax +- one step.
Resonance find_resonance(const config::RunConfig& cfg);

/// Same, with the coarse sweep supplied by the caller.
Resonance find_resonance(const config::RunConfig& cfg,
                         const std::vector<SweepRow>& coarse);

}  // namespace screenwave::sweep
