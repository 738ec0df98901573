#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ptqrm/gfunction.hpp"
#include "ptqrm/oracle.hpp"
#include "ptqrm/types.hpp"

namespace ptqrm::solver {

struct RealZero {
  double E;
  Parity parity;          // which of G+/G- vanished
  double bracket_lo, bracket_hi;
  double residual;        // |G(E)|
};

struct ComplexZeroPair {
  Complex E;              // representative with Im E > 0; conjugate implied
  Parity parity;
  double residual;
  bool collapsed_to_real = false;  // |Im E| < 1e-10; reported real, flagged
};

struct ExceptionalPoint {
  double g_star, E_star;
  Parity parity;
  std::pair<int, int> level_pair;  // real-sorted indices just below g_star
  double residual_G, residual_dG;
  double second_derivative;        // dG2/dE2 at the EP, bounded away from 0
};

struct DegeneratePoint {
  int n;
  double g_n;
  double E_n;          // = n + g_n^2 exactly
  double f_residual;   // |f_n(g_n)|
};

struct ScanOptions {
  int samples_per_interval = 200;
  double zero_tol = 1e-12;      // |G| at an accepted zero
  double bracket_tol = 1e-12;   // bisection bracket width
  double pole_margin = 1e-7;    // sampling keeps this distance from poles
  int refine_rounds = 2;        // local refinement where |G| dips
  SeriesOptions series{};
};

// Sign-change scan of the real G-functions between pole lines, bisection
// refinement; zeros sorted by E. Near-tangent pairs closer than the sampling
// resolution are a locate_ep problem, both members are returned when seen.
std::vector<RealZero> scan_real_zeros(const ModelParams& params, double e_min, double e_max,
                                      const ScanOptions& opts = {});

// Damped Newton on the chosen parity's G with the analytic derivative.
ComplexZeroPair find_complex_zero(const ModelParams& params, Complex seed, Parity parity,
                                  const ScanOptions& opts = {});

struct EpOptions {
  double bisect_width = 1e-4;   // stage-1 window target
  double residual_tol = 1e-10;  // |G| and |dG/dE| at the EP
  double g_step = 1e-7;         // central-difference step in g
  double e_max = 12.0;          // ceiling for interval auto-detection
  int max_newton = 60;
  ScanOptions scan{};
  int oracle_cutoff = 120;      // for level_pair identification
};

// Two-stage EP location: bisection on the per-parity count of real zeros in
// one inter-pole interval, then 2-D Newton on (G, dG/dE) over (E, g).
// interval = pole index n for (n + g^2, n+1 + g^2); -1 for the region below
// pole 0; std::nullopt auto-detects the interval whose count drops by 2.
ExceptionalPoint locate_ep(double delta, double g_lo, double g_hi, Parity parity,
                           std::optional<int> interval = std::nullopt,
                           const EpOptions& opts = {});

// Scans the oracle trace for coalescence candidates and refines each through
// locate_ep. Used by the CLI when no window is given.
std::vector<ExceptionalPoint> locate_all_eps(double delta, double g_lo, double g_hi,
                                             const FockSpace& space, int levels,
                                             const EpOptions& opts = {}, int jobs = 0);

// Root of f_n(g) on pole line n by bracketing + bisection; the lowest-g root
// in the window is returned.
DegeneratePoint locate_degenerate(double delta, int n, double g_lo = 1e-3, double g_hi = 2.0,
                                  double g_tol = 1e-12);

enum class SeedSource { OracleValues, SignCells };

struct AssembleOptions {
  int levels = 8;
  SeedSource seeds = SeedSource::OracleValues;
  ScanOptions scan{};
  int jobs = 0;
  // complex-plane sign-cell grid (SeedSource::SignCells)
  int cell_nx = 60, cell_ny = 40;
  double im_max = 3.0;
};

// Spectrum from G-function zeros over a g-grid (parallel over grid points).
// g = 0 entries use the closed form {n +- delta/2}. When `trace` is given
// its per-point eigenvalues seed the complex-zero Newton and provide branch
// ids; otherwise seeds follow opts.seeds. Per-point failures land in
// `failures` (grid index -> reason) instead of aborting the sweep.
std::vector<SpectrumRecord> assemble_spectrum(double delta, std::span<const double> g_grid,
                                              double e_min, double e_max,
                                              const FockSpace& space,
                                              const AssembleOptions& opts = {},
                                              const oracle::SpectrumTrace* trace = nullptr,
                                              std::vector<std::pair<int, std::string>>* failures = nullptr);

// Complex-zero seeds from sign-structure cells of (Re G, Im G) on a coarse
// complex grid; the no-oracle seeding mode.
std::vector<std::pair<Complex, Parity>> sign_cell_seeds(const ModelParams& params,
                                                        double re_min, double re_max,
                                                        double im_min, double im_max,
                                                        int nx, int ny,
                                                        const SeriesOptions& series = {});

}  // namespace ptqrm::solver
