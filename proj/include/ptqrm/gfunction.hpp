#pragma once

#include <vector>

#include "ptqrm/types.hpp"

namespace ptqrm {

// Coefficient recursion behind the G-function:
//   e_n = (delta/2) f_n / (n + g^2 - E)
//   f_{n+1} = [-(delta/2) e_n + (n - 3g^2 - E) f_n] / (2g(n+1)) + f_{n-1}/(n+1)
// with f_0 = 1, f_{-1} = 0. Differentiating term by term in E gives the
// companion recursions for de/dE, df/dE and the second derivatives.

struct RecursionTable {
  Complex E;
  std::vector<Complex> e, f;      // coefficients 0..n_used
  std::vector<Complex> de, df;    // d/dE, filled when deriv_order >= 1
  std::vector<Complex> d2e, d2f;  // d^2/dE^2, filled when deriv_order >= 2
  int n_used = 0;
};

// G_+/G_- and their E-derivatives; the sum G_pm = sum (e_n -+ f_n) g^n is
// accumulated with an iterated power of g, never explicit g^n or n!.
struct GValue {
  Complex g_plus{}, g_minus{};
  Complex dg_plus{}, dg_minus{};
  Complex d2g_plus{}, d2g_minus{};
  bool converged = false;
  int n_used = 0;
  double tail_estimate = 0.0;
};

// Real-axis evaluation (all-real arithmetic; Im G = 0 identically there).
struct GRealValue {
  double g_plus = 0, g_minus = 0;
  double dg_plus = 0, dg_minus = 0;
  double d2g_plus = 0, d2g_minus = 0;
  bool converged = false;
  int n_used = 0;
  double tail_estimate = 0.0;
};

struct SeriesOptions {
  double tol = 1e-14;   // relative tail tolerance
  int consecutive = 5;  // small terms required before stopping
  int n_max = 2000;
  int deriv_order = 1;  // 0, 1 or 2
};

// Guard band around the pole lines E = n + g^2. Evaluation inside it is a
// typed error; callers must branch to the pole-line analysis instead.
inline constexpr double kPoleGuard = 1e-8;

// E on the n-th pole line.
double pole_energy(int n, const ModelParams& params);

// Index of the pole line nearest to Re(E), clamped to [0, n_max]; -1 when
// Re(E) sits below all pole lines by more than half a level spacing.
int nearest_pole(Complex E, const ModelParams& params, int n_max);

// Throws PoleProximityError when E is inside the guard band.
void check_pole_guard(const ModelParams& params, Complex E, int n_max);

RecursionTable compute_recursion(const ModelParams& params, Complex E, int n_max,
                                 int deriv_order = 1);

GValue evaluate_G(const ModelParams& params, Complex E, const SeriesOptions& opts = {});
GRealValue evaluate_G_real(const ModelParams& params, double E, const SeriesOptions& opts = {});

// f_n evaluated with E pinned to the n-th pole line (k + g^2 - E = k - n is
// exact for k < n, so no pole is crossed). Its zero in g is where the doubly
// degenerate state sits on pole line n. Requires n >= 1, g > 0.
double f_n_on_pole(const ModelParams& params, int n);

}  // namespace ptqrm
