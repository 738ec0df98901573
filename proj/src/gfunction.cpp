#include "ptqrm/gfunction.hpp"

#include <algorithm>
#include <cmath>

namespace ptqrm {

double pole_energy(int n, const ModelParams& params) {
  if (n < 0) throw ConfigError("pole_energy: n must be >= 0");
  return n + params.g * params.g;
}

int nearest_pole(Complex E, const ModelParams& params, int n_max) {
  const double offset = E.real() - params.g * params.g;
  if (offset < -0.5) return -1;
  long n = std::lround(offset);
  if (n < 0) n = 0;
  if (n > n_max) n = n_max;
  return int(n);
}

void check_pole_guard(const ModelParams& params, Complex E, int n_max) {
  const int n = nearest_pole(E, params, n_max);
  if (n < 0) return;
  const Complex d = E - Complex(pole_energy(n, params), 0.0);
  if (std::abs(d) < kPoleGuard)
    throw PoleProximityError(E, n, "evaluation point within pole guard of E_" +
                                       std::to_string(n) + "^(pole)");
}

namespace {

template <class S>
double mag(const S& x) {
  return std::abs(x);
}

// One step of the coefficient recursion with optional first and second
// E-derivatives carried along. Templated on the scalar so the real axis
// runs in real arithmetic.
template <class S>
struct RecursionEngine {
  double delta, g, g2;
  S E;
  int order;

  S f_prev{}, f{}, e{};
  S df_prev{}, df{}, de{};
  S d2f_prev{}, d2f{}, d2e{};
  int n = 0;

  RecursionEngine(const ModelParams& p, S E_, int order_)
      : delta(p.delta), g(p.g), g2(p.g * p.g), E(E_), order(order_) {
    f = S(1);  // f_0 = 1, f_{-1} = 0
    compute_e();
  }

  void compute_e() {
    const S u = S(1) / (S(double(n) + g2) - E);
    e = S(0.5 * delta) * f * u;
    if (order >= 1) de = S(0.5 * delta) * (df * u + f * u * u);
    if (order >= 2) d2e = S(0.5 * delta) * (d2f * u + S(2) * df * u * u + S(2) * f * u * u * u);
  }

  void advance() {
    const S c = S(1.0 / (2.0 * g * (n + 1)));
    const S w = S(double(n) - 3.0 * g2) - E;
    const S inv_np1 = S(1.0 / (n + 1));
    const S f_next = (S(-0.5 * delta) * e + w * f) * c + f_prev * inv_np1;
    S df_next{}, d2f_next{};
    if (order >= 1) df_next = (S(-0.5 * delta) * de + w * df - f) * c + df_prev * inv_np1;
    if (order >= 2) d2f_next = (S(-0.5 * delta) * d2e + w * d2f - S(2) * df) * c + d2f_prev * inv_np1;
    f_prev = f; df_prev = df; d2f_prev = d2f;
    f = f_next; df = df_next; d2f = d2f_next;
    ++n;
    compute_e();
  }
};

struct Accumulated {
  bool converged = false;
  int n_used = 0;
  double tail = 0.0;
};

// Accumulates G_pm = sum (e_n -+ f_n) g^n along with the derivative sums.
// Stops once `consecutive` successive terms are each below
// tol * (1 + |partial sum|) for both parities.
template <class S>
Accumulated accumulate_G(const ModelParams& params, S E, const SeriesOptions& opts, S out[6]) {
  if (!(params.g > 0.0))
    throw UnsupportedParameterError("G-function recursion requires g > 0");
  RecursionEngine<S> rec(params, E, opts.deriv_order);
  S gp{}, gm{}, dgp{}, dgm{}, d2gp{}, d2gm{};
  double gpow = 1.0;
  int small_run = 0;
  Accumulated acc;
  double last_rel = 0.0;
  for (int n = 0; n <= opts.n_max; ++n) {
    const S tp = (rec.e - rec.f) * S(gpow);
    const S tm = (rec.e + rec.f) * S(gpow);
    gp += tp;
    gm += tm;
    if (opts.deriv_order >= 1) {
      dgp += (rec.de - rec.df) * S(gpow);
      dgm += (rec.de + rec.df) * S(gpow);
    }
    if (opts.deriv_order >= 2) {
      d2gp += (rec.d2e - rec.d2f) * S(gpow);
      d2gm += (rec.d2e + rec.d2f) * S(gpow);
    }
    if (!std::isfinite(mag(rec.f)))
      throw SeriesError("coefficient overflow in G-series at n = " + std::to_string(n));
    const double rel = std::max(mag(tp) / (1.0 + mag(gp)), mag(tm) / (1.0 + mag(gm)));
    last_rel = rel;
    small_run = (rel < opts.tol) ? small_run + 1 : 0;
    acc.n_used = n;
    if (small_run >= opts.consecutive) {
      acc.converged = true;
      break;
    }
    if (n < opts.n_max) {
      rec.advance();
      gpow *= params.g;
    }
  }
  acc.tail = last_rel;
  out[0] = gp; out[1] = gm; out[2] = dgp; out[3] = dgm; out[4] = d2gp; out[5] = d2gm;
  return acc;
}

}  // namespace

RecursionTable compute_recursion(const ModelParams& params, Complex E, int n_max,
                                 int deriv_order) {
  if (!(params.g > 0.0))
    throw UnsupportedParameterError("compute_recursion requires g > 0");
  if (n_max < 0) throw ConfigError("compute_recursion: n_max must be >= 0");
  check_pole_guard(params, E, n_max);

  RecursionTable t;
  t.E = E;
  t.n_used = n_max;
  t.e.reserve(n_max + 1);
  t.f.reserve(n_max + 1);
  RecursionEngine<Complex> rec(params, E, deriv_order);
  for (int n = 0; n <= n_max; ++n) {
    t.e.push_back(rec.e);
    t.f.push_back(rec.f);
    if (deriv_order >= 1) {
      t.de.push_back(rec.de);
      t.df.push_back(rec.df);
    }
    if (deriv_order >= 2) {
      t.d2e.push_back(rec.d2e);
      t.d2f.push_back(rec.d2f);
    }
    if (n < n_max) rec.advance();
  }
  return t;
}

GValue evaluate_G(const ModelParams& params, Complex E, const SeriesOptions& opts) {
  check_pole_guard(params, E, opts.n_max);
  Complex s[6];
  const Accumulated acc = accumulate_G<Complex>(params, E, opts, s);
  GValue v;
  v.g_plus = s[0]; v.g_minus = s[1];
  v.dg_plus = s[2]; v.dg_minus = s[3];
  v.d2g_plus = s[4]; v.d2g_minus = s[5];
  v.converged = acc.converged;
  v.n_used = acc.n_used;
  v.tail_estimate = acc.tail;
  return v;
}

GRealValue evaluate_G_real(const ModelParams& params, double E, const SeriesOptions& opts) {
  check_pole_guard(params, Complex(E, 0.0), opts.n_max);
  double s[6];
  const Accumulated acc = accumulate_G<double>(params, E, opts, s);
  GRealValue v;
  v.g_plus = s[0]; v.g_minus = s[1];
  v.dg_plus = s[2]; v.dg_minus = s[3];
  v.d2g_plus = s[4]; v.d2g_minus = s[5];
  v.converged = acc.converged;
  v.n_used = acc.n_used;
  v.tail_estimate = acc.tail;
  return v;
}

double f_n_on_pole(const ModelParams& params, int n) {
  if (n < 1) throw ConfigError("f_n_on_pole: n must be >= 1");
  if (!(params.g > 0.0)) throw UnsupportedParameterError("f_n_on_pole requires g > 0");
  const double delta = params.delta, g = params.g, g2 = g * g;
  // E = n + g^2 exactly, so k + g^2 - E = k - n (integer, nonzero for k < n).
  double f_prev = 0.0, f = 1.0;
  for (int k = 0; k < n; ++k) {
    const double e = 0.5 * delta * f / double(k - n);
    const double w = double(k) - 3.0 * g2 - (double(n) + g2);
    const double f_next = (-0.5 * delta * e + w * f) / (2.0 * g * (k + 1)) + f_prev / (k + 1);
    f_prev = f;
    f = f_next;
  }
  return f;
}

}  // namespace ptqrm
