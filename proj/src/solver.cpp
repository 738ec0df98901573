#include "ptqrm/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ptqrm/sweep.hpp"

namespace ptqrm::solver {

namespace {

double pick(const GRealValue& v, Parity p) {
  return p == Parity::Plus ? v.g_plus : v.g_minus;
}

Complex pick(const GValue& v, Parity p) {
  return p == Parity::Plus ? v.g_plus : v.g_minus;
}

Complex pick_d(const GValue& v, Parity p) {
  return p == Parity::Plus ? v.dg_plus : v.dg_minus;
}

// Inter-pole interval bounds clipped to [e_min, e_max]; interval index -1 is
// the region below pole 0. Ground state sits above -delta/2 - g^2 - 1.
std::pair<double, double> interval_bounds(const ModelParams& params, int interval,
                                          double e_min, double e_max, double margin) {
  const double g2 = params.g * params.g;
  double lo = interval < 0 ? e_min : pole_energy(interval, params) + margin;
  double hi = pole_energy(interval + 1, params) - margin;
  return {std::max(lo, e_min), std::min(hi, e_max)};
}

struct Sample {
  double E;
  double gp, gm;
};

double bisect_zero(const ModelParams& params, Parity parity, double lo, double hi,
                   double f_lo, const ScanOptions& opts, double* residual) {
  // plain bisection on the sign; brackets never contain a pole by
  // construction
  double a = lo, b = hi, fa = f_lo;
  while (b - a > opts.bracket_tol) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // double resolution floor
    const double fm = pick(evaluate_G_real(params, m, opts.series), parity);
    if ((fa < 0) == (fm < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  const double mid = 0.5 * (a + b);
  *residual = std::abs(pick(evaluate_G_real(params, mid, opts.series), parity));
  return mid;
}

void scan_interval(const ModelParams& params, double lo, double hi, const ScanOptions& opts,
                   int samples, std::vector<RealZero>& out) {
  if (!(hi > lo)) return;
  std::vector<Sample> grid(samples);
  for (int i = 0; i < samples; ++i) {
    const double E = lo + (hi - lo) * i / double(samples - 1);
    const GRealValue v = evaluate_G_real(params, E, opts.series);
    if (!v.converged)
      throw SeriesError("G-series did not converge during real-zero scan at E = " +
                        std::to_string(E));
    grid[i] = {E, v.g_plus, v.g_minus};
  }
  for (const Parity parity : {Parity::Plus, Parity::Minus}) {
    auto val = [&](const Sample& s) { return parity == Parity::Plus ? s.gp : s.gm; };
    // sign changes
    for (int i = 0; i + 1 < samples; ++i) {
      const double f0 = val(grid[i]), f1 = val(grid[i + 1]);
      if ((f0 < 0) != (f1 < 0)) {
        double residual = 0.0;
        const double z =
            bisect_zero(params, parity, grid[i].E, grid[i + 1].E, f0, opts, &residual);
        out.push_back({z, parity, grid[i].E, grid[i + 1].E, residual});
      }
    }
    // local |G| dips without a sign change hide near-tangent pairs; refine
    if (opts.refine_rounds > 0 && samples > 4) {
      double vmax = 0.0;
      for (const auto& s : grid) vmax = std::max(vmax, std::abs(val(s)));
      for (int i = 1; i + 1 < samples; ++i) {
        const double a0 = std::abs(val(grid[i - 1])), a1 = std::abs(val(grid[i])),
                     a2 = std::abs(val(grid[i + 1]));
        const bool same_sign = (val(grid[i - 1]) < 0) == (val(grid[i]) < 0) &&
                               (val(grid[i]) < 0) == (val(grid[i + 1]) < 0);
        if (same_sign && a1 <= a0 && a1 <= a2 && a1 < 0.02 * vmax) {
          ScanOptions sub = opts;
          sub.refine_rounds = opts.refine_rounds - 1;
          scan_interval(params, grid[i - 1].E, grid[i + 1].E, sub, 51, out);
        }
      }
    }
  }
}

}  // namespace

std::vector<RealZero> scan_real_zeros(const ModelParams& params, double e_min, double e_max,
                                      const ScanOptions& opts) {
  if (!(params.g > 0.0))
    throw UnsupportedParameterError("scan_real_zeros requires g > 0");
  if (!std::isfinite(e_min) || !std::isfinite(e_max) || !(e_max >= e_min))
    throw ConfigError("scan_real_zeros: bad E range");

  std::vector<RealZero> zeros;
  const int n_lo = std::max(-1, nearest_pole(Complex(e_min, 0), params, 1 << 20) - 1);
  const int n_hi = nearest_pole(Complex(e_max, 0), params, 1 << 20);
  for (int interval = n_lo; interval <= n_hi; ++interval) {
    auto [lo, hi] = interval_bounds(params, interval, e_min, e_max, opts.pole_margin);
    if (hi - lo < 4 * opts.pole_margin) continue;
    scan_interval(params, lo, hi, opts, opts.samples_per_interval, zeros);
  }
  std::sort(zeros.begin(), zeros.end(),
            [](const RealZero& a, const RealZero& b) { return a.E < b.E; });
  // refinement passes can rediscover a zero; keep one per (parity, E)
  std::vector<RealZero> unique;
  for (const auto& z : zeros) {
    const bool dup = !unique.empty() && unique.back().parity == z.parity &&
                     std::abs(unique.back().E - z.E) < 10 * opts.bracket_tol;
    if (!dup) unique.push_back(z);
  }
  return unique;
}

ComplexZeroPair find_complex_zero(const ModelParams& params, Complex seed, Parity parity,
                                  const ScanOptions& opts) {
  SeriesOptions series = opts.series;
  series.deriv_order = std::max(series.deriv_order, 1);
  check_pole_guard(params, seed, series.n_max);

  Complex E = seed;
  GValue v = evaluate_G(params, E, series);
  double best = std::abs(pick(v, parity));
  std::string trace = "";
  for (int it = 0; it < 100; ++it) {
    const Complex G = pick(v, parity);
    if (std::abs(G) < opts.zero_tol) {
      ComplexZeroPair out;
      out.parity = parity;
      out.residual = std::abs(G);
      out.collapsed_to_real = std::abs(E.imag()) < 1e-10;
      out.E = (E.imag() < 0 && !out.collapsed_to_real) ? std::conj(E) : E;
      if (out.collapsed_to_real) out.E = Complex(E.real(), 0.0);
      return out;
    }
    const Complex dG = pick_d(v, parity);
    if (std::abs(dG) == 0.0)
      throw RootFindError("Newton: zero derivative at E = " + std::to_string(E.real()));
    const Complex step = -G / dG;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 8 && !accepted; ++k, lambda *= 0.5) {
      const Complex trial = E + lambda * step;
      try {
        const GValue vt = evaluate_G(params, trial, series);
        if (std::abs(pick(vt, parity)) < best) {
          E = trial;
          v = vt;
          best = std::abs(pick(vt, parity));
          accepted = true;
        }
      } catch (const PoleProximityError&) {
        // step landed in a pole guard; shrink
      }
    }
    if (!accepted) {
      trace = " last E = (" + std::to_string(E.real()) + ", " + std::to_string(E.imag()) +
              "), |G| = " + std::to_string(best);
      throw RootFindError("Newton stalled after " + std::to_string(it + 1) + " iterations;" +
                          trace);
    }
  }
  throw RootFindError("Newton did not converge within 100 iterations; |G| = " +
                      std::to_string(best));
}

namespace {

// real zeros of one parity inside one inter-pole interval
std::vector<double> interval_zeros(double delta, double g, int interval, Parity parity,
                                   double e_floor, double e_max, const ScanOptions& scan) {
  const ModelParams params(delta, g);
  auto [lo, hi] = interval_bounds(params, interval, e_floor, e_max, scan.pole_margin);
  std::vector<RealZero> zeros;
  if (hi > lo) scan_interval(params, lo, hi, scan, scan.samples_per_interval, zeros);
  std::vector<double> out;
  for (const auto& z : zeros)
    if (z.parity == parity) out.push_back(z.E);
  std::sort(out.begin(), out.end());
  return out;
}

double e_floor_for(double delta, double g) { return -0.5 * delta - g * g - 2.0; }

}  // namespace

ExceptionalPoint locate_ep(double delta, double g_lo, double g_hi, Parity parity,
                           std::optional<int> interval, const EpOptions& opts) {
  if (!(g_hi > g_lo) || !(g_lo > 0)) throw ConfigError("locate_ep: bad g window");

  const double e_floor = e_floor_for(delta, g_hi);
  int chosen = interval.value_or(0);
  int count_lo = 0, count_hi = 0;
  if (interval) {
    count_lo = int(interval_zeros(delta, g_lo, chosen, parity, e_floor, opts.e_max, opts.scan).size());
    count_hi = int(interval_zeros(delta, g_hi, chosen, parity, e_floor, opts.e_max, opts.scan).size());
  } else {
    const int n_top = nearest_pole(Complex(opts.e_max, 0), ModelParams(delta, g_hi), 1 << 20);
    bool found = false;
    for (int n = -1; n <= n_top && !found; ++n) {
      const int c0 = int(interval_zeros(delta, g_lo, n, parity, e_floor, opts.e_max, opts.scan).size());
      if (c0 < 2) continue;
      const int c1 = int(interval_zeros(delta, g_hi, n, parity, e_floor, opts.e_max, opts.scan).size());
      if (c0 - c1 >= 2) {
        chosen = n;
        count_lo = c0;
        count_hi = c1;
        found = true;
      }
    }
    if (!found)
      throw NoIntersectionError("no EP in window: no inter-pole interval loses a zero pair of parity " +
                                std::string(parity_name(parity)));
  }
  if (count_lo < 2 || count_lo - count_hi < 2)
    throw NoIntersectionError("no EP in window: zero count of parity " +
                              std::string(parity_name(parity)) + " goes " +
                              std::to_string(count_lo) + " -> " + std::to_string(count_hi) +
                              " in interval " + std::to_string(chosen));

  // stage 1: bisection on the pair-count predicate
  double a = g_lo, b = g_hi;
  while (b - a > opts.bisect_width) {
    const double mid = 0.5 * (a + b);
    const int c = int(interval_zeros(delta, mid, chosen, parity, e_floor, opts.e_max, opts.scan).size());
    if (c >= count_lo)
      a = mid;
    else
      b = mid;
  }
  const std::vector<double> pair = interval_zeros(delta, a, chosen, parity, e_floor, opts.e_max, opts.scan);
  if (int(pair.size()) < 2)
    throw RefinementError(a, b, "stage-1 bracket lost the zero pair");
  // the merging pair are the two closest same-parity zeros
  double e_seed = 0.5 * (pair[0] + pair[1]);
  double closest = pair[1] - pair[0];
  for (size_t i = 0; i + 1 < pair.size(); ++i)
    if (pair[i + 1] - pair[i] < closest) {
      closest = pair[i + 1] - pair[i];
      e_seed = 0.5 * (pair[i] + pair[i + 1]);
    }

  // stage 2: damped 2-D Newton on F(E, g) = (G, dG/dE), analytic in E,
  // central differences in g
  SeriesOptions series = opts.scan.series;
  series.deriv_order = 2;
  double E = e_seed, g = 0.5 * (a + b);
  auto F = [&](double E_, double g_) {
    const GRealValue v0 = evaluate_G_real(ModelParams(delta, g_), E_, series);
    struct {
      double G, dG, d2G;
    } r{parity == Parity::Plus ? v0.g_plus : v0.g_minus,
        parity == Parity::Plus ? v0.dg_plus : v0.dg_minus,
        parity == Parity::Plus ? v0.d2g_plus : v0.d2g_minus};
    return r;
  };
  auto norm2 = [](double x, double y) { return std::sqrt(x * x + y * y); };
  auto r = F(E, g);
  double res = norm2(r.G, r.dG);
  for (int it = 0; it < opts.max_newton; ++it) {
    if (std::abs(r.G) < opts.residual_tol && std::abs(r.dG) < opts.residual_tol) break;
    const auto rp = F(E, g + opts.g_step);
    const auto rm = F(E, g - opts.g_step);
    const double dG_dg = (rp.G - rm.G) / (2 * opts.g_step);
    const double ddG_dg = (rp.dG - rm.dG) / (2 * opts.g_step);
    // J = [[dG/dE, dG/dg], [d2G/dE2, d(dG/dE)/dg]]
    const double det = r.dG * ddG_dg - dG_dg * r.d2G;
    if (det == 0.0) throw RefinementError(a, b, "singular Jacobian in EP refinement");
    const double dE = -(r.G * ddG_dg - dG_dg * r.dG) / det;
    const double dg = -(r.dG * r.dG - r.G * r.d2G) / det;
    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k < 10 && !accepted; ++k, lambda *= 0.5) {
      try {
        const auto rt = F(E + lambda * dE, g + lambda * dg);
        if (norm2(rt.G, rt.dG) < res) {
          E += lambda * dE;
          g += lambda * dg;
          r = rt;
          res = norm2(rt.G, rt.dG);
          accepted = true;
        }
      } catch (const PoleProximityError&) {
      }
    }
    if (!accepted) throw RefinementError(a, b, "EP Newton stagnated");
  }
  if (!(std::abs(r.G) < opts.residual_tol && std::abs(r.dG) < opts.residual_tol))
    throw RefinementError(a, b, "EP refinement missed the residual tolerance");

  ExceptionalPoint ep;
  ep.g_star = g;
  ep.E_star = E;
  ep.parity = parity;
  ep.residual_G = std::abs(r.G);
  ep.residual_dG = std::abs(r.dG);
  ep.second_derivative = r.d2G;

  // level-pair indices from the real-sorted oracle spectrum just below g_star
  const double g_probe = std::max(g_lo, g - std::max(1e-3, 0.02 * (g_hi - g_lo)));
  oracle::DiagonalizeOptions dopts;
  dopts.audit = false;
  const auto pairs =
      oracle::diagonalize(ModelParams(delta, g_probe), FockSpace(opts.oracle_cutoff), dopts);
  int best0 = -1, best1 = -1;
  double d0 = 1e300, d1 = 1e300;
  for (int k = 0; k < int(pairs.size()); ++k) {
    const double d = std::abs(pairs[k].value - Complex(E, 0));
    if (d < d0) {
      d1 = d0; best1 = best0;
      d0 = d; best0 = k;
    } else if (d < d1) {
      d1 = d;
      best1 = k;
    }
  }
  ep.level_pair = {std::min(best0, best1), std::max(best0, best1)};
  return ep;
}

std::vector<ExceptionalPoint> locate_all_eps(double delta, double g_lo, double g_hi,
                                             const FockSpace& space, int levels,
                                             const EpOptions& opts, int jobs) {
  // coarse oracle trace supplies coalescence candidates
  const int npts = 80;
  std::vector<double> grid(npts);
  for (int i = 0; i < npts; ++i)
    grid[i] = g_lo + (g_hi - g_lo) * i / double(npts - 1);
  const auto trace = oracle::trace_spectrum(delta, grid, space, levels, jobs);

  std::vector<ExceptionalPoint> eps;
  const double h = grid[1] - grid[0];
  for (const auto& cand : trace.candidates) {
    if (cand.kind != oracle::IntersectionCandidate::Kind::Coalescence) continue;
    const double wlo = std::max(g_lo, cand.g - 2 * h);
    const double whi = std::min(g_hi, cand.g + 2 * h);
    for (const Parity parity : {Parity::Plus, Parity::Minus}) {
      try {
        ExceptionalPoint ep = locate_ep(delta, wlo, whi, parity, std::nullopt, opts);
        const bool dup = std::any_of(eps.begin(), eps.end(), [&](const ExceptionalPoint& e) {
          return std::abs(e.g_star - ep.g_star) < 1e-6 && std::abs(e.E_star - ep.E_star) < 1e-6;
        });
        if (!dup) eps.push_back(ep);
      } catch (const Error&) {
        // wrong parity or an unrefinable candidate; the other attempts decide
      }
    }
  }
  std::sort(eps.begin(), eps.end(),
            [](const ExceptionalPoint& x, const ExceptionalPoint& y) { return x.g_star < y.g_star; });
  return eps;
}

DegeneratePoint locate_degenerate(double delta, int n, double g_lo, double g_hi, double g_tol) {
  if (n < 1) throw ConfigError("locate_degenerate: n must be >= 1");
  if (!(g_hi > g_lo) || !(g_lo > 0)) throw ConfigError("locate_degenerate: bad g window");
  const int samples = 256;
  auto f = [&](double g) { return f_n_on_pole(ModelParams(delta, g), n); };
  double a = g_lo, fa = f(a);
  double root_lo = 0, root_hi = 0;
  bool bracketed = false;
  for (int i = 1; i <= samples && !bracketed; ++i) {
    const double b = g_lo + (g_hi - g_lo) * i / double(samples);
    const double fb = f(b);
    if ((fa < 0) != (fb < 0)) {
      root_lo = a;
      root_hi = b;
      bracketed = true;
    }
    a = b;
    fa = fb;
  }
  if (!bracketed)
    throw NoIntersectionError("no degeneracy: f_" + std::to_string(n) +
                              " has no sign change for g in [" + std::to_string(g_lo) + ", " +
                              std::to_string(g_hi) + "]");
  double lo = root_lo, hi = root_hi, flo = f(root_lo);
  while (hi - lo > g_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  DegeneratePoint d;
  d.n = n;
  d.g_n = 0.5 * (lo + hi);
  d.E_n = pole_energy(n, ModelParams(delta, d.g_n));
  d.f_residual = std::abs(f(d.g_n));
  return d;
}

std::vector<std::pair<Complex, Parity>> sign_cell_seeds(const ModelParams& params,
                                                        double re_min, double re_max,
                                                        double im_min, double im_max,
                                                        int nx, int ny,
                                                        const SeriesOptions& series) {
  SeriesOptions s = series;
  s.deriv_order = 0;
  std::vector<std::vector<GValue>> vals(ny, std::vector<GValue>(nx));
  std::vector<std::vector<char>> ok(ny, std::vector<char>(nx, 0));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Complex E(re_min + (re_max - re_min) * ix / double(nx - 1),
                      im_min + (im_max - im_min) * iy / double(ny - 1));
      try {
        vals[iy][ix] = evaluate_G(params, E, s);
        ok[iy][ix] = 1;
      } catch (const PoleProximityError&) {
      }
    }
  }
  std::vector<std::pair<Complex, Parity>> seeds;
  for (const Parity parity : {Parity::Plus, Parity::Minus}) {
    for (int iy = 0; iy + 1 < ny; ++iy) {
      for (int ix = 0; ix + 1 < nx; ++ix) {
        if (!(ok[iy][ix] && ok[iy][ix + 1] && ok[iy + 1][ix] && ok[iy + 1][ix + 1])) continue;
        const Complex c00 = pick(vals[iy][ix], parity), c01 = pick(vals[iy][ix + 1], parity),
                      c10 = pick(vals[iy + 1][ix], parity), c11 = pick(vals[iy + 1][ix + 1], parity);
        auto sgn_change = [](double a, double b, double c, double d) {
          const bool s0 = a < 0;
          return (b < 0) != s0 || (c < 0) != s0 || (d < 0) != s0;
        };
        if (sgn_change(c00.real(), c01.real(), c10.real(), c11.real()) &&
            sgn_change(c00.imag(), c01.imag(), c10.imag(), c11.imag())) {
          const Complex center(re_min + (re_max - re_min) * (ix + 0.5) / double(nx - 1),
                               im_min + (im_max - im_min) * (iy + 0.5) / double(ny - 1));
          seeds.emplace_back(center, parity);
        }
      }
    }
  }
  return seeds;
}

namespace {

void closed_form_g0(double delta, double e_min, double e_max, int levels,
                    SpectrumRecord& rec) {
  // decoupled limit: E = n - s*delta/2, parity = s*(-1)^n
  struct Row {
    double E;
    Parity p;
  };
  std::vector<Row> rows;
  for (int n = 0; rows.size() < size_t(4 * levels + 16) && n < 4 * levels + 64; ++n) {
    for (const int s : {+1, -1}) {
      const double E = n - 0.5 * s * delta;
      const bool even = n % 2 == 0;
      const Parity p = (s > 0) == even ? Parity::Plus : Parity::Minus;
      if (E >= e_min && E <= e_max) rows.push_back({E, p});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.E < y.E; });
  for (const auto& r : rows)
    rec.entries.push_back({Complex(r.E, 0.0), r.p, -1, Provenance::GZero});
}

}  // namespace

std::vector<SpectrumRecord> assemble_spectrum(double delta, std::span<const double> g_grid,
                                              double e_min, double e_max,
                                              const FockSpace& space,
                                              const AssembleOptions& opts,
                                              const oracle::SpectrumTrace* trace,
                                              std::vector<std::pair<int, std::string>>* failures_out) {
  for (size_t i = 0; i + 1 < g_grid.size(); ++i)
    if (!(g_grid[i] < g_grid[i + 1]))
      throw ConfigError("assemble_spectrum: grid must be strictly increasing");
  if (trace && trace->records.size() != g_grid.size())
    throw ConfigError("assemble_spectrum: trace does not cover the grid");

  const int npts = int(g_grid.size());
  std::vector<SpectrumRecord> records(npts);
  std::vector<std::string> failures(npts);

  sweep::parallel_for(npts, opts.jobs, [&](int i) {
    SpectrumRecord rec;
    rec.g = g_grid[i];
    try {
      if (g_grid[i] == 0.0) {
        closed_form_g0(delta, e_min, e_max, opts.levels, rec);
      } else {
        const ModelParams params(delta, g_grid[i]);
        for (const auto& z : scan_real_zeros(params, e_min, e_max, opts.scan))
          rec.entries.push_back({Complex(z.E, 0.0), z.parity, -1, Provenance::GZero});

        // complex zeros from seeds
        std::vector<std::pair<Complex, Parity>> seeds;
        if (trace) {
          for (const auto& entry : trace->records[i].entries) {
            if (entry.value.imag() > 1e-6 && entry.value.real() >= e_min &&
                entry.value.real() <= e_max)
              seeds.emplace_back(entry.value, entry.parity);
          }
        } else if (opts.seeds == SeedSource::OracleValues) {
          oracle::DiagonalizeOptions dopts;
          dopts.audit = false;
          for (const auto& p : oracle::diagonalize(params, space, dopts))
            if (p.value.imag() > 1e-6 && p.value.real() >= e_min && p.value.real() <= e_max)
              seeds.emplace_back(p.value, p.parity);
        } else {
          seeds = sign_cell_seeds(params, e_min, e_max, 1e-4, opts.im_max, opts.cell_nx,
                                  opts.cell_ny, opts.scan.series);
        }
        std::vector<ComplexZeroPair> found;
        for (const auto& [seed, parity] : seeds) {
          std::vector<Parity> tries;
          if (parity == Parity::Mixed)
            tries = {Parity::Plus, Parity::Minus};
          else
            tries = {parity};
          for (const Parity p : tries) {
            try {
              ComplexZeroPair z = find_complex_zero(params, seed, p, opts.scan);
              if (z.collapsed_to_real) break;
              const bool dup = std::any_of(found.begin(), found.end(), [&](const ComplexZeroPair& w) {
                return w.parity == z.parity && std::abs(w.E - z.E) < 1e-9;
              });
              if (!dup) found.push_back(z);
              break;
            } catch (const Error&) {
              // try the other parity or drop the seed
            }
          }
        }
        for (const auto& z : found) {
          rec.entries.push_back({z.E, z.parity, -1, Provenance::GZero});
          rec.entries.push_back({std::conj(z.E), z.parity, -1, Provenance::GZero});
        }
        std::sort(rec.entries.begin(), rec.entries.end(),
                  [](const SpectrumEntry& x, const SpectrumEntry& y) {
                    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
                    return x.value.imag() < y.value.imag();
                  });
      }
    } catch (const Error& err) {
      failures[i] = err.what();
    }
    records[i] = std::move(rec);
  });

  // attach branch ids from the trace by nearest-eigenvalue match
  if (trace) {
    for (int i = 0; i < npts; ++i) {
      for (auto& entry : records[i].entries) {
        double best = 1e-6;
        for (const auto& oe : trace->records[i].entries) {
          if (oe.branch_id < 0) continue;
          const double d = std::abs(oe.value - entry.value);
          if (d < best) {
            best = d;
            entry.branch_id = oe.branch_id;
          }
        }
      }
    }
  }

  // per-point failures are recorded, not fatal
  for (int i = 0; i < npts; ++i) {
    if (!failures[i].empty()) {
      records[i].entries.clear();
      if (failures_out) failures_out->emplace_back(i, failures[i]);
    }
  }
  return records;
}

}  // namespace ptqrm::solver
