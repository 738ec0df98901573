#include "ptqrm/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptqrm/assignment.hpp"
#include "ptqrm/sweep.hpp"

extern "C" void openblas_set_num_threads(int);

namespace ptqrm::oracle {

namespace {

// BLAS stays single-threaded: grid-level parallelism lives above, and a
// fixed thread count keeps eigensolver output bit-reproducible.
struct BlasInit {
  BlasInit() { openblas_set_num_threads(1); }
};
const BlasInit blas_init;

struct RawEig {
  Eigen::VectorXcd values;
  Matrix left, right;
};

RawEig zgeev(const Matrix& H, bool want_vectors) {
  const int n = int(H.rows());
  Matrix A = H;  // overwritten
  RawEig out;
  out.values.resize(n);
  if (want_vectors) {
    out.left.resize(n, n);
    out.right.resize(n, n);
  }
  const char jobv = want_vectors ? 'V' : 'N';
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, jobv, jobv, n,
      reinterpret_cast<lapack_complex_double*>(A.data()), n,
      reinterpret_cast<lapack_complex_double*>(out.values.data()),
      want_vectors ? reinterpret_cast<lapack_complex_double*>(out.left.data()) : nullptr, n,
      want_vectors ? reinterpret_cast<lapack_complex_double*>(out.right.data()) : nullptr, n);
  if (info != 0)
    throw NumericError("zgeev failed with info = " + std::to_string(info));
  return out;
}

std::vector<int> sort_order(const Eigen::VectorXcd& w) {
  std::vector<int> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (w[a].real() != w[b].real()) return w[a].real() < w[b].real();
    return w[a].imag() < w[b].imag();
  });
  return idx;
}

}  // namespace

Parity parity_label(const Vector& right, const Matrix& parity_op, double threshold) {
  const Complex r = right.dot(parity_op * right) / right.squaredNorm();
  if (r.real() > threshold) return Parity::Plus;
  if (r.real() < -threshold) return Parity::Minus;
  return Parity::Mixed;
}

std::vector<EigenPair> diagonalize(const ModelParams& params, const FockSpace& space,
                                   const DiagonalizeOptions& opts) {
  const Matrix H = build_hamiltonian(params, space);
  RawEig raw = zgeev(H, opts.want_vectors);
  const std::vector<int> order = sort_order(raw.values);
  const Matrix parity_op = opts.want_vectors ? build_parity(space) : Matrix();

  std::vector<EigenPair> pairs;
  pairs.reserve(order.size());
  for (int k : order) {
    EigenPair p;
    p.value = raw.values[k];
    if (opts.want_vectors) {
      p.right = raw.right.col(k).normalized();
      p.left = raw.left.col(k).normalized();
      p.parity = parity_label(p.right, parity_op, opts.parity_threshold);
    }
    pairs.push_back(std::move(p));
  }

  // ambiguity flag: a second eigenvalue within 1e-12 makes the left/right
  // pairing non-unique (expected exactly at EPs)
  for (size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (std::abs(pairs[i + 1].value - pairs[i].value) < 1e-12) {
      pairs[i].left_match_ambiguous = true;
      pairs[i + 1].left_match_ambiguous = true;
    }
  }

  if (opts.audit) {
    const FockSpace bigger(space.cutoff + opts.audit_extra);
    const Matrix H2 = build_hamiltonian(params, bigger);
    RawEig raw2 = zgeev(H2, false);
    std::vector<Complex> w2(raw2.values.data(), raw2.values.data() + raw2.values.size());
    std::sort(w2.begin(), w2.end(), [](Complex a, Complex b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    for (auto& p : pairs) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& w : w2) best = std::min(best, std::abs(w - p.value));
      p.cutoff_converged = best < opts.audit_tol;
    }
  }
  return pairs;
}

SpectrumTrace trace_spectrum(double delta, std::span<const double> g_grid,
                             const FockSpace& space, int levels, int jobs) {
  for (size_t i = 0; i + 1 < g_grid.size(); ++i)
    if (!(g_grid[i] < g_grid[i + 1]))
      throw ConfigError("trace_spectrum: grid must be strictly increasing");
  const int npts = int(g_grid.size());
  levels = std::min(levels, space.dim());

  // parallel diagonalization, results keyed by grid index
  std::vector<std::vector<EigenPair>> eigs(npts);
  DiagonalizeOptions dopts;
  dopts.audit = false;
  sweep::parallel_for(npts, jobs, [&](int i) {
    eigs[i] = diagonalize(ModelParams(delta, g_grid[i]), space, dopts);
  });

  SpectrumTrace trace;
  trace.records.resize(npts);
  trace.branch_values.assign(levels, std::vector<Complex>(npts));

  // sequential branch assignment pass; branch b starts as sorted index b
  std::vector<int> branch_to_idx(levels);
  std::iota(branch_to_idx.begin(), branch_to_idx.end(), 0);
  for (int i = 0; i < npts; ++i) {
    if (i > 0) {
      const int pool = std::min(int(eigs[i].size()), levels + 8);
      std::vector<std::vector<double>> cost(levels, std::vector<double>(pool));
      for (int b = 0; b < levels; ++b) {
        const Complex prev = eigs[i - 1][branch_to_idx[b]].value;
        for (int j = 0; j < pool; ++j) cost[b][j] = std::abs(eigs[i][j].value - prev);
      }
      const std::vector<int> assign =
          levels <= 64 ? min_cost_assignment(cost) : greedy_assignment(cost);
      for (int b = 0; b < levels; ++b) branch_to_idx[b] = assign[b];
    }
    SpectrumRecord rec;
    rec.g = g_grid[i];
    rec.entries.resize(eigs[i].size());
    for (size_t k = 0; k < eigs[i].size(); ++k) {
      rec.entries[k].value = eigs[i][k].value;
      rec.entries[k].parity = eigs[i][k].parity;
      rec.entries[k].branch_id = -1;
      rec.entries[k].provenance = Provenance::Oracle;
    }
    for (int b = 0; b < levels; ++b) {
      rec.entries[branch_to_idx[b]].branch_id = b;
      trace.branch_values[b][i] = eigs[i][branch_to_idx[b]].value;
    }
    trace.records[i] = std::move(rec);
  }

  // candidate intersections: pair-distance minima among tracked branches
  const double coalesce_window = 0.15;
  for (int a = 0; a < levels; ++a) {
    for (int b = a + 1; b < levels; ++b) {
      for (int i = 1; i + 1 < npts; ++i) {
        const double d0 = std::abs(trace.branch_values[a][i - 1] - trace.branch_values[b][i - 1]);
        const double d1 = std::abs(trace.branch_values[a][i] - trace.branch_values[b][i]);
        const double d2 = std::abs(trace.branch_values[a][i + 1] - trace.branch_values[b][i + 1]);
        if (!(d1 <= d0 && d1 < d2 && d1 < coalesce_window)) continue;
        IntersectionCandidate c;
        c.grid_index = i;
        c.g = g_grid[i];
        c.branch_a = a;
        c.branch_b = b;
        c.E = 0.5 * (trace.branch_values[a][i] + trace.branch_values[b][i]);
        const bool real_before = std::abs(trace.branch_values[a][i].imag()) < 1e-8 &&
                                 std::abs(trace.branch_values[b][i].imag()) < 1e-8;
        const bool split_after = std::abs(trace.branch_values[a][i + 1].imag()) > 1e-8 &&
                                 std::abs(trace.branch_values[b][i + 1].imag()) > 1e-8;
        if (real_before && split_after) {
          c.kind = IntersectionCandidate::Kind::Coalescence;
          trace.candidates.push_back(c);
        } else if (real_before && !split_after) {
          const ModelParams mp(delta, g_grid[i]);
          const int pole = nearest_pole(c.E, mp, space.cutoff);
          if (pole >= 0 && std::abs(c.E.real() - pole_energy(pole, mp)) < 0.05) {
            c.kind = IntersectionCandidate::Kind::Crossing;
            c.pole_index = pole;
            trace.candidates.push_back(c);
          }
        }
      }
    }
  }
  return trace;
}

Vector reconstruct_state(const ModelParams& params, const RecursionTable& table,
                         const FockSpace& space) {
  const int d = space.photon_dim();
  const int nmax = std::min(table.n_used, d - 1);
  // weighted terms i^{-n} sqrt(n!) {e_n, f_n}; forward recursion is only
  // reliable while these decay, so cut at the running minimum
  std::vector<double> weight(nmax + 1);
  double w = 1.0;
  std::vector<double> term(nmax + 1);
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) w *= std::sqrt(double(n));
    weight[n] = w;
    term[n] = w * std::max(std::abs(table.e[n]), std::abs(table.f[n]));
  }
  double max_seen = 0.0;
  int cut = nmax;
  bool clean_stop = false;
  for (int n = 0; n <= nmax; ++n) {
    max_seen = std::max(max_seen, term[n]);
    if (term[n] < 1e-14 * max_seen) {
      cut = n;
      clean_stop = true;
      break;
    }
  }
  if (!clean_stop) {
    // no clean tail: cut at the global minimum (rounding noise reseeds the
    // dominant solution eventually, so the tail past the minimum is spurious)
    const int argmin = int(std::min_element(term.begin(), term.end()) - term.begin());
    if (argmin == 0 && term[nmax] > 100.0 * term[0])
      throw ReconstructionError(
          "weighted expansion grows without decay; |E| too large for the cutoff");
    cut = argmin;
  }

  Vector psi = Vector::Zero(2 * d);
  const Complex i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // i^{-n}
  for (int n = 0; n <= cut; ++n) {
    const Complex phase = i_pow[n % 4] * weight[n];
    psi[n] = phase * table.e[n];
    psi[d + n] = phase * table.f[n];
  }
  const Matrix dm = build_displacement(params, space, -1);
  Vector state = dm * psi;
  const double norm = state.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw ReconstructionError("reconstructed state has invalid norm");
  return state / norm;
}

}  // namespace ptqrm::oracle
