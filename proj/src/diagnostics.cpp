#include "ptqrm/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ptqrm/assignment.hpp"
#include "ptqrm/sweep.hpp"

namespace ptqrm::diagnostics {

Complex c_product(const oracle::EigenPair& pair) {
  return pair.left.dot(pair.right) / (pair.left.norm() * pair.right.norm());
}

Complex fidelity(const oracle::EigenPair& at_g, const oracle::EigenPair& at_g_eps) {
  const Complex den = at_g.left.dot(at_g.right) * at_g_eps.left.dot(at_g_eps.right);
  if (std::abs(at_g.left.dot(at_g.right)) < 1e-12 ||
      std::abs(at_g_eps.left.dot(at_g_eps.right)) < 1e-12)
    throw SelfOrthogonalityError("c-product below 1e-12; biorthogonal fidelity undefined (EP)");
  const Complex num = at_g.left.dot(at_g_eps.right) * at_g_eps.left.dot(at_g.right);
  return num / den;
}

Complex fidelity_susceptibility(const oracle::EigenPair& at_g, const oracle::EigenPair& at_g_eps,
                                double eps) {
  if (!(eps > 0)) throw ConfigError("fidelity_susceptibility: eps must be > 0");
  return (Complex(1.0, 0.0) - fidelity(at_g, at_g_eps)) / (eps * eps);
}

namespace {

struct PointPools {
  std::vector<oracle::EigenPair> at_g;      // lowest pool_size states, sorted
  std::vector<oracle::EigenPair> at_g_eps;
};

}  // namespace

std::vector<FidelityScanPoint> fs_scan(double delta, std::span<const double> g_grid,
                                       std::span<const int> levels, const FockSpace& space,
                                       const FsScanOptions& opts) {
  for (size_t i = 0; i + 1 < g_grid.size(); ++i)
    if (!(g_grid[i] < g_grid[i + 1]))
      throw ConfigError("fs_scan: grid must be strictly increasing");
  if (levels.empty()) throw ConfigError("fs_scan: no levels requested");
  const int max_level = *std::max_element(levels.begin(), levels.end());
  if (max_level >= space.dim()) throw ConfigError("fs_scan: level beyond space dimension");

  const int npts = int(g_grid.size());
  const int nlev = int(levels.size());
  const int pool_size = std::min(space.dim(), max_level + 9);

  // two diagonalizations per grid point, parallel, keyed by index
  std::vector<PointPools> pools(npts);
  oracle::DiagonalizeOptions dopts;
  dopts.audit = false;
  sweep::parallel_for(npts, opts.jobs, [&](int i) {
    auto take = [&](double g) {
      auto eig = oracle::diagonalize(ModelParams(delta, g), space, dopts);
      eig.resize(pool_size);
      return eig;
    };
    pools[i].at_g = take(g_grid[i]);
    pools[i].at_g_eps = take(g_grid[i] + opts.epsilon);
  });

  // sequential pass: level positions, epsilon partners, phase continuity
  std::vector<FidelityScanPoint> out;
  out.reserve(size_t(npts) * nlev);
  std::vector<int> pos(levels.begin(), levels.end());  // pool index per scanned level
  std::vector<Vector> prev_L(nlev), prev_R(nlev);
  std::vector<Complex> phase(nlev, Complex(1.0, 0.0));  // accumulated L/R alignment

  for (int i = 0; i < npts; ++i) {
    const auto& pg = pools[i].at_g;
    if (!opts.sorted_index && i > 0) {
      // joint nearest-eigenvalue assignment from the previous point's values
      std::vector<std::vector<double>> cost(nlev, std::vector<double>(pool_size));
      for (int l = 0; l < nlev; ++l) {
        const Complex prev = pools[i - 1].at_g[pos[l]].value;
        for (int j = 0; j < pool_size; ++j) cost[l][j] = std::abs(pg[j].value - prev);
      }
      const auto assign = min_cost_assignment(cost);
      for (int l = 0; l < nlev; ++l) pos[l] = assign[l];
    }
    for (int l = 0; l < nlev; ++l) {
      const int k = opts.sorted_index ? levels[l] : pos[l];
      const oracle::EigenPair& state = pg[k];

      FidelityScanPoint pt;
      pt.g = g_grid[i];
      pt.branch_id = levels[l];
      pt.sorted_index = k;
      pt.epsilon_used = opts.epsilon;

      // epsilon partner
      const auto& pe = pools[i].at_g_eps;
      int ke = -1;
      if (opts.sorted_index) {
        ke = k;
      } else {
        double best = 1e300;
        for (int j = 0; j < pool_size; ++j) {
          const double d = std::abs(pe[j].value - state.value);
          if (d < best) {
            best = d;
            ke = j;
          }
        }
        if (best > opts.match_gate) pt.match_failed = true;
      }
      const oracle::EigenPair& partner = pe[ke];

      // phase-continuous c-product: align L and R with the previous grid
      // point, pin c real non-negative at the first point
      Complex c_raw = state.left.dot(state.right);
      if (i == 0 || prev_L[l].size() == 0) {
        phase[l] = std::abs(c_raw) > 0 ? std::abs(c_raw) / c_raw : Complex(1.0, 0.0);
      } else {
        // c picks up conj(alpha) beta when L -> alpha L, R -> beta R; the
        // continuity choice alpha_i = alpha_{i-1} conj(p_l)/|p_l| (same for
        // beta with p_r) multiplies it by (p_l/|p_l|) conj(p_r)/|p_r|
        const Complex pl = prev_L[l].dot(state.left);
        const Complex pr = prev_R[l].dot(state.right);
        const Complex rot = (std::abs(pl) > 0 && std::abs(pr) > 0)
                                ? (pl / std::abs(pl)) * (std::conj(pr) / std::abs(pr))
                                : Complex(1.0, 0.0);
        phase[l] *= rot;
      }
      pt.c = c_raw * phase[l];
      prev_L[l] = state.left;
      prev_R[l] = state.right;

      if (std::abs(c_raw) < opts.self_orth_tol ||
          std::abs(partner.left.dot(partner.right)) < opts.self_orth_tol) {
        pt.self_orthogonal = true;
      } else {
        pt.fidelity = fidelity(state, partner);
        pt.chi = (Complex(1.0, 0.0) - pt.fidelity) / (opts.epsilon * opts.epsilon);
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

}  // namespace ptqrm::diagnostics
