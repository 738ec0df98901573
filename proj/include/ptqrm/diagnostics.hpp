#pragma once

#include <span>
#include <vector>

#include "ptqrm/oracle.hpp"
#include "ptqrm/types.hpp"

namespace ptqrm::diagnostics {

// Generalized fidelity between matched eigenpairs at two parameter points,
// in the biorthogonal-normalization quotient form
//   F = <L1|R2><L2|R1> / (<L1|R1><L2|R2>).
// The quotient makes F invariant under any rescaling or rephasing of each
// eigenvector and reduces to the bare form when <L|R> = 1.
Complex fidelity(const oracle::EigenPair& at_g, const oracle::EigenPair& at_g_eps);

// chi = (1 - F) / eps^2.
Complex fidelity_susceptibility(const oracle::EigenPair& at_g, const oracle::EigenPair& at_g_eps,
                                double eps);

// c-product <L|R> with <L|L> = <R|R> = 1. Vanishes at EPs.
Complex c_product(const oracle::EigenPair& pair);

struct FidelityScanPoint {
  double g = 0;
  int branch_id = -1;     // scanned level (sorted index or tracked branch)
  int sorted_index = -1;  // sorted position at this grid point
  Complex fidelity{};
  Complex chi{};
  Complex c{};            // phase-continuous along the scan, |c| convention-free
  double epsilon_used = 0;
  bool self_orthogonal = false;  // |<L|R>| below resolution; chi row invalid
  bool match_failed = false;
};

struct FsScanOptions {
  double epsilon = 1e-5;
  bool sorted_index = false;  // pair k-th sorted states instead of tracked branches
  double self_orth_tol = 1e-12;
  // matched eigenvalues at g and g+eps may drift by ~|dE/dg| eps; gate at
  // a generous multiple plus an absolute floor
  double match_gate = 1e-2;
  int jobs = 0;
};

// Per-level scan over the g grid. Each point diagonalizes at g and g + eps
// and pairs states either by sorted index or by nearest-eigenvalue
// assignment seeded from the previous grid point (branch tracking). The
// c-product phase is pinned real non-negative at the first grid point and
// evolved continuously along the branch.
std::vector<FidelityScanPoint> fs_scan(double delta, std::span<const double> g_grid,
                                       std::span<const int> levels, const FockSpace& space,
                                       const FsScanOptions& opts = {});

}  // namespace ptqrm::diagnostics
