#pragma once

#include <span>
#include <vector>

#include "ptqrm/gfunction.hpp"
#include "ptqrm/model.hpp"
#include "ptqrm/types.hpp"

namespace ptqrm::oracle {

// One eigenvalue with its right and left eigenvectors, both with unit
// Euclidean self-norm (<L|L> = <R|R> = 1). left satisfies left^dag H =
// value * left^dag.
struct EigenPair {
  Complex value;
  Vector right;
  Vector left;
  Parity parity = Parity::Mixed;
  bool cutoff_converged = false;
  bool left_match_ambiguous = false;
};

struct DiagonalizeOptions {
  bool audit = true;          // re-diagonalize at cutoff+audit_extra, flag drift
  int audit_extra = 20;
  double audit_tol = 1e-10;
  bool want_vectors = true;   // left+right eigenvectors
  double parity_threshold = 0.99;
};

// Dense eigendecomposition of H, sorted by (Re, Im). Left and right vectors
// come paired from the same Schur factorization, which stays well-behaved
// arbitrarily close to an EP.
std::vector<EigenPair> diagonalize(const ModelParams& params, const FockSpace& space,
                                   const DiagonalizeOptions& opts = {});

// <R|Pi|R> thresholded at +-parity_threshold; "mixed" appears only inside
// degenerate subspaces or at numerical coalescence.
Parity parity_label(const Vector& right, const Matrix& parity_op, double threshold = 0.99);

// Candidate intersections emitted by trace_spectrum for solver refinement.
struct IntersectionCandidate {
  enum class Kind { Coalescence, Crossing };
  Kind kind;
  int grid_index;      // grid point of the pair-distance minimum
  double g;
  int branch_a, branch_b;
  Complex E;           // midpoint energy at the minimum
  int pole_index = -1; // crossing candidates only
};

struct SpectrumTrace {
  std::vector<SpectrumRecord> records;                // one per grid point
  std::vector<IntersectionCandidate> candidates;
  std::vector<std::vector<Complex>> branch_values;    // [branch][grid index]
};

// Diagonalizes on every grid point (parallel, deterministic ordering), then
// assigns branch ids by minimum-cost matching of consecutive spectra
// (optimal up to 64 tracked branches, greedy beyond).
SpectrumTrace trace_spectrum(double delta, std::span<const double> g_grid,
                             const FockSpace& space, int levels, int jobs = 0);

// |Psi> = D(-ig) |psi> with psi components i^{-n} sqrt(n!) {e_n, f_n}.
// The series is cut where the weighted terms stop decreasing; unit
// self-norm on return.
Vector reconstruct_state(const ModelParams& params, const RecursionTable& table,
                         const FockSpace& space);

}  // namespace ptqrm::oracle
