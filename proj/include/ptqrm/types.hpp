#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptqrm {

using Complex = std::complex<double>;

// Failure taxonomy. Callers branch on these: a pole hit means "switch to the
// pole-line analysis", non-convergence means "don't trust the number", and a
// missing intersection is an answer, not a crash.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Trial energy inside the guard band of a pole line E = n + g^2.
class PoleProximityError : public Error {
 public:
  PoleProximityError(Complex energy, int pole_index, const std::string& what)
      : Error(what), energy(energy), pole_index(pole_index) {}
  Complex energy;
  int pole_index;
};

// Parameter regime the recursion cannot handle (g = 0 divides by 2g).
class UnsupportedParameterError : public Error {
 public:
  using Error::Error;
};

// Coefficient series failed to converge within the term cap.
class SeriesError : public Error {
 public:
  using Error::Error;
};

// Newton/bisection failed to reach its tolerance.
class RootFindError : public Error {
 public:
  using Error::Error;
};

// EP refinement stagnated; the stage-1 bracket is preserved for the caller.
class RefinementError : public RootFindError {
 public:
  RefinementError(double g_lo, double g_hi, const std::string& what)
      : RootFindError(what), g_lo(g_lo), g_hi(g_hi) {}
  double g_lo;
  double g_hi;
};

// Requested window contains no EP / no degeneracy. Absence is an answer.
class NoIntersectionError : public Error {
 public:
  using Error::Error;
};

// <L|R> below resolution; the biorthogonal quotient is undefined (EP).
class SelfOrthogonalityError : public Error {
 public:
  using Error::Error;
};

class BranchMatchError : public Error {
 public:
  using Error::Error;
};

class ReconstructionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Model parameters of H = -(delta/2) sx + a^dag a + i g (a + a^dag) sz.
// omega is fixed to 1; all energies are in units of omega.
struct ModelParams {
  double delta;
  double g;
  static constexpr double omega = 1.0;

  ModelParams(double delta_, double g_) : delta(delta_), g(g_) {
    if (!(g >= 0.0)) throw ConfigError("ModelParams: g must be >= 0");
    if (!std::isfinite(delta) || !std::isfinite(g))
      throw ConfigError("ModelParams: parameters must be finite");
  }
};

// Truncated photon space |0..cutoff>; full dimension is qubit x photon.
struct FockSpace {
  int cutoff;

  explicit FockSpace(int cutoff_) : cutoff(cutoff_) {
    if (cutoff < 1) throw ConfigError("FockSpace: cutoff must be >= 1");
  }
  int photon_dim() const { return cutoff + 1; }
  int dim() const { return 2 * (cutoff + 1); }
};

enum class Parity { Plus, Minus, Mixed };

inline const char* parity_name(Parity p) {
  switch (p) {
    case Parity::Plus: return "+";
    case Parity::Minus: return "-";
    default: return "mixed";
  }
}

enum class Provenance { Oracle, GZero, InjectedDegeneracy };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Oracle: return "oracle";
    case Provenance::GZero: return "G-zero";
    default: return "injected-degeneracy";
  }
}

// One spectrum row: an eigenvalue with its parity label, continuity branch
// and origin. branch_id = -1 marks values outside the tracked set.
struct SpectrumEntry {
  Complex value;
  Parity parity = Parity::Mixed;
  int branch_id = -1;
  Provenance provenance = Provenance::Oracle;
};

struct SpectrumRecord {
  double g = 0.0;
  std::vector<SpectrumEntry> entries;
};

}  // namespace ptqrm
