#pragma once

#include <Eigen/Dense>

#include "ptqrm/types.hpp"

namespace ptqrm {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// All matrices live in the bare basis with block ordering
//   (spin up, n = 0..N), (spin down, n = 0..N),
// where sigma_z |up> = +|up>. The ordering is fixed so golden files are
// reproducible; every module shares it.

// Photon-space primitives (dimension cutoff+1).
Matrix annihilation(const FockSpace& space);
Matrix creation(const FockSpace& space);
Matrix number_operator(const FockSpace& space);

// kron(qubit, photon) in the bare ordering.
Matrix qubit_kron(const Eigen::Matrix2cd& q, const Matrix& photon);

// H = -(delta/2) sx + a^dag a + i g (a + a^dag) sz. Non-Hermitian for g > 0.
Matrix build_hamiltonian(const ModelParams& params, const FockSpace& space);

// Real-coupling variant -(delta/2) sx + a^dag a + g (a + a^dag) sz.
// Used by the symmetry tests as a PT-odd counterexample.
Matrix build_hermitian_hamiltonian(const ModelParams& params, const FockSpace& space);

// Similarity-transformed H_s = D(ig) H D(-ig) in block form:
//   [ a^dag a + g^2            -delta/2                          ]
//   [ -delta/2                  a^dag a - 2ig(a+a^dag) - 3g^2    ]
// Spectra of H and H_s agree away from the truncation edge; H_s exists for
// validation only.
Matrix build_transformed_hamiltonian(const ModelParams& params, const FockSpace& space);

// QRM parity Pi = sigma_x (x) exp(i pi a^dag a). Real, involutory, commutes
// with H exactly even after photon-number truncation.
Matrix build_parity(const FockSpace& space);

// Residual ||P conj(H) P - H||_F with P = sigma_x (x) 1. Entrywise
// conjugation implements time reversal in this basis (T fixes a and a^dag).
double check_pt_symmetry(const Matrix& H);

// exp[sign * ig (a^dag - a)] acting identically on both qubit components.
// The generator is Hermitian, so D is positive-definite, not unitary:
// D(ig) D(-ig) = 1 but D(ig)^dag D(ig) = D(2ig) != 1.
Matrix build_displacement(const ModelParams& params, const FockSpace& space, int sign);

// Photon-space-only version of the above (dimension cutoff+1).
Matrix displacement_photon(const ModelParams& params, const FockSpace& space, int sign);

}  // namespace ptqrm
