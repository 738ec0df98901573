#include "ptqrm/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace ptqrm {

Matrix annihilation(const FockSpace& space) {
  const int d = space.photon_dim();
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix creation(const FockSpace& space) { return annihilation(space).adjoint(); }

Matrix number_operator(const FockSpace& space) {
  const int d = space.photon_dim();
  Matrix n = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = double(k);
  return n;
}

Matrix qubit_kron(const Eigen::Matrix2cd& q, const Matrix& photon) {
  const int d = int(photon.rows());
  Matrix out = Matrix::Zero(2 * d, 2 * d);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      if (q(s, t) != Complex(0, 0)) out.block(s * d, t * d, d, d) = q(s, t) * photon;
  return out;
}

namespace {

const Eigen::Matrix2cd kSigmaX = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
const Eigen::Matrix2cd kSigmaZ = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
const Eigen::Matrix2cd kQubitId = Eigen::Matrix2cd::Identity();

Matrix coupling_hamiltonian(const ModelParams& params, const FockSpace& space, Complex coupling) {
  const Matrix a = annihilation(space);
  const Matrix x = a + Matrix(a.adjoint());
  return qubit_kron(-0.5 * params.delta * kSigmaX, Matrix::Identity(space.photon_dim(), space.photon_dim())) +
         qubit_kron(kQubitId, number_operator(space)) + qubit_kron(coupling * kSigmaZ, x);
}

}  // namespace

Matrix build_hamiltonian(const ModelParams& params, const FockSpace& space) {
  return coupling_hamiltonian(params, space, Complex(0.0, params.g));
}

Matrix build_hermitian_hamiltonian(const ModelParams& params, const FockSpace& space) {
  return coupling_hamiltonian(params, space, Complex(params.g, 0.0));
}

Matrix build_transformed_hamiltonian(const ModelParams& params, const FockSpace& space) {
  const int d = space.photon_dim();
  const double g2 = params.g * params.g;
  const Matrix a = annihilation(space);
  const Matrix x = a + Matrix(a.adjoint());
  const Matrix nop = number_operator(space);
  const Matrix id = Matrix::Identity(d, d);

  Matrix hs = Matrix::Zero(2 * d, 2 * d);
  hs.block(0, 0, d, d) = nop + g2 * id;
  hs.block(d, d, d, d) = nop - Complex(0.0, 2.0 * params.g) * x - 3.0 * g2 * id;
  hs.block(0, d, d, d) = -0.5 * params.delta * id;
  hs.block(d, 0, d, d) = -0.5 * params.delta * id;
  return hs;
}

Matrix build_parity(const FockSpace& space) {
  const int d = space.photon_dim();
  Matrix signs = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) signs(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return qubit_kron(kSigmaX, signs);
}

double check_pt_symmetry(const Matrix& H) {
  const int d = int(H.rows()) / 2;
  Matrix p = qubit_kron(kSigmaX, Matrix::Identity(d, d));
  return (p * H.conjugate() * p - H).norm();
}

Matrix displacement_photon(const ModelParams& params, const FockSpace& space, int sign) {
  if (sign != 1 && sign != -1) throw ConfigError("displacement: sign must be +-1");
  const Matrix a = annihilation(space);
  // generator sign * ig (a^dag - a); scaling-and-squaring Pade expm
  Matrix gen = Complex(0.0, sign * params.g) * Matrix(Matrix(a.adjoint()) - a);
  return gen.exp();
}

Matrix build_displacement(const ModelParams& params, const FockSpace& space, int sign) {
  return qubit_kron(kQubitId, displacement_photon(params, space, sign));
}

}  // namespace ptqrm
