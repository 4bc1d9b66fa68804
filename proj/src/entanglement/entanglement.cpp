#include "qmb/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmb/fermion.hpp"
#include "qmb/statevector.hpp"

namespace qmb {

namespace {

void require_normalized(const CVec& psi) {
  if (psi.size() == 0 || std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("entanglement: state is not normalized");
}

CMat pauli2(int mu) {
  CMat p(2, 2);
  switch (mu) {
    case 0: p << 0, 1, 1, 0; break;
    case 1: p << 0, -kI, kI, 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

CMat sqrt_psd(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  const RVec ev = es.eigenvalues().unaryExpr([](double x) { return x < 0 ? 0.0 : std::sqrt(x); });
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

void validate_density_matrix(const CMat& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw std::invalid_argument("density matrix must be square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-12) throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("density matrix has a negative eigenvalue");
}

CMat density_matrix(const CVec& psi) {
  require_normalized(psi);
  return psi * psi.adjoint();
}

CMat reduced_density_matrix(const CVec& psi, const std::vector<int>& dims, int keep) {
  require_normalized(psi);
  if (dims.empty() || keep < 0 || keep >= static_cast<int>(dims.size())) throw std::invalid_argument("reduced density: bad subsystem");
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("reduced density: subsystem dimension below 2");
    total *= d;
  }
  if (total != psi.size()) throw std::invalid_argument("reduced density: dims do not match the state length");
  Eigen::Index after = 1;
  for (std::size_t i = keep + 1; i < dims.size(); ++i) after *= dims[i];
  const Eigen::Index d = dims[keep], before = total / (after * d);
  CMat rho = CMat::Zero(d, d);
  for (Eigen::Index b = 0; b < before; ++b)
    for (Eigen::Index a = 0; a < after; ++a)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          rho(i, j) += psi[(b * d + i) * after + a] * std::conj(psi[(b * d + j) * after + a]);
  return rho;
}

double schmidt_entropy(const CVec& psi, int d_a, int d_b) {
  require_normalized(psi);
  if (d_a < 1 || d_b < 1 || static_cast<Eigen::Index>(d_a) * d_b != psi.size())
    throw std::invalid_argument("schmidt_entropy: d_a d_b must equal the state length");
  CMat m(d_a, d_b);
  for (int a = 0; a < d_a; ++a)
    for (int b = 0; b < d_b; ++b) m(a, b) = psi[a * d_b + b];
  const RVec s = Eigen::JacobiSVD<CMat>(m).singularValues();
  double e = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double p = s[k] * s[k];
    if (p > 1e-300) e -= p * std::log2(p);
  }
  return std::max(0.0, e);
}

double concurrence(const CMat& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("concurrence: need a 4x4 density matrix");
  validate_density_matrix(rho);
  CMat yy = CMat::Zero(4, 4);
  yy(0, 3) = yy(3, 0) = -1;
  yy(1, 2) = yy(2, 1) = 1;
  const CMat tilde = yy * rho.conjugate() * yy;
  const CMat sr = sqrt_psd(rho);
  CMat inner = sr * tilde * sr;
  inner = (inner + inner.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(inner, Eigen::EigenvaluesOnly);
  // eigenvalues at rounding level would otherwise enter as ~1e-8 after the square root
  const double floor = 1e-14 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<double> lam;
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double v = es.eigenvalues()[k];
    lam.push_back(v > floor ? std::sqrt(v) : 0.0);
  }
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double local_purity(const CVec& psi, const std::vector<int>& dims) {
  double k_inv = 0, sum = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    const CMat r = reduced_density_matrix(psi, dims, static_cast<int>(j));
    sum += (r * r).trace().real() - 1.0 / dims[j];
    k_inv += 1.0 - 1.0 / dims[j];
  }
  return sum / k_inv;
}

double uN_purity(const CVec& psi, int n_modes) {
  require_normalized(psi);
  if (n_modes < 1 || n_modes > 20 || psi.size() != (Eigen::Index{1} << n_modes))
    throw std::invalid_argument("uN_purity: state must live on 2^N Fock states");
  const StateVector s(n_modes, psi);
  double sum = 0;
  for (int i = 1; i <= n_modes; ++i)
    for (int j = i; j <= n_modes; ++j) {
      const FermionExpr hop = FermionExpr::product({cdag(i), cann(j)});
      const cplx rho = expectation(s, jordan_wigner(hop, n_modes));
      if (i == j) {
        const double nj = std::sqrt(2.0) * (rho.real() - 0.5);
        sum += nj * nj;
      } else {
        const double x = 2 * rho.real(), y = -2 * rho.imag();
        sum += x * x + y * y;
      }
    }
  return 2.0 / n_modes * sum;
}

double bell_correlation(const CVec& psi, const RVec& r1, const RVec& r2) {
  require_normalized(psi);
  if (psi.size() != 4) throw std::invalid_argument("bell_correlation: need a two-qubit state");
  if (r1.size() != 3 || r2.size() != 3 || std::abs(r1.norm() - 1) > 1e-12 || std::abs(r2.norm() - 1) > 1e-12)
    throw std::invalid_argument("bell_correlation: directions must be unit 3-vectors");
  CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
  for (int mu = 0; mu < 3; ++mu) {
    a += r1[mu] * pauli2(mu);
    b += r2[mu] * pauli2(mu);
  }
  CMat ab(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ab.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return psi.dot(ab * psi).real();
}

}  // namespace qmb
