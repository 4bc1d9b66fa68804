#include "qmb/meanfield.hpp"

#include <cmath>
#include <string>

namespace qmb {

namespace {

// Columns: h_1..h_r, E_1..E_l, E_-1..E_-l as coefficient vectors.
CMat cw_basis(const AlgebraSpec& spec) {
  const int M = spec.dim(), r = spec.cw.rank(), l = spec.cw.n_roots();
  CMat b = CMat::Zero(M, M);
  for (int k = 0; k < r; ++k) b(spec.cw.csa[k], k) = 1.0;
  for (int j = 0; j < l; ++j) {
    b.col(r + j) = spec.cw.raising[j];
    b.col(r + l + j) = spec.cw.raising[j].conjugate();
  }
  return b;
}

double trace_norm2(const AlgebraSpec& spec, const CVec& c) { return c.dot(spec.gram().cast<cplx>() * c).real(); }

void require_hermitian_lambda(const CMat& lambda) {
  if (lambda.rows() != lambda.cols() || lambda.rows() < 1) throw std::invalid_argument("quadratic: lambda must be square");
  if ((lambda - lambda.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("quadratic: lambda is not Hermitian");
}

CMat rotation(const AlgebraSpec& spec, const RVec& zeta) { return expm(kI * spec.matrix_of(zeta.cast<cplx>())).value; }

RVec conjugate_by(const AlgebraSpec& spec, const RVec& h, const CMat& u) {
  const CMat x = spec.matrix_of(h.cast<cplx>());
  return spec.coefficients_of(u.adjoint() * x * u).real();
}

// coefficients of J_x and J_y for the su(2) triple of root t
std::pair<RVec, RVec> triple_xy(const AlgebraSpec& spec, int t) {
  const double s = std::sqrt(2.0) / spec.cw.roots[t].norm();
  return {s * spec.cw.raising[t].real(), s * spec.cw.raising[t].imag()};
}

}  // namespace

CVec cw_coordinates(const AlgebraSpec& spec, const CVec& coeffs) {
  if (coeffs.size() != spec.dim()) throw std::invalid_argument("cw_project: coefficient vector has wrong length");
  const CMat b = cw_basis(spec);
  const CVec x = b.partialPivLu().solve(coeffs);
  if ((b * x - coeffs).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, coeffs.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("cw_project: Cartan-Weyl basis is singular");
  return x;
}

CwProjection cw_project(const AlgebraSpec& spec, const RVec& coeffs) {
  const int r = spec.cw.rank(), l = spec.cw.n_roots();
  const CVec x = cw_coordinates(spec, coeffs.cast<cplx>());
  CwProjection p;
  p.gamma = x.head(r).real();
  p.iota = x.segment(r, l);
  return p;
}

CwProjection cw_project(const AlgebraSpec& spec, const CMat& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (spec.projection_residual(m) > 1e-9 * scale) throw std::invalid_argument("cw_project: matrix lies outside the algebra");
  const CVec c = spec.coefficients_of(m);
  if (c.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) throw std::invalid_argument("cw_project: matrix is not Hermitian");
  return cw_project(spec, RVec(c.real()));
}

RVec cw_reconstruct(const AlgebraSpec& spec, const CwProjection& p) {
  CVec c = CVec::Zero(spec.dim());
  for (int k = 0; k < spec.cw.rank(); ++k) c[spec.cw.csa[k]] += p.gamma[k];
  for (int j = 0; j < spec.cw.n_roots(); ++j)
    c += p.iota[j] * spec.cw.raising[j] + std::conj(p.iota[j]) * spec.cw.raising[j].conjugate();
  return c.real();
}

double off_csa_norm(const AlgebraSpec& spec, const RVec& coeffs) {
  const CwProjection p = cw_project(spec, coeffs);
  CVec off = CVec::Zero(spec.dim());
  for (int j = 0; j < spec.cw.n_roots(); ++j)
    off += p.iota[j] * spec.cw.raising[j] + std::conj(p.iota[j]) * spec.cw.raising[j].conjugate();
  return trace_norm2(spec, off);
}

JacobiStep jacobi_step(const AlgebraSpec& spec, const RVec& h) {
  JacobiStep st;
  st.h = h;
  const int l = spec.cw.n_roots();
  if (l < 1) return st;
  const CwProjection p = cw_project(spec, h);
  st.dc_before = off_csa_norm(spec, h);
  int t = -1;
  double best = 0.0;
  for (int j = 0; j < l; ++j) {
    const double w = std::norm(p.iota[j]) * trace_norm2(spec, spec.cw.raising[j]);
    if (w > best * (1 + 1e-12) && w > 0.0) {
      best = w;
      t = j;
    }
  }
  st.dc_after = st.dc_before;
  if (t < 0 || best <= 1e-300) return st;
  const RVec& alpha = spec.cw.roots[t];
  // restricted to the triple: a J_z + b J_+ + conj(b) J_-
  const double a = p.gamma.dot(alpha);
  const cplx b = p.iota[t] * alpha.norm() / std::sqrt(2.0);
  const double theta = std::atan2(2 * std::abs(b), a);
  const double phi = -std::arg(b);
  const auto [jx, jy] = triple_xy(spec, t);
  st.zeta = theta * (std::sin(phi) * jx - std::cos(phi) * jy);
  st.root = t;
  st.h = conjugate_by(spec, h, rotation(spec, st.zeta));
  st.dc_after = off_csa_norm(spec, st.h);
  return st;
}

int jacobi_iteration_cap(int n_roots, int dim, double tol, double dc0) {
  if (!(tol > 0)) throw std::invalid_argument("diagonalize: tolerance must be positive");
  if (dc0 <= tol) return 10;
  const double per_elem = dc0 / dim;
  const double x = n_roots * (std::log(static_cast<double>(dim)) - std::log(tol / per_elem));
  return 10 * std::max(1, static_cast<int>(std::ceil(x)));
}

DiagonalizationResult diagonalize(const AlgebraSpec& spec, const RVec& h, const DiagonalizeOptions& opt) {
  if (h.size() != spec.dim()) throw std::invalid_argument("diagonalize: coefficient vector has wrong length");
  const int l = spec.cw.n_roots();
  DiagonalizationResult res;
  res.u = GroupElement::identity(spec);
  RVec cur = h;
  double dc = off_csa_norm(spec, cur);
  if (opt.max_iterations < 0) throw std::invalid_argument("diagonalize: max_iterations must be non-negative");
  res.iteration_cap = opt.max_iterations > 0 ? opt.max_iterations : jacobi_iteration_cap(l, spec.dim(), opt.tol, dc);
  const double scale = std::max(1e-300, trace_norm2(spec, h.cast<cplx>()));
  while (dc > opt.tol) {
    if (res.iterations >= res.iteration_cap)
      throw NonConvergence("diagonalize: d_C = " + std::to_string(dc) + " after " + std::to_string(res.iterations) +
                           " rotations (cap " + std::to_string(res.iteration_cap) + ")");
    res.history.push_back(dc);
    const JacobiStep st = jacobi_step(spec, cur);
    if (st.root < 0) break;
    if (st.dc_after > (l - 1.0) / l * st.dc_before + 1e-12 * scale)
      throw std::logic_error("diagonalize: rotation did not reduce d_C by the expected factor");
    res.u = res.u.then(spec, st.zeta);
    cur = st.h;
    dc = st.dc_after;
    ++res.iterations;
  }
  res.history.push_back(dc);
  res.residual = dc;
  if (opt.weyl_order) {
    // reflect until epsilon . alpha <= 0 for every positive root
    for (int guard = 0;; ++guard) {
      if (guard > 100 * (l + 1)) throw std::logic_error("diagonalize: Weyl ordering did not terminate");
      const CwProjection p = cw_project(spec, cur);
      int t = -1;
      for (int j = 0; j < l && t < 0; ++j)
        if (p.gamma.dot(spec.cw.roots[j]) > 1e-12 * std::max(1.0, p.gamma.norm())) t = j;
      if (t < 0) break;
      const RVec zeta = M_PI * triple_xy(spec, t).first;
      res.u = res.u.then(spec, zeta);
      cur = conjugate_by(spec, cur, rotation(spec, zeta));
      ++res.weyl_reflections;
    }
    res.residual = off_csa_norm(spec, cur);
  }
  res.epsilon = cw_project(spec, cur).gamma;
  return res;
}

RVec bogolubov_quadratic(const CMat& lambda) {
  require_hermitian_lambda(lambda);
  Eigen::SelfAdjointEigenSolver<CMat> es(lambda, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

RVec quadratic_to_uN(const CMat& lambda) {
  require_hermitian_lambda(lambda);
  const int n = static_cast<int>(lambda.rows());
  RVec c(n * n);
  int idx = 0;
  for (int j = 0; j < n; ++j)
    for (int jp = j + 1; jp < n; ++jp) {
      c[idx++] = lambda(j, jp).real();
      c[idx++] = lambda(j, jp).imag();
    }
  for (int j = 0; j < n; ++j) c[idx++] = lambda(j, j).real() / std::sqrt(2.0);
  return c;
}

}  // namespace qmb
