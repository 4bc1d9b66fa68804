#include "qmb/liecore.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "qmb/fermion.hpp"
#include "qmb/statevector.hpp"

namespace qmb {

namespace {

using json = nlohmann::json;

std::size_t fidx(int M, int j, int jp, int k) { return (static_cast<std::size_t>(j) * M + jp) * M + k; }

CVec bracket_f(const std::vector<double>& f, int M, const CVec& a, const CVec& b) {
  CVec out = CVec::Zero(M);
  for (int j = 0; j < M; ++j) {
    if (a[j] == cplx(0, 0)) continue;
    for (int jp = 0; jp < M; ++jp) {
      const cplx ab = a[j] * b[jp];
      if (ab == cplx(0, 0)) continue;
      for (int k = 0; k < M; ++k) {
        const double v = f[fidx(M, j, jp, k)];
        if (v != 0.0) out[k] += kI * ab * v;
      }
    }
  }
  return out;
}

std::vector<CMat> adjoint_from_f(const std::vector<double>& f, int M) {
  std::vector<CMat> ad(M, CMat::Zero(M, M));
  for (int j = 0; j < M; ++j)
    for (int jp = 0; jp < M; ++jp)
      for (int k = 0; k < M; ++k) ad[j](k, jp) = kI * f[fidx(M, j, jp, k)];
  return ad;
}

RMat trace_gram(const std::vector<CMat>& mats) {
  const int M = static_cast<int>(mats.size());
  RMat g(M, M);
  for (int j = 0; j < M; ++j)
    for (int k = j; k < M; ++k) g(j, k) = g(k, j) = (mats[j] * mats[k]).trace().real();
  return g;
}

bool lex_greater(const RVec& a, const RVec& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] > b[k] + 1e-9) return true;
    if (a[k] < b[k] - 1e-9) return false;
  }
  return false;
}

bool is_positive_root(const RVec& a) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] > 1e-9) return true;
    if (a[k] < -1e-9) return false;
  }
  return false;
}

void require_hermitian(const CMat& m, const std::string& what) {
  if (m.rows() != m.cols() || (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(what + " is not Hermitian");
}

void fill_highest_weight(AlgebraSpec& spec) {
  spec.highest_weight.resize(0);
  spec.highest_weight_vector.resize(0);
  if (!spec.has_rep()) return;
  const Eigen::Index p = spec.rep[0].rows();
  const int l = spec.cw.n_roots();
  CVec v;
  if (l == 0) {
    if (p != 1) return;
    v = CVec::Ones(1);
  } else {
    CMat stack(l * p, p);
    for (int j = 0; j < l; ++j) stack.middleRows(j * p, p) = spec.matrix_of(spec.cw.raising[j]);
    Eigen::JacobiSVD<CMat> svd(stack, Eigen::ComputeFullV);
    const RVec sv = svd.singularValues();
    int null = 0;
    for (Eigen::Index k = 0; k < p; ++k)
      if (k >= sv.size() || sv[k] < 1e-9 * std::max(1.0, sv[0])) ++null;
    if (null != 1) return;  // reducible action
    v = svd.matrixV().col(p - 1);
  }
  RVec e(spec.cw.rank());
  for (int k = 0; k < spec.cw.rank(); ++k) e[k] = v.dot(spec.rep[spec.cw.csa[k]] * v).real();
  spec.highest_weight = e;
  spec.highest_weight_vector = v;
}

void finish(AlgebraSpec& spec) {
  spec.cw = compute_cartan_weyl(spec.f, spec.dim(), spec.cw.csa);
  fill_highest_weight(spec);
}

}  // namespace

// ------------------------------------------------------------ AlgebraSpec

const std::vector<CMat>& AlgebraSpec::working_rep() const {
  if (has_rep()) return rep;
  if (adjoint_cache_.size() != static_cast<std::size_t>(dim())) adjoint_cache_ = adjoint_from_f(f, dim());
  return adjoint_cache_;
}

double AlgebraSpec::working_norm() const {
  const auto& w = working_rep();
  return (w[0] * w[0]).trace().real();
}

const RMat& AlgebraSpec::gram() const {
  if (gram_cache_.rows() != dim()) gram_cache_ = trace_gram(working_rep());
  return gram_cache_;
}

CMat AlgebraSpec::matrix_of(const CVec& c) const {
  const auto& w = working_rep();
  CMat m = CMat::Zero(w[0].rows(), w[0].cols());
  for (int j = 0; j < dim(); ++j)
    if (c[j] != cplx(0, 0)) m += c[j] * w[j];
  return m;
}

CVec AlgebraSpec::coefficients_of(const CMat& m) const {
  const auto& w = working_rep();
  if (m.rows() != w[0].rows() || m.cols() != w[0].cols()) throw std::invalid_argument("algebra: matrix has the wrong dimension");
  CVec t(dim());
  for (int j = 0; j < dim(); ++j) t[j] = (w[j] * m).trace();
  return gram().cast<cplx>().ldlt().solve(t);
}

double AlgebraSpec::projection_residual(const CMat& m) const {
  return (matrix_of(coefficients_of(m)) - m).cwiseAbs().maxCoeff();
}

void AlgebraSpec::validate(double tol) const {
  const int M = dim();
  if (M < 1) throw std::invalid_argument("algebra: empty basis");
  if (f.size() != static_cast<std::size_t>(M) * M * M) throw std::invalid_argument("algebra: structure tensor has wrong size");
  for (int j = 0; j < M; ++j)
    for (int jp = 0; jp < M; ++jp)
      for (int k = 0; k < M; ++k)
        if (std::abs(structure(j, jp, k) + structure(jp, j, k)) > tol)
          throw std::invalid_argument("algebra: structure constants not antisymmetric");
  // Jacobi: sum_m f_{a b m} f_{m c k} + cyclic = 0
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b)
      for (int c = b + 1; c < M; ++c)
        for (int k = 0; k < M; ++k) {
          double s = 0;
          for (int m = 0; m < M; ++m)
            s += structure(a, b, m) * structure(m, c, k) + structure(b, c, m) * structure(m, a, k) +
                 structure(c, a, m) * structure(m, b, k);
          if (std::abs(s) > tol) throw std::invalid_argument("algebra: Jacobi identity violated");
        }
  const int r = cw.rank(), l = cw.n_roots();
  if (r + 2 * l != M) throw std::invalid_argument("algebra: r + 2l != M");
  for (const auto& a : cw.roots)
    if (!is_positive_root(a)) throw std::invalid_argument("algebra: stored root is not positive");
  if (has_rep()) {
    for (const auto& m : rep) require_hermitian(m, "representation matrix");
    for (int j = 0; j < M; ++j)
      for (int jp = j + 1; jp < M; ++jp) {
        CMat rhs = CMat::Zero(rep[0].rows(), rep[0].cols());
        for (int k = 0; k < M; ++k)
          if (structure(j, jp, k) != 0.0) rhs += kI * structure(j, jp, k) * rep[k];
        if ((rep[j] * rep[jp] - rep[jp] * rep[j] - rhs).cwiseAbs().maxCoeff() > tol)
          throw std::invalid_argument("algebra: representation does not reproduce the brackets");
      }
  }
  for (int j = 0; j < l; ++j) {
    for (int k = 0; k < r; ++k) {
      const CVec h = CVec::Unit(M, cw.csa[k]);
      if ((bracket(*this, h, cw.raising[j]) - cw.roots[j][k] * cw.raising[j]).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("algebra: [h, E_alpha] != alpha E_alpha");
    }
    CVec expect = CVec::Zero(M);
    for (int k = 0; k < r; ++k) expect[cw.csa[k]] = cw.roots[j][k];
    if ((bracket(*this, cw.raising[j], cw.raising[j].conjugate()) - expect).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("algebra: [E_alpha, E_-alpha] != alpha.h");
  }
}

CVec bracket(const AlgebraSpec& spec, const CVec& a, const CVec& b) { return bracket_f(spec.f, spec.dim(), a, b); }

std::vector<CMat> adjoint_rep(const AlgebraSpec& spec) {
  const int M = spec.dim();
  for (int j = 0; j < M; ++j)
    for (int a = j + 1; a < M; ++a)
      for (int b = a + 1; b < M; ++b)
        for (int k = 0; k < M; ++k) {
          double s = 0;
          for (int m = 0; m < M; ++m)
            s += spec.structure(j, a, m) * spec.structure(m, b, k) + spec.structure(a, b, m) * spec.structure(m, j, k) +
                 spec.structure(b, j, m) * spec.structure(m, a, k);
          if (std::abs(s) > 1e-10) throw std::invalid_argument("adjoint_rep: Jacobi identity violated");
        }
  return adjoint_from_f(spec.f, M);
}

RMat killing_form(const AlgebraSpec& spec) { return trace_gram(adjoint_from_f(spec.f, spec.dim())); }

CartanWeyl compute_cartan_weyl(const std::vector<double>& f, int M, const std::vector<int>& csa) {
  CartanWeyl cw;
  cw.csa = csa;
  const int r = static_cast<int>(csa.size());
  std::set<int> seen;
  for (int c : csa)
    if (c < 0 || c >= M || !seen.insert(c).second) throw std::invalid_argument("algebra: bad CSA index");
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int k = 0; k < M; ++k)
        if (std::abs(f[fidx(M, csa[a], csa[b], k)]) > 1e-10) throw std::invalid_argument("algebra: CSA is not abelian");
  if (r == M) return cw;
  const auto ad = adjoint_from_f(f, M);
  CMat gen = CMat::Zero(M, M);
  for (int k = 0; k < r; ++k) gen += std::sqrt(2.0 + k * 1.6180339887) * ad[csa[k]];
  Eigen::ComplexEigenSolver<CMat> es(gen);
  std::vector<std::pair<RVec, CVec>> pos;
  int zero = 0;
  double scale = 0;
  for (int i = 0; i < M; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
  for (int i = 0; i < M; ++i) {
    if (std::abs(es.eigenvalues()[i]) < 1e-8 * std::max(1.0, scale)) {
      ++zero;
      continue;
    }
    CVec v = es.eigenvectors().col(i);
    RVec alpha(r);
    for (int k = 0; k < r; ++k) {
      const cplx a = v.dot(ad[csa[k]] * v) / v.squaredNorm();
      if (std::abs(a.imag()) > 1e-8) throw std::invalid_argument("algebra: complex root; basis is not compact");
      alpha[k] = a.real();
    }
    if (!is_positive_root(alpha)) continue;
    // [E, E^dag] = lambda alpha.h fixes the scale
    const CVec w = bracket_f(f, M, v, v.conjugate());
    double num = 0;
    for (int k = 0; k < r; ++k) num += w[csa[k]].real() * alpha[k];
    const double lambda = num / alpha.squaredNorm();
    if (!(lambda > 1e-12)) throw std::invalid_argument("algebra: root normalization failed");
    v /= std::sqrt(lambda);
    Eigen::Index big = 0;
    for (Eigen::Index k = 0; k < M; ++k)
      if (std::abs(v[k]) > std::abs(v[big]) + 1e-12) big = k;
    v *= std::abs(v[big]) / v[big];
    pos.emplace_back(alpha, v);
  }
  if (zero != r) throw std::invalid_argument("algebra: CSA is not maximal");
  if (static_cast<int>(pos.size()) * 2 != M - r) throw std::invalid_argument("algebra: roots do not pair up");
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return lex_greater(a.first, b.first); });
  for (auto& [a, v] : pos) {
    cw.roots.push_back(a);
    cw.raising.push_back(v);
  }
  return cw;
}

int root_addition(const AlgebraSpec& spec, int a, int b, cplx* n_ab) {
  const RVec sum = spec.cw.roots[a] + spec.cw.roots[b];
  for (int c = 0; c < spec.cw.n_roots(); ++c) {
    if ((spec.cw.roots[c] - sum).cwiseAbs().maxCoeff() > 1e-9) continue;
    const CVec w = bracket(spec, spec.cw.raising[a], spec.cw.raising[b]);
    const CVec& e = spec.cw.raising[c];
    if (n_ab) *n_ab = e.dot(w) / e.squaredNorm();
    return c;
  }
  if (n_ab) *n_ab = 0.0;
  return -1;
}

AlgebraSpec from_structure_constants(const std::string& name, const std::vector<std::string>& labels,
                                     const std::vector<double>& f, const std::vector<int>& csa) {
  AlgebraSpec s;
  s.name = name;
  s.labels = labels;
  s.f = f;
  s.cw.csa = csa;
  const int M = s.dim();
  if (f.size() != static_cast<std::size_t>(M) * M * M) throw std::invalid_argument("algebra: structure tensor has wrong size");
  adjoint_rep(s);  // Jacobi check
  finish(s);
  return s;
}

AlgebraSpec from_representation(const std::string& name, const std::vector<std::string>& labels,
                                const std::vector<CMat>& mats, const std::vector<int>& csa) {
  const int M = static_cast<int>(mats.size());
  if (M < 1 || static_cast<int>(labels.size()) != M) throw std::invalid_argument("algebra: one label per matrix");
  for (const auto& m : mats) {
    require_hermitian(m, "representation matrix");
    if (m.rows() != mats[0].rows()) throw std::invalid_argument("algebra: matrices of different size");
  }
  const RMat g = trace_gram(mats);
  Eigen::SelfAdjointEigenSolver<RMat> ge(g);
  if (ge.eigenvalues().minCoeff() < 1e-10 * std::max(1.0, ge.eigenvalues().maxCoeff()))
    throw std::invalid_argument("algebra: representation matrices are linearly dependent");
  const RMat ginv = g.inverse();
  AlgebraSpec s;
  s.name = name;
  s.labels = labels;
  s.rep = mats;
  s.rep_norm = g(0, 0);
  s.f.assign(static_cast<std::size_t>(M) * M * M, 0.0);
  for (int j = 0; j < M; ++j)
    for (int jp = j + 1; jp < M; ++jp) {
      const CMat c = -kI * (mats[j] * mats[jp] - mats[jp] * mats[j]);
      RVec t(M);
      for (int m = 0; m < M; ++m) {
        const cplx v = (c * mats[m]).trace();
        if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v))) throw std::invalid_argument("algebra: basis not closed");
        t[m] = v.real();
      }
      const RVec fk = ginv * t;
      for (int k = 0; k < M; ++k) {
        const double v = std::abs(fk[k]) < 1e-13 ? 0.0 : fk[k];
        s.f[fidx(M, j, jp, k)] = v;
        s.f[fidx(M, jp, j, k)] = -v;
      }
      CMat rebuilt = CMat::Zero(c.rows(), c.cols());
      for (int k = 0; k < M; ++k) rebuilt += fk[k] * mats[k];
      if ((rebuilt - c).cwiseAbs().maxCoeff() > 1e-9) throw std::invalid_argument("algebra: basis not closed under brackets");
    }
  s.cw.csa = csa;
  finish(s);
  return s;
}

AlgebraSpec killing_orthonormalize(const AlgebraSpec& spec) {
  const int M = spec.dim();
  RMat form;
  if (spec.has_rep()) {
    form = trace_gram(spec.rep);
  } else {
    form = killing_form(spec);
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(form);
  if (es.eigenvalues().minCoeff() < 1e-10 * std::max(1.0, std::abs(es.eigenvalues().maxCoeff())))
    throw std::invalid_argument("killing_orthonormalize: degenerate form, algebra is not semi-simple");
  // Gram-Schmidt in the order CSA first, results kept at the original positions
  std::vector<int> order = spec.cw.csa;
  for (int j = 0; j < M; ++j)
    if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
  RMat t = RMat::Zero(M, M);  // new O_a = sum_j t(a, j) O_j
  std::vector<int> done;
  for (int a : order) {
    RVec v = RVec::Unit(M, a);
    for (int b : done) v -= (t.row(b) * form * v)(0) * t.row(b).transpose();
    const double nrm = std::sqrt((v.transpose() * form * v)(0));
    t.row(a) = v.transpose() / nrm;
    done.push_back(a);
  }
  const RMat tinv = t.inverse();
  AlgebraSpec out;
  out.name = spec.name;
  out.labels = spec.labels;
  out.f.assign(static_cast<std::size_t>(M) * M * M, 0.0);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      RVec fk = RVec::Zero(M);
      for (int j = 0; j < M; ++j) {
        if (t(a, j) == 0.0) continue;
        for (int jp = 0; jp < M; ++jp) {
          if (t(b, jp) == 0.0) continue;
          for (int k = 0; k < M; ++k) fk[k] += t(a, j) * t(b, jp) * spec.structure(j, jp, k);
        }
      }
      const RVec fc = tinv.transpose() * fk;
      for (int c = 0; c < M; ++c) out.f[fidx(M, a, b, c)] = std::abs(fc[c]) < 1e-14 ? 0.0 : fc[c];
    }
  if (spec.has_rep()) {
    out.rep.assign(M, CMat::Zero(spec.rep[0].rows(), spec.rep[0].cols()));
    for (int a = 0; a < M; ++a)
      for (int j = 0; j < M; ++j)
        if (t(a, j) != 0.0) out.rep[a] += t(a, j) * spec.rep[j];
    out.rep_norm = 1.0;
  }
  out.cw.csa = spec.cw.csa;
  finish(out);
  return out;
}

// ---------------------------------------------------------------- builtins

AlgebraSpec su2(double spin) {
  const double two_s = 2.0 * spin;
  if (spin <= 0 || std::abs(two_s - std::round(two_s)) > 1e-12 || spin > 50)
    throw std::invalid_argument("su2: spin must be a positive half-integer <= 50");
  const int d = static_cast<int>(std::round(two_s)) + 1;
  CMat sz = CMat::Zero(d, d), sp = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = spin - i;
    sz(i, i) = m;
    if (i > 0) sp(i - 1, i) = std::sqrt(spin * (spin + 1) - m * (m + 1));
  }
  const CMat sx = (sp + sp.adjoint()) / 2.0;
  const CMat sy = (sp - sp.adjoint()) / (2.0 * kI);
  return from_representation("su2", {"Sx", "Sy", "Sz"}, {sx, sy, sz}, {2});
}

AlgebraSpec su2_pauli() {
  CMat x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  return from_representation("su2_pauli", {"X", "Y", "Z"}, {x, y, z}, {2});
}

AlgebraSpec su3() {
  std::vector<CMat> l(8, CMat::Zero(3, 3));
  l[0](0, 1) = l[0](1, 0) = 1;
  l[1](0, 1) = -kI;
  l[1](1, 0) = kI;
  l[2](0, 0) = 1;
  l[2](1, 1) = -1;
  l[3](0, 2) = l[3](2, 0) = 1;
  l[4](0, 2) = -kI;
  l[4](2, 0) = kI;
  l[5](1, 2) = l[5](2, 1) = 1;
  l[6](1, 2) = -kI;
  l[6](2, 1) = kI;
  l[7](0, 0) = l[7](1, 1) = 1 / std::sqrt(3.0);
  l[7](2, 2) = -2 / std::sqrt(3.0);
  return from_representation("su3", {"L1", "L2", "L3", "L4", "L5", "L6", "L7", "L8"}, l, {2, 7});
}

AlgebraSpec su4_two_qubit() {
  const char* names = "IXYZ";
  std::vector<CMat> mats;
  std::vector<std::string> labels;
  std::vector<int> csa;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      std::string lab{names[a], names[b]};
      std::map<int, Pauli> fac;
      if (a) fac[1] = static_cast<Pauli>(a);
      if (b) fac[2] = static_cast<Pauli>(b);
      if (lab == "ZI" || lab == "IZ" || lab == "ZZ") csa.push_back(static_cast<int>(mats.size()));
      mats.push_back(dense_matrix(PauliSum(PauliTerm::from_factors(1.0, fac)), 2));
      labels.push_back(lab);
    }
  return from_representation("su4", labels, mats, csa);
}

namespace {

AlgebraSpec un_from(const std::string& name, int n, const std::function<CMat(int, int)>& hop, const std::function<CMat(int)>& num) {
  std::vector<CMat> mats;
  std::vector<std::string> labels;
  std::vector<int> csa;
  for (int j = 1; j <= n; ++j)
    for (int jp = j + 1; jp <= n; ++jp) {
      const CMat h = hop(j, jp);  // c+_j c_jp
      mats.push_back(h + h.adjoint());
      labels.push_back("X" + std::to_string(j) + "_" + std::to_string(jp));
      mats.push_back(kI * (h - h.adjoint()));
      labels.push_back("Y" + std::to_string(j) + "_" + std::to_string(jp));
    }
  for (int j = 1; j <= n; ++j) {
    csa.push_back(static_cast<int>(mats.size()));
    mats.push_back(std::sqrt(2.0) * num(j));
    labels.push_back("N" + std::to_string(j));
  }
  return from_representation(name, labels, mats, csa);
}

}  // namespace

AlgebraSpec uN(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("uN: 1 <= N <= 16");
  return un_from(
      "u" + std::to_string(n), n,
      [n](int j, int jp) {
        CMat m = CMat::Zero(n, n);
        m(j - 1, jp - 1) = 1.0;
        return m;
      },
      [n](int j) {
        CMat m = CMat::Zero(n, n);
        m(j - 1, j - 1) = 1.0;
        return m;
      });
}

AlgebraSpec uN_fock(int n) {
  if (n < 1 || n > 6) throw std::invalid_argument("uN_fock: 1 <= N <= 6");
  std::vector<CMat> c(n + 1);
  for (int j = 1; j <= n; ++j) c[j] = dense_matrix(jw_annihilation(j, n), n);
  const Eigen::Index d = Eigen::Index{1} << n;
  return un_from(
      "u" + std::to_string(n) + "_fock", n, [&](int j, int jp) { return CMat(c[j].adjoint() * c[jp]); },
      [&](int j) { return CMat(c[j].adjoint() * c[j] - 0.5 * CMat::Identity(d, d)); });
}

AlgebraSpec so2N_fock(int n) {
  if (n < 1 || n > 6) throw std::invalid_argument("so2N_fock: 1 <= N <= 6");
  std::vector<CMat> g;
  for (int j = 1; j <= n; ++j) {
    const CMat c = dense_matrix(jw_annihilation(j, n), n);
    g.push_back(c + c.adjoint());
    g.push_back(kI * (c.adjoint() - c));
  }
  std::vector<CMat> mats;
  std::vector<std::string> labels;
  std::vector<int> csa;
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a + 1; b < 2 * n; ++b) {
      if (b == a + 1 && a % 2 == 0) csa.push_back(static_cast<int>(mats.size()));
      mats.push_back(0.5 * kI * g[a] * g[b]);
      labels.push_back("G" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
    }
  return from_representation("so" + std::to_string(2 * n) + "_fock", labels, mats, csa);
}

AlgebraSpec local_su2(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 10) throw std::invalid_argument("local_su2: 1 <= n <= 10");
  std::vector<CMat> mats;
  std::vector<std::string> labels;
  std::vector<int> csa;
  for (int q = 1; q <= n_qubits; ++q)
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      if (p == Pauli::Z) csa.push_back(static_cast<int>(mats.size()));
      mats.push_back(dense_matrix(PauliSum::single(q, p), n_qubits));
      labels.push_back(std::string(1, "IXYZ"[static_cast<int>(p)]) + std::to_string(q));
    }
  return from_representation("local_su2_" + std::to_string(n_qubits), labels, mats, csa);
}

std::vector<std::uint64_t> fock_sector_basis(int n_modes, int n_particles) {
  if (n_modes < 1 || n_modes > 16 || n_particles < 0 || n_particles > n_modes)
    throw std::invalid_argument("fock_sector_basis: bad sizes");
  std::vector<std::uint64_t> out;
  for (std::uint64_t lab = 0; lab < (std::uint64_t{1} << n_modes); ++lab)
    if (n_modes - std::popcount(lab) == n_particles) out.push_back(lab);  // occupied mode = bit 0
  return out;
}

AlgebraSpec uN_fock_sector(int n_modes, int n_particles) {
  if (n_modes < 2 || n_modes > 8 || n_particles < 1 || n_particles >= n_modes)
    throw std::invalid_argument("uN_fock_sector: need 1 <= n < N <= 8");
  const auto basis = fock_sector_basis(n_modes, n_particles);
  const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
  std::vector<CMat> c(n_modes + 1);
  for (int j = 1; j <= n_modes; ++j) {
    const CMat full = dense_matrix(jw_annihilation(j, n_modes), n_modes);
    c[j] = full;
  }
  auto restrict = [&](const CMat& full) {
    CMat r(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) r(a, b) = full(static_cast<Eigen::Index>(basis[a]), static_cast<Eigen::Index>(basis[b]));
    return r;
  };
  return un_from(
      "u" + std::to_string(n_modes) + "_sector" + std::to_string(n_particles), n_modes,
      [&](int j, int jp) { return restrict(c[j].adjoint() * c[jp]); },
      [&](int j) { return restrict(c[j].adjoint() * c[j]); });
}

// ------------------------------------------------------------------- JSON

std::string algebra_to_json(const AlgebraSpec& spec) {
  const int M = spec.dim();
  json j;
  j["name"] = spec.name;
  j["labels"] = spec.labels;
  json f = json::array();
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b)
      for (int k = 0; k < M; ++k)
        if (spec.structure(a, b, k) != 0.0) f.push_back({a, b, k, spec.structure(a, b, k)});
  j["f"] = f;
  j["csa"] = spec.cw.csa;
  json roots = json::array();
  for (const auto& r : spec.cw.roots) roots.push_back(std::vector<double>(r.data(), r.data() + r.size()));
  j["roots"] = roots;
  if (spec.has_rep()) {
    json rep = json::array();
    for (const auto& m : spec.rep) {
      json re = json::array(), im = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> rr, ii;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          rr.push_back(m(r, c).real());
          ii.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
      }
      rep.push_back({{"re", re}, {"im", im}});
    }
    j["rep"] = rep;
  }
  return j.dump(1);
}

AlgebraSpec algebra_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("algebra json: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("algebra json: top level must be an object");
  static const std::set<std::string> allowed = {"name", "labels", "f", "csa", "roots", "rep", "highest_weight"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw std::invalid_argument("algebra json: unknown key '" + it.key() + "'");
  for (const char* req : {"labels", "f", "csa"})
    if (!j.contains(req)) throw std::invalid_argument(std::string("algebra json: missing key '") + req + "'");
  try {
    const auto labels = j["labels"].get<std::vector<std::string>>();
    const int M = static_cast<int>(labels.size());
    const auto csa = j["csa"].get<std::vector<int>>();
    const std::string name = j.value("name", std::string("custom"));
    AlgebraSpec s;
    if (j.contains("rep")) {
      std::vector<CMat> mats;
      for (const auto& m : j["rep"]) {
        const auto re = m.at("re").get<std::vector<std::vector<double>>>();
        const auto im = m.at("im").get<std::vector<std::vector<double>>>();
        const Eigen::Index p = static_cast<Eigen::Index>(re.size());
        CMat x(p, p);
        for (Eigen::Index r = 0; r < p; ++r) {
          if (re[r].size() != static_cast<std::size_t>(p) || im.size() != re.size() || im[r].size() != re[r].size())
            throw std::invalid_argument("algebra json: rep matrix is not square");
          for (Eigen::Index c = 0; c < p; ++c) x(r, c) = {re[r][c], im[r][c]};
        }
        mats.push_back(x);
      }
      if (static_cast<int>(mats.size()) != M) throw std::invalid_argument("algebra json: one rep matrix per label");
      s = from_representation(name, labels, mats, csa);
    } else {
      std::vector<double> f(static_cast<std::size_t>(M) * M * M, 0.0);
      for (const auto& t : j["f"]) {
        if (!t.is_array() || t.size() != 4) throw std::invalid_argument("algebra json: f entries are [j, jp, k, value]");
        const int a = t[0].get<int>(), b = t[1].get<int>(), k = t[2].get<int>();
        const double v = t[3].get<double>();
        if (a < 0 || b < 0 || k < 0 || a >= M || b >= M || k >= M) throw std::invalid_argument("algebra json: f index out of range");
        f[fidx(M, a, b, k)] = v;
        f[fidx(M, b, a, k)] = -v;
      }
      s = from_structure_constants(name, labels, f, csa);
    }
    if (j.contains("roots")) {
      const auto roots = j["roots"].get<std::vector<std::vector<double>>>();
      bool ok = roots.size() == static_cast<std::size_t>(s.cw.n_roots());
      for (std::size_t a = 0; ok && a < roots.size(); ++a) {
        if (roots[a].size() != static_cast<std::size_t>(s.cw.rank())) ok = false;
        for (int k = 0; ok && k < s.cw.rank(); ++k)
          if (std::abs(roots[a][k] - s.cw.roots[a][k]) > 1e-8) ok = false;
      }
      if (!ok) throw std::invalid_argument("algebra json: supplied roots do not match the structure constants");
    }
    if (j.contains("highest_weight")) {
      const auto e = j["highest_weight"].get<std::vector<double>>();
      if (static_cast<int>(e.size()) != s.cw.rank()) throw std::invalid_argument("algebra json: highest weight has wrong length");
      s.highest_weight = Eigen::Map<const RVec>(e.data(), static_cast<Eigen::Index>(e.size()));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("algebra json: ") + e.what());
  }
}

// ------------------------------------------------------------------ expm

int pade_scaling(double norm) {
  if (!std::isfinite(norm)) throw std::overflow_error("expm: non-finite matrix norm");
  int s = 0;
  while (std::ldexp(norm, -s) > 0.5) ++s;
  return s;
}

double pade_backward_bound(double norm, int q, int s) {
  const double x = std::ldexp(norm, -s);
  if (x == 0.0) return 0.0;
  const double logc = 2 * std::lgamma(q + 1.0) - std::lgamma(2 * q + 1.0) - std::lgamma(2 * q + 2.0);
  return 8.0 * std::exp(2 * q * std::log(x) + logc);
}

ExpmResult expm(const CMat& a, int q) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (q < 1 || q > 20) throw std::invalid_argument("expm: Pade order out of range");
  if (!a.allFinite()) throw std::overflow_error("expm: non-finite input");
  ExpmResult r;
  r.q = q;
  r.norm = a.rows() ? a.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  r.s = pade_scaling(r.norm);
  if (r.s > 1000) throw std::overflow_error("expm: norm too large");
  r.value = expm_pade(a, q, r.s);
  if (!r.value.allFinite()) throw std::overflow_error("expm: overflow");
  r.backward_bound = pade_backward_bound(r.norm, q, r.s);
  return r;
}

// ------------------------------------------------------------ group action

GroupElement GroupElement::identity(const AlgebraSpec& spec) {
  GroupElement g;
  const auto& w = spec.working_rep();
  g.matrix = CMat::Identity(w[0].rows(), w[0].cols());
  return g;
}

GroupElement GroupElement::from_zeta(const AlgebraSpec& spec, const RVec& zeta) {
  return identity(spec).then(spec, zeta);
}

GroupElement GroupElement::then(const AlgebraSpec& spec, const RVec& zeta) const {
  if (zeta.size() != spec.dim()) throw std::invalid_argument("group element: zeta has wrong length");
  GroupElement g = *this;
  g.factors.push_back(zeta);
  g.matrix = matrix * expm(kI * spec.matrix_of(zeta.cast<cplx>())).value;
  return g;
}

bool GroupElement::is_unitary(double tol) const {
  return (matrix.adjoint() * matrix - CMat::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff() <= tol;
}

RMat adjoint_action_matrix(const AlgebraSpec& spec, const CMat& u) {
  const int M = spec.dim();
  const auto& w = spec.working_rep();
  RMat nu(M, M);
  for (int j = 0; j < M; ++j) nu.row(j) = spec.coefficients_of(u.adjoint() * w[j] * u).real().transpose();
  return nu;
}

RVec adjoint_action(const AlgebraSpec& spec, const GroupElement& u, int j) {
  if (j < 0 || j >= spec.dim()) throw std::out_of_range("adjoint_action: basis index");
  const auto& w = spec.working_rep();
  return spec.coefficients_of(u.matrix.adjoint() * w[j] * u.matrix).real();
}

RVec weight_of(const AlgebraSpec& spec, const RVec& highest_weight, const std::vector<int>& descent_counts) {
  if (static_cast<int>(descent_counts.size()) != spec.cw.n_roots()) throw std::invalid_argument("weight_of: one count per root");
  RVec w = highest_weight;
  for (int j = 0; j < spec.cw.n_roots(); ++j) w -= descent_counts[j] * spec.cw.roots[j];
  return w;
}

}  // namespace qmb
