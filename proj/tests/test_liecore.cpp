#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qmb/liecore.hpp"

using namespace qmb;

namespace {

using MP = boost::multiprecision::cpp_complex_50;
using MPR = boost::multiprecision::cpp_bin_float_50;
using MPMat = Eigen::Matrix<MP, Eigen::Dynamic, Eigen::Dynamic>;

MPMat to_mp(const CMat& a) {
  MPMat m(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) m(i, j) = MP(a(i, j).real(), a(i, j).imag());
  return m;
}

MPR norm1(const MPMat& a) {
  MPR best = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    MPR s = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += abs(a(i, j));
    if (s > best) best = s;
  }
  return best;
}

// Taylor series in 50-digit arithmetic on A/2^k, then k squarings.
MPMat taylor_exp(const MPMat& a) {
  int k = 0;
  MPR nrm = norm1(a);
  while (nrm > 0.25) {
    nrm /= 2;
    ++k;
  }
  MPMat x = a;
  for (int i = 0; i < k; ++i) x = x / MP(2);
  const Eigen::Index n = a.rows();
  MPMat term = MPMat::Identity(n, n), sum = MPMat::Identity(n, n);
  for (int j = 1; j <= 80; ++j) {
    term = (term * x) / MP(j);
    sum += term;
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum;
}

double levi(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0.0;
  return ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
}

std::vector<double> scaled_epsilon(double s) {
  std::vector<double> f(27);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) f[(a * 3 + b) * 3 + c] = s * levi(a, b, c);
  return f;
}

CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

}  // namespace

TEST_CASE("su(2) spin matrices give epsilon structure constants and adjoint brackets") {
  for (double spin : {0.5, 1.0, 1.5, 3.0}) {
    const AlgebraSpec s = su2(spin);
    CHECK_NOTHROW(s.validate());
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) CHECK(s.structure(a, b, c) == doctest::Approx(levi(a, b, c)).epsilon(1e-12));
    const auto ad = adjoint_rep(s);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        CMat rhs = CMat::Zero(3, 3);
        for (int c = 0; c < 3; ++c) rhs += kI * s.structure(a, b, c) * ad[c];
        CHECK((commutator(ad[a], ad[b]) - rhs).norm() < 1e-12);
      }
    REQUIRE(s.cw.n_roots() == 1);
    CHECK(s.cw.roots[0][0] == doctest::Approx(1.0));
    // E_+ = (S_x + i S_y)/sqrt2 so that [E_+, E_-] = S_z
    CHECK(std::abs(s.cw.raising[0][0] - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(s.cw.raising[0][1] - kI / std::sqrt(2.0)) < 1e-12);
    REQUIRE(s.highest_weight.size() == 1);
    CHECK(s.highest_weight[0] == doctest::Approx(spin));
  }
  CHECK_THROWS(su2(0.3));
  CHECK_THROWS(su2(0.0));
}

TEST_CASE("Pauli basis has f = 2 epsilon and root 2") {
  const AlgebraSpec s = su2_pauli();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) CHECK(s.structure(a, b, c) == doctest::Approx(2 * levi(a, b, c)));
  CHECK(s.cw.roots[0][0] == doctest::Approx(2.0));
  CHECK(s.highest_weight[0] == doctest::Approx(1.0));
  // CSA block of f vanishes
  for (int k = 0; k < 3; ++k) CHECK(s.structure(2, 2, k) == 0.0);
}

TEST_CASE("killing_orthonormalize") {
  SUBCASE("rescales the Pauli basis in the trace form") {
    const AlgebraSpec o = killing_orthonormalize(su2_pauli());
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        CHECK((o.rep[a] * o.rep[b]).trace().real() == doctest::Approx(a == b ? 1.0 : 0.0));
    CHECK(o.structure(0, 1, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK_NOTHROW(o.validate());
  }
  SUBCASE("without a rep uses the Killing form") {
    const AlgebraSpec s = from_structure_constants("scaled", {"a", "b", "c"}, scaled_epsilon(4.0), {2});
    const AlgebraSpec o = killing_orthonormalize(s);
    const RMat k = killing_form(o);
    CHECK((k - RMat::Identity(3, 3)).norm() < 1e-12);
    // Killing of f = c eps is 2c^2 delta, so c' = 1/sqrt2
    CHECK(o.structure(0, 1, 2) == doctest::Approx(1 / std::sqrt(2.0)));
  }
  SUBCASE("orthonormal input is unchanged") {
    const AlgebraSpec s = su2(0.5);
    const AlgebraSpec o = killing_orthonormalize(from_representation("h", s.labels, {s.rep[0] * std::sqrt(2.0),
                                                                                     s.rep[1] * std::sqrt(2.0),
                                                                                     s.rep[2] * std::sqrt(2.0)},
                                                                      {2}));
    const AlgebraSpec again = killing_orthonormalize(o);
    for (std::size_t i = 0; i < o.f.size(); ++i) CHECK(again.f[i] == doctest::Approx(o.f[i]).epsilon(1e-12));
    for (int a = 0; a < 3; ++a) CHECK((again.rep[a] - o.rep[a]).norm() < 1e-12);
  }
  SUBCASE("degenerate Killing form is rejected") {
    const AlgebraSpec u2 = uN(2);
    const AlgebraSpec bare = from_structure_constants("u2", u2.labels, u2.f, u2.cw.csa);
    CHECK_THROWS_AS(killing_orthonormalize(bare), std::invalid_argument);
  }
}

TEST_CASE("u(N) basis is trace-orthogonal with norm 2 and closes") {
  for (int n : {2, 3, 4}) {
    const AlgebraSpec s = uN(n);
    CHECK(s.dim() == n * n);
    CHECK(s.cw.rank() == n);
    CHECK(s.cw.n_roots() == n * (n - 1) / 2);
    CHECK_NOTHROW(s.validate());
    for (int a = 0; a < s.dim(); ++a)
      for (int b = 0; b < s.dim(); ++b)
        CHECK((s.rep[a] * s.rep[b]).trace().real() == doctest::Approx(a == b ? 2.0 : 0.0));
  }
  // The Fock-space version is a representation of the same algebra.
  const AlgebraSpec d = uN(3), fk = uN_fock(3);
  for (std::size_t i = 0; i < d.f.size(); ++i) CHECK(fk.f[i] == doctest::Approx(d.f[i]).epsilon(1e-12));
  CHECK_NOTHROW(fk.validate());
  const AlgebraSpec so = so2N_fock(2);
  CHECK(so.dim() == 6);
  CHECK(so.cw.rank() == 2);
  CHECK_NOTHROW(so.validate());
}

TEST_CASE("su(3) roots and Jacobi check") {
  const AlgebraSpec s = su3();
  CHECK_NOTHROW(s.validate());
  REQUIRE(s.cw.n_roots() == 3);
  const double r3 = std::sqrt(3.0);
  CHECK(s.cw.roots[0][0] == doctest::Approx(2.0));
  CHECK(s.cw.roots[0][1] == doctest::Approx(0.0));
  CHECK(s.cw.roots[1][0] == doctest::Approx(1.0));
  CHECK(s.cw.roots[1][1] == doctest::Approx(r3));
  CHECK(s.cw.roots[2][0] == doctest::Approx(1.0));
  CHECK(s.cw.roots[2][1] == doctest::Approx(-r3));
  // (1,-sqrt3) + (1,sqrt3) = (2,0)
  cplx n = 0;
  CHECK(root_addition(s, 2, 1, &n) == 0);
  CHECK(std::abs(n) > 0.1);
  CHECK(root_addition(s, 0, 1, &n) == -1);
  std::vector<double> bad = s.f;
  bad[(0 * 8 + 1) * 8 + 2] += 0.3;
  bad[(1 * 8 + 0) * 8 + 2] -= 0.3;
  CHECK_THROWS_AS(from_structure_constants("bad", s.labels, bad, s.cw.csa), std::invalid_argument);
}

TEST_CASE("two-qubit su(4) and non-maximal CSA") {
  const AlgebraSpec s = su4_two_qubit();
  CHECK(s.dim() == 15);
  CHECK(s.cw.n_roots() == 6);
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(compute_cartan_weyl(s.f, 15, {s.cw.csa[0]}), std::invalid_argument);
  const AlgebraSpec loc = local_su2(2);
  CHECK(loc.dim() == 6);
  CHECK(loc.highest_weight.size() == 2);
}

TEST_CASE("expm basics") {
  const CMat z = CMat::Zero(3, 3);
  CHECK((expm(z).value - CMat::Identity(3, 3)).norm() == 0.0);
  CMat x(2, 2);
  x << 0, 1, 1, 0;
  const CMat e = expm(kI * (M_PI / 2) * x).value;
  CHECK((e - kI * x).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(pade_scaling(0.5) == 0);
  CHECK(pade_scaling(0.51) == 1);
  CHECK(pade_scaling(8.0) == 4);
  CMat bad = CMat::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(expm(bad), std::overflow_error);
  CHECK_THROWS_AS(expm(CMat::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("expm against a 50-digit Taylor oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int p : {2, 3, 5, 8, 16}) {
    for (int rep = 0; rep < 2; ++rep) {
      CMat h = oracle::random_hermitian(p, rng);
      const double target = u(rng);
      h *= target / h.cwiseAbs().colwise().sum().maxCoeff();
      const CMat a = kI * h;
      const ExpmResult r = expm(a);
      CHECK(r.q == 6);
      const MPMat ref = taylor_exp(to_mp(a));
      MPR diff = 0, scale = 0;
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) {
          diff = std::max(diff, MPR(abs(ref(i, j) - MP(r.value(i, j).real(), r.value(i, j).imag()))));
          scale = std::max(scale, MPR(abs(ref(i, j))));
        }
      CHECK(static_cast<double>(diff / scale) < 1e-10);
    }
  }
}

TEST_CASE("Pade backward bound holds in 50-digit arithmetic") {
  std::mt19937_64 rng(11);
  for (int p : {2, 4, 6}) {
    for (double target : {0.3, 2.0, 9.0}) {
      CMat h = oracle::random_hermitian(p, rng);
      h *= target / h.cwiseAbs().colwise().sum().maxCoeff();
      const CMat a = kI * h;
      const int s = pade_scaling(target);
      const double bound = pade_backward_bound(target, 6, s);
      CHECK(bound < 1e-15);
      // R(X) = e^{X + F} with F commuting with X; E/A = F/X.
      MPMat x = to_mp(a);
      for (int i = 0; i < s; ++i) x = x / MP(2);
      const MPMat r = expm_pade<MPMat>(x, 6, 0);
      const MPMat f = taylor_exp(-x) * r - MPMat::Identity(p, p);
      const double rel = static_cast<double>(norm1(f) / norm1(x));
      CHECK(rel <= bound);
      CHECK(rel > 0.0);
    }
  }
}

TEST_CASE("adjoint action") {
  const AlgebraSpec s = su2_pauli();
  SUBCASE("identity") {
    const GroupElement g = GroupElement::identity(s);
    CHECK((adjoint_action_matrix(s, g.matrix) - RMat::Identity(3, 3)).norm() < 1e-14);
  }
  SUBCASE("e^{i pi/4 sigma_y} maps sigma_z to sigma_x") {
    RVec zeta(3);
    zeta << 0, M_PI / 4, 0;
    const GroupElement g = GroupElement::from_zeta(s, zeta);
    CHECK(g.is_unitary());
    const RVec nu = adjoint_action(s, g, 2);
    CHECK(nu[0] == doctest::Approx(1.0));
    CHECK(std::abs(nu[1]) < 1e-14);
    CHECK(std::abs(nu[2]) < 1e-14);
  }
  SUBCASE("su(4) action is orthogonal and preserves the Killing form") {
    const AlgebraSpec a = su4_two_qubit();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    RVec z1(15), z2(15);
    for (int j = 0; j < 15; ++j) {
      z1[j] = nd(rng);
      z2[j] = nd(rng);
    }
    const GroupElement g = GroupElement::from_zeta(a, z1).then(a, z2);
    CHECK(g.factors.size() == 2);
    CHECK(g.is_unitary());
    const RMat nu = adjoint_action_matrix(a, g.matrix);
    CHECK((nu * nu.transpose() - RMat::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-10);
    const RMat k = killing_form(a);
    CHECK((nu * k * nu.transpose() - k).cwiseAbs().maxCoeff() < 1e-8);
    // direct oracle for one element
    const CMat u = oracle::expm_hermitian(a.matrix_of(z1.cast<cplx>()), -1.0) *
                   oracle::expm_hermitian(a.matrix_of(z2.cast<cplx>()), -1.0);
    CHECK((u - g.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("projection residual flags matrices outside the algebra") {
    CHECK(s.projection_residual(CMat::Identity(2, 2)) > 0.5);
    CMat x(2, 2);
    x << 0, 1, 1, 0;
    CHECK(s.projection_residual(x) < 1e-14);
  }
}

TEST_CASE("weight_of") {
  const AlgebraSpec s = su2(0.5);
  CHECK(weight_of(s, s.highest_weight, {0})[0] == doctest::Approx(0.5));
  CHECK(weight_of(s, s.highest_weight, {1})[0] == doctest::Approx(-0.5));
  // u(3) defining rep: the highest weight vector is an eigenvector of every
  // h_k and one lowering moves the weight by the root.
  const AlgebraSpec u = uN(3);
  REQUIRE(u.highest_weight.size() == 3);
  const CVec& v = u.highest_weight_vector;
  for (int k = 0; k < 3; ++k) {
    const CMat& h = u.rep[u.cw.csa[k]];
    CHECK((h * v - u.highest_weight[k] * v).norm() < 1e-10);
  }
  for (int j = 0; j < u.cw.n_roots(); ++j) {
    const CVec w = u.matrix_of(u.cw.raising[j].conjugate()) * v;
    if (w.norm() < 1e-10) continue;
    std::vector<int> counts(u.cw.n_roots(), 0);
    counts[j] = 1;
    const RVec e = weight_of(u, u.highest_weight, counts);
    for (int k = 0; k < 3; ++k) {
      const CMat& h = u.rep[u.cw.csa[k]];
      CHECK((h * w - e[k] * w).norm() < 1e-10);
    }
  }
  CHECK_THROWS(weight_of(u, u.highest_weight, {1}));
  // the Fock rep mixes particle-number sectors, so no single highest weight
  CHECK(uN_fock(3).highest_weight.size() == 0);
}

TEST_CASE("algebra JSON round trip and strictness") {
  const AlgebraSpec s = su3();
  const AlgebraSpec back = algebra_from_json(algebra_to_json(s));
  CHECK(back.dim() == 8);
  for (std::size_t i = 0; i < s.f.size(); ++i) CHECK(back.f[i] == doctest::Approx(s.f[i]).epsilon(1e-12));
  CHECK(back.cw.n_roots() == 3);
  const std::string bare = R"({"labels":["a","b","c"],"f":[[0,1,2,1.0],[1,2,0,1.0],[2,0,1,1.0]],"csa":[2]})";
  const AlgebraSpec e = algebra_from_json(bare);
  CHECK(e.cw.roots[0][0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(algebra_from_json(R"({"labels":["a"],"f":[],"csa":[0],"extra":1})"), std::invalid_argument);
  CHECK_THROWS_AS(algebra_from_json(R"({"labels":["a","b","c"],"f":[[0,1,2,1.0],[1,2,0,1.0],[2,0,1,1.0]],"csa":[2],"roots":[[2.0]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(algebra_from_json("not json"), std::invalid_argument);
}
