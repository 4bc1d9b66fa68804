#include "qmb/gcs.hpp"

#include <map>
#include <stdexcept>

namespace qmb {

namespace {

void require_state(const AlgebraSpec& spec, const GcsState& s) {
  if (s.e.size() != spec.cw.rank()) throw std::invalid_argument("gcs: highest weight has wrong length");
  const auto& w = spec.working_rep();
  if (s.u.matrix.rows() != w[0].rows()) throw std::invalid_argument("gcs: group element has wrong dimension");
}

CVec check_op(const AlgebraSpec& spec, const CVec& w) {
  if (w.size() != spec.dim()) throw std::invalid_argument("gcs: operator has wrong length");
  return w;
}

// Coefficients of U^dag W U.
CVec rotated(const AlgebraSpec& spec, const GcsState& s, const CVec& w) {
  const RMat nu = adjoint_action_matrix(spec, s.u.matrix);
  return nu.transpose().cast<cplx>() * check_op(spec, w);
}

using Monomial = std::vector<int>;  // lowering indices, front acts last
using Poly = std::map<Monomial, cplx>;

class Contractor {
 public:
  Contractor(const AlgebraSpec& spec, const RVec& e) : spec_(spec), e_(e), r_(spec.cw.rank()), l_(spec.cw.n_roots()) {
    comm_.resize(l_ * l_);
    for (int j = 0; j < l_; ++j)
      for (int i = 0; i < l_; ++i)
        comm_[j * l_ + i] = cw_coordinates(spec, bracket(spec, spec.cw.raising[j], spec.cw.raising[i].conjugate()));
    RVec rho = RVec::Zero(r_);
    for (const auto& a : spec.cw.roots) rho += a;
    rho_ = rho;
    for (const auto& a : spec.cw.roots) max_rise_ = std::max(max_rise_, rho.dot(a));
  }

  Poly apply(const CVec& x, const Poly& in, int remaining) {
    Poly out;
    for (const auto& [mono, c] : in) {
      RVec wt = e_;
      for (int i : mono) wt -= spec_.cw.roots[i];
      cplx hv = 0;
      for (int k = 0; k < r_; ++k) hv += x[k] * wt[k];
      if (hv != cplx(0, 0)) out[mono] += c * hv;
      for (int j = 0; j < l_; ++j) {
        const cplx lo = x[r_ + l_ + j];
        if (lo != cplx(0, 0) && reachable(mono, j, remaining)) {
          Monomial m = mono;
          m.insert(m.begin(), j);
          out[m] += c * lo;
        }
        const cplx up = x[r_ + j];
        if (up != cplx(0, 0) && !mono.empty())
          for (const auto& [m2, c2] : raise(j, mono)) out[m2] += c * up * c2;
      }
    }
    for (auto it = out.begin(); it != out.end();) it = (std::abs(it->second) < 1e-300) ? out.erase(it) : std::next(it);
    return out;
  }

 private:
  // a monomial deeper than the remaining operators can raise never returns to |HW>
  bool reachable(const Monomial& mono, int extra, int remaining) const {
    double depth = rho_.dot(spec_.cw.roots[extra]);
    for (int i : mono) depth += rho_.dot(spec_.cw.roots[i]);
    return depth <= remaining * max_rise_ + 1e-9;
  }

  // E_j applied to mono|HW>: E_j E_-i R = [E_j, E_-i] R + E_-i E_j R
  const Poly& raise(int j, const Monomial& mono) {
    auto key = std::make_pair(j, mono);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Poly out;
    if (!mono.empty()) {
      const int i = mono.front();
      const Monomial rest(mono.begin() + 1, mono.end());
      const Poly base{{rest, 1.0}};
      out = apply(comm_[j * l_ + i], base, 1 << 20);
      for (const auto& [m, c] : raise(j, rest)) {
        Monomial mm = m;
        mm.insert(mm.begin(), i);
        out[mm] += c;
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  const AlgebraSpec& spec_;
  RVec e_;
  int r_, l_;
  std::vector<CVec> comm_;
  RVec rho_;
  double max_rise_ = 0.0;
  std::map<std::pair<int, Monomial>, Poly> memo_;
};

}  // namespace

GcsState make_gcs(const AlgebraSpec& spec, const std::vector<RVec>& factors) {
  if (spec.highest_weight.size() != spec.cw.rank() || spec.highest_weight_vector.size() == 0)
    throw std::invalid_argument("gcs: representation is not irreducible (no unique highest weight)");
  GcsState s;
  s.e = spec.highest_weight;
  s.u = GroupElement::identity(spec);
  for (const auto& z : factors) s.u = s.u.then(spec, z);
  return s;
}

cplx gcs_expectation_linear(const AlgebraSpec& spec, const GcsState& s, const CVec& w) {
  require_state(spec, s);
  const CVec x = cw_coordinates(spec, rotated(spec, s, w));
  cplx v = 0;
  for (int k = 0; k < spec.cw.rank(); ++k) v += x[k] * s.e[k];
  return v;
}

RVec gcs_expectations(const AlgebraSpec& spec, const GcsState& s) {
  require_state(spec, s);
  RVec out(spec.dim());
  for (int j = 0; j < spec.dim(); ++j) out[j] = gcs_expectation_linear(spec, s, CVec::Unit(spec.dim(), j)).real();
  return out;
}

cplx gcs_expectation_quadratic(const AlgebraSpec& spec, const GcsState& s, const CVec& w1, const CVec& w2) {
  require_state(spec, s);
  const int r = spec.cw.rank(), l = spec.cw.n_roots();
  const CVec x1 = cw_coordinates(spec, rotated(spec, s, w1));
  const CVec x2 = cw_coordinates(spec, rotated(spec, s, w2));
  // <h h'> = e e', <E_a E_-a> = alpha.e; every other pairing changes the weight
  cplx h1 = 0, h2 = 0;
  for (int k = 0; k < r; ++k) {
    h1 += x1[k] * s.e[k];
    h2 += x2[k] * s.e[k];
  }
  cplx v = h1 * h2;
  for (int j = 0; j < l; ++j) v += x1[r + j] * x2[r + l + j] * spec.cw.roots[j].dot(s.e);
  return v;
}

cplx gcs_expectation_higher(const AlgebraSpec& spec, const GcsState& s, const std::vector<CVec>& ops) {
  require_state(spec, s);
  const int p = static_cast<int>(ops.size());
  if (p < 1) throw std::invalid_argument("gcs: empty correlation request");
  if (p > kMaxCorrelationOrder) throw std::invalid_argument("gcs: correlation order above the supported maximum");
  Contractor c(spec, s.e);
  Poly state{{Monomial{}, 1.0}};
  for (int i = 0; i < p; ++i) {
    state = c.apply(cw_coordinates(spec, rotated(spec, s, ops[i])), state, p - i - 1);
    if (state.empty()) return 0.0;
  }
  const auto it = state.find(Monomial{});
  return it == state.end() ? cplx(0, 0) : it->second;
}

GcsState gcs_prepare_from_expectations(const AlgebraSpec& spec, const RVec& expectations, double tol) {
  if (expectations.size() != spec.dim()) throw std::invalid_argument("gcs: one expectation per basis element");
  GcsState hw = make_gcs(spec);
  const RMat ginv = spec.gram().inverse();
  const RVec x_hw = gcs_expectations(spec, hw);
  const double len_hw = x_hw.dot(ginv * x_hw);
  const double len = expectations.dot(ginv * expectations);
  if (len < len_hw * (1 - 1e-6) - tol) throw std::invalid_argument("gcs: expectations are not those of a coherent state");
  if (len > len_hw * (1 + 1e-6) + tol) throw std::invalid_argument("gcs: expectations exceed the coherent-state bound");
  const RVec hf = -(ginv * expectations);
  DiagonalizeOptions opt;
  opt.tol = 1e-24 * std::max(1.0, hf.squaredNorm());
  const DiagonalizationResult d = diagonalize(spec, hf, opt);
  GcsState out;
  out.e = hw.e;
  out.u = d.u;
  const RVec got = gcs_expectations(spec, out);
  if ((got - expectations).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("gcs: prepared state does not reproduce the expectations");
  return out;
}

double h_purity(const RVec& expectations, double k) { return k * expectations.squaredNorm(); }

}  // namespace qmb
