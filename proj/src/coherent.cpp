#include "primefock/coherent.hpp"

#include <set>

#include "primefock/quadrature.hpp"
#include "primefock/summation.hpp"

namespace primefock {

namespace {

void require_half_plane(double sigma, const char* what) {
  if (!(sigma > 0.5))
    throw std::domain_error(std::string(what) + ": requires sigma > 1/2");
}

SiteWeights abs_squared(const SiteWeights& z) { return {z.values.abs_pow(1), z.unit_elsewhere}; }
SiteWeights abs_fourth(const SiteWeights& z) { return {z.values.abs_pow(2), z.unit_elsewhere}; }

/// Pointwise conj(a_p) b_p over all primes.
SiteWeights conj_product(const SiteWeights& a, const SiteWeights& b) {
  std::set<u64> primes;
  for (const auto& e : a.values.entries()) primes.insert(e.first);
  for (const auto& e : b.values.entries()) primes.insert(e.first);
  SiteVector v;
  for (u64 p : primes) v.set(p, std::conj(a.at(p)) * b.at(p));
  return {v, a.unit_elsewhere && b.unit_elsewhere};
}

double relative_gap(Complex a, Complex b, double scale) {
  const double d = std::abs(a - b);
  if (d == 0.0) return 0.0;
  return d / std::max({scale, std::abs(a), std::abs(b)});
}

/// A term c * prod w_p^{a_p} of the polynomial f_psi.
struct Monomial {
  FactoredInt k;
  Complex c;
};

Complex power(Complex w, unsigned a) {
  Complex r = 1.0;
  for (unsigned j = 0; j < a; ++j) r *= w;
  return r;
}

Complex weight_at(const std::map<u64, Complex>& w, u64 p) {
  auto it = w.find(p);
  return it == w.end() ? Complex{} : it->second;
}

/// Evaluates sum c prod w^a; `abs_sum` receives sum |c prod w^a|.
Complex evaluate(const std::vector<Monomial>& terms, const std::map<u64, Complex>& w,
                 double* abs_sum = nullptr) {
  ComplexSum acc;
  double total = 0.0;
  for (const auto& t : terms) {
    Complex m = t.c;
    for (const auto& [p, a] : t.k.exponents) m *= power(weight_at(w, p), a);
    acc.add(m);
    total += std::abs(m);
  }
  if (abs_sum) *abs_sum = total;
  return acc.value();
}

/// d/dw_p of sum c prod w^a.
Complex differentiate(const std::vector<Monomial>& terms, const std::map<u64, Complex>& w, u64 p,
                      double* abs_sum) {
  ComplexSum acc;
  double total = 0.0;
  for (const auto& t : terms) {
    const unsigned ap = t.k.exponent(p);
    if (ap == 0) continue;
    Complex m = t.c * static_cast<double>(ap);
    for (const auto& [q, a] : t.k.exponents) m *= power(weight_at(w, q), q == p ? a - 1 : a);
    acc.add(m);
    total += std::abs(m);
  }
  *abs_sum = total;
  return acc.value();
}

/// Coefficients of f_psi: psi_k k^{-s*} / x_k.
std::vector<Monomial> f_terms(const std::vector<std::pair<FactoredInt, Complex>>& psi,
                              HalfPlanePoint s) {
  std::vector<Monomial> out;
  const Complex sc = s.conj().value();
  for (const auto& [k, a] : psi)
    if (a != Complex{}) out.push_back({k, a * pow_neg(k.value, sc) / k.x()});
  return out;
}

std::vector<std::pair<FactoredInt, Complex>> entries_of(const FockVector& v) {
  std::vector<std::pair<FactoredInt, Complex>> out;
  const auto& basis = v.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex a = v.amplitudes()[static_cast<Eigen::Index>(i)];
    if (a != Complex{}) out.emplace_back(basis[i], a);
  }
  return out;
}

std::map<u64, Complex> conj_weights(const SiteVector& z) {
  std::map<u64, Complex> w;
  for (const auto& [p, zp] : z.entries()) w[p] = std::conj(zp);
  return w;
}

}  // namespace

ValueWithBound ncs_log_norm(const NcsParams& params) {
  require_half_plane(params.s.sigma, "ncs");
  return prime_zeta_weighted(Complex(2.0 * params.s.sigma), abs_squared(params.z));
}

NcsState ncs_state(const NcsParams& params, const FockBasis& basis) {
  const double P = ncs_log_norm(params).value.real();
  const double scale = std::exp(-P / 2.0);
  const Complex s = params.s.value();
  FockVector v(basis);
  CompensatedSum mass;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FactoredInt& k = basis[i];
    const Complex a = scale * pow_neg(k.value, s) / k.x() * params.z.monomial(k);
    v.amplitudes()[static_cast<Eigen::Index>(i)] = a;
    mass.add(std::norm(a));
  }
  return {std::move(v), 1.0 - mass.value()};
}

Complex ncs_inner(const NcsParams& a, const NcsParams& b) {
  const double A = ncs_log_norm(a).value.real();
  const double B = ncs_log_norm(b).value.real();
  const Complex cross =
      prime_zeta_weighted(a.s.conj().value() + b.s.value(), conj_product(a.z, b.z)).value;
  return std::exp(-A / 2.0 - B / 2.0 + cross);
}

NumberMoments ncs_number_expectation(const NcsParams& params) {
  require_half_plane(params.s.sigma, "ncs_number_expectation");
  const ValueWithBound first = prime_zeta_weighted(Complex(2.0 * params.s.sigma), abs_squared(params.z));
  const ValueWithBound second = prime_zeta_weighted(Complex(4.0 * params.s.sigma), abs_fourth(params.z));
  NumberMoments m;
  m.mean = first.value.real();
  m.site_second_moment = first.value.real() + second.value.real();
  m.tail_bound = first.tail_bound + second.tail_bound;
  return m;
}

double particle_number_pmf(HalfPlanePoint s, unsigned n) {
  require_half_plane(s.sigma, "particle_number_pmf");
  const double V = prime_zeta({2.0 * s.sigma, 0.0}).value.real();
  if (n == 0) return std::exp(-V);
  return std::exp(-V + n * std::log(V) - std::lgamma(n + 1.0));
}

Complex ncs_eigenvalue(u64 n, const NcsParams& params) {
  const FactoredInt f = factorize(n);
  return pow_neg(n, params.s.value()) * params.z.monomial(f);
}

VerificationReport eigen_residual(u64 n, const NcsParams& params, const FockBasis& basis) {
  const NcsState st = ncs_state(params, basis);
  const Complex lambda = ncs_eigenvalue(n, params);
  FockVector diff = apply_annihilate(n, st.state);
  diff -= lambda * st.state;
  const double rm = std::max(st.residual_mass, 0.0);
  VerificationReport r("eigen_residual", diff.norm(), 3.0 * std::sqrt(rm) + 1e-10);
  r.param("n", static_cast<double>(n)).param("sigma", params.s.sigma).param("t", params.s.t);
  r.diag("residual_mass", st.residual_mass);
  r.diag("eigenvalue_re", lambda.real()).diag("eigenvalue_im", lambda.imag());
  return r;
}

QuadratureVariances quadrature_variances(u64 p, const FockVector& v) {
  const double nrm = v.norm();
  if (nrm == 0.0) throw std::invalid_argument("quadrature_variances: zero vector");
  FockVector u = v;
  u *= 1.0 / nrm;
  const FockVector a1 = apply_annihilate(p, u);
  const FockVector a2 = apply_annihilate(p, a1);
  const Complex ea = u.dot(a1);
  const Complex ea2 = u.dot(a2);
  const double en = a1.squared_norm();
  QuadratureVariances q;
  q.var_x = 0.5 + en + ea2.real() - 2.0 * ea.real() * ea.real();
  q.var_p = 0.5 + en - ea2.real() - 2.0 * ea.imag() * ea.imag();
  q.residual_mass = 1.0 - v.squared_norm();
  return q;
}

QuadratureVariances quadrature_variances(u64 p, HalfPlanePoint s, const FockBasis& basis) {
  const NcsState st = ncs_state({s}, basis);
  QuadratureVariances q = quadrature_variances(p, st.state);
  q.residual_mass = st.residual_mass;
  return q;
}

Complex f_representation(const FockVector& psi, HalfPlanePoint s, const SiteVector& z) {
  return evaluate(f_terms(entries_of(psi), s), conj_weights(z));
}

VerificationReport derivative_check(u64 p, const FockVector& psi, HalfPlanePoint s,
                                    const SiteVector& z) {
  constexpr double kStep = 1e-5;
  const auto w = conj_weights(z);
  const auto terms = f_terms(entries_of(psi), s);
  const Complex p_pos = 1.0 / pow_neg(p, s.conj().value());  // p^{s*}
  const Complex p_neg = pow_neg(p, s.conj().value());        // p^{-s*}

  // Annihilation side.
  double abs_lowered = 0.0, abs_deriv = 0.0, abs_f = 0.0;
  const Complex lowered = evaluate(f_terms(entries_of(apply_annihilate(p, psi)), s), w, &abs_lowered);
  const Complex analytic = p_pos * differentiate(terms, w, p, &abs_deriv);
  auto shifted = [&](double h) {
    auto wh = w;
    wh[p] = weight_at(w, p) + h;
    return evaluate(terms, wh);
  };
  const Complex fd = p_pos * (shifted(kStep) - shifted(-kStep)) / (2.0 * kStep);
  const double scale_a = std::max(abs_lowered, std::abs(p_pos) * abs_deriv);
  const double dev_analytic = relative_gap(lowered, analytic, scale_a);
  const double dev_fd = relative_gap(lowered, fd, scale_a);

  // Creation side, evaluated without a basis so nothing is truncated.
  std::vector<std::pair<FactoredInt, Complex>> raised;
  for (const auto& [k, a] : entries_of(psi)) {
    ExponentList e = k.exponents;
    auto it = std::find_if(e.begin(), e.end(), [p](const auto& x) { return x.first == p; });
    const unsigned ap = k.exponent(p);
    if (it == e.end())
      e.emplace_back(p, 1);
    else
      ++it->second;
    raised.emplace_back(from_exponents(std::move(e)), a * std::sqrt(ap + 1.0));
  }
  double abs_raised = 0.0;
  const Complex lhs_c = evaluate(f_terms(raised, s), w, &abs_raised);
  const Complex rhs_c = p_neg * weight_at(w, p) * evaluate(terms, w, &abs_f);
  const double dev_create =
      relative_gap(lhs_c, rhs_c, std::max(abs_raised, std::abs(p_neg * weight_at(w, p)) * abs_f));

  VerificationReport r("derivative_check", std::max({dev_analytic, dev_fd, dev_create}), 1e-7);
  r.param("p", static_cast<double>(p)).param("sigma", s.sigma).param("t", s.t);
  r.diag("analytic_relative", dev_analytic).diag("finite_difference_relative", dev_fd);
  r.diag("creation_relative", dev_create).diag("fd_step", kStep);
  return r;
}

VerificationReport resolution_identity_check(HalfPlanePoint s, const QuadratureSpec& quad,
                                             const FockBasis& basis) {
  require_half_plane(s.sigma, "resolution_identity_check");
  if (quad.radial_order < quad.occupation_cap + 1)
    throw std::invalid_argument(
        "resolution_identity_check: radial_order must be >= occupation_cap + 1, the rule would "
        "be inexact");
  const std::vector<u64> support = quad.prime_support.empty() ? basis.primes() : quad.prime_support;
  const auto rule = gauss_laguerre<double>(quad.radial_order);

  // Radial factor int_0^inf e^{-p^{-2 sigma} r^2} (p^{-sigma} r)^{2a}/a! 2 p^{-2 sigma} r dr,
  // integrated in u = p^{-2 sigma} r^2 so the rule carries e^{-u} du.
  std::map<std::pair<u64, unsigned>, double> factor;
  double factor_dev = 0.0;
  for (u64 p : support) {
    const double ps = std::pow(static_cast<double>(p), s.sigma);
    for (unsigned a = 0; a <= quad.occupation_cap; ++a) {
      CompensatedSum acc;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = ps * std::sqrt(rule.nodes[i]);
        acc.add(rule.weights[i] * std::pow(r / ps, 2.0 * a) / std::tgamma(a + 1.0));
      }
      factor[{p, a}] = acc.value();
      factor_dev = std::max(factor_dev, std::abs(acc.value() - 1.0));
    }
  }

  std::vector<const FactoredInt*> subset;
  const std::set<u64> sup(support.begin(), support.end());
  for (const auto& k : basis.elements()) {
    const bool ok = std::all_of(k.exponents.begin(), k.exponents.end(), [&](const auto& e) {
      return sup.count(e.first) && e.second <= quad.occupation_cap;
    });
    if (!ok) continue;
    subset.push_back(&k);
    if (quad.subset && subset.size() == quad.subset) break;
  }

  auto radial = [&](const FactoredInt& k) {
    double v = 1.0;
    for (u64 p : support) v *= factor.at({p, k.exponent(p)});
    return v;
  };
  // Phase integral over each mu_p: 1 when exponents agree, 0 otherwise.
  auto phase = [&](const FactoredInt& k, const FactoredInt& l) {
    for (u64 p : support)
      if (k.exponent(p) != l.exponent(p)) return 0.0;
    return 1.0;
  };

  double diag_dev = 0.0, off_dev = 0.0;
  for (const FactoredInt* k : subset) {
    for (const FactoredInt* l : subset) {
      const double v = phase(*k, *l) * (k == l ? radial(*k) : std::sqrt(radial(*k) * radial(*l)));
      if (k == l)
        diag_dev = std::max(diag_dev, std::abs(v - 1.0));
      else
        off_dev = std::max(off_dev, std::abs(v));
    }
  }

  VerificationReport r("resolution_identity", std::max({factor_dev, diag_dev, off_dev}), 1e-12);
  r.param("sigma", s.sigma).param("radial_order", quad.radial_order);
  r.param("occupation_cap", quad.occupation_cap);
  r.diag("radial_factor_max_dev", factor_dev).diag("diagonal_max_dev", diag_dev);
  r.diag("off_diagonal_max", off_dev).diag("subset_size", static_cast<double>(subset.size()));
  r.diag("primes", static_cast<double>(support.size()));
  return r;
}

VerificationReport dirichlet_eigen_check(const DirichletCoefficients& f, HalfPlanePoint s_prime,
                                         const NcsParams& params, const FockBasis& basis) {
  const NcsState st = ncs_state(params, basis);
  const SparseOperator F = assemble_operator(ops::F{s_prime, f}, basis);
  ComplexSum eig;
  double weight = 0.0;
  const Complex total = params.s.value() + s_prime.value();
  for (const auto& [n, fn] : f.entries()) {
    eig.add(fn * pow_neg(n, total) * params.z.monomial(factorize(n)));
    weight += std::abs(fn * pow_neg(n, s_prime.value()));
  }
  FockVector diff = F.apply(st.state);
  diff -= eig.value() * st.state;
  const double rm = std::max(st.residual_mass, 0.0);
  VerificationReport r("dirichlet_eigen", diff.norm(), 3.0 * weight * std::sqrt(rm) + 1e-10);
  r.param("sigma", params.s.sigma).param("t", params.s.t);
  r.param("sigma_prime", s_prime.sigma).param("t_prime", s_prime.t);
  r.diag("eigenvalue_re", eig.value().real()).diag("eigenvalue_im", eig.value().imag());
  r.diag("residual_mass", st.residual_mass);
  return r;
}

VerificationReport dirichlet_ring_check(const DirichletCoefficients& f,
                                        const DirichletCoefficients& g, HalfPlanePoint s,
                                        const FockBasis& basis) {
  const DirichletCoefficients h = dirichlet_convolve(f, g);
  const SparseMatrix F = assemble_operator(ops::F{s, f}, basis).matrix;
  const SparseMatrix G = assemble_operator(ops::F{s, g}, basis).matrix;
  const SparseMatrix H = assemble_operator(ops::F{s, h}, basis).matrix;
  const auto cols = interior_columns(basis);
  const double fg = max_abs_on_columns(SparseMatrix(F * G) - H, cols);
  const double gf = max_abs_on_columns(SparseMatrix(G * F) - H, cols);
  VerificationReport r("dirichlet_ring", std::max(fg, gf), 1e-12);
  r.param("sigma", s.sigma).param("t", s.t);
  r.diag("FG_minus_H", fg).diag("GF_minus_H", gf);
  r.diag("support_f", static_cast<double>(f.size())).diag("support_g", static_cast<double>(g.size()));
  return r;
}

}  // namespace primefock
