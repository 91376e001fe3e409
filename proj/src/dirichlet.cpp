#include "primefock/dirichlet.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <tuple>

#include "primefock/summation.hpp"

namespace primefock {

namespace {

void require_convergent(double sigma, const char* what) {
  if (!(sigma > 1.0))
    throw std::domain_error(std::string(what) +
                            ": series diverges for Re s <= 1 (requires sigma > 1)");
}

double integral_tail(double cutoff, double sigma) {
  return std::pow(cutoff, 1.0 - sigma) / (sigma - 1.0);
}

}  // namespace

Complex pow_neg(u64 k, Complex s) {
  if (k == 1) return {1.0, 0.0};
  return std::exp(-s * std::log(static_cast<double>(k)));
}

SiteVector::SiteVector(std::initializer_list<std::pair<const u64, Complex>> init) {
  for (const auto& [p, z] : init) set(p, z);
}

SiteVector SiteVector::ones(const std::vector<u64>& primes) {
  SiteVector v;
  for (u64 p : primes) v.set(p, 1.0);
  return v;
}

SiteVector SiteVector::phases(const std::map<u64, double>& mu) {
  SiteVector v;
  for (const auto& [p, m] : mu) v.set(p, std::polar(1.0, 2.0 * std::numbers::pi * m));
  return v;
}

void SiteVector::set(u64 p, Complex z) {
  if (z == Complex{})
    entries_.erase(p);
  else
    entries_[p] = z;
}

Complex SiteVector::at(u64 p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? Complex{} : it->second;
}

SiteVector SiteVector::abs_pow(unsigned power) const {
  SiteVector out;
  for (const auto& [p, z] : entries_) out.set(p, std::pow(std::norm(z), power));
  return out;
}

SiteVector SiteVector::pow(unsigned power) const {
  SiteVector out;
  for (const auto& [p, z] : entries_) {
    Complex r = 1.0;
    for (unsigned j = 0; j < power; ++j) r *= z;
    out.set(p, r);
  }
  return out;
}

Complex SiteWeights::monomial(const FactoredInt& k) const {
  Complex r = 1.0;
  for (const auto& [p, a] : k.exponents) {
    const Complex z = at(p);
    for (unsigned j = 0; j < a; ++j) r *= z;
  }
  return r;
}

const std::vector<u64>& cached_primes(u64 limit) {
  static std::once_flag once;
  static std::vector<u64> primes;
  if (limit <= kDefaultPrimeCutoff) {
    std::call_once(once, [] { primes = sieve_primes(kDefaultPrimeCutoff); });
    return primes;
  }
  static std::mutex mu;
  static std::map<u64, std::vector<u64>> larger;
  std::lock_guard lock(mu);
  auto it = larger.find(limit);
  if (it == larger.end()) it = larger.emplace(limit, sieve_primes(limit)).first;
  return it->second;
}

ValueWithBound prime_zeta(HalfPlanePoint s, u64 prime_cutoff) {
  require_convergent(s.sigma, "prime_zeta");
  if (prime_cutoff < 2) throw std::invalid_argument("prime_zeta: cutoff must be >= 2");

  using Key = std::tuple<double, double, u64>;
  static std::mutex mu;
  static std::map<Key, ValueWithBound> memo;
  const Key key{s.sigma, s.t, prime_cutoff};
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }

  const auto& primes = cached_primes(prime_cutoff);
  ComplexSum acc;
  const Complex sv = s.value();
  for (u64 p : primes) {
    if (p > prime_cutoff) break;
    acc.add(pow_neg(p, sv));
  }
  ValueWithBound out{acc.value(), integral_tail(static_cast<double>(prime_cutoff), s.sigma)};

  std::lock_guard lock(mu);
  memo.emplace(key, out);
  return out;
}

Complex prime_zeta_weighted(Complex s, const SiteVector& z) {
  ComplexSum acc;
  for (const auto& [p, zp] : z.entries()) acc.add(pow_neg(p, s) * zp);
  return acc.value();
}

ValueWithBound prime_zeta_weighted(Complex s, const SiteWeights& z, u64 prime_cutoff) {
  if (!z.unit_elsewhere) return {prime_zeta_weighted(s, z.values), 0.0};
  ValueWithBound base = prime_zeta(HalfPlanePoint::from(s), prime_cutoff);
  ComplexSum acc;
  acc.add(base.value);
  for (const auto& [p, zp] : z.values.entries()) acc.add(pow_neg(p, s) * (zp - 1.0));
  return {acc.value(), base.tail_bound};
}

ValueWithBound p_n(unsigned n, HalfPlanePoint s, const FockBasis& basis) {
  require_convergent(s.sigma, "p_n");
  if (n == 0) throw std::invalid_argument("p_n: order must be >= 1");
  if (basis.spec().omega_max < n)
    throw std::invalid_argument("p_n: basis omega_max must be >= n");
  ComplexSum acc;
  const Complex sv = s.value();
  for (const auto& k : basis.elements())
    if (k.big_omega == n) acc.add(pow_neg(k.value, sv));
  const u64 complete = basis.complete_up_to(n);
  return {acc.value(), integral_tail(static_cast<double>(std::max<u64>(complete, 1)), s.sigma)};
}

ValueWithBound p_n_generalized(unsigned n, HalfPlanePoint s, const SiteWeights& z,
                               u64 prime_cutoff) {
  if (z.unit_elsewhere) require_convergent(s.sigma, "p_n_generalized");
  std::vector<Complex> h(n + 1), power_sum(n + 1);
  std::vector<double> eh(n + 1, 0.0), ep(n + 1, 0.0);
  for (unsigned j = 1; j <= n; ++j) {
    const SiteWeights zj{z.values.pow(j), z.unit_elsewhere};
    const ValueWithBound pj = prime_zeta_weighted(static_cast<double>(j) * s.value(), zj,
                                                  prime_cutoff);
    power_sum[j] = pj.value;
    ep[j] = pj.tail_bound;
  }
  h[0] = 1.0;
  for (unsigned m = 1; m <= n; ++m) {
    Complex acc = 0.0;
    double err = 0.0;
    for (unsigned j = 1; j <= m; ++j) {
      acc += power_sum[j] * h[m - j];
      err += ep[j] * (std::abs(h[m - j]) + eh[m - j]) + std::abs(power_sum[j]) * eh[m - j];
    }
    h[m] = acc / static_cast<double>(m);
    eh[m] = err / m;
  }
  return {h[n], eh[n]};
}

Complex phi_series(const FockVector& v, HalfPlanePoint s) {
  ComplexSum acc;
  const Complex sv = s.value();
  const auto& basis = v.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex a = v.amplitudes()[static_cast<Eigen::Index>(i)];
    if (a == Complex{}) continue;
    acc.add(std::conj(a) / basis[i].x() * pow_neg(basis[i].value, sv));
  }
  return acc.value();
}

std::vector<VerificationReport> verify_mass_identity(double sigma, const FockBasis& basis) {
  if (!(sigma > 0.5))
    throw std::domain_error("verify_mass_identity: requires sigma > 1/2");
  constexpr double kSlack = 1e-10;
  const auto& spec = basis.spec();
  const unsigned omega = spec.omega_max;

  const ValueWithBound full = prime_zeta({2.0 * sigma, 0.0});
  const double V = full.value.real();
  // Primes above p_max contribute at most sum_{m > p_max} m^{-2 sigma}.
  const double prime_tail =
      std::pow(static_cast<double>(spec.p_max), 1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);

  std::vector<double> y;
  double Y = 0.0;
  for (u64 p : basis.primes()) {
    y.push_back(std::pow(static_cast<double>(p), -2.0 * sigma));
    Y += y.back();
  }

  std::vector<CompensatedSum> slice(omega + 1);
  for (const auto& k : basis.elements())
    slice[k.big_omega].add(std::pow(static_cast<double>(k.value), -2.0 * sigma) /
                           static_cast<double>(k.x_squared));

  auto factorial = [](unsigned n) { return std::tgamma(n + 1.0); };

  // Mass with some exponent above a_max, union bound over primes.
  auto occupation_loss = [&](unsigned n) {
    double loss = 0.0;
    for (double yp : y)
      for (unsigned a = spec.a_max + 1; a <= n; ++a)
        loss += std::pow(yp, a) / factorial(a) * std::pow(Y, n - a) / factorial(n - a);
    return loss;
  };
  const double kmax_loss =
      spec.k_max ? std::pow(static_cast<double>(*spec.k_max), 1.0 - 2.0 * sigma) /
                       (2.0 * sigma - 1.0)
                 : 0.0;

  std::vector<VerificationReport> slices;
  double total = 0.0, restricted_total = 0.0, occupation_total = 0.0;
  for (unsigned n = 0; n <= omega; ++n) {
    const double s_n = slice[n].value();
    const double target = std::pow(V, n) / factorial(n);
    const double restricted = std::pow(Y, n) / factorial(n);
    const double occ = occupation_loss(n);
    const double bound =
        (std::pow(Y + prime_tail, n) - std::pow(Y, n)) / factorial(n) + occ + kmax_loss + kSlack;
    VerificationReport r("mass_identity_slice", std::abs(s_n - target), bound);
    r.param("sigma", sigma).param("n", n);
    r.diag("sum", s_n).diag("closed_form", target).diag("restricted_residual",
                                                        std::abs(s_n - restricted));
    slices.push_back(std::move(r));
    total += s_n;
    restricted_total += restricted;
    occupation_total += occ;
  }

  const double target = std::exp(V);
  const double bound =
      std::exp(Y + prime_tail) - restricted_total + occupation_total + kmax_loss + kSlack;
  VerificationReport report("mass_identity", std::abs(total - target), bound);
  report.param("sigma", sigma)
      .param("p_max", spec.p_max)
      .param("a_max", spec.a_max)
      .param("omega_max", spec.omega_max);
  report.diag("sum", total)
      .diag("closed_form", target)
      .diag("prime_zeta_2sigma", V)
      .diag("prime_zeta_tail_bound", full.tail_bound)
      .diag("basis_prime_mass", Y);
  slices.insert(slices.begin(), std::move(report));
  return slices;
}

}  // namespace primefock
