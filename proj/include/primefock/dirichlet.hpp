#pragma once

#include <map>
#include <vector>

#include "primefock/numtheory.hpp"
#include "primefock/report.hpp"
#include "primefock/state.hpp"

namespace primefock {

/// s = sigma + i t.
struct HalfPlanePoint {
  double sigma = 2.0;
  double t = 0.0;

  Complex value() const { return {sigma, t}; }
  HalfPlanePoint conj() const { return {sigma, -t}; }
  static HalfPlanePoint from(Complex s) { return {s.real(), s.imag()}; }
};

/// A truncated sum together with a rigorous bound on the omitted remainder.
struct ValueWithBound {
  Complex value;
  double tail_bound = 0.0;
};

/// Finitely supported map prime -> complex. Zero entries are never stored.
class SiteVector {
 public:
  SiteVector() = default;
  SiteVector(std::initializer_list<std::pair<const u64, Complex>> init);

  static SiteVector ones(const std::vector<u64>& primes);
  /// z_p = exp(2 pi i mu_p).
  static SiteVector phases(const std::map<u64, double>& mu);

  void set(u64 p, Complex z);
  Complex at(u64 p) const;
  bool contains(u64 p) const { return entries_.count(p) != 0; }
  const std::map<u64, Complex>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Entrywise |z_p|^(2 power).
  SiteVector abs_pow(unsigned power) const;
  /// Entrywise z_p^power.
  SiteVector pow(unsigned power) const;

 private:
  std::map<u64, Complex> entries_;
};

/// Site weights z_p over all primes: listed values, with every other prime
/// either at 1 (the plain coherent state) or at 0 (finite support).
struct SiteWeights {
  SiteVector values;
  bool unit_elsewhere = true;

  static SiteWeights unit() { return {}; }
  static SiteWeights unit_with(SiteVector overrides) { return {std::move(overrides), true}; }
  static SiteWeights finite(SiteVector values) { return {std::move(values), false}; }

  Complex at(u64 p) const {
    if (values.contains(p)) return values.at(p);
    return unit_elsewhere ? Complex{1.0} : Complex{};
  }
  /// prod_p z_p^{a_p(k)}
  Complex monomial(const FactoredInt& k) const;
};

/// k^{-s} evaluated as exp(-s log k).
Complex pow_neg(u64 k, Complex s);

inline constexpr u64 kDefaultPrimeCutoff = 10'000'000;

/// Primes up to `limit`, memoized for the default cutoff.
const std::vector<u64>& cached_primes(u64 limit = kDefaultPrimeCutoff);

/// P_1(s) = sum_{p <= cutoff} p^{-s} with tail bound cutoff^{1-sigma}/(sigma-1).
/// Throws std::domain_error for sigma <= 1.
ValueWithBound prime_zeta(HalfPlanePoint s, u64 prime_cutoff = kDefaultPrimeCutoff);

/// sum_p p^{-s} z_p over the (finite) support of z.
Complex prime_zeta_weighted(Complex s, const SiteVector& z);

/// sum_p p^{-s} z_p over all primes. For a unit background this is
/// P_1(s) + sum over listed primes of (z_p - 1) p^{-s} and needs Re s > 1.
ValueWithBound prime_zeta_weighted(Complex s, const SiteWeights& z,
                                   u64 prime_cutoff = kDefaultPrimeCutoff);

/// P_n(s) = sum over basis elements with Omega(k) = n of k^{-s}. The tail
/// bound covers every integer with Omega = n above the largest K for which
/// the basis holds all such integers.
ValueWithBound p_n(unsigned n, HalfPlanePoint s, const FockBasis& basis);

/// P_n(s, z) = sum_{Omega(k)=n} k^{-s} prod z_p^{a_p(k)} over all integers,
/// from the power sums P_1(js, z^j) through Newton's identities.
ValueWithBound p_n_generalized(unsigned n, HalfPlanePoint s, const SiteWeights& z,
                               u64 prime_cutoff = kDefaultPrimeCutoff);

/// Phi_v(s) = sum_k conj(v_k) / x_k * k^{-s}.
Complex phi_series(const FockVector& v, HalfPlanePoint s);

/// Checks sum_k k^{-2 sigma}/x_k^2 = exp(P_1(2 sigma)) and its Omega = n
/// slices P_1(2 sigma)^n / n! against rigorous truncation bounds.
///
/// The first report covers the full sum; one report per n = 0..omega_max
/// follows. Each tolerance is the computed truncation bound plus 1e-10.
std::vector<VerificationReport> verify_mass_identity(double sigma, const FockBasis& basis);

}  // namespace primefock
