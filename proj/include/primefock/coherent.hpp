#pragma once

#include <vector>

#include "primefock/dirichlet.hpp"
#include "primefock/fock.hpp"
#include "primefock/report.hpp"
#include "primefock/state.hpp"

namespace primefock {

/// Parameters of |s, z>. The default weights (z_p = 1 everywhere) give the plain |s>;
/// pure phases z_p = exp(2 pi i mu_p) give U_mu |s>.
struct NcsParams {
  HalfPlanePoint s;
  SiteWeights z = SiteWeights::unit();
};

/// log of the normalizer: P(2 sigma, |z|^2) = sum_p p^{-2 sigma} |z_p|^2.
ValueWithBound ncs_log_norm(const NcsParams& params);

/// Truncated |s, z> and the probability weight it misses.
struct NcsState {
  FockVector state;
  double residual_mass = 0.0;
};

/// Throws std::domain_error for sigma <= 1/2.
NcsState ncs_state(const NcsParams& params, const FockBasis& basis);

/// <a|b> in closed form.
Complex ncs_inner(const NcsParams& a, const NcsParams& b);

struct NumberMoments {
  double mean = 0.0;                // <N>
  double site_second_moment = 0.0;  // sum_p <N_p^2>
  double tail_bound = 0.0;
};

NumberMoments ncs_number_expectation(const NcsParams& params);

/// exp(-P_1(2 sigma)) P_1(2 sigma)^n / n!.
double particle_number_pmf(HalfPlanePoint s, unsigned n);

/// || a_n v - n^{-s} prod z_p^{a_p(n)} v || on the truncated state; the
/// tolerance is 3 sqrt(residual_mass) + 1e-10.
VerificationReport eigen_residual(u64 n, const NcsParams& params, const FockBasis& basis);

/// n^{-s} prod_p z_p^{a_p(n)}.
Complex ncs_eigenvalue(u64 n, const NcsParams& params);

struct QuadratureVariances {
  double var_x = 0.0;
  double var_p = 0.0;
  double residual_mass = 0.0;
};

/// Variances of X_p and P_p in a normalized vector, from <a_p>, <a_p^2> and <N_p>.
QuadratureVariances quadrature_variances(u64 p, const FockVector& v);
/// Same, for the truncated |s>.
QuadratureVariances quadrature_variances(u64 p, HalfPlanePoint s, const FockBasis& basis);

/// f_psi(s*, z*) = sum_k psi_k k^{-s*} prod conj(z_p)^{a_p(k)} / x_k. Primes missing
/// from z carry z_p = 0.
Complex f_representation(const FockVector& psi, HalfPlanePoint s, const SiteVector& z);

/// Checks f_{a_p psi} = p^{s*} d/dz_p* f_psi (analytic and by central differences)
/// and f_{a_p^dagger psi} = p^{-s*} z_p* f_psi. Relative tolerance 1e-7.
VerificationReport derivative_check(u64 p, const FockVector& psi, HalfPlanePoint s,
                                    const SiteVector& z);

struct QuadratureSpec {
  unsigned radial_order = 8;
  std::vector<u64> prime_support;
  unsigned occupation_cap = 4;
  /// Basis elements whose diagonal is reconstructed; 0 means all admissible ones.
  std::size_t subset = 50;
};

/// Per-(p, a) radial factors and reconstructed matrix elements of the resolution
/// of the identity. Throws std::invalid_argument when radial_order < occupation_cap + 1.
VerificationReport resolution_identity_check(HalfPlanePoint s, const QuadratureSpec& quad,
                                             const FockBasis& basis);

/// Checks F_{s'} |s, z> = (sum f(n) n^{-(s+s')} prod z^{a(n)}) |s, z> on the truncated state.
VerificationReport dirichlet_eigen_check(const DirichletCoefficients& f, HalfPlanePoint s_prime,
                                         const NcsParams& params, const FockBasis& basis);

/// Checks F_s G_s = H_s with h = f * g on interior columns.
VerificationReport dirichlet_ring_check(const DirichletCoefficients& f,
                                        const DirichletCoefficients& g, HalfPlanePoint s,
                                        const FockBasis& basis);

}  // namespace primefock
