#include <doctest.h>

#include "oracles.hpp"
#include "primefock/dirichlet.hpp"

using namespace primefock;

TEST_CASE("prime_zeta at s = 2") {
  const ValueWithBound v = prime_zeta({2.0, 0.0}, 1'000'000);
  CHECK(v.tail_bound <= 1e-6);
  CHECK(v.value.imag() == 0.0);
  // Reference sum over twenty times as many primes.
  const double ref = static_cast<double>(oracle::prime_sum(2.0, 20'000'000));
  CHECK(std::abs(v.value.real() - ref) <= v.tail_bound);
  CHECK(v.value.real() == doctest::Approx(0.4522474200).epsilon(1e-7));
}

TEST_CASE("prime_zeta at s = 4") {
  const ValueWithBound v = prime_zeta({4.0, 0.0}, 1000);
  CHECK(v.tail_bound <= 3.4e-9);
  const double ref = static_cast<double>(oracle::prime_sum(4.0, 1000));
  CHECK(v.value.real() == doctest::Approx(ref).epsilon(1e-14));
  CHECK(v.value.real() == doctest::Approx(0.0769931).epsilon(1e-6));
}

TEST_CASE("prime_zeta refuses the divergent region") {
  CHECK_THROWS_AS(prime_zeta({1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(prime_zeta({0.7, 3.0}), std::domain_error);
}

TEST_CASE("prime_zeta complex argument") {
  const HalfPlanePoint s{1.7, 2.5};
  const ValueWithBound v = prime_zeta(s, 100000);
  Complex ref{};
  for (u64 p : oracle::primes_by_trial(100000))
    ref += std::exp(-Complex(1.7, 2.5) * std::log(static_cast<double>(p)));
  CHECK(std::abs(v.value - ref) < 1e-12);
}

TEST_CASE("prime_zeta_weighted") {
  CHECK(std::abs(prime_zeta_weighted(Complex(2.0), SiteVector{{2, {1.0, 1.0}}}) -
                 Complex(0.25, 0.25)) < 1e-16);
  const SiteVector z{{2, 2.0}, {3, 3.0}};
  CHECK(prime_zeta_weighted(Complex(2.0), z.abs_pow(1)).real() == doctest::Approx(2.0));

  const HalfPlanePoint s{1.4, 0.0};
  const auto primes = sieve_primes(1000);
  const Complex ones = prime_zeta_weighted(Complex(2.8), SiteVector::ones(primes));
  CHECK(ones.real() == doctest::Approx(prime_zeta({2.8, 0.0}, 1000).value.real()).epsilon(1e-14));

  // Unit background with one override adds (z_2 - 1) 2^{-s}.
  const ValueWithBound w = prime_zeta_weighted(s.value(), SiteWeights::unit_with({{2, 3.0}}));
  CHECK(w.value.real() ==
        doctest::Approx(prime_zeta(s).value.real() + 2.0 * std::pow(2.0, -1.4)).epsilon(1e-14));
}

TEST_CASE("p_n over a basis") {
  TruncationSpec t;
  t.p_max = 13;
  t.a_max = 3;
  t.omega_max = 3;
  const FockBasis b(t);
  const HalfPlanePoint s{3.0, 0.0};
  long double ref = 0.0L;
  for (const auto& k : b.elements())
    if (oracle::big_omega(k.value) == 3) ref += std::pow(static_cast<long double>(k.value), -3.0L);
  CHECK(p_n(3, s, b).value.real() == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));

  CHECK(p_n(1, s, b).value.real() ==
        doctest::Approx(prime_zeta(s, 13).value.real()).epsilon(1e-14));
  CHECK_THROWS_AS(p_n(4, s, b), std::invalid_argument);
  CHECK_THROWS_AS(p_n(1, {1.0, 0.0}, b), std::domain_error);
}

TEST_CASE("P_2 identity from the basis") {
  TruncationSpec t;
  t.p_max = 1000;
  t.a_max = 2;
  t.omega_max = 2;
  t.k_max = 1'000'000;
  const FockBasis b(t);
  const HalfPlanePoint s{2.4, 0.0};
  const ValueWithBound p2 = p_n(2, s, b);
  const ValueWithBound p1 = prime_zeta(s);
  const ValueWithBound p1d = prime_zeta({4.8, 0.0});
  const double closed = 0.5 * (std::norm(p1.value) + p1d.value.real());
  const double tol = p2.tail_bound + std::abs(p1.value) * p1.tail_bound + p1d.tail_bound + 1e-10;
  CHECK(std::abs(p2.value.real() - closed) <= tol);
}

TEST_CASE("p_n_generalized") {
  const HalfPlanePoint s{1.6, 0.3};
  const ValueWithBound one = p_n_generalized(1, s, SiteWeights::unit());
  CHECK(std::abs(one.value - prime_zeta(s).value) < 1e-14);

  // Finite support: compare with an explicit sum over Omega = 2 products.
  const SiteVector z{{2, {0.5, 1.0}}, {3, -2.0}, {7, {0.0, 0.25}}};
  Complex ref{};
  const std::vector<u64> ps{2, 3, 7};
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i; j < ps.size(); ++j)
      ref += std::exp(-s.value() * std::log(static_cast<double>(ps[i] * ps[j]))) * z.at(ps[i]) *
             z.at(ps[j]);
  const ValueWithBound two = p_n_generalized(2, s, SiteWeights::finite(z));
  CHECK(std::abs(two.value - ref) < 1e-14);
  CHECK(two.tail_bound == 0.0);
}

TEST_CASE("phi_series") {
  TruncationSpec t;
  const FockBasis b(t);
  const HalfPlanePoint s{0.9, 1.1};
  CHECK(std::abs(phi_series(FockVector::basis_state(b, 1), s) - 1.0) < 1e-15);

  FockVector v(b);
  v.set(2, 1.0);
  v.set(4, 1.0);
  const Complex expected = pow_neg(2, s.value()) + pow_neg(4, s.value()) / std::sqrt(2.0);
  CHECK(std::abs(phi_series(v, s) - expected) < 1e-15);
}

TEST_CASE("verify_mass_identity") {
  TruncationSpec t;
  t.p_max = 101;
  t.a_max = 4;
  t.omega_max = 4;
  const FockBasis b(t);
  for (double sigma : {0.8, 1.0, 3.0}) {
    const auto reports = verify_mass_identity(sigma, b);
    REQUIRE(reports.size() == 6);
    for (const auto& r : reports) CHECK_MESSAGE(r.pass, r.check, " sigma=", sigma);
  }
  CHECK(verify_mass_identity(3.0, b).front().residual < 1e-8);
  // The Omega = 0 slice is the vacuum alone.
  CHECK(verify_mass_identity(1.0, b)[1].residual == 0.0);
  CHECK_THROWS_AS(verify_mass_identity(0.5, b), std::domain_error);
}
