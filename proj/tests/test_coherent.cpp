#include <doctest.h>

#include "oracles.hpp"
#include "primefock/coherent.hpp"

using namespace primefock;

namespace {

FockBasis basis_of(unsigned p_max, unsigned a_max, unsigned omega_max) {
  TruncationSpec t;
  t.p_max = p_max;
  t.a_max = a_max;
  t.omega_max = omega_max;
  return FockBasis(t);
}

}  // namespace

TEST_CASE("ncs_state amplitudes") {
  const FockBasis b = basis_of(97, 6, 6);
  const NcsState st = ncs_state({{3.0, 0.0}}, b);
  const double P6 = prime_zeta({6.0, 0.0}).value.real();
  CHECK(st.state.at(1).real() == doctest::Approx(std::exp(-P6 / 2.0)).epsilon(1e-15));
  CHECK(st.residual_mass < 1e-6);
  // <k|s> = e^{-P/2} k^{-s}/x_k
  CHECK(std::abs(st.state.at(12) - std::exp(-P6 / 2.0) * std::pow(12.0, -3.0) / std::sqrt(2.0)) <
        1e-16);

  const FockBasis small = basis_of(13, 4, 4);
  CHECK(std::abs(ncs_state({{20.0, 0.0}}, small).state.at(1)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(ncs_state({{0.5, 0.0}}, small), std::domain_error);
}

TEST_CASE("ncs_state phases only rotate amplitudes") {
  const FockBasis b = basis_of(13, 4, 4);
  const HalfPlanePoint s{1.4, 0.2};
  const NcsState plain = ncs_state({s}, b);
  const NcsState phased = ncs_state({s, SiteWeights::unit_with(SiteVector::phases({{2, 0.25}}))}, b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Complex phase = std::pow(Complex(0.0, 1.0), static_cast<int>(b[i].exponent(2)));
    CHECK(std::abs(phased.state.amplitudes()[idx] - phase * plain.state.amplitudes()[idx]) < 1e-15);
  }
  CHECK(phased.residual_mass == doctest::Approx(plain.residual_mass).epsilon(1e-12));
}

TEST_CASE("ncs_inner") {
  const NcsParams a{{1.3, 0.4}};
  CHECK(std::abs(ncs_inner(a, a) - 1.0) < 1e-14);

  const NcsParams c{{1.8, -0.3}};
  const double Pa = prime_zeta({2.6, 0.0}).value.real();
  const double Pc = prime_zeta({3.6, 0.0}).value.real();
  const Complex cross = prime_zeta({1.3 + 1.8, -0.4 - 0.3}).value;
  CHECK(std::abs(ncs_inner(a, c) - std::exp(-Pa / 2 - Pc / 2 + cross)) < 1e-14);

  // Truncated dot product.
  const FockBasis b = basis_of(31, 4, 4);
  const NcsState sa = ncs_state(a, b);
  const NcsState sc = ncs_state(c, b);
  const double tol = std::sqrt(sa.residual_mass) + std::sqrt(sc.residual_mass) + 1e-10;
  CHECK(std::abs(sa.state.dot(sc.state) - ncs_inner(a, c)) <= tol);
}

TEST_CASE("number expectation") {
  CHECK(ncs_number_expectation({{1.0, 0.0}}).mean == doctest::Approx(0.452247).epsilon(1e-6));
  const NcsParams boosted{{1.0, 0.0}, SiteWeights::unit_with({{2, 2.0}})};
  CHECK(ncs_number_expectation(boosted).mean ==
        doctest::Approx(prime_zeta({2.0, 0.0}).value.real() + 0.75).epsilon(1e-14));

  const FockBasis b = basis_of(31, 4, 4);
  const NcsParams p{{1.3, 0.0}};
  const NcsState st = ncs_state(p, b);
  const SparseOperator N = assemble_operator(ops::TotalNumber{}, b);
  const double truncated = st.state.dot(N.apply(st.state)).real();
  CHECK(std::abs(truncated - ncs_number_expectation(p).mean) <=
        3.0 * std::sqrt(st.residual_mass) + 1e-10);

  // Site second moment: <N_p^2> = y + y^2 with y = p^{-2 sigma}.
  const double y2 = std::pow(2.0, -2.6);
  const NcsParams one_site{{1.3, 0.0}, SiteWeights::finite({{2, 1.0}})};
  CHECK(ncs_number_expectation(one_site).site_second_moment == doctest::Approx(y2 + y2 * y2));
}

TEST_CASE("particle number distribution") {
  const HalfPlanePoint s{1.0, 0.0};
  CHECK(particle_number_pmf(s, 0) == doctest::Approx(std::exp(-0.4522474200)).epsilon(1e-8));
  double total = 0.0;
  for (unsigned n = 0; n <= 20; ++n) total += particle_number_pmf(s, n);
  CHECK(std::abs(total - 1.0) < 1e-12);

  const FockBasis b = basis_of(101, 4, 4);
  const NcsState st = ncs_state({s}, b);
  double gap = 0.0;
  for (unsigned n = 0; n <= 4; ++n) {
    double mass = 0.0;
    for (std::size_t i : b.block(n)) mass += std::norm(st.state.amplitudes()[static_cast<Eigen::Index>(i)]);
    CHECK(std::abs(mass - particle_number_pmf(s, n)) <= st.residual_mass);
    gap += std::abs(mass - particle_number_pmf(s, n));
  }
  CHECK(gap <= st.residual_mass + 1e-12);
}

TEST_CASE("eigen_residual") {
  const FockBasis b = basis_of(97, 6, 6);
  const VerificationReport r = eigen_residual(2, {{3.0, 0.0}}, b);
  CHECK(r.pass);
  CHECK(r.residual < 1e-6);
  CHECK(eigen_residual(1, {{3.0, 0.0}}, b).residual == 0.0);

  const NcsParams p{{1.2, 0.5}, SiteWeights::unit_with({{2, 2.0}, {3, Complex(0.0, 1.0)}})};
  const Complex expected = pow_neg(6, p.s.value()) * 2.0 * Complex(0.0, 1.0);
  CHECK(std::abs(ncs_eigenvalue(6, p) - expected) < 1e-15);
  const FockBasis small = basis_of(13, 4, 4);
  CHECK(eigen_residual(6, p, small).pass);
}

TEST_CASE("quadrature variances") {
  const FockBasis b = basis_of(13, 4, 4);
  const QuadratureVariances q = quadrature_variances(2, {3.0, 0.0}, b);
  CHECK(q.var_x == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(q.var_p == doctest::Approx(0.5).epsilon(1e-6));

  const QuadratureVariances vac = quadrature_variances(3, FockVector::basis_state(b, 1));
  CHECK(vac.var_x == 0.5);
  CHECK(vac.var_p == 0.5);

  // Fock state |4>: var = 1/2 + a_2 on both quadratures.
  const QuadratureVariances four = quadrature_variances(2, FockVector::basis_state(b, 4));
  CHECK(four.var_x == doctest::Approx(2.5));
  CHECK(four.var_p == doctest::Approx(2.5));

  // Convergence toward the minimum as the basis grows.
  double previous = 1.0;
  for (unsigned level : {3u, 5u, 7u}) {
    const FockBasis grown = basis_of(4 * level + 1, level, level);
    const QuadratureVariances g = quadrature_variances(2, {0.8, 0.0}, grown);
    const double dev = std::abs(g.var_x - 0.5) + std::abs(g.var_p - 0.5);
    CHECK(dev < previous);
    CHECK(g.var_x * g.var_p >= 0.25 - 1e-12);
    previous = dev;
  }
}

TEST_CASE("f representation") {
  const FockBasis b = basis_of(13, 4, 4);
  const HalfPlanePoint s{1.1, 0.6};
  const SiteVector z{{2, {0.7, -0.2}}, {3, {1.3, 0.4}}, {5, -0.5}};
  auto e = [&](u64 k) { return FockVector::basis_state(b, k); };

  CHECK(std::abs(f_representation(e(1), s, z) - 1.0) < 1e-15);
  const VerificationReport vac = derivative_check(2, e(1), s, z);
  CHECK(vac.pass);

  const Complex zc = std::conj(z.at(2));
  const Complex f4 = pow_neg(4, s.conj().value()) * zc * zc / std::sqrt(2.0);
  CHECK(std::abs(f_representation(e(4), s, z) - f4) < 1e-15);
  const Complex lowered = f_representation(apply_annihilate(2, e(4)), s, z);
  CHECK(std::abs(lowered - pow_neg(2, s.conj().value()) * std::sqrt(2.0) * zc) < 1e-15);
  CHECK(derivative_check(2, e(4), s, z).pass);
  CHECK(derivative_check(3, e(6), s, z).pass);

  FockVector mix(b);
  oracle::Rng rng(7);
  for (int i = 0; i < 20; ++i) mix.set(b[rng.below(b.size())].value, rng.complex());
  for (u64 p : {2, 3, 5}) CHECK(derivative_check(p, mix, s, z).pass);
}

TEST_CASE("resolution of the identity") {
  const FockBasis b = basis_of(13, 4, 4);
  QuadratureSpec q;
  q.prime_support = b.primes();
  const VerificationReport r = resolution_identity_check({0.8, 0.0}, q, b);
  CHECK(r.pass);
  CHECK(r.diagnostics.at("radial_factor_max_dev") < 1e-12);
  CHECK(r.diagnostics.at("diagonal_max_dev") < 1e-12);
  CHECK(r.diagnostics.at("off_diagonal_max") < 1e-12);

  q.radial_order = 4;
  CHECK_THROWS_AS(resolution_identity_check({0.8, 0.0}, q, b), std::invalid_argument);
}

TEST_CASE("Dirichlet operators on coherent states") {
  const FockBasis b = basis_of(13, 4, 4);
  const DirichletCoefficients f{{1, 0.5}, {2, -1.0}, {6, {0.0, 2.0}}};
  const DirichletCoefficients g{{1, 1.0}, {3, 0.25}, {4, {1.0, 1.0}}};
  const VerificationReport ring = dirichlet_ring_check(f, g, {1.2, 0.3}, b);
  CHECK(ring.pass);
  CHECK(ring.residual < 1e-14);

  const NcsParams p{{1.2, 0.0}, SiteWeights::unit_with(SiteVector::phases({{3, 0.4}}))};
  CHECK(dirichlet_eigen_check(f, {0.5, 0.1}, p, b).pass);
}
