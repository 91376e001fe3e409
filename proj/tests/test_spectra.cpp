#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "oracles.hpp"
#include "primefock/spectra.hpp"

using namespace primefock;

namespace {

FockBasis basis_of(unsigned p_max, unsigned a_max, unsigned omega_max) {
  TruncationSpec t;
  t.p_max = p_max;
  t.a_max = a_max;
  t.omega_max = omega_max;
  return FockBasis(t);
}

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> eigenvalues_of(const std::vector<SpectrumEntry>& spec) {
  std::vector<double> out;
  for (const auto& e : spec) out.push_back(e.eigenvalue);
  return out;
}

}  // namespace

TEST_CASE("one-particle spectrum") {
  const OneParticleSpectrum five = one_particle_spectrum(5, {2.0, 0.0});
  const double r3 = std::sqrt(3.0);
  const std::vector<double> expected{-r3, -1.0, 0.0, 1.0, r3};
  const auto got = sorted(five.eigenvalues);
  for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(five.max_imag < 1e-12);

  const OneParticleSpectrum two = one_particle_spectrum(2, {2.0, 0.0});
  CHECK(two.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(two.eigenvalues[1] == doctest::Approx(1.0));

  // The similarity transform hides s entirely.
  for (HalfPlanePoint s : {HalfPlanePoint{0.7, 0.0}, HalfPlanePoint{1.5, 3.0}, HalfPlanePoint{4.0, -1.2}}) {
    const OneParticleSpectrum o = one_particle_spectrum(5, s);
    const auto g = sorted(o.eigenvalues);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(g[i] - expected[i]) < 1e-12);
    CHECK(o.max_imag < 1e-12);
  }

  // Eigenvectors satisfy D v = lambda v.
  const Eigen::MatrixXcd D = hopping_matrix(5, {1.3, 0.7});
  const OneParticleSpectrum o = one_particle_spectrum(5, {1.3, 0.7});
  for (Eigen::Index i = 0; i < 5; ++i)
    CHECK((D * o.eigenvectors.col(i) - o.eigenvalues[i] * o.eigenvectors.col(i)).norm() < 1e-12);
  CHECK_THROWS_AS(hopping_matrix(0, {2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("hopping matrix entries") {
  const Eigen::MatrixXcd D = hopping_matrix(3, {1.0, 0.5});
  const Complex a1 = std::exp(-Complex(1.0, -0.5) * std::log(2.0 / 3.0));
  CHECK(std::abs(D(0, 1) - a1) < 1e-15);
  CHECK(std::abs(D(1, 0) - 1.0 / a1) < 1e-15);
  CHECK(std::abs(D(0, 2)) == 0.0);
  CHECK(std::abs(D(1, 1)) == 0.0);
}

TEST_CASE("dimer") {
  FiniteArrayParams p;
  p.N = 2;
  p.n = 2;
  p.gamma = 0.0;
  p.tau = 1.0;
  const auto spec = multi_particle_spectrum(p);
  const auto ev = eigenvalues_of(spec);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(ev[1] == 0.0);
  CHECK(ev[2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(spec.front().alpha.alpha == std::vector<unsigned>{0, 2});
}

TEST_CASE("multi-particle spectrum, delta = 0") {
  FiniteArrayParams p;  // N = 5, n = 3, gamma = 1
  for (double tau : {0.0, 0.3, 0.9}) {
    p.tau = tau;
    const auto spec = multi_particle_spectrum(p);
    CHECK(spec.size() == 35);
    CHECK(spec.front().eigenvalue == doctest::Approx(3.0 - 3.0 * std::sqrt(3.0) * tau));
    for (std::size_t i = 1; i < spec.size(); ++i) CHECK(spec[i - 1].eigenvalue <= spec[i].eigenvalue);
    for (const auto& e : spec) CHECK(e.eigenvalue == e.lambda);
  }
  p.tau = 0.0;
  const auto flat = multi_particle_spectrum(p);
  // Total degeneracy: lexicographic order survives.
  for (std::size_t i = 1; i < flat.size(); ++i) CHECK(flat[i - 1].alpha < flat[i].alpha);
  // The middle mode has c = 0 exactly.
  p.tau = 0.7;
  for (const auto& e : multi_particle_spectrum(p))
    if (e.alpha.alpha == std::vector<unsigned>{0, 0, 3, 0, 0}) CHECK(e.eigenvalue == 3.0);
}

TEST_CASE("multi-particle spectrum, delta mapping") {
  FiniteArrayParams p;
  p.tau = 0.5;
  p.delta = 0.0;
  auto lambdas = multi_particle_spectrum(p);
  p.delta = 1.0;
  const auto squared = multi_particle_spectrum(p);
  std::vector<double> mapped;
  for (const auto& e : lambdas) mapped.push_back(e.lambda * e.lambda + e.lambda);
  std::sort(mapped.begin(), mapped.end());
  const auto got = eigenvalues_of(squared);
  REQUIRE(got.size() == mapped.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(mapped[i]).epsilon(1e-14));
}

TEST_CASE("brute force agrees with the closed form") {
  for (double delta : {0.0, 1.0}) {
    for (double tau : {0.0, 0.35, 1.1}) {
      FiniteArrayParams p;
      p.tau = tau;
      p.delta = delta;
      p.s = {1.4, 0.6};
      const BruteForceSpectrum bf = brute_force_spectrum(p);
      CHECK(bf.dimension == 35);
      CHECK(bf.max_imag < 1e-9);
      const auto exact = eigenvalues_of(multi_particle_spectrum(p));
      REQUIRE(bf.eigenvalues.size() == exact.size());
      for (std::size_t i = 0; i < exact.size(); ++i) CHECK(std::abs(bf.eigenvalues[i] - exact[i]) < 1e-9);
    }
  }
  FiniteArrayParams big;
  big.N = 12;
  big.n = 8;
  CHECK_THROWS_AS(brute_force_spectrum(big), ResourceError);
}

TEST_CASE("one particle is the hopping spectrum shifted by gamma") {
  FiniteArrayParams p;
  p.n = 1;
  p.gamma = 0.8;
  p.tau = 0.4;
  const auto spec = eigenvalues_of(multi_particle_spectrum(p));
  const auto one = sorted(one_particle_spectrum(5, p.s).eigenvalues);
  std::vector<double> shifted;
  for (double v : one) shifted.push_back(0.8 + 0.4 * v);
  std::sort(shifted.begin(), shifted.end());
  for (std::size_t i = 0; i < 5; ++i) CHECK(spec[i] == doctest::Approx(shifted[i]).epsilon(1e-12));
}

TEST_CASE("spectrum sweep and transitions") {
  FiniteArrayParams p;
  const auto taus = tau_grid(0.0, 1.2, 0.01);
  REQUIRE(taus.size() == 121);
  CHECK(taus[37] == 0.37);
  CHECK(taus.back() == 1.2);

  const SpectrumTable t = spectrum_sweep(p, taus, 15);
  CHECK(t.rows.size() == 121 * 15);
  // At delta = 0 each level is affine in tau.
  for (unsigned r = 0; r < 15; ++r) {
    const double v0 = t.rows[r].eigenvalue;
    const double v1 = t.rows[15 + r].eigenvalue;
    const double v2 = t.rows[30 + r].eigenvalue;
    CHECK(std::abs((v2 - v1) - (v1 - v0)) < 1e-12);
  }
  CHECK(ground_state_transition(p, taus).empty());

  p.delta = 1.0;
  const auto tr = ground_state_transition(p, taus);
  REQUIRE_FALSE(tr.empty());
  bool inside = false;
  for (const auto& x : tr) inside = inside || (x.tau_lo > 0.4 && x.tau_hi < 1.0);
  CHECK(inside);
  CHECK(tr.front().from.alpha == std::vector<unsigned>{0, 0, 0, 0, 3});
  CHECK(tr.front().tau_lo == 0.72);
  CHECK(tr.front().tau_hi == 0.73);
  CHECK(tr.front().to.alpha == std::vector<unsigned>{0, 0, 0, 1, 2});

  CHECK_THROWS_AS(spectrum_sweep(p, taus, 0), std::invalid_argument);
  CHECK_THROWS_AS(spectrum_sweep(p, taus, 36), std::invalid_argument);
  CHECK_THROWS_AS(tau_grid(1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(tau_grid(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectrum serialization") {
  FiniteArrayParams p;
  p.N = 2;
  p.n = 1;
  SpectrumTable t = spectrum_sweep(p, {0.0, 0.25}, 2);
  t.notes.push_back("hello");
  CHECK(to_csv(t).starts_with(
        "# primefock spectrum csv schema_version=1 N=2 n=1 gamma=1 delta=0 m_lowest=2\n"
        "# hello\n"
        "tau,mode_rank,eigenvalue,alpha\n"
        "0,1,1,0:1\n"
        "0,2,1,1:0\n"
        "0.25,1,"));
  const nlohmann::json j = to_json(t);
  CHECK(j["rows"].size() == 4);
  CHECK(j["rows"][2]["eigenvalue"].get<double>() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(j["rows"][3]["alpha"] == std::vector<unsigned>{1, 0});
  CHECK(j["notes"][0] == "hello");

  const nlohmann::json tj = to_json(std::vector<Transition>{{0.1, 0.2, {{1, 0}, 1}, {{0, 1}, 1}}});
  CHECK(tj["transitions"][0]["from"] == "1:0");
  CHECK(tj["transitions"][0]["tau_hi"] == 0.2);
}

TEST_CASE("Bose-Hubbard closed form") {
  BoseHubbardParams onsite{2.0, 0.0, 0.0};
  const ValueWithBound v = bose_hubbard_expectation({1.0, 0.0}, onsite);
  CHECK(v.value.real() == doctest::Approx(0.0769931).epsilon(1e-6));

  BoseHubbardParams hop{0.0, 0.0, 0.5};
  const double p15 = prime_zeta({1.5, 0.0}).value.real();
  const ValueWithBound h = bose_hubbard_expectation({1.5, 0.0}, hop);
  CHECK(h.value.real() == doctest::Approx(-p15 * p15).epsilon(1e-12));
  CHECK(h.tail_bound > 0.0);
  CHECK_THROWS_AS(bose_hubbard_expectation({1.0, 0.0}, hop), std::domain_error);

  // Finite support cross-check against the operator.
  const FockBasis b = basis_of(3, 10, 20);
  const SiteVector z{{2, {0.8, 0.3}}, {3, {-0.5, 0.9}}};
  const HalfPlanePoint s{1.3, 0.4};
  const BoseHubbardParams params{1.7, 0.6, 0.45};
  const NcsState st = ncs_state({s, SiteWeights::finite(z)}, b);
  const SparseOperator H = bose_hubbard_operator(b, params);
  const Complex truncated = st.state.dot(H.apply(st.state));
  CHECK(std::abs(truncated.imag()) < 1e-12);
  CHECK(std::abs(truncated.real() - bose_hubbard_expectation(s, z, params)) < 1e-10);
}

TEST_CASE("P_n tower") {
  const double p2 = prime_zeta({2.0, 0.0}).value.real();
  const ValueWithBound t1 = pn_tower_expectation({2.0, 0.0}, 1);
  CHECK(t1.value.real() == doctest::Approx(1.0 + p2 * p2).epsilon(1e-12));
  CHECK(t1.value.real() == doctest::Approx(1.2045).epsilon(1e-4));
  CHECK(pn_tower_expectation({2.0, 0.0}, 0).value.real() == 1.0);
  CHECK_THROWS_AS(pn_tower_expectation({1.0, 0.0}, 2), std::domain_error);

  const FockBasis b = basis_of(5, 8, 10);
  const SiteVector z{{2, {0.6, -0.4}}, {3, 1.1}, {5, {0.0, 0.7}}};
  const SiteWeights w = SiteWeights::finite(z);
  const HalfPlanePoint s{1.3, -0.2};
  const NcsState st = ncs_state({s, w}, b);
  const double form = pn_tower_quadratic_form(st.state, 2);
  CHECK(std::abs(form - pn_tower_expectation(s, w, 2).value.real()) < 1e-8);
}

TEST_CASE("general expectation") {
  const FockBasis b = basis_of(31, 4, 4);
  const HalfPlanePoint s{1.3, 0.0};
  const ValueWithBound hop = general_expectation(s, {}, {{4, 6, 1.0}}, b);
  CHECK(hop.value.real() == doctest::Approx(2.0 * std::pow(24.0, -1.3)).epsilon(1e-14));
  CHECK(hop.tail_bound == 0.0);

  // Linear term: sum over all n of n^{-2 sigma} = zeta(2 sigma) up to the bound.
  const ValueWithBound lin = general_expectation({2.0, 0.0}, {0.0, 1.0}, {}, basis_of(31, 6, 6));
  const double zeta4 = std::pow(std::numbers::pi, 4) / 90.0;
  CHECK(lin.value.real() <= zeta4);
  CHECK(zeta4 - lin.value.real() <= lin.tail_bound);
  CHECK(lin.tail_bound < 1e-4);

  // A hop between 2 and 3 with a complex coefficient and complex s.
  const HalfPlanePoint sc{1.2, 0.8};
  const Complex h{0.3, -0.7};
  const ValueWithBound g = general_expectation(sc, {}, {{2, 3, h}}, b);
  const Complex w = h * std::pow(Complex(2.0), -sc.conj().value()) * std::pow(Complex(3.0), -sc.value());
  CHECK(std::abs(g.value.real() - 2.0 * w.real()) < 1e-15);

  CHECK_THROWS_AS(general_expectation(s, {1.0}, {}, b), std::invalid_argument);
  CHECK_THROWS_AS(general_expectation(s, {}, {{2, 4, 1.0}}, b), std::invalid_argument);
  CHECK_THROWS_AS(general_expectation({0.5, 0.0}, {0.0, 1.0}, {}, b), std::domain_error);
}

TEST_CASE("general expectation matches a truncated state") {
  // Quadratic term at site 2 only, via the normal-ordered pair count a^dagger a^dagger a a.
  const FockBasis b = basis_of(2, 20, 20);
  const HalfPlanePoint s{1.1, 0.0};
  const NcsState st = ncs_state({s, SiteWeights::finite({{2, 1.0}})}, b);
  const SparseOperator a = assemble_operator(ops::Annihilate{2}, b);
  const FockVector aa = a.apply(a.apply(st.state));
  CHECK(aa.squared_norm() == doctest::Approx(std::pow(2.0, -4.0 * 1.1)).epsilon(1e-12));
}

TEST_CASE("Dirichlet interaction expectation") {
  const DirichletCoefficients f{{1, 1.0}, {2, {0.0, 1.0}}};
  const HalfPlanePoint s{1.0, 0.0};
  const HalfPlanePoint sp{0.5, 0.0};
  const double got = dirichlet_interaction_expectation(s, sp, f, SiteWeights::unit());
  CHECK(got == doctest::Approx(std::norm(Complex(1.0, std::pow(2.0, -1.5)))));
  const double zeroed = dirichlet_interaction_expectation(s, sp, f, SiteWeights::finite({{3, 1.0}}));
  CHECK(zeroed == doctest::Approx(1.0));
}
