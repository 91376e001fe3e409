#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "primefock/coherent.hpp"
#include "primefock/dirichlet.hpp"
#include "primefock/fock.hpp"
#include "primefock/numtheory.hpp"

namespace primefock {

struct BoseHubbardParams {
  double U = 0.0;
  double mu_chem = 0.0;
  double tau = 0.0;
};

/// (U/2) P_1(4 sigma) - mu P_1(2 sigma) - 2 tau |P_1(s)|^2. Requires sigma > 1/2,
/// and sigma > 1 when tau != 0.
ValueWithBound bose_hubbard_expectation(HalfPlanePoint s, const BoseHubbardParams& params);

/// Same for |s, z> with finitely supported z (every sum is finite).
double bose_hubbard_expectation(HalfPlanePoint s, const SiteVector& z,
                                const BoseHubbardParams& params);

/// The all-pairs Bose-Hubbard Hamiltonian over the prime sites of the basis.
SparseOperator bose_hubbard_operator(const FockBasis& basis, const BoseHubbardParams& params);

/// 1 + sum_{m=1}^{N} |P_m(s)|^2. Requires sigma > 1.
ValueWithBound pn_tower_expectation(HalfPlanePoint s, unsigned N);
/// 1 + sum_{m=1}^{N} |P_m(s, z)|^2 for site weights z.
ValueWithBound pn_tower_expectation(HalfPlanePoint s, const SiteWeights& z, unsigned N);

/// <v| H_N |v> with H_N = sum_{Omega(k) = Omega(n) <= N} a_n^dagger a_k, from materialized
/// lowering operators.
double pn_tower_quadratic_form(const FockVector& v, unsigned N);

struct Hop {
  u64 n;
  u64 k;
  Complex h;
};

/// sum_n Poly(n^{-2 sigma}) + sum_hops (h n^{-s*} k^{-s} + c.c.). poly[j] multiplies
/// x^j and poly[0] must be zero. The polynomial sum runs over the basis with a tail
/// bound beyond the largest K the basis holds completely. Throws std::invalid_argument
/// for a hop with Omega(n) != Omega(k).
ValueWithBound general_expectation(HalfPlanePoint s, const std::vector<double>& poly,
                                   const std::vector<Hop>& hops, const FockBasis& basis);

/// |sum_n f(n) n^{-(s+s')} prod z_p^{a_p(n)}|^2.
double dirichlet_interaction_expectation(HalfPlanePoint s, HalfPlanePoint s_prime,
                                         const DirichletCoefficients& f, const SiteWeights& z);

/// Tridiagonal hopping matrix over the first N prime sites, with
/// a_j = (p_j / p_{j+1})^{-s*} above the diagonal and 1/a_j below.
Eigen::MatrixXcd hopping_matrix(unsigned N, HalfPlanePoint s);

struct OneParticleSpectrum {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns match eigenvalues
  double max_imag = 0.0;
};

OneParticleSpectrum one_particle_spectrum(unsigned N, HalfPlanePoint s);

struct FiniteArrayParams {
  unsigned N = 5;
  unsigned n = 3;
  double gamma = 1.0;
  double tau = 0.0;
  double delta = 0.0;
  HalfPlanePoint s{2.0, 0.0};
};

struct SpectrumEntry {
  MultiIndex alpha;
  double lambda = 0.0;      // gamma n + 2 tau sum alpha_k cos(k pi/(N+1))
  double eigenvalue = 0.0;  // delta lambda^2 + lambda
};

/// Exact n-particle spectrum, ascending, ties by lexicographic alpha.
std::vector<SpectrumEntry> multi_particle_spectrum(const FiniteArrayParams& params);

inline constexpr std::size_t kDenseDimensionCap = 5000;

struct BruteForceSpectrum {
  std::vector<double> eigenvalues;  // ascending real parts
  double max_imag = 0.0;
  std::size_t dimension = 0;
};

/// n-particle matrix of gamma N - tau D (squared when delta != 0) on monomials z^alpha,
/// diagonalized densely. Throws ResourceError above `cap`.
BruteForceSpectrum brute_force_spectrum(const FiniteArrayParams& params,
                                        std::size_t cap = kDenseDimensionCap);

struct SpectrumRow {
  double tau = 0.0;
  unsigned mode_rank = 0;  // 1-based
  double eigenvalue = 0.0;
  MultiIndex alpha;
};

struct SpectrumTable {
  unsigned N = 0;
  unsigned n = 0;
  double gamma = 0.0;
  double delta = 0.0;
  unsigned m_lowest = 0;
  std::vector<std::string> notes;  // extra comment lines in the CSV header
  std::vector<SpectrumRow> rows;
};

/// start, start + step, ..., stop. When 1/step is an integer the points are formed
/// by division so decimal grids print cleanly.
std::vector<double> tau_grid(double start, double stop, double step);

SpectrumTable spectrum_sweep(const FiniteArrayParams& params, const std::vector<double>& taus,
                             unsigned m_lowest);

struct Transition {
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  MultiIndex from;
  MultiIndex to;
};

/// Every grid interval across which the ground multi-index changes.
std::vector<Transition> ground_state_transition(const FiniteArrayParams& params,
                                                const std::vector<double>& taus);

inline constexpr int kCsvSchemaVersion = 1;

std::string to_csv(const SpectrumTable& table);
nlohmann::json to_json(const SpectrumTable& table);
nlohmann::json to_json(const std::vector<Transition>& transitions);

}  // namespace primefock
