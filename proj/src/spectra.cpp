#include "primefock/spectra.hpp"

#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "primefock/report.hpp"
#include "primefock/summation.hpp"

namespace primefock {

namespace {

void require_convergent(double sigma, const char* what) {
  if (!(sigma > 1.0))
    throw std::domain_error(std::string(what) + ": series diverges, requires sigma > 1");
}

std::vector<u64> first_primes(unsigned N) {
  u64 limit = 16;
  for (;;) {
    auto ps = sieve_primes(limit);
    if (ps.size() >= N) {
      ps.resize(N);
      return ps;
    }
    limit *= 2;
  }
}

/// Sorts by value and then reorders runs of numerically equal values lexicographically.
template <typename T, typename Value, typename Key>
void sort_with_ties(std::vector<T>& items, Value value, Key key) {
  std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    if (value(a) != value(b)) return value(a) < value(b);
    return key(a) < key(b);
  });
  std::size_t start = 0;
  while (start < items.size()) {
    std::size_t end = start + 1;
    const double v0 = value(items[start]);
    const double tol = 1e-12 * std::max(1.0, std::abs(v0));
    while (end < items.size() && value(items[end]) - v0 <= tol) ++end;
    std::sort(items.begin() + static_cast<long>(start), items.begin() + static_cast<long>(end),
              [&](const T& a, const T& b) { return key(a) < key(b); });
    start = end;
  }
}

}  // namespace

ValueWithBound bose_hubbard_expectation(HalfPlanePoint s, const BoseHubbardParams& params) {
  if (!(s.sigma > 0.5))
    throw std::domain_error("bose_hubbard_expectation: requires sigma > 1/2");
  if (params.tau != 0.0) require_convergent(s.sigma, "bose_hubbard_expectation");
  const ValueWithBound p4 = prime_zeta({4.0 * s.sigma, 0.0});
  const ValueWithBound p2 = prime_zeta({2.0 * s.sigma, 0.0});
  const ValueWithBound p1 = params.tau != 0.0 ? prime_zeta(s) : ValueWithBound{};
  const double hop = std::norm(p1.value);
  const double value = params.U / 2.0 * p4.value.real() - params.mu_chem * p2.value.real() -
                       2.0 * params.tau * hop;
  const double bound = std::abs(params.U) / 2.0 * p4.tail_bound +
                       std::abs(params.mu_chem) * p2.tail_bound +
                       2.0 * std::abs(params.tau) *
                           (2.0 * std::abs(p1.value) * p1.tail_bound + p1.tail_bound * p1.tail_bound);
  return {value, bound};
}

double bose_hubbard_expectation(HalfPlanePoint s, const SiteVector& z,
                                const BoseHubbardParams& params) {
  const double p4 = prime_zeta_weighted(Complex(4.0 * s.sigma), z.abs_pow(2)).real();
  const double p2 = prime_zeta_weighted(Complex(2.0 * s.sigma), z.abs_pow(1)).real();
  const Complex p1 = prime_zeta_weighted(s.value(), z);
  return params.U / 2.0 * p4 - params.mu_chem * p2 - 2.0 * params.tau * std::norm(p1);
}

SparseOperator bose_hubbard_operator(const FockBasis& basis, const BoseHubbardParams& params) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<Complex>> diag;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double v = 0.0;
    for (const auto& [p, a] : basis[i].exponents)
      v += params.U / 2.0 * a * (a - 1.0) - params.mu_chem * a;
    if (v != 0.0) diag.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(v));
  }
  SparseMatrix onsite(n, n);
  onsite.setFromTriplets(diag.begin(), diag.end());

  // sum_{p,q} (a_p^dagger a_q + a_q^dagger a_p) = 2 B^dagger B with B = sum_p a_p.
  const SiteWeights ones = SiteWeights::unit();
  const SparseOperator B = assemble_operator(ops::C{{0.0, 0.0}, ones}, basis);
  const SparseOperator Bd = assemble_operator(ops::CDagger{{0.0, 0.0}, ones}, basis);
  SparseOperator H;
  H.basis = &basis;
  H.matrix = onsite - Complex(2.0 * params.tau) * SparseMatrix(Bd.matrix * B.matrix);
  H.matrix.prune(Complex{});
  H.name = "bose_hubbard";
  H.boundary_loss = Bd.boundary_loss;
  return H;
}

ValueWithBound pn_tower_expectation(HalfPlanePoint s, unsigned N) {
  require_convergent(s.sigma, "pn_tower_expectation");
  return pn_tower_expectation(s, SiteWeights::unit(), N);
}

ValueWithBound pn_tower_expectation(HalfPlanePoint s, const SiteWeights& z, unsigned N) {
  double value = 1.0, bound = 0.0;
  for (unsigned m = 1; m <= N; ++m) {
    const ValueWithBound pm = p_n_generalized(m, s, z);
    value += std::norm(pm.value);
    bound += 2.0 * std::abs(pm.value) * pm.tail_bound + pm.tail_bound * pm.tail_bound;
  }
  return {value, bound};
}

double pn_tower_quadratic_form(const FockVector& v, unsigned N) {
  const FockBasis& basis = v.basis();
  double total = 0.0;
  for (unsigned m = 0; m <= N; ++m) {
    DirichletCoefficients f;
    for (const auto& k : basis.elements())
      if (k.big_omega == m) f.set(k.value, 1.0);
    if (f.empty()) continue;
    const SparseOperator F = assemble_operator(ops::F{{0.0, 0.0}, f}, basis);
    total += F.apply(v).squared_norm();
  }
  return total;
}

ValueWithBound general_expectation(HalfPlanePoint s, const std::vector<double>& poly,
                                   const std::vector<Hop>& hops, const FockBasis& basis) {
  if (!poly.empty() && poly[0] != 0.0)
    throw std::invalid_argument("general_expectation: constant term must be zero");
  if (poly.size() > 1 && !(s.sigma > 0.5))
    throw std::domain_error("general_expectation: polynomial sum requires sigma > 1/2");
  for (const auto& hop : hops)
    if (factorize(hop.n).big_omega != factorize(hop.k).big_omega)
      throw std::invalid_argument("general_expectation: hop (" + std::to_string(hop.n) + ", " +
                                  std::to_string(hop.k) +
                                  ") has Omega(n) != Omega(k) and does not commute with N");

  CompensatedSum acc;
  for (const auto& k : basis.elements()) {
    const double x = std::pow(static_cast<double>(k.value), -2.0 * s.sigma);
    double term = 0.0, xj = 1.0;
    for (std::size_t j = 1; j < poly.size(); ++j) {
      xj *= x;
      term += poly[j] * xj;
    }
    acc.add(term);
  }
  const double K = static_cast<double>(basis.complete_up_to());
  double bound = 0.0;
  for (std::size_t j = 1; j < poly.size(); ++j) {
    const double e = 2.0 * s.sigma * static_cast<double>(j);
    bound += std::abs(poly[j]) * std::pow(K, 1.0 - e) / (e - 1.0);
  }
  for (const auto& hop : hops)
    acc.add(2.0 * (hop.h * pow_neg(hop.n, s.conj().value()) * pow_neg(hop.k, s.value())).real());
  return {acc.value(), bound};
}

double dirichlet_interaction_expectation(HalfPlanePoint s, HalfPlanePoint s_prime,
                                         const DirichletCoefficients& f, const SiteWeights& z) {
  ComplexSum acc;
  const Complex total = s.value() + s_prime.value();
  for (const auto& [n, fn] : f.entries()) acc.add(fn * pow_neg(n, total) * z.monomial(factorize(n)));
  return std::norm(acc.value());
}

Eigen::MatrixXcd hopping_matrix(unsigned N, HalfPlanePoint s) {
  if (N == 0) throw std::invalid_argument("hopping_matrix: N must be >= 1");
  const auto primes = first_primes(N);
  const Complex sc = s.conj().value();
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
  for (unsigned j = 0; j + 1 < N; ++j) {
    const Complex a = std::exp(-sc * std::log(static_cast<double>(primes[j]) /
                                              static_cast<double>(primes[j + 1])));
    D(j, j + 1) = a;
    D(j + 1, j) = 1.0 / a;
  }
  return D;
}

OneParticleSpectrum one_particle_spectrum(unsigned N, HalfPlanePoint s) {
  const Eigen::MatrixXcd D = hopping_matrix(N, s);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(D);
  if (es.info() != Eigen::Success) throw std::runtime_error("one_particle_spectrum: eigensolver failed");
  std::vector<Eigen::Index> order(N);
  for (unsigned i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return es.eigenvalues()[a].real() < es.eigenvalues()[b].real();
  });
  OneParticleSpectrum out;
  out.eigenvalues.resize(N);
  out.eigenvectors.resize(N, N);
  for (unsigned i = 0; i < N; ++i) {
    const Complex ev = es.eigenvalues()[order[i]];
    out.eigenvalues[i] = ev.real();
    out.eigenvectors.col(i) = es.eigenvectors().col(order[i]);
    out.max_imag = std::max(out.max_imag, std::abs(ev.imag()));
  }
  return out;
}

std::vector<SpectrumEntry> multi_particle_spectrum(const FiniteArrayParams& params) {
  const unsigned N = params.N;
  if (N == 0) throw std::invalid_argument("multi_particle_spectrum: N must be >= 1");
  // c_k = 2 cos(k pi/(N+1)); c_{N+1-k} = -c_k is used exactly so mirrored terms cancel.
  std::vector<double> c(N + 1, 0.0);
  for (unsigned k = 1; 2 * k < N + 1; ++k) {
    c[k] = 2.0 * std::cos(k * std::numbers::pi / (N + 1));
    c[N + 1 - k] = -c[k];
  }
  std::vector<SpectrumEntry> out;
  for (auto& alpha : enumerate_multi_indices(N, params.n)) {
    double hop = 0.0;
    for (unsigned k = 1; 2 * k < N + 1; ++k)
      hop += (static_cast<double>(alpha.alpha[k - 1]) - static_cast<double>(alpha.alpha[N - k])) * c[k];
    SpectrumEntry e;
    e.lambda = params.gamma * params.n + params.tau * hop;
    e.eigenvalue = params.delta * e.lambda * e.lambda + e.lambda;
    e.alpha = std::move(alpha);
    out.push_back(std::move(e));
  }
  sort_with_ties(
      out, [](const SpectrumEntry& e) { return e.eigenvalue; },
      [](const SpectrumEntry& e) { return e.alpha; });
  return out;
}

BruteForceSpectrum brute_force_spectrum(const FiniteArrayParams& params, std::size_t cap) {
  const unsigned N = params.N;
  if (N == 0) throw std::invalid_argument("brute_force_spectrum: N must be >= 1");
  const u64 dim = binomial(params.n + N - 1, N - 1);
  if (dim > cap)
    throw ResourceError("brute_force_spectrum: dimension " + std::to_string(dim) +
                        " exceeds the dense cap of " + std::to_string(cap));
  const auto basis = enumerate_multi_indices(N, params.n);
  std::map<std::vector<unsigned>, Eigen::Index> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i].alpha] = static_cast<Eigen::Index>(i);

  const Eigen::MatrixXcd hop1 = hopping_matrix(N, params.s);
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const auto& alpha = basis[col].alpha;
    for (unsigned j = 0; j + 1 < N; ++j) {
      const Complex a = hop1(j, j + 1);
      // a_j z_j d/dz_{j+1}
      if (alpha[j + 1] > 0) {
        auto t = alpha;
        ++t[j];
        --t[j + 1];
        D(index.at(t), static_cast<Eigen::Index>(col)) += a * static_cast<double>(alpha[j + 1]);
      }
      // a_j^{-1} z_{j+1} d/dz_j
      if (alpha[j] > 0) {
        auto t = alpha;
        --t[j];
        ++t[j + 1];
        D(index.at(t), static_cast<Eigen::Index>(col)) += static_cast<double>(alpha[j]) / a;
      }
    }
  }
  const Eigen::MatrixXcd M =
      Complex(params.gamma * params.n) * Eigen::MatrixXcd::Identity(d, d) - params.tau * D;
  const Eigen::MatrixXcd H = params.delta * (M * M) + M;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("brute_force_spectrum: eigensolver failed");
  BruteForceSpectrum out;
  out.dimension = dim;
  for (Eigen::Index i = 0; i < d; ++i) {
    out.eigenvalues.push_back(es.eigenvalues()[i].real());
    out.max_imag = std::max(out.max_imag, std::abs(es.eigenvalues()[i].imag()));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

std::vector<double> tau_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("tau_grid: step must be positive");
  if (stop < start) throw std::invalid_argument("tau_grid: stop must be >= start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  const double inv = std::round(1.0 / step);
  const bool decimal = std::abs(inv * step - 1.0) < 1e-12;
  const double first = std::round(start * inv);
  const bool aligned = decimal && std::abs(first / inv - start) < 1e-12;
  std::vector<double> out;
  for (long i = 0; i < count; ++i)
    out.push_back(aligned ? (first + static_cast<double>(i)) / inv : start + static_cast<double>(i) * step);
  return out;
}

SpectrumTable spectrum_sweep(const FiniteArrayParams& params, const std::vector<double>& taus,
                             unsigned m_lowest) {
  const u64 dim = binomial(params.n + params.N - 1, params.N - 1);
  if (m_lowest == 0 || m_lowest > dim)
    throw std::invalid_argument("spectrum_sweep: m_lowest must lie in [1, " + std::to_string(dim) + "]");
  SpectrumTable t;
  t.N = params.N;
  t.n = params.n;
  t.gamma = params.gamma;
  t.delta = params.delta;
  t.m_lowest = m_lowest;
  FiniteArrayParams p = params;
  for (double tau : taus) {
    p.tau = tau;
    const auto spec = multi_particle_spectrum(p);
    for (unsigned r = 0; r < m_lowest; ++r) t.rows.push_back({tau, r + 1, spec[r].eigenvalue, spec[r].alpha});
  }
  return t;
}

std::vector<Transition> ground_state_transition(const FiniteArrayParams& params,
                                                const std::vector<double>& taus) {
  std::vector<Transition> out;
  FiniteArrayParams p = params;
  std::optional<MultiIndex> prev;
  double prev_tau = 0.0;
  for (double tau : taus) {
    p.tau = tau;
    MultiIndex ground = multi_particle_spectrum(p).front().alpha;
    if (prev && ground != *prev) out.push_back({prev_tau, tau, *prev, ground});
    prev = std::move(ground);
    prev_tau = tau;
  }
  return out;
}

std::string to_csv(const SpectrumTable& table) {
  std::ostringstream os;
  os << "# primefock spectrum csv schema_version=" << kCsvSchemaVersion << " N=" << table.N
     << " n=" << table.n << " gamma=" << format_double(table.gamma)
     << " delta=" << format_double(table.delta) << " m_lowest=" << table.m_lowest << '\n';
  for (const auto& note : table.notes) os << "# " << note << '\n';
  os << "tau,mode_rank,eigenvalue,alpha\n";
  for (const auto& r : table.rows)
    os << format_double(r.tau) << ',' << r.mode_rank << ',' << format_double(r.eigenvalue) << ','
       << r.alpha.str() << '\n';
  return os.str();
}

nlohmann::json to_json(const SpectrumTable& table) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["N"] = table.N;
  j["n"] = table.n;
  j["gamma"] = table.gamma;
  j["delta"] = table.delta;
  j["m_lowest"] = table.m_lowest;
  if (!table.notes.empty()) j["notes"] = table.notes;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows)
    j["rows"].push_back({{"tau", r.tau}, {"mode_rank", r.mode_rank}, {"eigenvalue", r.eigenvalue},
                         {"alpha", r.alpha.alpha}});
  return j;
}

nlohmann::json to_json(const std::vector<Transition>& transitions) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : transitions)
    j["transitions"].push_back({{"tau_lo", t.tau_lo},
                                {"tau_hi", t.tau_hi},
                                {"from", t.from.str()},
                                {"to", t.to.str()}});
  return j;
}

}  // namespace primefock
