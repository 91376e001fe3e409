#include "primefock/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "primefock/coherent.hpp"
#include "primefock/dirichlet.hpp"
#include "primefock/fock.hpp"
#include "primefock/spectra.hpp"
#include "primefock/summation.hpp"

namespace primefock::cli {

namespace {

using nlohmann::json;

/// Deterministic uniform doubles in [0, 1) independent of the standard library's distributions.
class Uniform {
 public:
  explicit Uniform(u64 seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

bool hosted(u64 n, const FockBasis& basis) {
  const auto& primes = basis.primes();
  for (const auto& [p, a] : factorize(n).exponents)
    if (std::find(primes.begin(), primes.end(), p) == primes.end()) return false;
  return true;
}

SiteWeights conjugate(const SiteWeights& z) {
  SiteVector c;
  for (const auto& [p, v] : z.values.entries()) c.set(p, std::conj(v));
  return {c, z.unit_elsewhere};
}

std::vector<SiteWeights> random_weights(unsigned count, u64 seed) {
  Uniform u(seed);
  std::vector<SiteWeights> out;
  for (unsigned i = 0; i < count; ++i) {
    SiteVector v;
    for (u64 p : {2, 3, 5, 7})
      v.set(p, std::polar(u(0.5, 1.5), u(0.0, 2.0 * std::numbers::pi)));
    out.push_back(SiteWeights::unit_with(v));
  }
  return out;
}

DirichletCoefficients random_coefficients(Uniform& u, u64 max_n) {
  DirichletCoefficients f;
  for (u64 n = 1; n <= max_n; ++n)
    if (u() < 0.5) f.set(n, Complex(u(-1.0, 1.0), u(-1.0, 1.0)));
  if (f.empty()) f.set(1, 1.0);
  return f;
}

std::string weights_label(const SiteWeights& z) {
  std::string s;
  for (const auto& [p, v] : z.values.entries()) {
    if (!s.empty()) s += ' ';
    s += std::to_string(p) + '=' + format_double(v.real()) + (v.imag() < 0 ? "" : "+") +
         format_double(v.imag()) + 'i';
  }
  return s.empty() ? "unit" : s;
}

using Reports = std::vector<VerificationReport>;

Reports suite_ccr(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  Reports out;
  const auto& ps = basis.primes();
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i; j < ps.size(); ++j) out.push_back(verify_ccr(basis, ps[i], ps[j]));
  return out;
}

Reports suite_eigen(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  const auto weights = c.z ? std::vector<SiteWeights>{*c.z} : random_weights(3, 20261015);
  Reports out;
  for (const auto& z : weights)
    for (u64 n : {2, 3, 4, 6, 12}) {
      if (!hosted(n, basis)) continue;
      out.push_back(eigen_residual(n, {c.s, z}, basis).param("z", weights_label(z)));
    }
  return out;
}

Reports suite_poisson(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  const NcsParams params{c.s, c.z.value_or(SiteWeights::unit())};
  const NcsState st = ncs_state(params, basis);
  const double lambda = ncs_log_norm(params).value.real();
  auto pmf = [&](unsigned n) {
    return std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
  };
  Reports out;
  const unsigned top = std::min(4u, c.truncation.omega_max);
  for (unsigned n = 0; n <= top; ++n) {
    double mass = 0.0;
    for (std::size_t i : basis.block(n)) mass += std::norm(st.state.amplitudes()[static_cast<Eigen::Index>(i)]);
    const double expected = c.z ? pmf(n) : particle_number_pmf(c.s, n);
    VerificationReport r("poisson_block_mass", std::abs(mass - expected), st.residual_mass + 1e-12);
    r.param("n", n).param("sigma", c.s.sigma).param("z", weights_label(params.z));
    r.diag("block_mass", mass).diag("pmf", expected).diag("residual_mass", st.residual_mass);
    out.push_back(r);
  }
  CompensatedSum total;
  unsigned n = 0;
  for (; n < 10000; ++n) {
    const double term = pmf(n);
    total.add(term);
    if (n > lambda && term < 1e-18) break;
  }
  VerificationReport r("poisson_normalization", std::abs(1.0 - total.value()), 1e-12);
  r.param("sigma", c.s.sigma).param("z", weights_label(params.z)).diag("terms", n + 1.0);
  out.push_back(r);
  return out;
}

Reports suite_uncertainty(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  const NcsParams params{c.s, c.z.value_or(SiteWeights::unit())};
  const NcsState st = ncs_state(params, basis);
  Reports out;
  for (u64 p : basis.primes()) {
    const QuadratureVariances q = quadrature_variances(p, st.state);
    const double dev = std::max(std::abs(q.var_x - 0.5), std::abs(q.var_p - 0.5));
    VerificationReport r("minimal_uncertainty", dev, 3.0 * std::sqrt(st.residual_mass) + 1e-10);
    r.param("p", static_cast<double>(p)).param("sigma", c.s.sigma).param("z", weights_label(params.z));
    r.diag("var_x", q.var_x).diag("var_p", q.var_p).diag("residual_mass", st.residual_mass);
    out.push_back(r);
    VerificationReport h("heisenberg", std::max(0.0, 0.25 - q.var_x * q.var_p), 1e-12);
    h.param("p", static_cast<double>(p)).param("sigma", c.s.sigma).diag("product", q.var_x * q.var_p);
    out.push_back(h);
  }
  return out;
}

Reports suite_displacement(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  const SiteWeights z = c.z.value_or(SiteWeights::unit());
  const Displacement d = displace_vacuum(c.s, z, basis);
  const NcsState target = ncs_state({c.s.conj(), conjugate(z)}, basis);
  const double tol = target.residual_mass + 1e-8;
  const double fidelity = std::abs(target.state.dot(d.state));
  VerificationReport r("displacement_fidelity", std::max(0.0, 1.0 - fidelity), tol);
  r.param("sigma", c.s.sigma).param("t", c.s.t).param("p_max", c.truncation.p_max);
  r.param("z", weights_label(z));
  r.diag("fidelity", fidelity).diag("residual_mass", target.residual_mass);
  r.diag("series_residual", d.series_residual).diag("taylor_terms", d.terms);
  r.diag("boundary_loss", d.boundary_loss).diag("basis_size", static_cast<double>(basis.size()));

  const FockVector factored = displace_vacuum_factored(c.s, z, basis);
  const double agreement = std::abs(factored.dot(d.state)) / (factored.norm() * d.state.norm());
  VerificationReport b("displacement_factored_form", std::max(0.0, 1.0 - agreement), tol);
  b.param("sigma", c.s.sigma).param("t", c.s.t).param("p_max", c.truncation.p_max);
  b.diag("fidelity", agreement).diag("distance", (factored - d.state).norm());
  b.diag("factored_vs_state", (factored - target.state).norm());
  return {r, b};
}

Reports suite_resolution(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  QuadratureSpec q;
  q.radial_order = c.radial_order;
  q.occupation_cap = c.occupation_cap;
  q.prime_support = basis.primes();
  q.subset = c.subset;
  return {resolution_identity_check(c.s, q, basis)};
}

Reports suite_dirichlet_ring(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  Uniform u(1729);
  Reports out;
  for (int trial = 0; trial < 3; ++trial) {
    const DirichletCoefficients f = random_coefficients(u, 12);
    const DirichletCoefficients g = random_coefficients(u, 12);
    out.push_back(dirichlet_ring_check(f, g, c.s, basis).param("trial", trial));
  }
  const NcsParams params{c.s, c.z.value_or(SiteWeights::unit())};
  for (int trial = 0; trial < 3; ++trial) {
    const DirichletCoefficients f = random_coefficients(u, 12);
    const HalfPlanePoint s_prime{u(0.0, 1.0), u(-1.0, 1.0)};
    out.push_back(dirichlet_eigen_check(f, s_prime, params, basis).param("trial", trial));
  }
  return out;
}

Reports suite_holstein(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  Reports out;
  for (u64 p : basis.primes()) out.push_back(verify_holstein_primakoff(p, basis));

  Uniform u(4242);
  double worst = 0.0;
  for (int v = 0; v < 10; ++v) {
    DirichletCoefficients coeffs;
    FockVector vec(basis);
    for (int j = 0; j < 8; ++j) {
      const u64 k = basis[static_cast<std::size_t>(u() * basis.size())].value;
      const Complex val(u(-1.0, 1.0), u(-1.0, 1.0));
      coeffs.add(k, val);
      vec.set(k, vec.at(k) + val);
    }
    for (int m = 0; m < 20; ++m) {
      std::map<u64, double> mu;
      for (u64 p : basis.primes()) mu[p] = u();
      const SparseOperator U = assemble_operator(ops::UMu{mu}, basis);
      worst = std::max(worst, std::abs(ell1(U.apply(vec)) - qplus_fourier(coeffs, mu)));
    }
  }
  VerificationReport r("qplus_fourier", worst, 1e-12);
  r.param("vectors", 10.0).param("phases", 20.0);
  out.push_back(r);
  return out;
}

Reports suite_norms(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  const double sigma = c.s.sigma;
  const SparseOperator lower = assemble_operator(ops::C{c.s, SiteWeights::unit()}, basis);
  const SparseOperator raise = assemble_operator(ops::CDagger{c.s, SiteWeights::unit()}, basis);
  const ValueWithBound p1_2s = prime_zeta({2.0 * sigma, 0.0});
  double basis_mass = 0.0;
  for (u64 p : basis.primes()) basis_mass += std::pow(static_cast<double>(p), -2.0 * sigma);
  const double pmax = static_cast<double>(basis.primes().back());
  const double prime_tail = std::pow(pmax, 1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0) + p1_2s.tail_bound;

  Reports out;
  const unsigned top = std::min(3u, c.truncation.omega_max - 1);
  for (unsigned n = 0; n <= top; ++n) {
    const double sv = block_norm(raise, n, n + 1);
    const double finite = std::sqrt((n + 1.0) * basis_mass);
    if (n <= 1) {
      const double closed = std::sqrt((n + 1.0) * p1_2s.value.real());
      const double tol = std::sqrt((n + 1.0) * (basis_mass + prime_tail)) - finite + 1e-12;
      VerificationReport r("C_dagger_norm_equality", std::abs(sv - closed), tol);
      r.param("n", n).param("sigma", sigma).param("p_max", c.truncation.p_max);
      r.diag("singular_value", sv).diag("closed_form", closed).diag("finite_prime_value", finite);
      r.diag("finite_prime_deviation", std::abs(sv - finite));
      out.push_back(r);
    } else {
      if (!(sigma > 1.0)) continue;
      const double p1 = prime_zeta({sigma, 0.0}).value.real();
      const double p2 = 0.5 * (p1 * p1 + p1_2s.value.real());
      const double bound = std::sqrt(n * p2 + p1_2s.value.real());
      VerificationReport r("C_dagger_norm_bound", std::max(0.0, sv - bound), 1e-12);
      r.param("n", n).param("sigma", sigma).param("p_max", c.truncation.p_max);
      r.diag("singular_value", sv).diag("bound", bound).diag("margin", bound - sv);
      out.push_back(r);
    }
    out.push_back(block_adjoint_check(lower, raise, n));
  }
  return out;
}

Reports suite_commutator(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  const std::vector<Hop> cases{{2, 3, {1.0, 0.0}},  {6, 10, {0.5, 0.5}}, {2, 9, {1.0, -1.0}},
                               {4, 15, {0.0, 1.0}}, {3, 3, {2.0, 0.0}},  {5, 12, {-0.3, 0.7}}};
  Reports out;
  for (const auto& h : cases)
    if (hosted(h.n, basis) && hosted(h.k, basis))
      out.push_back(verify_commutator_number(h.n, h.k, h.h, basis));
  return out;
}

Reports suite_mass(const RunConfig& c) {
  const FockBasis basis(c.truncation);
  return verify_mass_identity(c.s.sigma, basis);
}

// ---------------------------------------------------------------------------------
// Command plumbing

class Sink {
 public:
  Sink(std::ostream& fallback, const std::string& path) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

struct Flags {
  unsigned p_max = 13, a_max = 4, omega_max = 4, guard = 1;
  u64 k_max = 0;
  double sigma = 1.3, t = 0.0;
  std::vector<std::string> z;
  bool z_finite = false;
  std::string format = "csv";
  std::string output;
  unsigned occupation_cap = 4, radial_order = 8;
  std::size_t subset = 50;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--p-max", f.p_max, "largest prime site")->capture_default_str();
  app->add_option("--a-max", f.a_max, "largest exponent per site")->capture_default_str();
  app->add_option("--omega-max", f.omega_max, "largest particle number")->capture_default_str();
  app->add_option("--k-max", f.k_max, "largest label (0 = unbounded)");
  app->add_option("--guard", f.guard, "guard band for interior columns")->capture_default_str();
  app->add_option("--sigma", f.sigma, "real part of s")->capture_default_str();
  app->add_option("--t", f.t, "imaginary part of s")->capture_default_str();
  app->add_option("--z", f.z, "site weight p=re+imi (repeatable)");
  app->add_flag("--z-finite", f.z_finite, "primes without --z carry weight 0 instead of 1");
  app->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--output", f.output, "write to file instead of stdout");
}

TruncationSpec truncation_of(const Flags& f) {
  TruncationSpec t;
  t.p_max = f.p_max;
  t.a_max = f.a_max;
  t.omega_max = f.omega_max;
  t.guard = f.guard;
  if (f.k_max) t.k_max = f.k_max;
  t.validate();
  return t;
}

std::optional<SiteWeights> weights_of(const Flags& f) {
  if (f.z.empty() && !f.z_finite) return std::nullopt;
  SiteVector v;
  for (const auto& a : f.z) {
    const auto [p, z] = parse_site_assignment(a);
    v.set(p, z);
  }
  return f.z_finite ? SiteWeights::finite(v) : SiteWeights::unit_with(v);
}

RunConfig config_of(const Flags& f) {
  RunConfig c;
  c.truncation = truncation_of(f);
  c.s = {f.sigma, f.t};
  c.z = weights_of(f);
  c.occupation_cap = f.occupation_cap;
  c.radial_order = f.radial_order;
  c.subset = f.subset;
  return c;
}

void require_sigma(double sigma, double bound, const std::string& what) {
  if (!(sigma > bound))
    throw std::domain_error(what + " requires sigma > " + format_double(bound) + ", got sigma = " +
                            format_double(sigma));
}

int cmd_verify(const std::string& suite, const Flags& f, std::ostream& out) {
  const RunConfig c = config_of(f);
  const Reports reports = run_suite(suite, c);
  Sink sink(out, f.output);
  bool all = !reports.empty();
  if (f.format == "csv")
    *sink << "# primefock verify schema_version=" << kCsvSchemaVersion << " suite=" << suite
          << "\ncheck,pass,residual,tolerance,parameters\n";
  for (const auto& r : reports) {
    all = all && r.pass;
    if (f.format == "json") {
      json j = to_json(r);
      j["suite"] = suite;
      *sink << j.dump() << '\n';
      continue;
    }
    std::string params;
    for (const auto& [k, v] : r.parameters) params += (params.empty() ? "" : ";") + k + '=' + v;
    *sink << r.check << ',' << (r.pass ? "pass" : "fail") << ',' << format_double(r.residual) << ','
          << format_double(r.tolerance) << ',' << params << '\n';
  }
  return all ? kPass : kFailure;
}

int cmd_ncs(const std::string& action, const Flags& f, const std::string& observable,
            unsigned n_max, const BoseHubbardParams& bh, std::ostream& out) {
  const RunConfig c = config_of(f);
  require_sigma(c.s.sigma, 0.5, "normalizability of |s, z>");
  const NcsParams params{c.s, c.z.value_or(SiteWeights::unit())};
  Sink sink(out, f.output);
  const std::string header = "# primefock ncs " + action + " schema_version=" +
                             std::to_string(kCsvSchemaVersion) + " sigma=" + format_double(c.s.sigma) +
                             " t=" + format_double(c.s.t) + " z=" + weights_label(params.z);

  if (action == "amplitudes") {
    const FockBasis basis(c.truncation);
    const NcsState st = ncs_state(params, basis);
    if (f.format == "json") {
      json j{{"schema_version", kSchemaVersion}, {"sigma", c.s.sigma}, {"t", c.s.t}};
      j["rows"] = json::array();
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const Complex a = st.state.amplitudes()[static_cast<Eigen::Index>(i)];
        j["rows"].push_back({{"k", basis[i].value}, {"re", a.real()}, {"im", a.imag()}, {"abs2", std::norm(a)}});
      }
      j["residual_mass"] = st.residual_mass;
      *sink << j.dump(2) << '\n';
    } else {
      *sink << header << "\nk,re,im,abs2\n";
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const Complex a = st.state.amplitudes()[static_cast<Eigen::Index>(i)];
        *sink << basis[i].value << ',' << format_double(a.real()) << ',' << format_double(a.imag())
              << ',' << format_double(std::norm(a)) << '\n';
      }
      *sink << "# residual_mass=" << format_double(st.residual_mass) << '\n';
    }
    return kPass;
  }

  if (action == "pmf") {
    const double lambda = ncs_log_norm(params).value.real();
    std::vector<double> probs;
    for (unsigned n = 0; n <= n_max; ++n)
      probs.push_back(c.z ? std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0))
                          : particle_number_pmf(c.s, n));
    if (f.format == "json") {
      json j{{"schema_version", kSchemaVersion}, {"sigma", c.s.sigma}, {"mean", lambda}};
      j["rows"] = json::array();
      for (unsigned n = 0; n <= n_max; ++n) j["rows"].push_back({{"n", n}, {"probability", probs[n]}});
      *sink << j.dump(2) << '\n';
    } else {
      *sink << header << "\nn,probability\n";
      for (unsigned n = 0; n <= n_max; ++n) *sink << n << ',' << format_double(probs[n]) << '\n';
    }
    return kPass;
  }

  // expect
  const FockBasis basis(c.truncation);
  const NcsState st = ncs_state(params, basis);
  double closed = 0.0, bound = 0.0, truncated = 0.0;
  const auto& amps = st.state.amplitudes();
  if (observable == "N") {
    const NumberMoments m = ncs_number_expectation(params);
    closed = m.mean;
    bound = m.tail_bound;
    for (std::size_t i = 0; i < basis.size(); ++i)
      truncated += std::norm(amps[static_cast<Eigen::Index>(i)]) * basis[i].big_omega;
  } else if (observable == "N2") {
    const NumberMoments m = ncs_number_expectation(params);
    closed = m.site_second_moment;
    bound = m.tail_bound;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double sq = 0.0;
      for (const auto& [p, a] : basis[i].exponents) sq += static_cast<double>(a) * a;
      truncated += std::norm(amps[static_cast<Eigen::Index>(i)]) * sq;
    }
  } else if (observable == "bose-hubbard") {
    if (params.z.unit_elsewhere) {
      if (!params.z.values.empty())
        throw std::invalid_argument("bose-hubbard closed form takes either no --z or --z-finite");
      if (bh.tau != 0.0) require_sigma(c.s.sigma, 1.0, "the hopping term |P_1(s)|^2");
      const ValueWithBound v = bose_hubbard_expectation(c.s, bh);
      closed = v.value.real();
      bound = v.tail_bound;
    } else {
      closed = bose_hubbard_expectation(c.s, params.z.values, bh);
    }
    const SparseOperator H = bose_hubbard_operator(basis, bh);
    truncated = st.state.dot(H.apply(st.state)).real();
  } else {  // tower
    if (params.z.unit_elsewhere) require_sigma(c.s.sigma, 1.0, "the tower sum of |P_m(s)|^2");
    const ValueWithBound v = pn_tower_expectation(c.s, params.z, n_max);
    closed = v.value.real();
    bound = v.tail_bound;
    truncated = pn_tower_quadratic_form(st.state, n_max);
  }
  if (f.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"observable", observable},
           {"sigma", c.s.sigma},             {"t", c.s.t},
           {"closed_form", closed},          {"tail_bound", bound},
           {"truncated", truncated},         {"residual_mass", st.residual_mass}};
    *sink << j.dump(2) << '\n';
  } else {
    *sink << header << "\nobservable,closed_form,tail_bound,truncated,residual_mass\n"
          << observable << ',' << format_double(closed) << ',' << format_double(bound) << ','
          << format_double(truncated) << ',' << format_double(st.residual_mass) << '\n';
  }
  return kPass;
}

struct SpectrumFlags {
  unsigned N = 5, n = 3, m_lowest = 15;
  double gamma = 1.0, delta = 0.0;
  std::optional<double> tau;
  double tau_start = 0.0, tau_stop = 1.2, tau_step = 0.01;
  bool figure1 = false, transitions = false, check = false;
  std::string out_dir = ".";
};

inline constexpr u64 kSweepDimensionCap = 200'000;

int cmd_spectrum(const SpectrumFlags& sf, const Flags& f, std::ostream& out) {
  FiniteArrayParams p;
  p.N = sf.N;
  p.n = sf.n;
  p.gamma = sf.gamma;
  p.delta = sf.delta;
  p.s = {f.sigma, f.t};
  if (p.N == 0) throw std::invalid_argument("-N must be >= 1");

  if (sf.figure1) {
    p.N = 5;
    p.n = 3;
    p.gamma = 1.0;
    const auto taus = tau_grid(0.0, 1.2, 0.01);
    std::filesystem::create_directories(sf.out_dir);
    for (double delta : {0.0, 1.0}) {
      p.delta = delta;
      SpectrumTable t = spectrum_sweep(p, taus, 15);
      t.notes.push_back("preset N=5 n=3 gamma=1 m_lowest=15; tau grid 0:0.01:1.2 is a chosen default");
      const std::string name = std::string("figure1_delta") + (delta == 0.0 ? "0" : "1") +
                               (f.format == "json" ? ".json" : ".csv");
      const auto path = std::filesystem::path(sf.out_dir) / name;
      std::ofstream file(path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open output file " + path.string());
      if (f.format == "json")
        file << to_json(t).dump(2) << '\n';
      else
        file << to_csv(t);
      out << "wrote " << path.string() << '\n';
    }
    return kPass;
  }

  const u64 dim = binomial(p.n + p.N - 1, p.N - 1);
  if (dim > kSweepDimensionCap)
    throw ResourceError("spectrum: dimension " + std::to_string(dim) + " exceeds the sweep cap of " +
                        std::to_string(kSweepDimensionCap));
  const std::vector<double> taus =
      sf.tau ? std::vector<double>{*sf.tau} : tau_grid(sf.tau_start, sf.tau_stop, sf.tau_step);
  Sink sink(out, f.output);

  if (sf.transitions) {
    const auto tr = ground_state_transition(p, taus);
    if (f.format == "json") {
      *sink << to_json(tr).dump(2) << '\n';
    } else {
      *sink << "# primefock transitions schema_version=" << kCsvSchemaVersion << " N=" << p.N
            << " n=" << p.n << " gamma=" << format_double(p.gamma)
            << " delta=" << format_double(p.delta) << "\ntau_lo,tau_hi,from,to\n";
      for (const auto& t : tr)
        *sink << format_double(t.tau_lo) << ',' << format_double(t.tau_hi) << ',' << t.from.str()
              << ',' << t.to.str() << '\n';
    }
    return kPass;
  }

  const unsigned m = static_cast<unsigned>(std::min<u64>(sf.m_lowest, dim));
  SpectrumTable t = spectrum_sweep(p, taus, m);
  int code = kPass;
  if (sf.check) {
    double worst = 0.0;
    for (double tau : taus) {
      FiniteArrayParams q = p;
      q.tau = tau;
      const auto exact = multi_particle_spectrum(q);
      const auto brute = brute_force_spectrum(q);
      for (std::size_t i = 0; i < exact.size(); ++i)
        worst = std::max(worst, std::abs(exact[i].eigenvalue - brute.eigenvalues[i]));
    }
    t.notes.push_back("brute_force_max_deviation=" + format_double(worst));
    if (worst > 1e-9) code = kFailure;
  }
  if (f.format == "json")
    *sink << to_json(t).dump(2) << '\n';
  else
    *sink << to_csv(t);
  return code;
}

}  // namespace

std::vector<VerificationReport> run_suite(const std::string& suite, const RunConfig& config) {
  static const std::map<std::string, std::function<Reports(const RunConfig&)>> table{
      {"ccr", suite_ccr},
      {"eigen", suite_eigen},
      {"poisson", suite_poisson},
      {"uncertainty", suite_uncertainty},
      {"displacement", suite_displacement},
      {"resolution", suite_resolution},
      {"dirichlet-ring", suite_dirichlet_ring},
      {"holstein", suite_holstein},
      {"norms", suite_norms},
      {"commutator", suite_commutator},
      {"mass", suite_mass}};
  const auto it = table.find(suite);
  if (it == table.end()) throw std::invalid_argument("unknown suite: " + suite);
  return it->second(config);
}

Complex parse_complex(const std::string& text) {
  auto fail = [&] { return std::invalid_argument("cannot parse complex value '" + text + "'"); };
  auto number = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != s.size()) throw fail();
    return v;
  };
  if (text.empty()) throw fail();
  if (text.back() != 'i') return {number(text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string::npos) return {0.0, number(body)};
  const std::string re = body.substr(0, split);
  if (re.empty()) throw fail();
  return {number(re), number(body.substr(split))};
}

std::pair<u64, Complex> parse_site_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("site assignment '" + text + "' must look like p=re+imi");
  u64 p = 0;
  try {
    std::size_t used = 0;
    p = std::stoull(text.substr(0, eq), &used);
    if (used != eq) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("site assignment '" + text + "' has a malformed prime");
  }
  if (p < 2 || factorize(p).big_omega != 1)
    throw std::invalid_argument("site assignment '" + text + "': " + std::to_string(p) + " is not prime");
  return {p, parse_complex(text.substr(eq + 1))};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"primefock: prime-labeled Fock space numerics"};
  app.require_subcommand(1);
  Flags f;

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  add_common(verify, f);
  verify->add_option("--occupation-cap", f.occupation_cap, "resolution: largest occupation")
      ->capture_default_str();
  verify->add_option("--radial-order", f.radial_order, "resolution: Gauss-Laguerre order")
      ->capture_default_str();
  verify->add_option("--subset", f.subset, "resolution: diagonal subset size (0 = all)")
      ->capture_default_str();

  std::string action, observable = "N";
  unsigned n_max = 10;
  BoseHubbardParams bh;
  auto* ncs = app.add_subcommand("ncs", "coherent state amplitudes, expectations and statistics");
  ncs->add_option("action", action, "amplitudes, expect or pmf")
      ->required()
      ->check(CLI::IsMember({"amplitudes", "expect", "pmf"}));
  add_common(ncs, f);
  ncs->add_option("--observable", observable, "N, N2, bose-hubbard or tower")
      ->check(CLI::IsMember({"N", "N2", "bose-hubbard", "tower"}))
      ->capture_default_str();
  ncs->add_option("--n-max", n_max, "pmf: largest n; tower: largest particle number")
      ->capture_default_str();
  ncs->add_option("--U", bh.U, "bose-hubbard on-site interaction")->capture_default_str();
  ncs->add_option("--mu", bh.mu_chem, "bose-hubbard chemical potential")->capture_default_str();
  ncs->add_option("--hop", bh.tau, "bose-hubbard hopping")->capture_default_str();

  SpectrumFlags sf;
  auto* spectrum = app.add_subcommand("spectrum", "finite-array multi-particle spectra");
  add_common(spectrum, f);
  spectrum->add_option("-N", sf.N, "number of sites")->capture_default_str();
  spectrum->add_option("-n", sf.n, "number of particles")->capture_default_str();
  spectrum->add_option("--gamma", sf.gamma, "on-site energy")->capture_default_str();
  spectrum->add_option("--delta", sf.delta, "quadratic coefficient")->capture_default_str();
  auto* tau_opt = spectrum->add_option("--tau", sf.tau, "single hopping value");
  spectrum->add_option("--tau-start", sf.tau_start, "grid start")->capture_default_str()->excludes(tau_opt);
  spectrum->add_option("--tau-stop", sf.tau_stop, "grid stop")->capture_default_str()->excludes(tau_opt);
  spectrum->add_option("--tau-step", sf.tau_step, "grid step")->capture_default_str()->excludes(tau_opt);
  spectrum->add_option("--m-lowest", sf.m_lowest, "modes per tau")->capture_default_str();
  spectrum->add_flag("--figure1", sf.figure1, "write the two preset sweeps to --out-dir");
  spectrum->add_flag("--transitions", sf.transitions, "report ground-state changes over the grid");
  spectrum->add_flag("--check", sf.check, "cross-check against dense diagonalization");
  spectrum->add_option("--out-dir", sf.out_dir, "directory for --figure1")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(suite, f, out);
    if (ncs->parsed()) return cmd_ncs(action, f, observable, n_max, bh, out);
    return cmd_spectrum(sf, f, out);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const TruncationError& e) {
    err << "truncation error: " << e.what() << '\n';
    return kFailure;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << " (achieved " << format_double(e.achieved()) << ")\n";
    return kFailure;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace primefock::cli
