#include "primefock/fock.hpp"

#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "primefock/summation.hpp"

namespace primefock {

// ---------------------------------------------------------------------------
// FockVector

FockVector::FockVector(const FockBasis& basis, Eigen::VectorXcd amplitudes)
    : basis_(&basis), amps_(std::move(amplitudes)) {
  if (amps_.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("FockVector: amplitude count does not match basis size");
}

FockVector FockVector::basis_state(const FockBasis& basis, u64 k) {
  auto i = basis.index_of(k);
  if (!i) throw std::out_of_range("basis_state: " + std::to_string(k) + " is not in the basis");
  FockVector v(basis);
  v.amps_[static_cast<Eigen::Index>(*i)] = 1.0;
  return v;
}

Complex FockVector::at(u64 k) const {
  auto i = basis_->index_of(k);
  return i ? amps_[static_cast<Eigen::Index>(*i)] : Complex{};
}

void FockVector::set(u64 k, Complex value) {
  auto i = basis_->index_of(k);
  if (!i) throw std::out_of_range("FockVector::set: " + std::to_string(k) + " is not in the basis");
  amps_[static_cast<Eigen::Index>(*i)] = value;
}

void FockVector::require_same_basis(const FockVector& o) const {
  if (basis_ != o.basis_) throw std::invalid_argument("FockVector: vectors live on different bases");
}

Complex FockVector::dot(const FockVector& other) const {
  require_same_basis(other);
  return amps_.dot(other.amps_);
}

FockVector& FockVector::operator+=(const FockVector& o) {
  require_same_basis(o);
  amps_ += o.amps_;
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& o) {
  require_same_basis(o);
  amps_ -= o.amps_;
  return *this;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

struct Assembly {
  const FockBasis& basis;
  BoundaryPolicy policy;
  Triplets triplets;
  double loss = 0.0;
  std::vector<u64> escaped;

  void put(std::size_t row, std::size_t col, Complex v) {
    if (v != Complex{})
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  }

  void lost(std::size_t col, Complex v) {
    loss += std::norm(v);
    const u64 k = basis[col].value;
    if (escaped.empty() || escaped.back() != k) escaped.push_back(k);
  }

  SparseOperator finish(std::string name) {
    if (policy == BoundaryPolicy::strict && !escaped.empty()) {
      std::ostringstream os;
      os << name << ": image leaves the basis for " << escaped.size() << " source state(s), first k = "
         << escaped.front();
      throw TruncationError(os.str(), escaped);
    }
    SparseOperator op;
    op.basis = &basis;
    const auto n = static_cast<Eigen::Index>(basis.size());
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    op.name = std::move(name);
    op.boundary_loss = loss;
    op.escaped = std::move(escaped);
    return op;
  }
};

/// Requires every prime factor of n to be a basis prime.
FactoredInt hosted(u64 n, const FockBasis& basis, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": index must be >= 1");
  FactoredInt f = factorize(n);
  for (const auto& [p, a] : f.exponents)
    if (p > basis.spec().p_max)
      throw std::invalid_argument(std::string(what) + ": " + std::to_string(n) +
                                  " has a prime factor above p_max");
  return f;
}

u64 require_prime_site(u64 p, const FockBasis& basis, const char* what) {
  const auto& ps = basis.primes();
  if (!std::binary_search(ps.begin(), ps.end(), p))
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(p) +
                                " is not a prime site of the basis");
  return p;
}

/// x_k / x_{k/n} when n | k, else 0.
double lowering_ratio(const FactoredInt& k, const FactoredInt& n) {
  double r = 1.0;
  for (const auto& [p, b] : n.exponents) {
    const unsigned a = k.exponent(p);
    if (a < b) return 0.0;
    for (unsigned j = a - b + 1; j <= a; ++j) r *= j;
  }
  return std::sqrt(r);
}

/// x_{kn} / x_k.
double raising_ratio(const FactoredInt& k, const FactoredInt& n) {
  double r = 1.0;
  for (const auto& [p, b] : n.exponents) {
    const unsigned a = k.exponent(p);
    for (unsigned j = a + 1; j <= a + b; ++j) r *= j;
  }
  return std::sqrt(r);
}

void add_lowering(Assembly& as, const FactoredInt& n, Complex scale) {
  const auto& basis = as.basis;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const FactoredInt& k = basis[col];
    if (k.value % n.value != 0) continue;
    const double r = lowering_ratio(k, n);
    as.put(*basis.index_of(k.value / n.value), col, scale * r);
  }
}

void add_raising(Assembly& as, const FactoredInt& n, Complex scale) {
  const auto& basis = as.basis;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const FactoredInt& k = basis[col];
    const Complex v = scale * raising_ratio(k, n);
    u64 kn;
    if (__builtin_mul_overflow(k.value, n.value, &kn)) {
      as.lost(col, v);
      continue;
    }
    if (auto row = basis.index_of(kn))
      as.put(*row, col, v);
    else
      as.lost(col, v);
  }
}

template <typename Fn>
void add_diagonal(Assembly& as, Fn value) {
  for (std::size_t i = 0; i < as.basis.size(); ++i) as.put(i, i, value(as.basis[i]));
}

std::string fmt(Complex z) { return format_double(z.real()) + (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i"; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

SparseOperator combine(const SparseOperator& a, Complex ca, const SparseOperator& b, Complex cb,
                       std::string name) {
  SparseOperator out;
  out.basis = a.basis;
  out.matrix = ca * a.matrix + cb * b.matrix;
  out.matrix.prune(Complex{});
  out.name = std::move(name);
  out.boundary_loss = std::norm(ca) * a.boundary_loss + std::norm(cb) * b.boundary_loss;
  out.escaped = a.escaped;
  out.escaped.insert(out.escaped.end(), b.escaped.begin(), b.escaped.end());
  std::sort(out.escaped.begin(), out.escaped.end());
  out.escaped.erase(std::unique(out.escaped.begin(), out.escaped.end()), out.escaped.end());
  return out;
}

}  // namespace

std::string describe(const OperatorSpec& spec) {
  return std::visit(
      overloaded{
          [](const ops::Annihilate& o) { return "annihilate(" + std::to_string(o.n) + ")"; },
          [](const ops::Create& o) { return "create(" + std::to_string(o.n) + ")"; },
          [](const ops::Number& o) { return "number(" + std::to_string(o.p) + ")"; },
          [](const ops::TotalNumber&) { return std::string("total_number"); },
          [](const ops::Project& o) { return "project(" + std::to_string(o.n) + ")"; },
          [](const ops::QuadX& o) { return "quad_X(" + std::to_string(o.p) + ")"; },
          [](const ops::QuadP& o) { return "quad_P(" + std::to_string(o.p) + ")"; },
          [](const ops::C& o) { return "C(" + fmt(o.s.value()) + ")"; },
          [](const ops::CDagger& o) { return "C_dagger(" + fmt(o.s.value()) + ")"; },
          [](const ops::F& o) {
            return "F(" + fmt(o.s.value()) + ", " + std::to_string(o.f.size()) + " terms)";
          },
          [](const ops::UMu& o) { return "U_mu(" + std::to_string(o.mu.size()) + " sites)"; },
          [](const ops::Shift& o) { return "shift(" + std::to_string(o.p) + ")"; },
          [](const ops::ShiftDagger& o) { return "shift_dagger(" + std::to_string(o.p) + ")"; },
      },
      spec);
}

SparseOperator assemble_operator(const OperatorSpec& spec, const FockBasis& basis,
                                 BoundaryPolicy policy) {
  const std::string name = describe(spec);
  Assembly as{basis, policy, {}, 0.0, {}};
  constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  const Complex I{0.0, 1.0};

  return std::visit(
      overloaded{
          [&](const ops::Annihilate& o) {
            add_lowering(as, hosted(o.n, basis, "annihilate"), 1.0);
            return as.finish(name);
          },
          [&](const ops::Create& o) {
            add_raising(as, hosted(o.n, basis, "create"), 1.0);
            return as.finish(name);
          },
          [&](const ops::Number& o) {
            const u64 p = require_prime_site(o.p, basis, "number");
            add_diagonal(as, [p](const FactoredInt& k) { return Complex(k.exponent(p)); });
            return as.finish(name);
          },
          [&](const ops::TotalNumber&) {
            add_diagonal(as, [](const FactoredInt& k) { return Complex(k.big_omega); });
            return as.finish(name);
          },
          [&](const ops::Project& o) {
            add_diagonal(as, [n = o.n](const FactoredInt& k) {
              return k.big_omega == n ? Complex{1.0} : Complex{};
            });
            return as.finish(name);
          },
          [&](const ops::QuadX& o) {
            require_prime_site(o.p, basis, "quad_X");
            auto a = assemble_operator(ops::Annihilate{o.p}, basis, policy);
            auto ad = assemble_operator(ops::Create{o.p}, basis, policy);
            return combine(a, kInvSqrt2, ad, kInvSqrt2, name);
          },
          [&](const ops::QuadP& o) {
            require_prime_site(o.p, basis, "quad_P");
            auto a = assemble_operator(ops::Annihilate{o.p}, basis, policy);
            auto ad = assemble_operator(ops::Create{o.p}, basis, policy);
            return combine(a, -I * kInvSqrt2, ad, I * kInvSqrt2, name);
          },
          [&](const ops::C& o) {
            for (u64 p : basis.primes()) {
              const Complex zp = o.z.at(p);
              if (zp == Complex{}) continue;
              add_lowering(as, factorize(p), pow_neg(p, o.s.value()) * zp);
            }
            return as.finish(name);
          },
          [&](const ops::CDagger& o) {
            for (u64 p : basis.primes()) {
              const Complex zp = o.z.at(p);
              if (zp == Complex{}) continue;
              add_raising(as, factorize(p), pow_neg(p, o.s.conj().value()) * std::conj(zp));
            }
            return as.finish(name);
          },
          [&](const ops::F& o) {
            for (const auto& [n, fn] : o.f.entries()) {
              const FactoredInt nf = factorize(n);
              // a_n vanishes on the basis when n has a prime factor beyond p_max
              if (!nf.exponents.empty() && nf.exponents.back().first > basis.spec().p_max)
                continue;
              add_lowering(as, nf, fn * pow_neg(n, o.s.value()));
            }
            return as.finish(name);
          },
          [&](const ops::UMu& o) {
            for (const auto& [p, m] : o.mu)
              if (!(m >= 0.0 && m < 1.0))
                throw std::invalid_argument("U_mu: mu entries must lie in [0, 1)");
            add_diagonal(as, [&](const FactoredInt& k) {
              double phase = 0.0;
              for (const auto& [p, a] : k.exponents)
                if (auto it = o.mu.find(p); it != o.mu.end()) phase += a * it->second;
              return std::polar(1.0, 2.0 * std::numbers::pi * phase);
            });
            return as.finish(name);
          },
          [&](const ops::Shift& o) {
            const u64 p = require_prime_site(o.p, basis, "shift");
            for (std::size_t col = 0; col < basis.size(); ++col) {
              if (auto row = basis.index_of(basis[col].value * p))
                as.put(*row, col, 1.0);
              else
                as.lost(col, 1.0);
            }
            return as.finish(name);
          },
          [&](const ops::ShiftDagger& o) {
            const u64 p = require_prime_site(o.p, basis, "shift_dagger");
            for (std::size_t col = 0; col < basis.size(); ++col)
              if (basis[col].value % p == 0) as.put(*basis.index_of(basis[col].value / p), col, 1.0);
            return as.finish(name);
          },
      },
      spec);
}

FockVector SparseOperator::apply(const FockVector& v) const {
  if (&v.basis() != basis) throw std::invalid_argument("SparseOperator::apply: basis mismatch");
  return FockVector(*basis, matrix * v.amplitudes());
}

FockVector apply_annihilate(u64 n, const FockVector& v) {
  const FockBasis& basis = v.basis();
  const FactoredInt nf = hosted(n, basis, "apply_annihilate");
  FockVector out(basis);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex a = v.amplitudes()[static_cast<Eigen::Index>(i)];
    const FactoredInt& k = basis[i];
    if (a == Complex{} || k.value % n != 0) continue;
    out.amplitudes()[static_cast<Eigen::Index>(*basis.index_of(k.value / n))] +=
        a * lowering_ratio(k, nf);
  }
  return out;
}

FockVector apply_create(u64 n, const FockVector& v, BoundaryPolicy policy) {
  const FockBasis& basis = v.basis();
  const FactoredInt nf = hosted(n, basis, "apply_create");
  FockVector out(basis);
  std::vector<u64> offending;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex a = v.amplitudes()[static_cast<Eigen::Index>(i)];
    if (a == Complex{}) continue;
    const FactoredInt& k = basis[i];
    u64 kn;
    std::optional<std::size_t> row;
    if (!__builtin_mul_overflow(k.value, n, &kn)) row = basis.index_of(kn);
    if (!row) {
      offending.push_back(k.value);
      continue;
    }
    out.amplitudes()[static_cast<Eigen::Index>(*row)] += a * raising_ratio(k, nf);
  }
  if (policy == BoundaryPolicy::strict && !offending.empty())
    throw TruncationError("apply_create(" + std::to_string(n) + "): support escapes the basis at k = " +
                              std::to_string(offending.front()),
                          offending);
  return out;
}

// ---------------------------------------------------------------------------
// Identity checks

std::vector<std::size_t> interior_columns(const FockBasis& basis) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.interior(i)) cols.push_back(i);
  return cols;
}

double max_abs_on_columns(const SparseMatrix& m, const std::vector<std::size_t>& columns,
                          Complex diagonal_shift) {
  double worst = 0.0;
  for (std::size_t c : columns) {
    const int col = static_cast<int>(c);
    bool saw_diagonal = false;
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      Complex v = it.value();
      if (it.row() == col) {
        v -= diagonal_shift;
        saw_diagonal = true;
      }
      worst = std::max(worst, std::abs(v));
    }
    if (!saw_diagonal) worst = std::max(worst, std::abs(diagonal_shift));
  }
  return worst;
}

namespace {

SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix c = (a * b).pruned() - (b * a).pruned();
  return c;
}

}  // namespace

VerificationReport verify_ccr(const FockBasis& basis, u64 p, u64 q) {
  const auto cols = interior_columns(basis);
  auto A = [&](u64 r) { return assemble_operator(ops::Annihilate{r}, basis).matrix; };
  auto Ad = [&](u64 r) { return assemble_operator(ops::Create{r}, basis).matrix; };
  auto X = [&](u64 r) { return assemble_operator(ops::QuadX{r}, basis).matrix; };
  auto P = [&](u64 r) { return assemble_operator(ops::QuadP{r}, basis).matrix; };
  const double delta = p == q ? 1.0 : 0.0;
  const Complex I{0.0, 1.0};

  const double a_ad = max_abs_on_columns(commutator(A(p), Ad(q)), cols, delta);
  const double a_a = max_abs_on_columns(commutator(A(p), A(q)), cols);
  const double ad_ad = max_abs_on_columns(commutator(Ad(p), Ad(q)), cols);
  const double x_p = max_abs_on_columns(commutator(X(p), P(q)), cols, I * delta);
  const double x_x = max_abs_on_columns(commutator(X(p), X(q)), cols);
  const double p_p = max_abs_on_columns(commutator(P(p), P(q)), cols);

  const double worst = std::max({a_ad, a_a, ad_ad, x_p, x_x, p_p});
  VerificationReport r("ccr", worst, 1e-12);
  r.param("p", static_cast<double>(p)).param("q", static_cast<double>(q));
  r.param("p_max", basis.spec().p_max).param("a_max", basis.spec().a_max);
  r.param("omega_max", basis.spec().omega_max).param("guard", basis.spec().guard);
  r.diag("a_adag", a_ad).diag("a_a", a_a).diag("adag_adag", ad_ad);
  r.diag("X_P", x_p).diag("X_X", x_x).diag("P_P", p_p);
  r.diag("interior_columns", static_cast<double>(cols.size()));
  return r;
}

BlockRestriction block_restrict(const SparseOperator& op, unsigned from, unsigned to) {
  const FockBasis& basis = *op.basis;
  BlockRestriction b;
  b.from = from;
  b.to = to;
  b.cols = basis.block(from);
  b.rows = basis.block(to);
  if (b.cols.empty() || b.rows.empty())
    throw std::domain_error("block_restrict: degenerate block (sector " +
                            std::to_string(b.cols.empty() ? from : to) + " is empty)");
  std::vector<long> row_pos(basis.size(), -1);
  for (std::size_t i = 0; i < b.rows.size(); ++i) row_pos[b.rows[i]] = static_cast<long>(i);
  b.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.rows.size()),
                                    static_cast<Eigen::Index>(b.cols.size()));
  for (std::size_t j = 0; j < b.cols.size(); ++j)
    for (SparseMatrix::InnerIterator it(op.matrix, static_cast<int>(b.cols[j])); it; ++it)
      if (row_pos[it.row()] >= 0) b.matrix(row_pos[it.row()], static_cast<Eigen::Index>(j)) = it.value();
  return b;
}

VerificationReport block_adjoint_check(const SparseOperator& lowering,
                                       const SparseOperator& raising, unsigned n) {
  const BlockRestriction down = block_restrict(lowering, n + 1, n);
  const BlockRestriction up = block_restrict(raising, n, n + 1);
  const double dev = (down.matrix - up.matrix.adjoint()).cwiseAbs().maxCoeff();
  VerificationReport r("block_adjoint", dev, 1e-14);
  r.param("n", n).param("lowering", lowering.name).param("raising", raising.name);
  r.diag("rows", static_cast<double>(up.rows.size())).diag("cols", static_cast<double>(up.cols.size()));
  return r;
}

double block_norm(const SparseOperator& op, unsigned from, unsigned to) {
  const BlockRestriction b = block_restrict(op, from, to);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b.matrix);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double one_norm(const SparseMatrix& m) {
  double worst = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) col += std::abs(it.value());
    worst = std::max(worst, col);
  }
  return worst;
}

Displacement displace_vacuum(HalfPlanePoint s, const SiteWeights& z, const FockBasis& basis,
                             double tol) {
  if (!(s.sigma > 1.0))
    throw std::domain_error("displace_vacuum: requires sigma > 1");
  const SparseOperator c = assemble_operator(ops::C{s, z}, basis);
  const SparseOperator cd = assemble_operator(ops::CDagger{s, z}, basis);
  const SparseMatrix gen = cd.matrix - c.matrix;
  const ExpmAction e =
      expm_action(gen, FockVector::basis_state(basis, 1).amplitudes(), one_norm(gen), tol);
  return {FockVector(basis, e.value), e.series_residual, e.terms, cd.boundary_loss};
}

FockVector displace_vacuum_factored(HalfPlanePoint s, const SiteWeights& z,
                                    const FockBasis& basis) {
  const SparseOperator c = assemble_operator(ops::C{s, z}, basis);
  const SparseOperator cd = assemble_operator(ops::CDagger{s, z}, basis);
  const double P = prime_zeta_weighted(Complex(2.0 * s.sigma), SiteWeights{z.values.abs_pow(1), z.unit_elsewhere})
                       .value.real();

  // exp(-C)|1>: C lowers Omega, so the series stops after omega_max + 1 terms.
  const unsigned levels = basis.spec().omega_max;
  auto nilpotent_exp = [&](const SparseMatrix& m, Complex scale, Eigen::VectorXcd v) {
    Eigen::VectorXcd term = v;
    for (unsigned j = 1; j <= levels; ++j) {
      term = (m * term).eval() * (scale / static_cast<double>(j));
      v += term;
    }
    return v;
  };
  Eigen::VectorXcd v = FockVector::basis_state(basis, 1).amplitudes();
  v = nilpotent_exp(c.matrix, -1.0, v);
  v = nilpotent_exp(cd.matrix, 1.0, v);
  return FockVector(basis, std::exp(-P / 2.0) * v);
}

VerificationReport verify_holstein_primakoff(u64 p, const FockBasis& basis) {
  require_prime_site(p, basis, "holstein_primakoff");
  const auto cols = interior_columns(basis);
  const SparseMatrix A = assemble_operator(ops::Annihilate{p}, basis).matrix;
  const SparseMatrix Ad = assemble_operator(ops::Create{p}, basis).matrix;
  const SparseMatrix N = assemble_operator(ops::Number{p}, basis).matrix;
  const SparseMatrix S = assemble_operator(ops::Shift{p}, basis).matrix;
  const SparseMatrix Sd = assemble_operator(ops::ShiftDagger{p}, basis).matrix;

  Triplets t;
  for (std::size_t i = 0; i < basis.size(); ++i)
    t.emplace_back(static_cast<int>(i), static_cast<int>(i),
                   Complex(1.0 / std::sqrt(basis[i].exponent(p) + 1.0)));
  SparseMatrix root(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size()));
  root.setFromTriplets(t.begin(), t.end());

  const SparseMatrix lower = root * Sd * N;
  const SparseMatrix raise = N * S * root;
  const double dl = max_abs_on_columns((A - lower).pruned(), cols);
  const double dr = max_abs_on_columns((Ad - raise).pruned(), cols);

  VerificationReport r("holstein_primakoff", std::max(dl, dr), 1e-12);
  r.param("p", static_cast<double>(p));
  r.diag("annihilation_deviation", dl).diag("creation_deviation", dr);
  r.diag("interior_columns", static_cast<double>(cols.size()));
  return r;
}

VerificationReport verify_commutator_number(u64 n, u64 k, Complex h, const FockBasis& basis) {
  const FactoredInt nf = hosted(n, basis, "commutator_number");
  const FactoredInt kf = hosted(k, basis, "commutator_number");
  const auto cols = interior_columns(basis);
  const SparseMatrix An = assemble_operator(ops::Annihilate{n}, basis).matrix;
  const SparseMatrix Ak = assemble_operator(ops::Annihilate{k}, basis).matrix;
  const SparseMatrix Adn = assemble_operator(ops::Create{n}, basis).matrix;
  const SparseMatrix Adk = assemble_operator(ops::Create{k}, basis).matrix;
  const SparseMatrix N = assemble_operator(ops::TotalNumber{}, basis).matrix;

  const SparseMatrix nk = Adn * Ak;
  const SparseMatrix kn = Adk * An;
  const SparseMatrix H = h * nk + std::conj(h) * kn;
  const SparseMatrix lhs = commutator(H, N);
  const double d = static_cast<double>(kf.big_omega) - static_cast<double>(nf.big_omega);
  const SparseMatrix rhs = (h * d) * nk + (std::conj(h) * (-d)) * kn;

  const double residual = max_abs_on_columns((lhs - rhs).pruned(), cols);
  VerificationReport r("commutator_number", residual, 1e-12);
  r.param("n", static_cast<double>(n)).param("k", static_cast<double>(k));
  r.param("h", fmt(h));
  r.diag("commutator_max", max_abs_on_columns(lhs, cols));
  r.diag("omega_n", nf.big_omega).diag("omega_k", kf.big_omega);
  return r;
}

Complex ell1(const FockVector& v) {
  ComplexSum acc;
  for (Eigen::Index i = 0; i < v.amplitudes().size(); ++i) acc.add(v.amplitudes()[i]);
  return acc.value();
}

Complex qplus_fourier(const DirichletCoefficients& c, const std::map<u64, double>& mu) {
  ComplexSum acc;
  for (const auto& [n, cn] : c.entries()) {
    double phase = 0.0;
    for (const auto& [p, a] : factorize(n).exponents)
      if (auto it = mu.find(p); it != mu.end()) phase += a * it->second;
    acc.add(cn * std::polar(1.0, 2.0 * std::numbers::pi * phase));
  }
  return acc.value();
}

}  // namespace primefock
