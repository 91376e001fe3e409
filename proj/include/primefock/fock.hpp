#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "primefock/dirichlet.hpp"
#include "primefock/numtheory.hpp"
#include "primefock/report.hpp"
#include "primefock/state.hpp"

namespace primefock {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// What happens to matrix entries whose row falls outside the basis.
enum class BoundaryPolicy {
  strict,  // throw TruncationError
  tally    // drop, but record in SparseOperator::boundary_loss
};

/// Matrix of an operator over basis x basis.
struct SparseOperator {
  const FockBasis* basis = nullptr;
  SparseMatrix matrix;
  std::string name;
  /// Sum of |entry|^2 over dropped entries.
  double boundary_loss = 0.0;
  /// Column labels k that lost at least one entry.
  std::vector<u64> escaped;

  FockVector apply(const FockVector& v) const;
};

namespace ops {
struct Annihilate { u64 n; };
struct Create { u64 n; };
struct Number { u64 p; };
struct TotalNumber {};
struct Project { unsigned n; };
struct QuadX { u64 p; };
struct QuadP { u64 p; };
/// sum_p p^{-s} z_p a_p
struct C { HalfPlanePoint s; SiteWeights z; };
/// sum_p p^{-s*} conj(z_p) a_p^dagger
struct CDagger { HalfPlanePoint s; SiteWeights z; };
/// sum_n f(n) n^{-s} a_n
struct F { HalfPlanePoint s; DirichletCoefficients f; };
/// diag exp(2 pi i sum_p mu_p a_p(k)), mu_p in [0, 1)
struct UMu { std::map<u64, double> mu; };
/// |k> -> |kp>
struct Shift { u64 p; };
/// |k> -> |k/p> when p | k
struct ShiftDagger { u64 p; };
}  // namespace ops

using OperatorSpec =
    std::variant<ops::Annihilate, ops::Create, ops::Number, ops::TotalNumber, ops::Project,
                 ops::QuadX, ops::QuadP, ops::C, ops::CDagger, ops::F, ops::UMu, ops::Shift,
                 ops::ShiftDagger>;

std::string describe(const OperatorSpec& spec);

/// Materializes `spec` over `basis`. Throws std::invalid_argument for parameters the
/// basis cannot host, TruncationError for escaping entries under the strict policy.
SparseOperator assemble_operator(const OperatorSpec& spec, const FockBasis& basis,
                                 BoundaryPolicy policy = BoundaryPolicy::tally);

/// a_n v; terms with n not dividing k vanish.
FockVector apply_annihilate(u64 n, const FockVector& v);

/// a_n^dagger v. Under the strict policy any image outside the basis throws a
/// TruncationError listing the offending source labels.
FockVector apply_create(u64 n, const FockVector& v,
                        BoundaryPolicy policy = BoundaryPolicy::strict);

/// Largest |entry| over the listed columns of m, optionally after subtracting c * I.
double max_abs_on_columns(const SparseMatrix& m, const std::vector<std::size_t>& columns,
                          Complex diagonal_shift = 0.0);

/// Positions i with basis.interior(i).
std::vector<std::size_t> interior_columns(const FockBasis& basis);

/// Bosonic and quadrature commutators between sites p and q on interior columns.
VerificationReport verify_ccr(const FockBasis& basis, u64 p, u64 q);

/// Dense block of `op` from the Omega = from sector to the Omega = to sector.
struct BlockRestriction {
  unsigned from = 0;
  unsigned to = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  Eigen::MatrixXcd matrix;
};

/// Throws std::domain_error when either sector is empty.
BlockRestriction block_restrict(const SparseOperator& op, unsigned from, unsigned to);

/// max |C(n+1 -> n) - (C^dagger(n -> n+1))^dagger|.
VerificationReport block_adjoint_check(const SparseOperator& lowering,
                                       const SparseOperator& raising, unsigned n);

/// Largest singular value of the block from sector `from` to sector `to`.
double block_norm(const SparseOperator& op, unsigned from, unsigned to);

/// Result of an exponential action together with its estimated series error.
struct ExpmAction {
  Eigen::VectorXcd value;
  double series_residual = 0.0;
  unsigned terms = 0;
  unsigned steps = 0;
};

/// exp(A) v by a scaled, adaptive Taylor series. `norm_bound` must bound ||A||_2.
/// Throws NumericalError when a step needs more than `max_terms` terms.
template <typename Matrix>
ExpmAction expm_action(const Matrix& A, const Eigen::VectorXcd& v, double norm_bound,
                       double tol, unsigned max_terms = 200) {
  ExpmAction out;
  const unsigned steps = std::max(1u, static_cast<unsigned>(std::ceil(norm_bound)));
  const double eta = norm_bound / steps;
  const double step_tol = tol / steps;
  Eigen::VectorXcd x = v;
  for (unsigned step = 0; step < steps; ++step) {
    Eigen::VectorXcd term = x;
    Eigen::VectorXcd acc = x;
    double tail = std::numeric_limits<double>::infinity();
    unsigned j = 0;
    for (; j < max_terms; ++j) {
      const double ratio = eta / (j + 1);
      tail = ratio < 1.0 ? term.norm() * ratio / (1.0 - ratio)
                         : std::numeric_limits<double>::infinity();
      if (tail <= step_tol * std::max(1.0, acc.norm())) break;
      term = (A * term).eval() / (static_cast<double>(steps) * (j + 1));
      acc += term;
    }
    if (j == max_terms)
      throw NumericalError("expm_action: Taylor series did not converge", tail);
    out.series_residual += tail;
    out.terms += j;
    x = std::move(acc);
  }
  out.value = std::move(x);
  out.steps = steps;
  return out;
}

/// max_j sum_i |A_ij|, which bounds ||A||_2 for normal A.
double one_norm(const SparseMatrix& m);

/// exp(C^dagger - C)|1> over the truncated basis.
struct Displacement {
  FockVector state;
  double series_residual = 0.0;
  unsigned terms = 0;
  double boundary_loss = 0.0;
};

/// Requires sigma > 1. Throws NumericalError on non-convergence.
Displacement displace_vacuum(HalfPlanePoint s, const SiteWeights& z, const FockBasis& basis,
                             double tol = 1e-12);

/// exp(-P(2 sigma, |z|^2)/2) exp(C^dagger) exp(-C)|1>, evaluated on the truncated basis.
FockVector displace_vacuum_factored(HalfPlanePoint s, const SiteWeights& z,
                                    const FockBasis& basis);

/// a_p = (N_p+1)^{-1/2} S_p^dagger N_p and a_p^dagger = N_p S_p (N_p+1)^{-1/2}.
VerificationReport verify_holstein_primakoff(u64 p, const FockBasis& basis);

/// [h a_n^dagger a_k + conj(h) a_k^dagger a_n, N] against its closed form.
VerificationReport verify_commutator_number(u64 n, u64 k, Complex h, const FockBasis& basis);

/// Sum of amplitudes.
Complex ell1(const FockVector& v);

/// sum_n c_n exp(2 pi i n.mu), with n.mu = sum_p a_p(n) mu_p.
Complex qplus_fourier(const DirichletCoefficients& c, const std::map<u64, double>& mu);

}  // namespace primefock
