#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace primefock {

using Complex = std::complex<double>;
using u64 = std::uint64_t;

/// Raised when a computation would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operator application leaves the truncated basis in strict mode.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, std::vector<u64> offending)
      : std::runtime_error(what), offending_(std::move(offending)) {}
  const std::vector<u64>& offending() const { return offending_; }

 private:
  std::vector<u64> offending_;
};

/// Raised when an iterative method does not reach its target accuracy.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// All primes <= limit, ascending. Throws std::invalid_argument for limit < 2.
std::vector<u64> sieve_primes(u64 limit);

/// Prime exponent of p in k, as a sorted (prime, exponent) list.
using ExponentList = std::vector<std::pair<u64, unsigned>>;

/// A positive integer together with its canonical factorization.
///
/// `x_squared` is the exact product of the factorials of the exponents; the
/// weight x_k used in amplitudes is its square root.
struct FactoredInt {
  u64 value = 1;
  ExponentList exponents;  // ascending primes, no zero exponents
  unsigned big_omega = 0;
  u64 x_squared = 1;

  unsigned exponent(u64 p) const;
  double x() const;
  bool divides(const FactoredInt& other) const;
};

/// Trial-division factorization. Throws std::domain_error for k == 0 and
/// std::overflow_error if x_squared does not fit in 64 bits.
FactoredInt factorize(u64 k);

/// Builds a FactoredInt from an exponent list (primes must be prime).
FactoredInt from_exponents(ExponentList exponents);

/// Finitely supported arithmetic function n -> f(n); zero entries are never stored.
class DirichletCoefficients {
 public:
  DirichletCoefficients() = default;
  DirichletCoefficients(std::initializer_list<std::pair<const u64, Complex>> init);

  void set(u64 n, Complex value);
  void add(u64 n, Complex value);
  Complex operator()(u64 n) const;

  const std::map<u64, Complex>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<u64, Complex> entries_;
};

/// h(k) = sum_{d | k} f(d) g(k/d).
DirichletCoefficients dirichlet_convolve(const DirichletCoefficients& f,
                                         const DirichletCoefficients& g);

/// Bounds of the finite slice of Fock space that gets materialized.
struct TruncationSpec {
  unsigned p_max = 13;
  unsigned a_max = 4;
  unsigned omega_max = 4;
  std::optional<u64> k_max;
  unsigned guard = 1;

  /// Throws std::invalid_argument on an inconsistent specification.
  void validate() const;
};

inline constexpr std::size_t kDefaultBasisCap = 2'000'000;

/// Ascending, divisor-closed list of smooth integers selected by a TruncationSpec.
class FockBasis {
 public:
  /// Enumerates the basis; throws ResourceError when it would exceed `cap` elements.
  explicit FockBasis(const TruncationSpec& spec, std::size_t cap = kDefaultBasisCap);

  const TruncationSpec& spec() const { return spec_; }
  const std::vector<u64>& primes() const { return primes_; }
  const std::vector<FactoredInt>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const FactoredInt& operator[](std::size_t i) const { return elements_[i]; }

  std::optional<std::size_t> index_of(u64 k) const;
  bool contains(u64 k) const { return index_.count(k) != 0; }

  /// Membership predicate evaluated from scratch (independent of the enumeration).
  bool admits(const FactoredInt& k) const;

  /// True when every creation chain of length `guard` starting at position i
  /// stays inside the basis.
  bool interior(std::size_t i) const { return interior(i, spec_.guard); }
  bool interior(std::size_t i, unsigned guard) const;

  /// Positions of basis elements with exactly n prime factors.
  std::vector<std::size_t> block(unsigned n) const;

  /// Largest K such that every integer k <= K with Omega(k) == n lies in the basis.
  u64 complete_up_to(unsigned n) const;
  /// Largest K such that every integer k <= K lies in the basis.
  u64 complete_up_to() const;

 private:
  TruncationSpec spec_;
  std::vector<u64> primes_;
  std::vector<FactoredInt> elements_;
  std::unordered_map<u64, std::size_t> index_;
};

/// Convenience wrapper matching the free-function style of the rest of the API.
inline FockBasis enumerate_basis(const TruncationSpec& spec,
                                 std::size_t cap = kDefaultBasisCap) {
  return FockBasis(spec, cap);
}

/// Occupation numbers over N modes summing to n.
struct MultiIndex {
  std::vector<unsigned> alpha;
  unsigned total = 0;

  auto operator<=>(const MultiIndex&) const = default;
  std::string str() const;  // "a1:a2:...:aN"
};

/// All length-N tuples of nonnegative integers summing to n, lexicographic order.
std::vector<MultiIndex> enumerate_multi_indices(unsigned N, unsigned n);

/// C(n, k) in 64-bit arithmetic; throws std::overflow_error on overflow.
u64 binomial(unsigned n, unsigned k);

}  // namespace primefock
