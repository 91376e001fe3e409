#include "primefock/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace primefock {

namespace {

bool mul_overflows(u64 a, u64 b, u64& out) {
  return __builtin_mul_overflow(a, b, &out);
}

u64 factorial_product(const ExponentList& exps) {
  u64 x2 = 1;
  for (const auto& [p, a] : exps) {
    for (unsigned j = 2; j <= a; ++j) {
      if (mul_overflows(x2, j, x2))
        throw std::overflow_error("x_k^2 exceeds 64 bits");
    }
  }
  return x2;
}

}  // namespace

std::vector<u64> sieve_primes(u64 limit) {
  if (limit < 2)
    throw std::invalid_argument("sieve_primes: empty range, limit must be >= 2");
  std::vector<bool> composite(limit + 1, false);
  std::vector<u64> primes;
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    if (i <= limit / i)
      for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

unsigned FactoredInt::exponent(u64 p) const {
  auto it = std::lower_bound(exponents.begin(), exponents.end(), p,
                             [](const auto& e, u64 q) { return e.first < q; });
  return (it != exponents.end() && it->first == p) ? it->second : 0;
}

double FactoredInt::x() const { return std::sqrt(static_cast<double>(x_squared)); }

bool FactoredInt::divides(const FactoredInt& other) const {
  return std::all_of(exponents.begin(), exponents.end(), [&](const auto& e) {
    return other.exponent(e.first) >= e.second;
  });
}

FactoredInt factorize(u64 k) {
  if (k == 0) throw std::domain_error("factorize: k must be >= 1");
  ExponentList exps;
  u64 rest = k;
  for (u64 p = 2; p <= rest / p; p += (p == 2 ? 1 : 2)) {
    unsigned a = 0;
    while (rest % p == 0) {
      rest /= p;
      ++a;
    }
    if (a) exps.emplace_back(p, a);
  }
  if (rest > 1) exps.emplace_back(rest, 1);
  FactoredInt out;
  out.value = k;
  out.exponents = std::move(exps);
  for (const auto& e : out.exponents) out.big_omega += e.second;
  out.x_squared = factorial_product(out.exponents);
  return out;
}

FactoredInt from_exponents(ExponentList exponents) {
  std::sort(exponents.begin(), exponents.end());
  exponents.erase(std::remove_if(exponents.begin(), exponents.end(),
                                 [](const auto& e) { return e.second == 0; }),
                  exponents.end());
  FactoredInt out;
  out.value = 1;
  for (const auto& [p, a] : exponents) {
    for (unsigned j = 0; j < a; ++j)
      if (mul_overflows(out.value, p, out.value))
        throw std::overflow_error("from_exponents: value exceeds 64 bits");
    out.big_omega += a;
  }
  out.exponents = std::move(exponents);
  out.x_squared = factorial_product(out.exponents);
  return out;
}

DirichletCoefficients::DirichletCoefficients(
    std::initializer_list<std::pair<const u64, Complex>> init) {
  for (const auto& [n, v] : init) set(n, v);
}

void DirichletCoefficients::set(u64 n, Complex value) {
  if (n == 0) throw std::domain_error("Dirichlet coefficients are indexed from 1");
  if (value == Complex{})
    entries_.erase(n);
  else
    entries_[n] = value;
}

void DirichletCoefficients::add(u64 n, Complex value) { set(n, (*this)(n) + value); }

Complex DirichletCoefficients::operator()(u64 n) const {
  auto it = entries_.find(n);
  return it == entries_.end() ? Complex{} : it->second;
}

DirichletCoefficients dirichlet_convolve(const DirichletCoefficients& f,
                                         const DirichletCoefficients& g) {
  std::map<u64, Complex> acc;
  for (const auto& [d, fd] : f.entries()) {
    for (const auto& [e, ge] : g.entries()) {
      u64 k;
      if (mul_overflows(d, e, k))
        throw std::overflow_error("dirichlet_convolve: index exceeds 64 bits");
      acc[k] += fd * ge;
    }
  }
  DirichletCoefficients h;
  for (const auto& [k, v] : acc) h.set(k, v);
  return h;
}

void TruncationSpec::validate() const {
  if (p_max < 2) throw std::invalid_argument("truncation: p_max must be >= 2");
  if (a_max < 1) throw std::invalid_argument("truncation: a_max must be >= 1");
  if (omega_max < 1) throw std::invalid_argument("truncation: omega_max must be >= 1");
  if (guard >= std::min(a_max, omega_max))
    throw std::invalid_argument("truncation: guard must be < min(a_max, omega_max)");
  if (k_max && *k_max < 1) throw std::invalid_argument("truncation: k_max must be >= 1");
}

FockBasis::FockBasis(const TruncationSpec& spec, std::size_t cap) : spec_(spec) {
  spec_.validate();
  primes_ = sieve_primes(spec_.p_max);
  const u64 kmax = spec_.k_max.value_or(std::numeric_limits<u64>::max());

  // Depth-first over primes, choosing each exponent in turn.
  ExponentList current;
  std::function<void(std::size_t, u64, unsigned)> walk =
      [&](std::size_t idx, u64 value, unsigned omega) {
        if (idx == primes_.size()) {
          if (elements_.size() >= cap)
            throw ResourceError("basis size exceeds cap of " + std::to_string(cap) +
                                " elements");
          FactoredInt f;
          f.value = value;
          f.exponents = current;
          f.big_omega = omega;
          f.x_squared = factorial_product(current);
          elements_.push_back(std::move(f));
          return;
        }
        const u64 p = primes_[idx];
        walk(idx + 1, value, omega);
        u64 v = value;
        for (unsigned a = 1; a <= spec_.a_max && omega + a <= spec_.omega_max; ++a) {
          if (mul_overflows(v, p, v) || v > kmax) break;
          current.emplace_back(p, a);
          walk(idx + 1, v, omega + a);
          current.pop_back();
        }
      };
  walk(0, 1, 0);

  std::sort(elements_.begin(), elements_.end(),
            [](const FactoredInt& a, const FactoredInt& b) { return a.value < b.value; });
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i].value, i);
}

std::optional<std::size_t> FockBasis::index_of(u64 k) const {
  auto it = index_.find(k);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool FockBasis::admits(const FactoredInt& k) const {
  if (k.big_omega > spec_.omega_max) return false;
  if (spec_.k_max && k.value > *spec_.k_max) return false;
  return std::all_of(k.exponents.begin(), k.exponents.end(), [&](const auto& e) {
    return e.first <= spec_.p_max && e.second <= spec_.a_max;
  });
}

bool FockBasis::interior(std::size_t i, unsigned guard) const {
  const FactoredInt& k = elements_[i];
  if (k.big_omega + guard > spec_.omega_max) return false;
  if (guard > spec_.a_max) return false;
  for (const auto& e : k.exponents)
    if (e.second + guard > spec_.a_max) return false;
  if (spec_.k_max) {
    long double top = static_cast<long double>(k.value);
    for (unsigned g = 0; g < guard; ++g) top *= static_cast<long double>(primes_.back());
    if (top > static_cast<long double>(*spec_.k_max)) return false;
  }
  return true;
}

std::vector<std::size_t> FockBasis::block(unsigned n) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (elements_[i].big_omega == n) out.push_back(i);
  return out;
}

u64 FockBasis::complete_up_to(unsigned n) const {
  if (n > spec_.omega_max) return 0;
  for (u64 m = 1;; ++m) {
    const FactoredInt f = factorize(m);
    if (f.big_omega == n && !contains(m)) return m - 1;
  }
}

u64 FockBasis::complete_up_to() const {
  for (u64 m = 1;; ++m)
    if (!contains(m)) return m - 1;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < alpha.size(); ++i) os << (i ? ":" : "") << alpha[i];
  return os.str();
}

std::vector<MultiIndex> enumerate_multi_indices(unsigned N, unsigned n) {
  if (N == 0) throw std::invalid_argument("enumerate_multi_indices: N must be >= 1");
  std::vector<MultiIndex> out;
  std::vector<unsigned> alpha(N, 0);
  // Lexicographic order: the first slot varies slowest, smallest value first.
  std::function<void(unsigned, unsigned)> fill = [&](unsigned pos, unsigned left) {
    if (pos + 1 == N) {
      alpha[pos] = left;
      out.push_back({alpha, n});
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      alpha[pos] = a;
      fill(pos + 1, left - a);
    }
  };
  fill(0, n);
  return out;
}

u64 binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u64 r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at each step
    u64 num;
    if (mul_overflows(r, n - k + i, num)) throw std::overflow_error("binomial overflow");
    r = num / i;
  }
  return r;
}

}  // namespace primefock
