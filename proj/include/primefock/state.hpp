#pragma once

#include <Eigen/Dense>

#include "primefock/numtheory.hpp"

namespace primefock {

/// Amplitudes over the positions of a FockBasis. The basis is not owned and
/// must outlive the vector.
class FockVector {
 public:
  explicit FockVector(const FockBasis& basis)
      : basis_(&basis), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()))) {}
  FockVector(const FockBasis& basis, Eigen::VectorXcd amplitudes);

  /// |k> for k in the basis; throws std::out_of_range otherwise.
  static FockVector basis_state(const FockBasis& basis, u64 k);

  const FockBasis& basis() const { return *basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }

  /// Amplitude at integer label k (zero when k is outside the basis).
  Complex at(u64 k) const;
  void set(u64 k, Complex value);

  double norm() const { return amps_.norm(); }
  double squared_norm() const { return amps_.squaredNorm(); }
  /// <this|other>
  Complex dot(const FockVector& other) const;

  FockVector& operator+=(const FockVector& o);
  FockVector& operator-=(const FockVector& o);
  FockVector& operator*=(Complex c) {
    amps_ *= c;
    return *this;
  }

 private:
  void require_same_basis(const FockVector& o) const;

  const FockBasis* basis_;
  Eigen::VectorXcd amps_;
};

inline FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
inline FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
inline FockVector operator*(Complex c, FockVector v) { return v *= c; }

}  // namespace primefock
