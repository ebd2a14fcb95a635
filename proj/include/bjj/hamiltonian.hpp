#pragma once

// Junction Hamiltonian H = delta*Jz - T*Jx + (E_C/2)*Jz^2 in the Jz basis.
// Jz is diagonal and Jx couples neighbouring M, so H is a real symmetric
// tridiagonal matrix:
//   diag[i]  = delta*M + (E_C/2)*M^2            with M = i - J
//   off[i]   = -(T/2) * sqrt(J(J+1) - M(M+1))   linking M and M+1.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "bjj/spin_core.hpp"

namespace bjj {

/// The instantaneous Hamiltonian knobs. Units: hbar = 1, energies and time
/// dimensionless (the protocol literature quotes bare numbers like T = 40,
/// E_C = -2). Both signs of E_C build fine; the interferometer protocol
/// additionally requires E_C < 0, enforced in the protocol layer.
struct JunctionParams {
  double delta = 0.0;     // mode imbalance
  double coupling = 0.0;  // inter-mode coupling T
  double charging = 0.0;  // charging energy E_C
  SpinBasis basis;
};

/// Real symmetric tridiagonal operator; only one off-diagonal is stored.
struct TridiagonalOperator {
  std::vector<double> diagonal;      // dim entries
  std::vector<double> off_diagonal;  // dim-1 entries

  int dim() const { return static_cast<int>(diagonal.size()); }
};

inline TridiagonalOperator build_hamiltonian(const JunctionParams& p) {
  const int dim = p.basis.dim();
  const double j = p.basis.j();
  TridiagonalOperator h;
  h.diagonal.resize(dim);
  h.off_diagonal.resize(dim - 1);
  for (int i = 0; i < dim; ++i) {
    const double m = i - j;
    h.diagonal[i] = p.delta * m + 0.5 * p.charging * m * m;
  }
  for (int i = 0; i + 1 < dim; ++i) {
    const double m = i - j;
    h.off_diagonal[i] = -0.5 * p.coupling * std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return h;
}

/// Max row sum; the scale used to normalize residual tolerances.
inline double inf_norm(const TridiagonalOperator& op) {
  const int n = op.dim();
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::abs(op.diagonal[i]);
    if (i > 0) row += std::abs(op.off_diagonal[i - 1]);
    if (i + 1 < n) row += std::abs(op.off_diagonal[i]);
    best = std::max(best, row);
  }
  return best;
}

namespace detail {

template <class Scalar>
std::vector<Scalar> apply_tridiagonal(const TridiagonalOperator& op,
                                      const std::vector<Scalar>& x) {
  const int n = op.dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("apply: dimension mismatch (operator " +
                                std::to_string(n) + ", vector " +
                                std::to_string(x.size()) + ")");
  std::vector<Scalar> y(n);
  for (int i = 0; i < n; ++i) {
    Scalar v = x[i] * op.diagonal[i];
    if (i > 0) v += x[i - 1] * op.off_diagonal[i - 1];
    if (i + 1 < n) v += x[i + 1] * op.off_diagonal[i];
    y[i] = v;
  }
  return y;
}

}  // namespace detail

/// y = H x for real amplitude vectors. Not renormalized.
inline std::vector<double> apply(const TridiagonalOperator& op,
                                 const std::vector<double>& x) {
  return detail::apply_tridiagonal(op, x);
}

/// y = H x for complex amplitude vectors. Not renormalized.
inline std::vector<complex> apply(const TridiagonalOperator& op,
                                  const std::vector<complex>& x) {
  return detail::apply_tridiagonal(op, x);
}

/// y = H |state>, as a raw (non-normalized) amplitude vector.
inline std::vector<complex> apply(const TridiagonalOperator& op,
                                  const StateVector& state) {
  return detail::apply_tridiagonal(op, state.amplitudes);
}

/// lambda = N |E_C| / (2 T), the bifurcation-regime control parameter.
inline double lambda_param(int n_particles, double charging, double coupling) {
  if (coupling == 0.0)
    throw std::invalid_argument("lambda_param: coupling T = 0 (lambda diverges)");
  return n_particles * std::abs(charging) / (2.0 * std::abs(coupling));
}

}  // namespace bjj
