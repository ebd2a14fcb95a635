#pragma once

// Collective-spin basis, state vectors and reference states for a two-mode
// Bose-Josephson junction. N two-mode bosons map onto a single spin J = N/2;
// everything here lives in the Jz ladder basis |J, M>, M = -J..+J, with the
// amplitude at index i belonging to M = i - J.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bjj {

using complex = std::complex<double>;

constexpr double norm_tolerance = 1e-12;

/// The (N+1)-dimensional |J = N/2, M> ladder.
struct SpinBasis {
  int n_particles = 0;

  int dim() const { return n_particles + 1; }
  double j() const { return 0.5 * n_particles; }
  /// M value carried by amplitude index i (half-integer for odd N).
  double m_of(int i) const { return i - j(); }

  friend bool operator==(const SpinBasis&, const SpinBasis&) = default;
};

inline SpinBasis make_basis(int n_particles) {
  if (n_particles < 1)
    throw std::invalid_argument("make_basis: need at least one particle, got " +
                                std::to_string(n_particles));
  return SpinBasis{n_particles};
}

/// Normalized amplitudes over a SpinBasis, ordered by ascending M.
struct StateVector {
  SpinBasis basis;
  std::vector<complex> amplitudes;

  int dim() const { return basis.dim(); }

  double norm() const {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return std::sqrt(s);
  }
};

namespace detail {

inline void check_same_basis(const StateVector& a, const StateVector& b,
                             const char* who) {
  if (!(a.basis == b.basis))
    throw std::invalid_argument(std::string(who) + ": basis mismatch (N=" +
                                std::to_string(a.basis.n_particles) + " vs N=" +
                                std::to_string(b.basis.n_particles) + ")");
}

// Global-phase convention: first nonzero amplitude real non-negative.
inline void fix_global_phase(std::vector<complex>& c) {
  for (const auto& a : c) {
    if (std::abs(a) > 0.0) {
      complex u = std::conj(a) / std::abs(a);
      for (auto& x : c) x *= u;
      return;
    }
  }
}

inline void normalize(std::vector<complex>& c) {
  double s = 0.0;
  for (const auto& a : c) s += std::norm(a);
  if (s <= 0.0) throw std::runtime_error("normalize: zero vector");
  const double inv = 1.0 / std::sqrt(s);
  for (auto& a : c) a *= inv;
}

}  // namespace detail

/// |J, m>. m must be one of the ladder values of the basis.
inline StateVector basis_state(const SpinBasis& basis, double m) {
  const double pos = m + basis.j();
  const int i = static_cast<int>(std::lround(pos));
  if (i < 0 || i >= basis.dim() || std::abs(pos - i) > 1e-9)
    throw std::invalid_argument("basis_state: m=" + std::to_string(m) +
                                " is not on the ladder of N=" +
                                std::to_string(basis.n_particles));
  StateVector s{basis, std::vector<complex>(basis.dim(), complex(0.0, 0.0))};
  s.amplitudes[i] = 1.0;
  return s;
}

/// SU(2) spin coherent state with polar angle theta and azimuth phi.
///
/// Convention is fixed by observables, not operator ordering:
///   <Jz> = J cos(theta),  <Jx> = J sin(theta) cos(phi),
/// so coherent_state(pi/2, 0) is the maximal-<Jx> state with the all-positive
/// binomial amplitudes c_M = 2^-J sqrt(C(2J, J+M)) -- the ground state of
/// -T Jx for T > 0. Amplitudes are produced in log space so large N is safe.
inline StateVector coherent_state(const SpinBasis& basis, double theta,
                                  double phi) {
  const int n = basis.n_particles;
  const double j = basis.j();
  const double ch = std::cos(0.5 * theta);
  const double sh = std::sin(0.5 * theta);

  std::vector<complex> c(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    // |c_i| = sqrt(C(N, i)) * ch^i * sh^(N-i), computed as exp(log).
    double mag;
    if (ch == 0.0 || sh == 0.0) {
      // Poles: only one nonzero component survives.
      const double base = (ch == 0.0) ? sh : ch;
      const int power = (ch == 0.0) ? (n - i) : i;
      mag = (power == n) ? std::pow(std::abs(base), n) : 0.0;
    } else {
      const double log_binom =
          std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
      mag = std::exp(0.5 * log_binom + i * std::log(std::abs(ch)) +
                     (n - i) * std::log(std::abs(sh)));
      if (ch < 0.0 && (i % 2)) mag = -mag;
      if (sh < 0.0 && ((n - i) % 2)) mag = -mag;
    }
    // azimuth enters as exp(-i (J - M) phi); the phase fix below re-anchors it
    const double m = i - j;
    c[i] = std::polar(1.0, -(j - m) * phi) * mag;
  }
  detail::normalize(c);
  detail::fix_global_phase(c);
  return StateVector{basis, std::move(c)};
}

/// Path-entangled extremal superposition (|J,-J> + e^{i phase} |J,+J>)/sqrt(2).
inline StateVector noon_state(const SpinBasis& basis, double phase) {
  StateVector s{basis, std::vector<complex>(basis.dim(), complex(0.0, 0.0))};
  const double r = 1.0 / std::sqrt(2.0);
  s.amplitudes.front() = r;
  s.amplitudes.back() = std::polar(r, phase);
  return s;
}

/// |<a|b>|^2. Symmetric and invariant under global phases of either argument.
inline double fidelity(const StateVector& a, const StateVector& b) {
  detail::check_same_basis(a, b, "fidelity");
  complex ov(0.0, 0.0);
  for (int i = 0; i < a.dim(); ++i)
    ov += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return std::norm(ov);
}

/// Jz measurement statistics: p_M = |c_M|^2 plus first two moments of M.
struct JzDistribution {
  SpinBasis basis;
  std::vector<double> probabilities;
  double mean_jz = 0.0;
  double variance_jz = 0.0;
};

inline JzDistribution jz_distribution(const StateVector& state) {
  JzDistribution d{state.basis, std::vector<double>(state.dim()), 0.0, 0.0};
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < state.dim(); ++i) {
    const double p = std::norm(state.amplitudes[i]);
    const double m = state.basis.m_of(i);
    d.probabilities[i] = p;
    m1 += m * p;
    m2 += m * m * p;
  }
  d.mean_jz = m1;
  d.variance_jz = m2 - m1 * m1;
  return d;
}

}  // namespace bjj
