#pragma once

// Eigendecomposition of the symmetric tridiagonal junction Hamiltonian.
//
// eig_full   : implicit-shift QL with eigenvector accumulation, O(dim^3).
// eig_lowest : Sturm-count bisection + inverse iteration for the k lowest
//              pairs, O(k * dim) -- cheap enough to call every few steps of a
//              time evolution, and usable at dim ~ 10^3.
//
// Eigenvector conventions (regression tests depend on them):
//   * global sign fixed so the largest-magnitude component is positive,
//     ties broken by the lowest index;
//   * an exactly diagonal operator returns basis states ordered by ascending
//     M within each degenerate group.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bjj/hamiltonian.hpp"
#include "bjj/parallel.hpp"
#include "bjj/spin_core.hpp"

namespace bjj {

struct Spectrum {
  std::vector<double> eigenvalues;              // ascending
  std::vector<std::vector<double>> eigenvectors;  // eigenvectors[k] pairs with eigenvalues[k]

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Eigenvector k as a normalized StateVector over the given basis.
inline StateVector eigenstate(const Spectrum& s, const SpinBasis& basis, int k) {
  if (k < 0 || k >= s.size())
    throw std::invalid_argument("eigenstate: index out of range");
  if (basis.dim() != static_cast<int>(s.eigenvectors[k].size()))
    throw std::invalid_argument("eigenstate: basis dimension mismatch");
  StateVector v{basis, {}};
  v.amplitudes.assign(s.eigenvectors[k].begin(), s.eigenvectors[k].end());
  return v;
}

/// |<v_k|psi>|^2 against a real eigenvector, without materializing a StateVector.
inline double overlap2(const std::vector<double>& v, const StateVector& psi) {
  if (v.size() != psi.amplitudes.size())
    throw std::invalid_argument("overlap2: dimension mismatch");
  complex ov(0.0, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) ov += v[i] * psi.amplitudes[i];
  return std::norm(ov);
}

namespace detail {

inline void fix_vector_sign(std::vector<double>& v) {
  std::size_t best = 0;
  double mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mag) {  // strict: ties keep the lowest index
      mag = a;
      best = i;
    }
  }
  if (v[best] < 0.0)
    for (auto& x : v) x = -x;
}

inline bool is_diagonal(const TridiagonalOperator& op) {
  for (double e : op.off_diagonal)
    if (e != 0.0) return false;
  return true;
}

// Diagonal operator: eigenpairs are basis states; degenerate groups keep
// ascending-M order.
inline Spectrum diagonal_spectrum(const TridiagonalOperator& op, int k) {
  const int n = op.dim();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return op.diagonal[a] < op.diagonal[b];
  });
  Spectrum s;
  s.eigenvalues.reserve(k);
  s.eigenvectors.reserve(k);
  for (int r = 0; r < k; ++r) {
    s.eigenvalues.push_back(op.diagonal[idx[r]]);
    std::vector<double> v(n, 0.0);
    v[idx[r]] = 1.0;
    s.eigenvectors.push_back(std::move(v));
  }
  return s;
}

// Implicit-shift QL sweep. d and e are overwritten; z accumulates rotations
// (z stored row-major, columns are eigenvectors).
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                        std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 1) return;
  e.push_back(0.0);  // workspace slot e[n-1]
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("eig_full: QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {  // rotation annihilated; deflate and restart
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int row = 0; row < n; ++row) {
            f = z[row * n + i + 1];
            z[row * n + i + 1] = s * z[row * n + i] + c * f;
            z[row * n + i] = c * z[row * n + i] - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

// Number of eigenvalues of the operator strictly below x (Sturm/LDL^T count).
inline int sturm_count(const TridiagonalOperator& op, double x, double pivmin) {
  const int n = op.dim();
  int count = 0;
  double q = op.diagonal[0] - x;
  if (std::abs(q) <= pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    q = op.diagonal[i] - x - op.off_diagonal[i - 1] * op.off_diagonal[i - 1] / q;
    if (std::abs(q) <= pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

struct GershgorinBounds {
  double lo, hi;
};

inline GershgorinBounds gershgorin(const TridiagonalOperator& op) {
  const int n = op.dim();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(op.off_diagonal[i - 1]);
    if (i + 1 < n) r += std::abs(op.off_diagonal[i]);
    lo = std::min(lo, op.diagonal[i] - r);
    hi = std::max(hi, op.diagonal[i] + r);
  }
  const double pad =
      16.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(lo), std::abs(hi), 1.0});
  return {lo - pad, hi + pad};
}

// Smallest x with count(x) >= target+1, i.e. eigenvalue #target (0-based).
inline double bisect_eigenvalue(const TridiagonalOperator& op, int target,
                                GershgorinBounds b, double pivmin) {
  double lo = b.lo, hi = b.hi;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 210; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(op, mid, pivmin) >= target + 1)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin)
      break;
  }
  return 0.5 * (lo + hi);
}

// Solve (T - shift I) x = rhs in place via LU with partial pivoting.
// Fill-in adds a second superdiagonal; all bands are rebuilt per call.
inline bool solve_shifted(const TridiagonalOperator& op, double shift,
                          std::vector<double>& x) {
  const int n = op.dim();
  std::vector<double> du0(n), du1(n, 0.0), du2(n, 0.0), sub(n, 0.0);
  for (int i = 0; i < n; ++i) du0[i] = op.diagonal[i] - shift;
  for (int i = 0; i + 1 < n; ++i) {
    du1[i] = op.off_diagonal[i];
    sub[i + 1] = op.off_diagonal[i];
  }
  const double tiny = std::numeric_limits<double>::min() * 4.0;
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(sub[i + 1]) > std::abs(du0[i])) {  // pivot: swap rows i, i+1
      std::swap(du0[i], sub[i + 1]);
      std::swap(du1[i], du0[i + 1]);
      if (i + 2 < n) std::swap(du2[i], du1[i + 1]);
      std::swap(x[i], x[i + 1]);
    }
    if (std::abs(du0[i]) < tiny) du0[i] = std::copysign(tiny, du0[i] == 0.0 ? 1.0 : du0[i]);
    const double mult = sub[i + 1] / du0[i];
    du0[i + 1] -= mult * du1[i];
    if (i + 2 < n) du1[i + 1] -= mult * du2[i];
    x[i + 1] -= mult * x[i];
  }
  if (std::abs(du0[n - 1]) < tiny) du0[n - 1] = std::copysign(tiny, du0[n - 1] == 0.0 ? 1.0 : du0[n - 1]);
  for (int i = n - 1; i >= 0; --i) {
    double v = x[i];
    if (i + 1 < n) v -= du1[i] * x[i + 1];
    if (i + 2 < n) v -= du2[i] * x[i + 2];
    x[i] = v / du0[i];
  }
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

inline void normalize_real(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double inv = 1.0 / std::sqrt(s);
  for (double& x : v) x *= inv;
}

// Deterministic start vector for inverse iteration.
inline std::vector<double> invit_seed(int n, int which) {
  std::uint64_t state = 0x9e3779b97f4a7c15ull * (which + 1) + 0x2545f4914f6cdd1dull * n;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    v[i] = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
  }
  normalize_real(v);
  return v;
}

inline double residual_norm(const TridiagonalOperator& op, double lambda,
                            const std::vector<double>& v) {
  auto hv = apply(op, v);
  double s = 0.0;
  for (std::size_t i = 0; i < hv.size(); ++i) {
    const double r = hv[i] - lambda * v[i];
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Complete orthonormal eigensystem, eigenvalues ascending.
inline Spectrum eig_full(const TridiagonalOperator& op) {
  const int n = op.dim();
  if (n < 1) throw std::invalid_argument("eig_full: empty operator");
  if (detail::is_diagonal(op)) return detail::diagonal_spectrum(op, n);

  std::vector<double> d = op.diagonal;
  std::vector<double> e = op.off_diagonal;
  std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) z[i * n + i] = 1.0;
  detail::ql_implicit(d, e, z);

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return d[a] < d[b]; });

  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.assign(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    s.eigenvalues[k] = d[idx[k]];
    for (int i = 0; i < n; ++i) s.eigenvectors[k][i] = z[i * n + idx[k]];
    detail::fix_vector_sign(s.eigenvectors[k]);
  }
  return s;
}

/// The k lowest eigenpairs via bisection + inverse iteration. Matches
/// eig_full to ~1e-9; falls back to eig_full if a residual check fails.
inline Spectrum eig_lowest(const TridiagonalOperator& op, int k) {
  const int n = op.dim();
  if (k < 1 || k > n)
    throw std::invalid_argument("eig_lowest: k=" + std::to_string(k) +
                                " out of range [1, " + std::to_string(n) + "]");
  if (detail::is_diagonal(op)) return detail::diagonal_spectrum(op, k);

  const double scale = std::max(inf_norm(op), 1.0);
  double max_off2 = 0.0;
  for (double e : op.off_diagonal) max_off2 = std::max(max_off2, e * e);
  const double pivmin = std::max(std::numeric_limits<double>::min(),
                                 std::numeric_limits<double>::epsilon() *
                                     std::numeric_limits<double>::epsilon() * max_off2);

  const auto bounds = detail::gershgorin(op);
  std::vector<double> lambdas(k);
  for (int i = 0; i < k; ++i)
    lambdas[i] = detail::bisect_eigenvalue(op, i, bounds, pivmin);

  const double eps = std::numeric_limits<double>::epsilon();
  const double degeneracy_tol = 16.0 * eps * scale;   // shifts need separating
  const double ortho_window = 1e-5 * scale;           // reorthogonalize inside
  const double residual_tol = 1e-11 * scale;

  Spectrum s;
  s.eigenvalues = lambdas;
  s.eigenvectors.assign(k, {});
  bool ok = true;

  for (int i = 0; i < k && ok; ++i) {
    double shift = lambdas[i];
    // Perturb shifts inside machine-degenerate clusters so the solves differ.
    int cluster_pos = 0;
    for (int j = i - 1; j >= 0 && lambdas[i] - lambdas[j] <= degeneracy_tol; --j)
      ++cluster_pos;
    shift += cluster_pos * 2.0 * degeneracy_tol;

    std::vector<double> v = detail::invit_seed(n, i);
    bool converged = false;
    for (int it = 0; it < 6 && !converged; ++it) {
      if (!detail::solve_shifted(op, shift, v)) break;
      for (int j = 0; j < i; ++j) {
        if (std::abs(lambdas[i] - lambdas[j]) <= ortho_window) {
          double dot = 0.0;
          for (int t = 0; t < n; ++t) dot += v[t] * s.eigenvectors[j][t];
          for (int t = 0; t < n; ++t) v[t] -= dot * s.eigenvectors[j][t];
        }
      }
      detail::normalize_real(v);
      converged = detail::residual_norm(op, lambdas[i], v) <= residual_tol;
    }
    if (!converged && detail::residual_norm(op, lambdas[i], v) > 100.0 * residual_tol) {
      ok = false;
      break;
    }
    detail::fix_vector_sign(v);
    s.eigenvectors[i] = std::move(v);
  }

  if (!ok) {
    const Spectrum full = eig_full(op);
    s.eigenvalues.assign(full.eigenvalues.begin(), full.eigenvalues.begin() + k);
    s.eigenvectors.assign(full.eigenvectors.begin(), full.eigenvectors.begin() + k);
  }
  return s;
}

/// One gap-scan sample: the k lowest levels at a given coupling.
struct GapScanRow {
  double coupling = 0.0;
  std::vector<double> eigenvalues;
  double gap01 = 0.0;  // E1 - E0
};

/// Level scan over a coupling grid (the energy-spectra-vs-T figure data).
/// Grid points are independent and evaluated in parallel; row order follows
/// the grid.
inline std::vector<GapScanRow> gap_scan(const JunctionParams& base,
                                        const std::vector<double>& coupling_grid,
                                        int k) {
  if (coupling_grid.empty())
    throw std::invalid_argument("gap_scan: empty coupling grid");
  const int dim = base.basis.dim();
  if (k < 1 || k > dim)
    throw std::invalid_argument("gap_scan: k out of range");

  std::vector<GapScanRow> rows(coupling_grid.size());
  parallel_for(coupling_grid.size(), [&](std::size_t idx) {
    JunctionParams p = base;
    p.coupling = coupling_grid[idx];
    const auto h = build_hamiltonian(p);
    const int want = std::min(dim, std::max(k, 2));
    const Spectrum sp = eig_lowest(h, want);
    GapScanRow row;
    row.coupling = p.coupling;
    row.eigenvalues.assign(sp.eigenvalues.begin(), sp.eigenvalues.begin() + k);
    row.gap01 = dim >= 2 ? sp.eigenvalues[1] - sp.eigenvalues[0] : 0.0;
    rows[idx] = std::move(row);
  });
  return rows;
}

/// Ground state under the sign convention above. Warns (does not fail) when
/// the ground space is numerically degenerate and the returned vector is
/// therefore convention-dependent.
inline StateVector ground_state(const JunctionParams& params) {
  const auto h = build_hamiltonian(params);
  const int k = std::min(2, params.basis.dim());
  const Spectrum sp = eig_lowest(h, k);
  if (k == 2 && sp.eigenvalues[1] - sp.eigenvalues[0] < 1e-10)
    std::cerr << "bjj: warning: ground state requested in a (quasi-)degenerate "
                 "ground space (gap01 < 1e-10); returned vector is "
                 "convention-dependent\n";
  return eigenstate(sp, params.basis, 0);
}

}  // namespace bjj
