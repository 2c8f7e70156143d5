#pragma once

// Exact rational linear algebra helpers: nullspace feasibility via simplex,
// characteristic polynomials, and Sturm-chain root counting.

#include <optional>
#include <vector>

#include "qpcf/angle.hpp"

namespace qpcf {

using RatVec = std::vector<BigRat>;
using RatMat = std::vector<std::vector<BigRat>>;

inline RatVec mat_apply(const RatMat& m, const RatVec& v) {
  RatVec out(m.size(), BigRat(0));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

namespace exact {

/// Finds x >= 0 with A x = 0 and sum(x) = 1, if one exists: a textbook
/// phase-1 simplex with Bland's rule over exact rationals.
inline std::optional<RatVec> nonnegative_kernel_point(const RatMat& A) {
  const size_t m = A.size();
  const size_t n = m == 0 ? 0 : A[0].size();
  if (n == 0) return std::nullopt;

  // Rows: m equalities A x = 0 plus the normalization sum(x) = 1.
  // Columns: n structural variables then m+1 artificials.
  const size_t rows = m + 1;
  const size_t cols = n + rows;
  RatMat T(rows, RatVec(cols + 1, BigRat(0)));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
  for (size_t j = 0; j < n; ++j) T[m][j] = 1;
  T[m][cols] = 1;  // rhs of the normalization row
  std::vector<size_t> basis(rows);
  for (size_t i = 0; i < rows; ++i) {
    T[i][n + i] = 1;
    basis[i] = n + i;
  }

  auto pivot = [&](size_t pr, size_t pc) {
    BigRat p = T[pr][pc];
    for (auto& x : T[pr]) x /= p;
    for (size_t r = 0; r < rows; ++r) {
      if (r == pr || T[r][pc] == 0) continue;
      BigRat f = T[r][pc];
      for (size_t c = 0; c <= cols; ++c) T[r][c] -= f * T[pr][c];
    }
    basis[pr] = pc;
  };

  // Phase-1 objective: minimize the sum of artificials. Reduced costs are
  // computed against the artificial rows currently in the basis.
  auto reduced_cost = [&](size_t j) {
    BigRat c(0);
    for (size_t i = 0; i < rows; ++i)
      if (basis[i] >= n) c += T[i][j];
    return c;
  };

  while (true) {
    // Bland: smallest-index entering column with positive reduced cost.
    size_t enter = cols;
    for (size_t j = 0; j < n; ++j)
      if (reduced_cost(j) > 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    // Ratio test, Bland ties by smallest basis index.
    size_t leave = rows;
    BigRat best(0);
    for (size_t i = 0; i < rows; ++i) {
      if (T[i][enter] <= 0) continue;
      BigRat ratio = T[i][cols] / T[i][enter];
      if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == rows) break;  // unbounded cannot happen with the sum row
    pivot(leave, enter);
  }

  BigRat infeasibility(0);
  for (size_t i = 0; i < rows; ++i)
    if (basis[i] >= n) infeasibility += T[i][cols];
  if (infeasibility != 0) return std::nullopt;

  RatVec x(n, BigRat(0));
  for (size_t i = 0; i < rows; ++i)
    if (basis[i] < n) x[basis[i]] = T[i][cols];
  return x;
}

/// Characteristic polynomial of a rational matrix by Faddeev-LeVerrier.
/// Coefficients returned lowest degree first; leading coefficient is 1.
inline RatVec characteristic_polynomial(const RatMat& A) {
  const size_t n = A.size();
  RatMat M(n, RatVec(n, BigRat(0)));
  RatVec coeff(n + 1, BigRat(0));
  coeff[n] = 1;
  RatMat I(n, RatVec(n, BigRat(0)));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  RatMat Mk = I;
  BigRat c(1);
  for (size_t k = 1; k <= n; ++k) {
    // Mk <- A * Mk_prev, then c = -tr(Mk)/k, Mk += c*I.
    RatMat next(n, RatVec(n, BigRat(0)));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        for (size_t l = 0; l < n; ++l) next[i][j] += A[i][l] * Mk[l][j];
    BigRat tr(0);
    for (size_t i = 0; i < n; ++i) tr += next[i][i];
    c = -tr / BigRat(BigInt(k));
    for (size_t i = 0; i < n; ++i) next[i][i] += c;
    coeff[n - k] = c;
    Mk = std::move(next);
  }
  return coeff;
}

inline RatVec poly_derivative(const RatVec& p) {
  RatVec d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * BigRat(BigInt(i)));
  if (d.empty()) d.push_back(BigRat(0));
  return d;
}

inline BigRat poly_eval(const RatVec& p, const BigRat& x) {
  BigRat v(0);
  for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

inline RatVec poly_mod(RatVec a, const RatVec& b) {
  auto deg = [](const RatVec& p) {
    size_t d = p.size();
    while (d > 0 && p[d - 1] == 0) --d;
    return d;  // number of meaningful coefficients
  };
  size_t db = deg(b);
  if (db == 0) return {BigRat(0)};
  while (deg(a) >= db && deg(a) > 0) {
    size_t da = deg(a);
    BigRat f = a[da - 1] / b[db - 1];
    for (size_t i = 0; i < db; ++i) a[da - db + i] -= f * b[i];
    a[da - 1] = 0;
  }
  a.resize(std::max<size_t>(deg(a), 1), BigRat(0));
  return a;
}

/// Number of distinct real roots of p in the half-open interval (a, b].
inline int sturm_count(const RatVec& p, const BigRat& a, const BigRat& b) {
  auto deg = [](const RatVec& q) {
    size_t d = q.size();
    while (d > 0 && q[d - 1] == 0) --d;
    return d;
  };
  std::vector<RatVec> chain;
  RatVec p0 = p, p1 = poly_derivative(p);
  chain.push_back(p0);
  if (deg(p1) > 0 || p1[0] != 0) chain.push_back(p1);
  while (chain.size() >= 2) {
    RatVec r = poly_mod(chain[chain.size() - 2], chain.back());
    bool zero = true;
    for (const auto& c : r)
      if (c != 0) zero = false;
    if (zero) break;
    for (auto& c : r) c = -c;
    chain.push_back(r);
  }
  auto signchanges = [&](const BigRat& x) {
    int changes = 0, last = 0;
    for (const auto& q : chain) {
      BigRat v = poly_eval(q, x);
      int s = v == 0 ? 0 : (v > 0 ? 1 : -1);
      if (s != 0) {
        if (last != 0 && s != last) ++changes;
        last = s;
      }
    }
    return changes;
  };
  return signchanges(a) - signchanges(b);
}

/// Exact verdict: does the nonnegative rational matrix A have spectral
/// radius >= 1? Uses the Perron root being a real eigenvalue.
inline bool spectral_radius_at_least_one(const RatMat& A) {
  if (A.empty()) return false;
  RatVec p = characteristic_polynomial(A);
  if (poly_eval(p, BigRat(1)) == 0) return true;
  // Cauchy bound for the largest root.
  BigRat bound(1);
  for (const auto& c : p) {
    BigRat a = c < 0 ? -c : c;
    if (a > bound) bound = a;
  }
  bound += 1;
  return sturm_count(p, BigRat(1), bound) > 0;
}

}  // namespace exact
}  // namespace qpcf
