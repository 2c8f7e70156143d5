#pragma once

// Exact-arithmetic oracles shared by the unit tests and the acceptance suite:
// a support-enumeration kernel solver and a cofactor-characteristic-polynomial
// largest-root bisection. Both are independent of the library's own solvers.

#include <optional>
#include <vector>

#include "qpcf/exact.hpp"

namespace exact_oracle {

using qpcf::BigInt;
using qpcf::BigRat;
using qpcf::RatMat;
using qpcf::RatVec;

// Nonnegative kernel by support enumeration + rational Gaussian elimination.
inline std::optional<RatVec> kernel(const RatMat& M, const RatMat& D) {
  const size_t n = M.size();
  for (size_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<size_t> sup;
    for (size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) sup.push_back(j);
    RatMat A(n, RatVec(sup.size(), BigRat(0)));
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < sup.size(); ++k) A[i][k] = M[i][sup[k]] - D[i][sup[k]];
    size_t rank = 0;
    std::vector<int> lead(sup.size(), -1);
    for (size_t col = 0; col < sup.size() && rank < n; ++col) {
      size_t piv = rank;
      while (piv < n && A[piv][col] == 0) ++piv;
      if (piv == n) continue;
      std::swap(A[piv], A[rank]);
      BigRat p = A[rank][col];
      for (auto& x : A[rank]) x /= p;
      for (size_t r = 0; r < n; ++r) {
        if (r == rank || A[r][col] == 0) continue;
        BigRat f = A[r][col];
        for (size_t c = 0; c < sup.size(); ++c) A[r][c] -= f * A[rank][c];
      }
      lead[col] = static_cast<int>(rank);
      ++rank;
    }
    for (size_t freecol = 0; freecol < sup.size(); ++freecol) {
      if (lead[freecol] >= 0) continue;
      RatVec x(sup.size(), BigRat(0));
      x[freecol] = 1;
      for (size_t col = 0; col < sup.size(); ++col)
        if (lead[col] >= 0) x[col] = -A[lead[col]][freecol];
      bool pos = true;
      for (const auto& v : x)
        if (v <= 0) pos = false;
      if (!pos) continue;
      RatVec full(n, BigRat(0));
      for (size_t k = 0; k < sup.size(); ++k) full[sup[k]] = x[k];
      return full;
    }
  }
  return std::nullopt;
}

using Poly = std::vector<BigRat>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, BigRat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Poly poly_add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), BigRat(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

// det(xI - A) by cofactor expansion over polynomial entries.
inline Poly charpoly_cofactor(const std::vector<std::vector<Poly>>& m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly det{BigRat(0)};
  int sign = 1;
  for (size_t col = 0; col < n; ++col) {
    std::vector<std::vector<Poly>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Poly> row;
      for (size_t j = 0; j < n; ++j)
        if (j != col) row.push_back(m[i][j]);
      minor.push_back(row);
    }
    Poly term = poly_mul(m[0][col], charpoly_cofactor(minor));
    if (sign < 0)
      for (auto& c : term) c = -c;
    det = poly_add(det, term);
    sign = -sign;
  }
  return det;
}

inline double largest_real_root(const Poly& p) {
  auto evalp = [](const Poly& q, const BigRat& x) {
    BigRat v(0);
    for (size_t i = q.size(); i-- > 0;) v = v * x + q[i];
    return v;
  };
  BigRat bound(1);
  for (const auto& c : p) {
    BigRat a = c < 0 ? -c : c;
    if (a > bound) bound = a;
  }
  bound += 1;
  auto deriv = [](const Poly& q) {
    Poly d;
    for (size_t i = 1; i < q.size(); ++i) d.push_back(q[i] * BigRat(BigInt(i)));
    if (d.empty()) d.push_back(BigRat(0));
    return d;
  };
  auto pmod = [](Poly a, const Poly& b) {
    auto deg = [](const Poly& q) {
      size_t d = q.size();
      while (d > 0 && q[d - 1] == 0) --d;
      return d;
    };
    size_t db = deg(b);
    if (db == 0) return Poly{BigRat(0)};
    while (deg(a) >= db && deg(a) > 0) {
      size_t da = deg(a);
      BigRat f = a[da - 1] / b[db - 1];
      for (size_t i = 0; i < db; ++i) a[da - db + i] -= f * b[i];
      a[da - 1] = 0;
    }
    a.resize(std::max<size_t>(deg(a), 1), BigRat(0));
    return a;
  };
  std::vector<Poly> chain{p, deriv(p)};
  while (true) {
    Poly r = pmod(chain[chain.size() - 2], chain.back());
    bool zero = true;
    for (const auto& c : r)
      if (c != 0) zero = false;
    if (zero) break;
    for (auto& c : r) c = -c;
    chain.push_back(r);
  }
  auto changes = [&](const BigRat& x) {
    int ch = 0, last = 0;
    for (const auto& q : chain) {
      BigRat v = evalp(q, x);
      int s = v == 0 ? 0 : (v > 0 ? 1 : -1);
      if (s != 0) {
        if (last != 0 && s != last) ++ch;
        last = s;
      }
    }
    return ch;
  };
  auto count_in = [&](const BigRat& a, const BigRat& b) { return changes(a) - changes(b); };
  BigRat lo(-bound), hi = bound;
  if (count_in(lo, hi) == 0) return 0.0;
  for (int it = 0; it < 80; ++it) {
    BigRat mid = (lo + hi) / 2;
    if (count_in(mid, hi) > 0 || evalp(p, mid) == 0)
      lo = mid;
    else
      hi = mid;
  }
  return ((lo + hi) / 2).convert_to<double>();
}

inline double spectral_radius(const RatMat& A) {
  const size_t n = A.size();
  std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j)
        m[i][j] = Poly{-A[i][j], BigRat(1)};
      else
        m[i][j] = Poly{-A[i][j]};
    }
  return largest_real_root(charpoly_cofactor(m));
}

}  // namespace exact_oracle
