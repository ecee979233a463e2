#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "thermo/error.hpp"

namespace thermo {

/// Sign tests used by the simplex. Floating scalars compare against a fixed
/// tolerance; exact scalars (Rational) compare exactly.
template <class Scalar>
struct LpTraits {
  static bool positive(const Scalar& x) { return x > Scalar(0); }
  static bool negative(const Scalar& x) { return x < Scalar(0); }
  static bool zero(const Scalar& x) { return x == Scalar(0); }
};

template <>
struct LpTraits<double> {
  static constexpr double eps = 1e-10;
  static bool positive(double x) { return x > eps; }
  static bool negative(double x) { return x < -eps; }
  static bool zero(double x) { return std::abs(x) <= eps; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class Scalar>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar objective = Scalar(0);
};

/// Dense simplex tableau for { x >= 0 : A x = b } with Bland's anti-cycling rule.
///
/// Construction runs phase I; afterwards the tableau holds a feasible basis
/// with redundant equality rows removed (or `feasible()` is false).
template <class Scalar>
class SimplexTableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Traits = LpTraits<Scalar>;

  SimplexTableau(const Matrix& A, const Vector& b) : n_(static_cast<int>(A.cols())) {
    if (A.rows() != b.size()) throw Error(ErrorKind::ShapeMismatch, "A and b disagree");
    const int m = static_cast<int>(A.rows());
    table_ = Matrix::Zero(m, n_ + m + 1);
    for (int r = 0; r < m; ++r) {
      const Scalar sign = b[r] < Scalar(0) ? Scalar(-1) : Scalar(1);
      for (int c = 0; c < n_; ++c) table_(r, c) = sign * A(r, c);
      table_(r, n_ + r) = Scalar(1);
      table_(r, n_ + m) = sign * b[r];
      basis_.push_back(n_ + r);
    }
    Vector cost = Vector::Zero(n_ + m);
    for (int r = 0; r < m; ++r) cost[n_ + r] = Scalar(1);
    std::vector<bool> allowed(static_cast<std::size_t>(n_ + m), true);
    optimize(cost, allowed);
    Scalar infeasibility(0);
    for (int r = 0; r < m; ++r) {
      if (basis_[r] >= n_) infeasibility += rhs(r);
    }
    feasible_ = !Traits::positive(infeasibility);
    if (!feasible_) return;

    // Drive artificials out of the basis; rows where that is impossible are redundant.
    std::vector<int> keep;
    for (int r = 0; r < rows(); ++r) {
      if (basis_[r] < n_) {
        keep.push_back(r);
        continue;
      }
      int column = -1;
      for (int c = 0; c < n_ && column < 0; ++c) {
        if (!Traits::zero(table_(r, c)) && !is_basic(c)) column = c;
      }
      if (column >= 0) {
        pivot(r, column);
        keep.push_back(r);
      }
    }
    Matrix reduced(static_cast<Eigen::Index>(keep.size()), n_ + 1);
    std::vector<int> basis;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const int r = keep[k];
      reduced.row(static_cast<Eigen::Index>(k)).head(n_) = table_.row(r).head(n_);
      reduced(static_cast<Eigen::Index>(k), n_) = table_(r, table_.cols() - 1);
      basis.push_back(basis_[static_cast<std::size_t>(r)]);
    }
    table_ = std::move(reduced);
    basis_ = std::move(basis);
  }

  bool feasible() const { return feasible_; }
  int rows() const { return static_cast<int>(table_.rows()); }
  int columns() const { return n_; }
  const std::vector<int>& basis() const { return basis_; }
  const Matrix& table() const { return table_; }
  const Scalar& rhs(int r) const { return table_(r, table_.cols() - 1); }

  bool is_basic(int column) const {
    return std::find(basis_.begin(), basis_.end(), column) != basis_.end();
  }

  Vector point() const {
    Vector x = Vector::Zero(n_);
    for (int r = 0; r < rows(); ++r) {
      if (basis_[r] < n_) x[basis_[r]] = rhs(r);
    }
    return x;
  }

  void pivot(int row, int column) {
    const Scalar p = table_(row, column);
    table_.row(row) /= p;
    for (int r = 0; r < table_.rows(); ++r) {
      if (r == row) continue;
      const Scalar f = table_(r, column);
      if (f != Scalar(0)) table_.row(r) -= f * table_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = column;
  }

  /// Minimizes cost . x over the current feasible region (phase II).
  LpStatus minimize(const Vector& cost) {
    if (cost.size() != n_) throw Error(ErrorKind::ShapeMismatch, "cost vector has wrong size");
    std::vector<bool> allowed(static_cast<std::size_t>(n_), true);
    return optimize(cost, allowed);
  }

 private:
  LpStatus optimize(const Vector& cost, const std::vector<bool>& allowed) {
    const int width = static_cast<int>(cost.size());
    for (;;) {
      int entering = -1;
      for (int c = 0; c < width && entering < 0; ++c) {
        if (!allowed[static_cast<std::size_t>(c)] || is_basic(c)) continue;
        Scalar reduced = cost[c];
        for (int r = 0; r < rows(); ++r) reduced -= cost[basis_[r]] * table_(r, c);
        if (Traits::negative(reduced)) entering = c;
      }
      if (entering < 0) return LpStatus::Optimal;
      int leaving = -1;
      Scalar best(0);
      for (int r = 0; r < rows(); ++r) {
        if (!Traits::positive(table_(r, entering))) continue;
        const Scalar ratio = rhs(r) / table_(r, entering);
        if (leaving < 0 || ratio < best ||
            (ratio == best && basis_[r] < basis_[static_cast<std::size_t>(leaving)])) {
          leaving = r;
          best = ratio;
        }
      }
      if (leaving < 0) return LpStatus::Unbounded;
      pivot(leaving, entering);
    }
  }

  int n_;
  Matrix table_;
  std::vector<int> basis_;
  bool feasible_ = false;
};

/// min cost . x subject to A x = b, x >= 0.
template <class Scalar>
LpSolution<Scalar> solve_lp(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& cost) {
  SimplexTableau<Scalar> tableau(A, b);
  LpSolution<Scalar> out;
  if (!tableau.feasible()) return out;
  out.status = tableau.minimize(cost);
  out.x = tableau.point();
  out.objective = cost.dot(out.x);
  return out;
}

/// Any point of { x >= 0 : A x = b }, or nothing.
template <class Scalar>
std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> feasible_point(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
  SimplexTableau<Scalar> tableau(A, b);
  if (!tableau.feasible()) return std::nullopt;
  return tableau.point();
}

/// All vertices of the bounded polyhedron { x >= 0 : A x = b }, found by a
/// breadth-first search over feasible bases (degenerate pivots included).
/// Throws TooLarge once more than `max_bases` bases have been visited.
/// Vertices come back sorted lexicographically.
template <class Scalar>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> enumerate_vertices(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b, std::size_t max_bases = 200000) {
  using Tableau = SimplexTableau<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Traits = LpTraits<Scalar>;

  Tableau start(A, b);
  if (!start.feasible()) return {};

  auto key_of = [](const Tableau& t) {
    std::vector<int> key = t.basis();
    std::sort(key.begin(), key.end());
    return key;
  };
  auto less = [](const Vector& u, const Vector& v) {
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      if (u[k] < v[k]) return true;
      if (v[k] < u[k]) return false;
    }
    return false;
  };

  std::set<std::vector<int>> seen{key_of(start)};
  std::deque<Tableau> queue{start};
  std::vector<Vector> vertices;
  while (!queue.empty()) {
    Tableau current = std::move(queue.front());
    queue.pop_front();
    vertices.push_back(current.point());
    for (int c = 0; c < current.columns(); ++c) {
      if (current.is_basic(c)) continue;
      std::optional<Scalar> best;
      for (int r = 0; r < current.rows(); ++r) {
        if (!Traits::positive(current.table()(r, c))) continue;
        const Scalar ratio = current.rhs(r) / current.table()(r, c);
        if (!best || ratio < *best) best = ratio;
      }
      if (!best) continue;
      const bool degenerate = Traits::zero(*best);
      for (int r = 0; r < current.rows(); ++r) {
        const Scalar& entry = current.table()(r, c);
        bool valid = false;
        if (Traits::positive(entry)) {
          valid = Traits::zero(current.rhs(r) / entry - *best);
        } else if (degenerate && Traits::negative(entry)) {
          valid = Traits::zero(current.rhs(r));
        }
        if (!valid) continue;
        Tableau next = current;
        next.pivot(r, c);
        auto key = key_of(next);
        if (seen.insert(std::move(key)).second) {
          if (seen.size() > max_bases) {
            throw Error(ErrorKind::TooLarge, "vertex enumeration exceeded the basis budget");
          }
          queue.push_back(std::move(next));
        }
      }
    }
  }

  std::sort(vertices.begin(), vertices.end(), less);
  std::vector<Vector> unique;
  for (auto& v : vertices) {
    if (!unique.empty()) {
      const Vector diff = v - unique.back();
      bool same = true;
      for (Eigen::Index k = 0; k < diff.size() && same; ++k) same = Traits::zero(diff[k]);
      if (same) continue;
    }
    unique.push_back(std::move(v));
  }
  return unique;
}

}  // namespace thermo
