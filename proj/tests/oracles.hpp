#pragma once

// Test-side reference computations, written independently of the library's
// algorithms: dense eigen-solvers, brute-force enumeration, literal recursions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "thermo/correspondence.hpp"
#include "thermo/kernel.hpp"

namespace oracle {

inline Eigen::MatrixXd weighted_matrix(const thermo::FiniteCorrespondence& T, const thermo::Potential& phi) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(T.size(), T.size());
  for (int e = 0; e < T.edge_count(); ++e) M(T.edge(e).from, T.edge(e).to) = std::exp(phi.values[e]);
  return M;
}

inline double spectral_radius(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// log of the spectral radius of exp(phi) by a general dense eigen-solver.
inline double dense_pressure(const thermo::FiniteCorrespondence& T, const thermo::Potential& phi) {
  return std::log(spectral_radius(weighted_matrix(T, phi)));
}

/// Depth-first enumeration of every orbit with `length` coordinates.
inline void for_each_path(const thermo::FiniteCorrespondence& T, int length,
                          const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> path;
  std::function<void()> grow = [&] {
    if (static_cast<int>(path.size()) == length) {
      visit(path);
      return;
    }
    for (int next : T.successors(path.back())) {
      path.push_back(next);
      grow();
      path.pop_back();
    }
  };
  for (int s = 0; s < T.size(); ++s) {
    path.assign(1, s);
    grow();
  }
}

/// (1/n) log of the sum over orbits of length n+1 of exp(S_n phi), by enumeration.
inline double brute_path_pressure(const thermo::FiniteCorrespondence& T, const thermo::Potential& phi, int n) {
  std::vector<double> sums;
  for_each_path(T, n + 1, [&](const std::vector<int>& p) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) s += phi.values[*T.edge_index(p[k], p[k + 1])];
    sums.push_back(s);
  });
  const double top = *std::max_element(sums.begin(), sums.end());
  double total = 0.0;
  for (double s : sums) total += std::exp(s - top);
  return (top + std::log(total)) / n;
}

/// reach[i][j]: j reachable from i by a path of length >= 0 (Floyd-Warshall closure).
inline std::vector<std::vector<bool>> reachability(const thermo::FiniteCorrespondence& T) {
  const int n = T.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) r[i][i] = true;
  for (const auto& e : T.edges()) r[e.from][e.to] = true;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
    }
  }
  return r;
}

/// Every simple cycle, each listed once starting at its smallest state.
inline std::vector<std::vector<int>> simple_cycles(const thermo::FiniteCorrespondence& T) {
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<bool> on(T.size(), false);
  std::function<void(int, int)> walk = [&](int start, int v) {
    for (int w : T.successors(v)) {
      if (w == start) {
        out.push_back(path);
      } else if (w > start && !on[w]) {
        on[w] = true;
        path.push_back(w);
        walk(start, w);
        path.pop_back();
        on[w] = false;
      }
    }
  };
  for (int s = 0; s < T.size(); ++s) {
    path.assign(1, s);
    on[s] = true;
    walk(s, s);
    on[s] = false;
  }
  return out;
}

/// Uniform measure on the states of a cycle.
inline Eigen::VectorXd cycle_measure(int n_states, const std::vector<int>& cycle) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_states);
  for (int s : cycle) w[s] += 1.0 / static_cast<double>(cycle.size());
  return w;
}

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  auto solve_passive = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
    return z;
  };
  for (int outer = 0; outer < 3 * static_cast<int>(m) + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > 1e-13 && (best < 0 || w[j] > w[best])) best = j;
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (;;) {
      const Eigen::VectorXd z = solve_passive();
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return x;
}

/// Distance from `target` to the convex hull of `points`, by NNLS with a heavily
/// weighted row forcing the coefficients to sum to one.
inline double hull_distance(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& target) {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  const Eigen::Index d = target.size();
  Eigen::MatrixXd A(d + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    A.col(static_cast<Eigen::Index>(k)) << points[k], 1e3;
  }
  Eigen::VectorXd b(d + 1);
  b << target, 1e3;
  const Eigen::VectorXd x = nnls(A, b);
  return (A * x - b).norm();
}

/// mu Q^[n] built literally: Q^[k] extends every path of Q^[k-1] by one step.
inline std::map<std::vector<int>, double> chain_law(const thermo::StateMeasure& mu, const thermo::TransitionKernel& Q,
                                                    int n) {
  std::map<std::vector<int>, double> law;
  for (int s = 0; s < mu.size(); ++s) {
    if (mu.weights[s] > 0.0) law[{s}] = mu.weights[s];
  }
  for (int k = 0; k < n; ++k) {
    std::map<std::vector<int>, double> next;
    for (const auto& [path, w] : law) {
      for (int t = 0; t < mu.size(); ++t) {
        const double q = Q(path.back(), t);
        if (q <= 0.0) continue;
        auto longer = path;
        longer.push_back(t);
        next[longer] += w * q;
      }
    }
    law = std::move(next);
  }
  return law;
}

inline double entropy_of(const std::map<std::vector<int>, double>& law) {
  double h = 0.0;
  for (const auto& [path, w] : law) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

/// Central difference of f at 0 with step t.
inline double central_difference(const std::function<double(double)>& f, double t) {
  return (f(t) - f(-t)) / (2.0 * t);
}

}  // namespace oracle
