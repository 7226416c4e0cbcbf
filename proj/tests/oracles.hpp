#pragma once

// Independent reference computations for the tests. Nothing here uses the
// library's numerical routines: plain loops over std::vector only.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Table = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

struct PathEnumeration {
  double likelihood = 0.0;  // P(obs)
  Vec last_state;           // P(state_m | obs), normalized
  Vec next_symbol;          // P(O_{m+1} | obs)
};

/// Enumerates every hidden path x_1..x_{m+1} (one step past the data) and
/// accumulates P(path, obs). Requires obs non-empty.
inline PathEnumeration enumerate_paths(const Table& A, const Table& B, const Vec& pi,
                                       const std::vector<std::size_t>& obs) {
  const std::size_t n = pi.size();
  const std::size_t k = B[0].size();
  const std::size_t m = obs.size();
  PathEnumeration out;
  out.last_state.assign(n, 0.0);
  out.next_symbol.assign(k, 0.0);
  std::vector<std::size_t> path(m + 1, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i <= m; ++i) total *= n;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t i = 0; i <= m; ++i) {
      path[i] = rest % n;
      rest /= n;
    }
    double joint = pi[path[0]] * B[path[0]][obs[0]];
    for (std::size_t t = 1; t < m; ++t) joint *= A[path[t - 1]][path[t]] * B[path[t]][obs[t]];
    joint *= A[path[m - 1]][path[m]];
    out.likelihood += joint;
    out.last_state[path[m - 1]] += joint;
    for (std::size_t h = 0; h < k; ++h) out.next_symbol[h] += joint * B[path[m]][h];
  }
  for (auto& v : out.last_state) v /= out.likelihood;
  for (auto& v : out.next_symbol) v /= out.likelihood;
  return out;
}

/// All sequences over `k` symbols with length 1..max_length.
inline std::vector<std::vector<std::size_t>> all_sequences(std::size_t k, std::size_t max_length) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= k;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<std::size_t> seq(len);
      std::size_t rest = code;
      for (std::size_t i = 0; i < len; ++i) {
        seq[i] = rest % k;
        rest /= k;
      }
      out.push_back(std::move(seq));
    }
  }
  return out;
}

/// Scans x over [0, 1] at `step` and returns the grid point where |gap(x)|
/// is smallest.
inline double grid_root(const std::function<double(double)>& gap, double step = 1e-6) {
  const auto n = static_cast<long>(std::llround(1.0 / step));
  double best_x = 0.0;
  double best = std::abs(gap(0.0));
  for (long i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) * step;
    const double g = std::abs(gap(x));
    if (g < best) {
      best = g;
      best_x = x;
    }
  }
  return best_x;
}

/// Column mix q = P(col 0) at which the row player's two rows pay the same.
/// R is indexed R[row][col].
inline double column_indifference(const Table& R) {
  return grid_root([&](double q) {
    return (R[0][0] * q + R[0][1] * (1 - q)) - (R[1][0] * q + R[1][1] * (1 - q));
  });
}

/// Row mix p = P(row 0) at which the column player's two columns pay the same.
inline double row_indifference(const Table& C) {
  return grid_root([&](double p) {
    return (C[0][0] * p + C[1][0] * (1 - p)) - (C[0][1] * p + C[1][1] * (1 - p));
  });
}

/// Stationary distribution by power iteration.
inline Vec stationary(const Table& A, int iterations = 10000) {
  const std::size_t n = A.size();
  Vec x(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < iterations; ++it) {
    Vec y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[j] += x[i] * A[i][j];
    x = y;
  }
  return x;
}

}  // namespace oracle
