#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace slowkill {

using Index = Eigen::Index;

/// Thrown when array shapes do not line up (maps to a distinct CLI exit code).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown on malformed input files.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

/// Indices of nonzero entries, ascending.
inline std::vector<Index> support_of(const Eigen::VectorXd& v) {
  std::vector<Index> s;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) s.push_back(i);
  return s;
}

/// Indices of rows with nonzero norm, ascending.
inline std::vector<Index> row_support_of(const Eigen::MatrixXcd& m) {
  std::vector<Index> s;
  for (Index i = 0; i < m.rows(); ++i)
    if (m.row(i).squaredNorm() != 0.0) s.push_back(i);
  return s;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split by
/// index so results keyed by i are deterministic regardless of thread count.
inline void parallel_for(int threads, Index n, const std::function<void(Index)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = static_cast<int>(std::min<Index>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace slowkill
