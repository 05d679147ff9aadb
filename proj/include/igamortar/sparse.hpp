#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <vector>

#include "igamortar/dense.hpp"

namespace igamortar {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row sparse matrix built from triplets (duplicates summed).
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), ptr_(rows + 1, 0) {}

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> t) {
    for (const auto& e : t) {
      if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
        throw PreconditionError("triplet index out of range");
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m(rows, cols);
    for (std::size_t k = 0; k < t.size();) {
      std::size_t e = k;
      double v = 0.0;
      while (e < t.size() && t[e].row == t[k].row && t[e].col == t[k].col) v += t[e++].value;
      m.idx_.push_back(t[k].col);
      m.val_.push_back(v);
      ++m.ptr_[t[k].row + 1];
      k = e;
    }
    for (int i = 0; i < rows; ++i) m.ptr_[i + 1] += m.ptr_[i];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nonzeros() const { return static_cast<int>(val_.size()); }
  const std::vector<int>& row_ptr() const { return ptr_; }
  const std::vector<int>& col_idx() const { return idx_; }
  const std::vector<double>& values() const { return val_; }

  double at(int i, int j) const {
    for (int k = ptr_[i]; k < ptr_[i + 1]; ++k)
      if (idx_[k] == j) return val_[k];
    return 0.0;
  }

  std::vector<double> multiply(const std::vector<double>& x) const {
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i)
      for (int k = ptr_[i]; k < ptr_[i + 1]; ++k) y[i] += val_[k] * x[idx_[k]];
    return y;
  }

  std::vector<double> multiply_transpose(const std::vector<double>& x) const {
    std::vector<double> y(cols_, 0.0);
    for (int i = 0; i < rows_; ++i)
      for (int k = ptr_[i]; k < ptr_[i + 1]; ++k) y[idx_[k]] += val_[k] * x[i];
    return y;
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> t;
    t.reserve(val_.size());
    for (int i = 0; i < rows_; ++i)
      for (int k = ptr_[i]; k < ptr_[i + 1]; ++k) t.push_back({i, idx_[k], val_[k]});
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : val_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Largest |A_ij - A_ji|.
  double asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int k = ptr_[i]; k < ptr_[i + 1]; ++k) m = std::max(m, std::abs(val_[k] - at(idx_[k], i)));
    return m;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = ptr_[i]; k < ptr_[i + 1]; ++k) d(i, idx_[k]) += val_[k];
    return d;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> ptr_;
  std::vector<int> idx_;
  std::vector<double> val_;
};

/// Reverse Cuthill-McKee ordering of the symmetrized pattern. perm[new] = old.
inline std::vector<int> reverse_cuthill_mckee(const SparseMatrix& A) {
  const int n = A.rows();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
      const int j = A.col_idx()[k];
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  auto degree = [&](int v) { return adj[v].size(); };
  auto bfs = [&](int root, std::vector<int>& out, std::vector<int>& level) {
    std::vector<char> mark(n, 0);
    out.clear();
    level.assign(n, -1);
    std::queue<int> q;
    q.push(root);
    mark[root] = 1;
    level[root] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      out.push_back(v);
      std::vector<int> next;
      for (int w : adj[v])
        if (!mark[w] && !seen[w]) next.push_back(w);
      std::sort(next.begin(), next.end(), [&](int a, int b) { return degree(a) < degree(b); });
      for (int w : next) {
        mark[w] = 1;
        level[w] = level[v] + 1;
        q.push(w);
      }
    }
  };
  std::vector<int> comp, level;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    // pseudo-peripheral start: repeat BFS from the farthest low-degree node
    int root = s;
    bfs(root, comp, level);
    for (int it = 0; it < 5; ++it) {
      int far = root, depth = level[root];
      for (int v : comp) {
        if (level[v] > depth || (level[v] == depth && degree(v) < degree(far))) {
          far = v;
          depth = level[v];
        }
      }
      if (far == root) break;
      const int old_depth = level[comp.back()];
      std::vector<int> comp2, level2;
      bfs(far, comp2, level2);
      if (level2[comp2.back()] <= old_depth) break;
      root = far;
      comp.swap(comp2);
      level.swap(level2);
    }
    bfs(root, comp, level);
    for (int v : comp) {
      seen[v] = 1;
      order.push_back(v);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

/// Lower and upper bandwidth of A under the symmetric permutation perm (perm[new] = old).
inline std::pair<int, int> bandwidths(const SparseMatrix& A, const std::vector<int>& perm) {
  const int n = A.rows();
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[perm[i]] = i;
  int kl = 0, ku = 0;
  for (int i = 0; i < n; ++i)
    for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
      const int d = inv[A.col_idx()[k]] - inv[i];
      if (d > 0) ku = std::max(ku, d);
      if (d < 0) kl = std::max(kl, -d);
    }
  return {kl, ku};
}

/// Banded LU factorization with partial pivoting of a symmetrically permuted sparse
/// matrix. Storage follows the LAPACK general-band layout with kl extra rows for fill.
class BandLU {
 public:
  explicit BandLU(const SparseMatrix& A, bool reorder = true) : n_(A.rows()) {
    if (A.cols() != n_) throw PreconditionError("LU needs a square matrix");
    std::vector<int> natural(n_);
    std::iota(natural.begin(), natural.end(), 0);
    perm_ = natural;
    auto [kl, ku] = bandwidths(A, natural);
    if (reorder && n_ > 2) {
      auto rcm = reverse_cuthill_mckee(A);
      auto [kl2, ku2] = bandwidths(A, rcm);
      if (kl2 + ku2 < kl + ku) {
        perm_ = rcm;
        kl = kl2;
        ku = ku2;
      }
    }
    kl_ = kl;
    ku_ = ku;
    ld_ = 2 * kl_ + ku_ + 1;
    inv_.resize(n_);
    for (int i = 0; i < n_; ++i) inv_[perm_[i]] = i;
    ab_.assign(static_cast<std::size_t>(ld_) * n_, 0.0);
    scale_ = A.max_abs();
    for (int i = 0; i < n_; ++i)
      for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) at(inv_[i], inv_[A.col_idx()[k]]) += A.values()[k];
    factor();
  }

  int size() const { return n_; }
  int lower_bandwidth() const { return kl_; }
  int upper_bandwidth() const { return ku_; }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
    for (int j = 0; j < n_; ++j) {
      if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
      const int last = std::min(n_ - 1, j + kl_);
      for (int i = j + 1; i <= last; ++i) x[i] -= get(i, j) * x[j];
    }
    const int kv = kl_ + ku_;
    for (int j = n_ - 1; j >= 0; --j) {
      x[j] /= get(j, j);
      const int first = std::max(0, j - kv);
      for (int i = first; i < j; ++i) x[i] -= get(i, j) * x[j];
    }
    std::vector<double> out(n_);
    for (int i = 0; i < n_; ++i) out[perm_[i]] = x[i];
    return out;
  }

 private:
  // element (i, j) of the working matrix, valid for j - (kl+ku) <= i <= j + kl
  double& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }
  double get(int i, int j) const { return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }

  void factor() {
    piv_.resize(n_);
    int ju = 0;  // last column touched by U so far
    for (int j = 0; j < n_; ++j) {
      const int last = std::min(n_ - 1, j + kl_);
      int p = j;
      double best = std::abs(get(j, j));
      for (int i = j + 1; i <= last; ++i) {
        if (std::abs(get(i, j)) > best) {
          best = std::abs(get(i, j));
          p = i;
        }
      }
      piv_[j] = p;
      if (best <= 1e-14 * scale_) {
        std::ostringstream os;
        os << "matrix is numerically singular at unknown " << perm_[j];
        throw SingularMatrixError(os.str(), perm_[j]);
      }
      ju = std::max(ju, std::min(n_ - 1, p + ku_));
      if (p != j) {
        for (int c = j; c <= ju; ++c) std::swap(at(j, c), at(p, c));
      }
      const double d = get(j, j);
      for (int i = j + 1; i <= last; ++i) at(i, j) /= d;
      for (int c = j + 1; c <= ju; ++c) {
        const double u = get(j, c);
        if (u == 0.0) continue;
        for (int i = j + 1; i <= last; ++i) at(i, c) -= get(i, j) * u;
      }
    }
  }

  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  int ld_ = 0;
  double scale_ = 0.0;
  std::vector<int> perm_;
  std::vector<int> inv_;
  std::vector<int> piv_;
  std::vector<double> ab_;
};

/// Direct solve of a square sparse system with partial pivoting.
inline std::vector<double> lu_solve(const SparseMatrix& A, const std::vector<double>& rhs) {
  if (static_cast<int>(rhs.size()) != A.rows()) throw PreconditionError("rhs length mismatch");
  return BandLU(A).solve(rhs);
}

}  // namespace igamortar
