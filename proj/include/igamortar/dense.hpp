#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "igamortar/core.hpp"

namespace igamortar {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double value = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, value) {}

  static DenseMatrix identity(int n) {
    DenseMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

inline DenseMatrix operator*(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) throw PreconditionError("matrix product dimension mismatch");
  DenseMatrix C(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int k = 0; k < A.cols(); ++k) {
      const double a = A(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
    }
  return C;
}

inline std::vector<double> operator*(const DenseMatrix& A, const std::vector<double>& x) {
  std::vector<double> y(A.rows(), 0.0);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) y[i] += A(i, j) * x[j];
  return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Lower-triangular Cholesky factor L with M = L L^T.
inline DenseMatrix cholesky(const DenseMatrix& M) {
  const int n = M.rows();
  if (M.cols() != n) throw PreconditionError("Cholesky needs a square matrix");
  DenseMatrix L(n, n);
  for (int j = 0; j < n; ++j) {
    double d = M(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "matrix is not positive definite (pivot " << j << " = " << d << ")";
      throw SingularMatrixError(os.str(), j);
    }
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = M(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return L;
}

/// Solves L y = b (lower) in place.
inline void forward_subst(const DenseMatrix& L, std::vector<double>& b) {
  for (int i = 0; i < L.rows(); ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L(i, k) * b[k];
    b[i] = s / L(i, i);
  }
}

/// Solves L^T x = y in place.
inline void backward_subst_t(const DenseMatrix& L, std::vector<double>& y) {
  for (int i = L.rows() - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < L.rows(); ++k) s -= L(k, i) * y[k];
    y[i] = s / L(i, i);
  }
}

inline std::vector<double> cholesky_solve(const DenseMatrix& L, std::vector<double> b) {
  forward_subst(L, b);
  backward_subst_t(L, b);
  return b;
}

/// Dense LU with partial pivoting, used for small collocation systems.
inline std::vector<double> dense_solve(DenseMatrix A, std::vector<double> b) {
  const int n = A.rows();
  double scale = A.max_abs();
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (std::abs(A(piv, k)) <= 1e-14 * scale) throw SingularMatrixError("singular dense system", k);
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
    b[i] = s / A(i, i);
  }
  return b;
}

struct EigenResult {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column k belongs to values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi for a symmetric matrix. Stops when the off-diagonal Frobenius norm
/// drops below tol * ||A||_F.
inline EigenResult jacobi_eigen(DenseMatrix A, double tol = 1e-13, int max_sweeps = 100) {
  const int n = A.rows();
  if (A.cols() != n) throw PreconditionError("eigensolver needs a square matrix");
  DenseMatrix V = DenseMatrix::identity(n);
  const double fro = A.frobenius();
  auto off = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += A(i, j) * A(i, j);
    return std::sqrt(s);
  };
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off() <= tol * fro || fro == 0.0) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off() > tol * fro && fro != 0.0) throw Error("Jacobi eigensolver did not converge");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) < A(b, b); });
  EigenResult r;
  r.sweeps = sweep;
  r.values.resize(n);
  r.vectors = DenseMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    r.values[k] = A(order[k], order[k]);
    for (int i = 0; i < n; ++i) r.vectors(i, k) = V(i, order[k]);
  }
  return r;
}

/// Generalized symmetric-definite problem K x = lambda M x by Cholesky reduction and
/// Jacobi. Eigenvectors are M-orthonormal.
inline EigenResult gen_eig_sym(const DenseMatrix& K, const DenseMatrix& M) {
  const int n = K.rows();
  if (K.cols() != n || M.rows() != n || M.cols() != n)
    throw PreconditionError("generalized eigenproblem dimension mismatch");
  const double scale = std::max(K.max_abs(), 1e-300);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(K(i, j) - K(j, i)) > 1e-10 * scale)
        throw PreconditionError("K is not symmetric");
  const DenseMatrix L = cholesky(M);
  // C = L^{-1} K L^{-T}
  DenseMatrix C(n, n);
  {
    DenseMatrix X(n, n);  // X = L^{-1} K
    for (int j = 0; j < n; ++j) {
      std::vector<double> col(n);
      for (int i = 0; i < n; ++i) col[i] = K(i, j);
      forward_subst(L, col);
      for (int i = 0; i < n; ++i) X(i, j) = col[i];
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(n);
      for (int j = 0; j < n; ++j) row[j] = X(i, j);
      forward_subst(L, row);
      for (int j = 0; j < n; ++j) C(i, j) = row[j];
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) C(i, j) = C(j, i) = 0.5 * (C(i, j) + C(j, i));
  }
  EigenResult r = jacobi_eigen(C);
  for (int k = 0; k < n; ++k) {
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = r.vectors(i, k);
    backward_subst_t(L, q);
    for (int i = 0; i < n; ++i) r.vectors(i, k) = q[i];
  }
  return r;
}

}  // namespace igamortar
