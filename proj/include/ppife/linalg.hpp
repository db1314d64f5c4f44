#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppife {

class NoConvergence : public std::runtime_error {
  public:
    NoConvergence(int iterations, double residual, const std::string& solver)
        : std::runtime_error(solver + ": no convergence after " + std::to_string(iterations) +
                             " iterations, relative residual " + std::to_string(residual)),
          iterations(iterations),
          residual(residual) {}
    int iterations;
    double residual;
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// Accumulation buffer for matrix assembly.
class TripletBuffer {
  public:
    explicit TripletBuffer(int n) : n_(n) {}

    void add(int row, int col, double value) {
        if (row < 0 || row >= n_ || col < 0 || col >= n_)
            throw std::out_of_range("TripletBuffer::add: index out of range");
        entries_.push_back({row, col, value});
    }

    int dimension() const { return n_; }
    const std::vector<Triplet>& entries() const { return entries_; }
    void reserve(std::size_t n) { entries_.reserve(n); }

  private:
    int n_;
    std::vector<Triplet> entries_;
};

/// Square compressed-sparse-row matrix. Columns are strictly increasing
/// within each row; duplicate triplets are summed during compression in
/// their insertion order, so assembly is bitwise deterministic.
class SparseMatrixCSR {
  public:
    SparseMatrixCSR() = default;

    static SparseMatrixCSR compress(const TripletBuffer& buf) {
        const int n = buf.dimension();
        SparseMatrixCSR A;
        A.n_ = n;

        std::vector<int> order(buf.entries().size());
        std::iota(order.begin(), order.end(), 0);
        const auto& e = buf.entries();
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (e[a].row != e[b].row) return e[a].row < e[b].row;
            return e[a].col < e[b].col;
        });

        A.row_offsets_.assign(n + 1, 0);
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Triplet& t = e[order[k]];
            if (!A.cols_.empty() && A.row_of_last_ == t.row && A.cols_.back() == t.col) {
                A.vals_.back() += t.value;
            } else {
                A.cols_.push_back(t.col);
                A.vals_.push_back(t.value);
                A.row_of_last_ = t.row;
                A.row_offsets_[t.row + 1] += 1;
            }
        }
        for (int r = 0; r < n; ++r) A.row_offsets_[r + 1] += A.row_offsets_[r];
        return A;
    }

    int dimension() const { return n_; }
    int nnz() const { return static_cast<int>(vals_.size()); }
    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& values() { return vals_; }

    double at(int row, int col) const {
        for (int k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k)
            if (cols_[k] == col) return vals_[k];
        return 0.0;
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        multiply(x, y);
        return y;
    }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += vals_[k] * x[cols_[k]];
            y[r] = s;
        }
    }

    std::vector<double> multiply_transpose(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (int r = 0; r < n_; ++r)
            for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
                y[cols_[k]] += vals_[k] * x[r];
        return y;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(n_, 0.0);
        for (int r = 0; r < n_; ++r) d[r] = at(r, r);
        return d;
    }

    double infinity_norm() const {
        double m = 0.0;
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += std::abs(vals_[k]);
            m = std::max(m, s);
        }
        return m;
    }

    bool is_symmetric(double tol = 0.0) const {
        for (int r = 0; r < n_; ++r)
            for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
                if (std::abs(vals_[k] - at(cols_[k], r)) > tol) return false;
        return true;
    }

    /// MatrixMarket coordinate dump for offline inspection.
    void write_matrix_market(std::ostream& os) const {
        os << "%%MatrixMarket matrix coordinate real general\n";
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d %d %d\n", n_, n_, nnz());
        os << buf;
        for (int r = 0; r < n_; ++r)
            for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, cols_[k] + 1, vals_[k]);
                os << buf;
            }
    }

  private:
    int n_ = 0;
    int row_of_last_ = -1;
    std::vector<int> row_offsets_{0};
    std::vector<int> cols_;
    std::vector<double> vals_;
};

inline SparseMatrixCSR compress(const TripletBuffer& buf) { return SparseMatrixCSR::compress(buf); }

inline std::vector<double> spmv(const SparseMatrixCSR& A, const std::vector<double>& x) {
    return A.multiply(x);
}

inline std::vector<double> transpose_spmv(const SparseMatrixCSR& A, const std::vector<double>& x) {
    return A.multiply_transpose(x);
}

/// a*A + b*B on the union sparsity pattern.
inline SparseMatrixCSR add_scaled(double a, const SparseMatrixCSR& A, double b,
                                  const SparseMatrixCSR& B) {
    if (A.dimension() != B.dimension())
        throw std::invalid_argument("add_scaled: dimension mismatch");
    TripletBuffer buf(A.dimension());
    for (int r = 0; r < A.dimension(); ++r) {
        for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k)
            buf.add(r, A.cols()[k], a * A.values()[k]);
        for (int k = B.row_offsets()[r]; k < B.row_offsets()[r + 1]; ++k)
            buf.add(r, B.cols()[k], b * B.values()[k]);
    }
    return SparseMatrixCSR::compress(buf);
}

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
};

namespace detail {

inline double dot_v(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm_v(const std::vector<double>& a) { return std::sqrt(dot_v(a, a)); }

inline std::vector<double> jacobi_inverse(const SparseMatrixCSR& A) {
    std::vector<double> d = A.diagonal();
    for (double& v : d) v = (v != 0.0) ? 1.0 / v : 1.0;
    return d;
}

}  // namespace detail

/// Jacobi-preconditioned conjugate gradients for SPD systems; terminates at
/// ||b - Ax|| <= tol * ||b||. The observer, when set, sees every iterate.
inline SolveResult cg(const SparseMatrixCSR& A, const std::vector<double>& b, double tol = 1e-10,
                      int max_iter = 10000, const std::vector<double>* x0 = nullptr,
                      const std::function<void(int, const std::vector<double>&)>& observer = {}) {
    const int n = A.dimension();
    std::vector<double> x = x0 ? *x0 : std::vector<double>(n, 0.0);
    std::vector<double> r(n), z(n), p(n), Ap(n);

    const double bnorm = detail::norm_v(b);
    if (bnorm == 0.0) return {std::vector<double>(n, 0.0), 0};
    const std::vector<double> dinv = detail::jacobi_inverse(A);

    A.multiply(x, Ap);
    for (int k = 0; k < n; ++k) r[k] = b[k] - Ap[k];
    for (int k = 0; k < n; ++k) z[k] = dinv[k] * r[k];
    p = z;
    double rz = detail::dot_v(r, z);

    for (int it = 1; it <= max_iter; ++it) {
        A.multiply(p, Ap);
        const double alpha = rz / detail::dot_v(p, Ap);
        for (int k = 0; k < n; ++k) x[k] += alpha * p[k];
        for (int k = 0; k < n; ++k) r[k] -= alpha * Ap[k];
        if (observer) observer(it, x);
        if (detail::norm_v(r) <= tol * bnorm) return {std::move(x), it};
        for (int k = 0; k < n; ++k) z[k] = dinv[k] * r[k];
        const double rz_new = detail::dot_v(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    throw NoConvergence(max_iter, detail::norm_v(r) / bnorm, "cg");
}

/// Jacobi-preconditioned BiCGStab; breakdowns restart from the current
/// iterate (at most 3 restarts).
inline SolveResult bicgstab(const SparseMatrixCSR& A, const std::vector<double>& b,
                            double tol = 1e-10, int max_iter = 10000,
                            const std::vector<double>* x0 = nullptr) {
    const int n = A.dimension();
    std::vector<double> x = x0 ? *x0 : std::vector<double>(n, 0.0);
    std::vector<double> r(n), rhat(n), p(n), v(n), s(n), t(n), phat(n), shat(n);

    const double bnorm = detail::norm_v(b);
    if (bnorm == 0.0) return {std::vector<double>(n, 0.0), 0};
    const std::vector<double> dinv = detail::jacobi_inverse(A);
    const double breakdown = 1e-300;

    int restarts = 0;
    int it = 0;
restart:
    A.multiply(x, v);
    for (int k = 0; k < n; ++k) r[k] = b[k] - v[k];
    if (detail::norm_v(r) <= tol * bnorm) return {std::move(x), it};
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    while (it < max_iter) {
        ++it;
        const double rho_new = detail::dot_v(rhat, r);
        if (std::abs(rho_new) < breakdown || std::abs(omega) < breakdown) {
            if (++restarts > 3) throw NoConvergence(it, detail::norm_v(r) / bnorm, "bicgstab");
            goto restart;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (int k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        for (int k = 0; k < n; ++k) phat[k] = dinv[k] * p[k];
        A.multiply(phat, v);
        alpha = rho / detail::dot_v(rhat, v);
        for (int k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
        if (detail::norm_v(s) <= tol * bnorm) {
            for (int k = 0; k < n; ++k) x[k] += alpha * phat[k];
            return {std::move(x), it};
        }
        for (int k = 0; k < n; ++k) shat[k] = dinv[k] * s[k];
        A.multiply(shat, t);
        const double tt = detail::dot_v(t, t);
        if (tt < breakdown) {
            if (++restarts > 3) throw NoConvergence(it, detail::norm_v(s) / bnorm, "bicgstab");
            for (int k = 0; k < n; ++k) x[k] += alpha * phat[k];
            goto restart;
        }
        omega = detail::dot_v(t, s) / tt;
        for (int k = 0; k < n; ++k) x[k] += alpha * phat[k] + omega * shat[k];
        for (int k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
        if (detail::norm_v(r) <= tol * bnorm) return {std::move(x), it};
    }
    throw NoConvergence(max_iter, detail::norm_v(r) / bnorm, "bicgstab");
}

/// Condition estimate of an SPD matrix: largest eigenvalue by power
/// iteration, smallest by inverse iteration with cg solves. Accuracy target
/// is a factor of 1.5, enough for scaling studies.
inline double condition_estimate(const SparseMatrixCSR& A) {
    const int n = A.dimension();
    // deterministic pseudo-random start vector
    std::vector<double> v(n);
    unsigned long long state = 0x243f6a8885a308d3ull;
    for (int k = 0; k < n; ++k) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v[k] = ((state >> 33) & 0xffffff) / double(0x1000000) - 0.5;
    }
    auto normalize = [&](std::vector<double>& w) {
        double nw = detail::norm_v(w);
        for (double& c : w) c /= nw;
    };
    normalize(v);

    std::vector<double> w(n);
    double lambda_max = 0.0;
    for (int it = 0; it < 200; ++it) {
        A.multiply(v, w);
        lambda_max = detail::dot_v(v, w);
        normalize(w);
        v.swap(w);
    }

    // inverse iteration
    for (int k = 0; k < n; ++k) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v[k] = ((state >> 33) & 0xffffff) / double(0x1000000) - 0.5;
    }
    normalize(v);
    double lambda_min = lambda_max;
    for (int it = 0; it < 50; ++it) {
        SolveResult sol = cg(A, v, 1e-10, 100 * n + 1000, nullptr);
        double ny = detail::norm_v(sol.x);
        for (int k = 0; k < n; ++k) v[k] = sol.x[k] / ny;
        A.multiply(v, w);
        lambda_min = detail::dot_v(v, w);
    }
    return lambda_max / lambda_min;
}

}  // namespace ppife
