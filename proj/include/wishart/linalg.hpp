// Dense linear algebra kernel for small symmetric / complex square matrices.
//
// Everything the transform evaluators need lives here: a packed symmetric
// type, a dense complex type, a cyclic Jacobi eigensolver, partially pivoted
// complex LU (solve + determinant) and the PSD matrix square root. Dimensions
// are runtime values, capped at kMaxDim so the O(m^3) kernels stay trivially
// fast.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wishart {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 64;

struct DimensionMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotPsdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EigenConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_dim(int m) {
    if (m < 1 || m > kMaxDim)
        throw std::invalid_argument("matrix dimension must be in [1, " +
                                    std::to_string(kMaxDim) + "], got " + std::to_string(m));
}

inline void require_same_dim(int a, int b, const char* what) {
    if (a != b)
        throw DimensionMismatchError(std::string(what) + ": dimensions " +
                                     std::to_string(a) + " and " + std::to_string(b) + " differ");
}

}  // namespace detail

/// Real symmetric m x m matrix. Only the lower triangle is stored, so
/// a(j,k) == a(k,j) holds exactly by construction.
class SymMatrix {
public:
    explicit SymMatrix(int dim) : dim_(dim) {
        detail::check_dim(dim);
        tri_.assign(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0);
    }

    static SymMatrix identity(int dim) {
        SymMatrix a(dim);
        for (int i = 0; i < dim; ++i) a.set(i, i, 1.0);
        return a;
    }

    static SymMatrix scaled_identity(int dim, double s) {
        SymMatrix a(dim);
        for (int i = 0; i < dim; ++i) a.set(i, i, s);
        return a;
    }

    static SymMatrix diagonal(const std::vector<double>& d) {
        SymMatrix a(static_cast<int>(d.size()));
        for (int i = 0; i < a.dim(); ++i) a.set(i, i, d[static_cast<size_t>(i)]);
        return a;
    }

    /// Builds from a full row-major dump; rejects entries whose mirror image
    /// differs by more than sym_tol.
    static SymMatrix from_row_major(int dim, const std::vector<double>& rows,
                                    double sym_tol = 1e-12) {
        detail::check_dim(dim);
        if (rows.size() != static_cast<size_t>(dim) * dim)
            throw std::invalid_argument("from_row_major: entry count does not match dimension");
        SymMatrix a(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= i; ++j) {
                const double lo = rows[static_cast<size_t>(i) * dim + j];
                const double hi = rows[static_cast<size_t>(j) * dim + i];
                if (std::abs(lo - hi) > sym_tol)
                    throw std::invalid_argument("from_row_major: matrix is not symmetric at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
                a.set(i, j, lo);
            }
        return a;
    }

    int dim() const { return dim_; }

    double operator()(int i, int j) const {
        return i >= j ? tri_[idx(i, j)] : tri_[idx(j, i)];
    }

    void set(int i, int j, double v) {
        if (i >= j) tri_[idx(i, j)] = v;
        else        tri_[idx(j, i)] = v;
    }

    double max_norm() const {
        double m = 0.0;
        for (double x : tri_) m = std::max(m, std::abs(x));
        return m;
    }

    double frob_norm() const {
        // off-diagonal entries count twice
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j <= i; ++j) {
                const double x = tri_[idx(i, j)];
                s += (i == j ? 1.0 : 2.0) * x * x;
            }
        return std::sqrt(s);
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        detail::require_same_dim(dim_, o.dim_, "SymMatrix +=");
        for (size_t k = 0; k < tri_.size(); ++k) tri_[k] += o.tri_[k];
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        detail::require_same_dim(dim_, o.dim_, "SymMatrix -=");
        for (size_t k = 0; k < tri_.size(); ++k) tri_[k] -= o.tri_[k];
        return *this;
    }
    SymMatrix& operator*=(double s) {
        for (double& x : tri_) x *= s;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }

private:
    size_t idx(int i, int j) const {  // requires i >= j
        return static_cast<size_t>(i) * (i + 1) / 2 + j;
    }

    int dim_;
    std::vector<double> tri_;
};

/// Dense real m x m matrix (eigenbases, SDE increments, scratch).
class RealMatrix {
public:
    explicit RealMatrix(int dim) : dim_(dim) {
        detail::check_dim(dim);
        a_.assign(static_cast<size_t>(dim) * dim, 0.0);
    }

    static RealMatrix identity(int dim) {
        RealMatrix a(dim);
        for (int i = 0; i < dim; ++i) a(i, i) = 1.0;
        return a;
    }

    int dim() const { return dim_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    RealMatrix transpose() const {
        RealMatrix t(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_norm() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int dim_;
    std::vector<double> a_;
};

inline RealMatrix to_dense(const SymMatrix& a) {
    RealMatrix d(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) d(i, j) = a(i, j);
    return d;
}

inline RealMatrix multiply(const RealMatrix& a, const RealMatrix& b) {
    detail::require_same_dim(a.dim(), b.dim(), "multiply");
    const int m = a.dim();
    RealMatrix c(m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < m; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline RealMatrix multiply(const SymMatrix& a, const RealMatrix& b) { return multiply(to_dense(a), b); }
inline RealMatrix multiply(const RealMatrix& a, const SymMatrix& b) { return multiply(a, to_dense(b)); }
inline RealMatrix multiply(const SymMatrix& a, const SymMatrix& b) { return multiply(to_dense(a), to_dense(b)); }

/// (A + A^T)/2 packed back into a SymMatrix.
inline SymMatrix sym_part(const RealMatrix& a) {
    SymMatrix s(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j <= i; ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return s;
}

inline double trace(const SymMatrix& a) {
    double t = 0.0;
    for (int i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

/// tr(a*b) for symmetric a, b without forming the product.
inline double trace_product(const SymMatrix& a, const SymMatrix& b) {
    detail::require_same_dim(a.dim(), b.dim(), "trace_product");
    double t = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        t += a(i, i) * b(i, i);
        for (int j = 0; j < i; ++j) t += 2.0 * a(i, j) * b(i, j);
    }
    return t;
}

/// Dense complex m x m matrix. No symmetry is assumed; it holds the pencils
/// I + 2t(u - iv) and their resolvents.
class ComplexMatrix {
public:
    explicit ComplexMatrix(int dim) : dim_(dim) {
        detail::check_dim(dim);
        a_.assign(static_cast<size_t>(dim) * dim, Complex(0.0, 0.0));
    }

    static ComplexMatrix identity(int dim) {
        ComplexMatrix a(dim);
        for (int i = 0; i < dim; ++i) a(i, i) = 1.0;
        return a;
    }

    int dim() const { return dim_; }
    Complex& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const Complex& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    ComplexMatrix transpose() const {
        ComplexMatrix t(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_norm() const {
        double m = 0.0;
        for (const Complex& x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        detail::require_same_dim(dim_, o.dim_, "ComplexMatrix +=");
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (Complex& x : a_) x *= s;
        return *this;
    }
    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    /// Adds c to every diagonal entry.
    ComplexMatrix& shift_diagonal(Complex c) {
        for (int i = 0; i < dim_; ++i) (*this)(i, i) += c;
        return *this;
    }

private:
    int dim_;
    std::vector<Complex> a_;
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a.dim(), b.dim(), "multiply");
    const int m = a.dim();
    ComplexMatrix c(m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < m; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Complex trace(const ComplexMatrix& a) {
    Complex t = 0.0;
    for (int i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

/// coeff * a embedded as a complex matrix.
inline ComplexMatrix sym_to_complex(const SymMatrix& a, Complex coeff) {
    ComplexMatrix c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) = coeff * a(i, j);
    return c;
}

/// Eigendecomposition of a symmetric matrix: a = basis * diag(eigenvalues) * basis^T,
/// eigenvalues in nondecreasing order, basis orthogonal.
struct Spectrum {
    std::vector<double> eigenvalues;
    RealMatrix basis;
};

/// Cyclic Jacobi eigensolver. Converges when the off-diagonal Frobenius norm
/// drops below 1e-14 * ||a||_F; at most 100 sweeps (unreachable in practice
/// for symmetric input, but guarded anyway).
inline Spectrum sym_eigen(const SymMatrix& a) {
    const int m = a.dim();
    RealMatrix w = to_dense(a);
    RealMatrix v = RealMatrix::identity(m);

    if (m > 1) {
        const double target = 1e-14 * a.frob_norm();
        const int max_sweeps = 100;
        bool converged = false;
        for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
            double off = 0.0;
            for (int p = 0; p < m; ++p)
                for (int q = p + 1; q < m; ++q) off += 2.0 * w(p, q) * w(p, q);
            if (std::sqrt(off) <= target) { converged = true; break; }

            for (int p = 0; p < m - 1; ++p) {
                for (int q = p + 1; q < m; ++q) {
                    const double apq = w(p, q);
                    if (std::abs(apq) == 0.0) continue;
                    const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
                    const double t = (theta >= 0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    const double tau = s / (1.0 + c);

                    const double app = w(p, p), aqq = w(q, q);
                    w(p, p) = app - t * apq;
                    w(q, q) = aqq + t * apq;
                    w(p, q) = w(q, p) = 0.0;
                    for (int r = 0; r < m; ++r) {
                        if (r != p && r != q) {
                            const double arp = w(r, p), arq = w(r, q);
                            w(r, p) = w(p, r) = arp - s * (arq + tau * arp);
                            w(r, q) = w(q, r) = arq + s * (arp - tau * arq);
                        }
                        const double vrp = v(r, p), vrq = v(r, q);
                        v(r, p) = vrp - s * (vrq + tau * vrp);
                        v(r, q) = vrq + s * (vrp - tau * vrq);
                    }
                }
            }
        }
        if (!converged) {
            // final check after the last sweep
            double off = 0.0;
            for (int p = 0; p < m; ++p)
                for (int q = p + 1; q < m; ++q) off += 2.0 * w(p, q) * w(p, q);
            if (std::sqrt(off) > target)
                throw EigenConvergenceError("sym_eigen: Jacobi sweeps did not converge");
        }
    }

    std::vector<int> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return w(i, i) < w(j, j); });

    Spectrum spec{std::vector<double>(static_cast<size_t>(m)), RealMatrix(m)};
    for (int k = 0; k < m; ++k) {
        const int src = order[static_cast<size_t>(k)];
        spec.eigenvalues[static_cast<size_t>(k)] = w(src, src);
        for (int r = 0; r < m; ++r) spec.basis(r, k) = v(r, src);
    }
    return spec;
}

namespace detail {

struct ComplexLu {
    ComplexMatrix lu;
    std::vector<int> perm;
    int sign;            // permutation parity
    double min_pivot;    // smallest |pivot| encountered
    double max_norm_in;  // ||a||_max of the input
};

inline ComplexLu complex_lu_factor(const ComplexMatrix& a) {
    const int m = a.dim();
    ComplexLu f{a, std::vector<int>(static_cast<size_t>(m)), 1,
                std::numeric_limits<double>::infinity(), a.max_norm()};
    std::iota(f.perm.begin(), f.perm.end(), 0);

    for (int k = 0; k < m; ++k) {
        int piv = k;
        double best = std::abs(f.lu(k, k));
        for (int r = k + 1; r < m; ++r) {
            const double cand = std::abs(f.lu(r, k));
            if (cand > best) { best = cand; piv = r; }
        }
        if (piv != k) {
            for (int j = 0; j < m; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[static_cast<size_t>(k)], f.perm[static_cast<size_t>(piv)]);
            f.sign = -f.sign;
        }
        f.min_pivot = std::min(f.min_pivot, best);
        if (best == 0.0) continue;  // exactly singular; determinant callers want 0
        const Complex inv_piv = 1.0 / f.lu(k, k);
        for (int r = k + 1; r < m; ++r) {
            const Complex l = f.lu(r, k) * inv_piv;
            f.lu(r, k) = l;
            if (l == Complex(0.0, 0.0)) continue;
            for (int j = k + 1; j < m; ++j) f.lu(r, j) -= l * f.lu(k, j);
        }
    }
    return f;
}

}  // namespace detail

/// Solves a*x = b by partially pivoted LU. A pivot below 1e-14 * ||a||_max
/// reports the matrix singular; inside the strip D the Ostrowski-Taussky bound
/// keeps every pivot well away from that threshold, so tripping it flags a
/// caller bug rather than roundoff.
inline ComplexMatrix complex_lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a.dim(), b.dim(), "complex_lu_solve");
    const int m = a.dim();
    const auto f = detail::complex_lu_factor(a);
    if (f.min_pivot <= 1e-14 * f.max_norm_in || f.max_norm_in == 0.0)
        throw SingularMatrixError("complex_lu_solve: matrix is singular to working precision");

    ComplexMatrix x(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) x(i, j) = b(f.perm[static_cast<size_t>(i)], j);
    // forward substitution (unit lower)
    for (int i = 1; i < m; ++i)
        for (int k = 0; k < i; ++k) {
            const Complex l = f.lu(i, k);
            if (l == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < m; ++j) x(i, j) -= l * x(k, j);
        }
    // back substitution
    for (int i = m - 1; i >= 0; --i) {
        for (int k = i + 1; k < m; ++k) {
            const Complex u = f.lu(i, k);
            if (u == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < m; ++j) x(i, j) -= u * x(k, j);
        }
        const Complex inv = 1.0 / f.lu(i, i);
        for (int j = 0; j < m; ++j) x(i, j) *= inv;
    }
    return x;
}

/// Determinant via LU with pivot-sign tracking. Never throws; an exactly
/// singular input yields 0.
inline Complex complex_det(const ComplexMatrix& a) {
    const auto f = detail::complex_lu_factor(a);
    Complex d(static_cast<double>(f.sign), 0.0);
    for (int i = 0; i < a.dim(); ++i) d *= f.lu(i, i);
    return d;
}

/// Symmetric PSD square root. Eigenvalues in [-1e-10 * ||a||_max, 0) are
/// treated as roundoff and clamped to zero; anything lower is a genuine
/// negative direction and rejected.
inline SymMatrix psd_sqrt(const SymMatrix& a) {
    const int m = a.dim();
    const double tol = 1e-10 * a.max_norm();
    Spectrum es = sym_eigen(a);
    std::vector<double> root(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        double lam = es.eigenvalues[static_cast<size_t>(k)];
        if (lam < -tol)
            throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(lam) +
                              " below PSD tolerance");
        root[static_cast<size_t>(k)] = std::sqrt(std::max(lam, 0.0));
    }
    SymMatrix s(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k)
                acc += es.basis(i, k) * root[static_cast<size_t>(k)] * es.basis(j, k);
            s.set(i, j, acc);
        }
    return s;
}

}  // namespace wishart
