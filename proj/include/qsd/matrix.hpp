#ifndef QSD_MATRIX_HPP
#define QSD_MATRIX_HPP

// Dense complex Hermitian operator algebra for small dimensions (d <= ~16):
// eigendecomposition (cyclic Jacobi), PSD tests, operator powers on the support.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

using cxd = std::complex<double>;

// Square complex matrix, row-major storage.
class Matrix {
public:
    Matrix() : n_(0) {}
    explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, cxd(0.0, 0.0)) {
        if (n < 1) throw InvalidParameter("Matrix: dim must be >= 1");
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix zero(int n) { return Matrix(n); }

    int dim() const { return n_; }
    cxd& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const cxd& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    Matrix& operator+=(const Matrix& o) {
        check_same_dim(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_dim(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(cxd s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix x, const Matrix& y) { return x += y; }
    friend Matrix operator-(Matrix x, const Matrix& y) { return x -= y; }
    friend Matrix operator*(Matrix x, cxd s) { return x *= s; }
    friend Matrix operator*(cxd s, Matrix x) { return x *= s; }
    friend Matrix operator*(Matrix x, double s) { return x *= cxd(s, 0.0); }
    friend Matrix operator*(double s, Matrix x) { return x *= cxd(s, 0.0); }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        x.check_same_dim(y);
        const int n = x.n_;
        Matrix r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const cxd xik = x(i, k);
                if (xik == cxd(0.0, 0.0)) continue;
                for (int j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
            }
        return r;
    }

    Matrix adjoint() const {
        Matrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    cxd trace() const {
        cxd t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double hermiticity_residual() const {
        double r = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j)
                r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return r;
    }

    // (A + A^dag)/2
    Matrix hermitized() const {
        Matrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return r;
    }

private:
    void check_same_dim(const Matrix& o) const {
        if (n_ != o.n_) throw DimensionMismatch("Matrix: dimension mismatch");
    }
    int n_;
    std::vector<cxd> a_;
};

using Vector = std::vector<cxd>;

inline cxd inner(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("inner: size mismatch");
    cxd s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double norm(const Vector& x) { return std::sqrt(std::real(inner(x, x))); }

inline Vector operator*(const Matrix& m, const Vector& x) {
    const int n = m.dim();
    if (static_cast<int>(x.size()) != n) throw DimensionMismatch("matrix-vector product: size mismatch");
    Vector y(n, cxd(0.0, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[i] += m(i, j) * x[j];
    return y;
}

// |x><y|
inline Matrix outer(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("outer: size mismatch");
    const int n = static_cast<int>(x.size());
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = x[i] * std::conj(y[j]);
    return r;
}

inline Matrix projector(const Vector& x) { return outer(x, x); }

inline cxd expectation(const Vector& x, const Matrix& m) {
    return inner(x, m * x);
}

inline double trace_product_real(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("trace_product: dimension mismatch");
    // Tr(ab) = sum_ij a_ij b_ji
    cxd t = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
    return std::real(t);
}

struct EigenSystem {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // columns, unitary
};

namespace detail {

// One cyclic Jacobi sweep target: zero the (p,q) off-diagonal entry of the
// Hermitian matrix a via the unitary  U = diag-embedded [ c  s ; -s e^{-i phi}  c e^{-i phi} ].
inline void jacobi_rotate(Matrix& a, Matrix& v, int p, int q) {
    const cxd apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const cxd phase = apq / r;  // e^{i phi}
    const double app = std::real(a(p, p));
    const double aqq = std::real(a(q, q));
    const double theta = (aqq - app) / (2.0 * r);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const int n = a.dim();
    // Columns: A <- A U  with U_pp = c, U_pq = s, U_qp = -s*conj(phase), U_qq = c*conj(phase)
    for (int i = 0; i < n; ++i) {
        const cxd aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip - s * std::conj(phase) * aiq;
        a(i, q) = s * aip + c * std::conj(phase) * aiq;
    }
    // Rows: A <- U^dag A
    for (int j = 0; j < n; ++j) {
        const cxd apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj - s * phase * aqj;
        a(q, j) = s * apj + c * phase * aqj;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = cxd(std::real(a(p, p)), 0.0);
    a(q, q) = cxd(std::real(a(q, q)), 0.0);
    // Accumulate eigenvectors: V <- V U
    for (int i = 0; i < n; ++i) {
        const cxd vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip - s * std::conj(phase) * viq;
        v(i, q) = s * vip + c * std::conj(phase) * viq;
    }
}

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace detail

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Deterministic: fixed sweep order, ascending eigenvalues, stable tie order,
// eigenvector phases fixed by making the largest-magnitude component real positive.
inline EigenSystem eig_hermitian(const Matrix& h, double herm_tol = 1e-10) {
    const int n = h.dim();
    const double scale = std::max(h.max_abs(), 1.0);
    if (h.hermiticity_residual() > herm_tol * scale)
        throw NonHermitianInput("eig_hermitian: input is not Hermitian");

    Matrix a = h.hermitized();
    Matrix v = Matrix::identity(n);
    const double stop = 1e-15 * std::max(h.max_abs(), 1e-300) * n;
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (detail::off_diagonal_norm(a) <= stop) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
    }

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = std::real(a(i, i));
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });

    EigenSystem es;
    es.eigenvalues.resize(n);
    es.eigenvectors = Matrix(n);
    for (int k = 0; k < n; ++k) {
        es.eigenvalues[k] = d[idx[k]];
        for (int i = 0; i < n; ++i) es.eigenvectors(i, k) = v(i, idx[k]);
    }

    // Orthonormalize within degenerate clusters (index order), then fix phases.
    const double eval_scale = std::max(std::abs(es.eigenvalues.front()), std::abs(es.eigenvalues.back()));
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && std::abs(es.eigenvalues[end] - es.eigenvalues[end - 1]) <= 1e-9 * std::max(eval_scale, 1e-300))
            ++end;
        for (int k = start; k < end; ++k) {
            Vector col(n);
            for (int i = 0; i < n; ++i) col[i] = es.eigenvectors(i, k);
            for (int m = start; m < k; ++m) {
                Vector prev(n);
                for (int i = 0; i < n; ++i) prev[i] = es.eigenvectors(i, m);
                const cxd c = inner(prev, col);
                for (int i = 0; i < n; ++i) col[i] -= c * prev[i];
            }
            const double nn = norm(col);
            for (int i = 0; i < n; ++i) es.eigenvectors(i, k) = col[i] / nn;
        }
        start = end;
    }
    for (int k = 0; k < n; ++k) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            const double m = std::abs(es.eigenvectors(i, k));
            if (m > best + 1e-15) { best = m; imax = i; }
        }
        const cxd piv = es.eigenvectors(imax, k);
        if (std::abs(piv) > 0.0) {
            const cxd ph = std::abs(piv) / piv;
            for (int i = 0; i < n; ++i) es.eigenvectors(i, k) *= ph;
        }
    }
    return es;
}

inline Vector eigenvector_column(const EigenSystem& es, int k) {
    const int n = es.eigenvectors.dim();
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = es.eigenvectors(i, k);
    return v;
}

struct PsdReport {
    bool psd = false;
    double min_eigenvalue = 0.0;
};

inline PsdReport psd_check(const Matrix& h, double tol) {
    const EigenSystem es = eig_hermitian(h);
    PsdReport r;
    r.min_eigenvalue = es.eigenvalues.front();
    r.psd = r.min_eigenvalue >= -tol;
    return r;
}

// f(H) with f(x) = x^exponent applied on the support. Eigenvalues below the
// relative cutoff 1e-12 * max|eig| are treated as zero; for negative
// exponents they are excluded (pseudo-inverse) unless the caller demands
// full rank, in which case SingularOperator is thrown.
inline Matrix matrix_power_psd(const Matrix& h, double exponent,
                               bool require_full_rank = false,
                               double psd_tol = 1e-10) {
    const EigenSystem es = eig_hermitian(h);
    const double top = std::abs(es.eigenvalues.back());
    if (es.eigenvalues.front() < -psd_tol * std::max(top, 1.0))
        throw NotPSD("matrix_power_psd: operator has a negative eigenvalue");
    const double cutoff = 1e-12 * top;
    const int n = h.dim();
    Matrix r(n);
    bool rank_deficient = false;
    std::vector<double> f(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double ev = es.eigenvalues[k];
        if (ev <= cutoff) {
            rank_deficient = true;
            f[k] = (exponent > 0.0 && ev > 0.0) ? std::pow(ev, exponent) : 0.0;
        } else {
            f[k] = std::pow(ev, exponent);
        }
    }
    if (exponent < 0.0 && rank_deficient && require_full_rank)
        throw SingularOperator("matrix_power_psd: negative power of a rank-deficient operator");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cxd s = 0.0;
            for (int k = 0; k < n; ++k)
                s += es.eigenvectors(i, k) * f[k] * std::conj(es.eigenvectors(j, k));
            r(i, j) = s;
        }
    r = r.hermitized();
    // Newton refinement for the inverse powers: quadratic convergence
    // drives the functional residual H * f(H) * ... = I to rounding level
    // even when the eigendecomposition only delivers cond(H) * eps.
    if (!rank_deficient && exponent == -0.5) {
        for (int it = 0; it < 2; ++it) {
            const Matrix corr = 3.0 * Matrix::identity(n) - h * (r * r);
            r = (0.5 * (r * corr)).hermitized();
        }
    } else if (!rank_deficient && exponent == -1.0) {
        for (int it = 0; it < 2; ++it)
            r = (r * (2.0 * Matrix::identity(n) - h * r)).hermitized();
    }
    return r;
}

// Largest singular value; accepts non-Hermitian input.
inline double spectral_norm(const Matrix& a) {
    const Matrix g = (a.adjoint() * a).hermitized();
    const EigenSystem es = eig_hermitian(g);
    return std::sqrt(std::max(0.0, es.eigenvalues.back()));
}

// Sum of absolute eigenvalues of a Hermitian operator.
inline double trace_norm_hermitian(const Matrix& h) {
    const EigenSystem es = eig_hermitian(h);
    double s = 0.0;
    for (double ev : es.eigenvalues) s += std::abs(ev);
    return s;
}

}  // namespace qsd

#endif
