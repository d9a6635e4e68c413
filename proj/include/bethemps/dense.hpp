#pragma once

// Self-contained dense complex linear algebra: row-major complex matrices,
// Kronecker products, factor-wise index manipulation (embeddings, partial
// transposes, partial traces), a cyclic-Jacobi symmetric eigensolver and a
// partial-pivoting linear solver. No external numerics dependency.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "bethemps/errors.hpp"

namespace bethemps {

using cplx = std::complex<double>;

// Hard cap on any matrix dimension produced by kron(); keeps runaway tensor
// powers from exhausting memory.
inline constexpr std::size_t kKronDimCap = 1u << 16;

class CMatrix {
public:
    CMatrix() : rows_(0), cols_(0) {}
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    CMatrix& operator*=(cplx s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_)
            throw BetheError(ErrorKind::Precondition, "matrix product shape mismatch");
        CMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                const cplx* brow = &b.data_[k * b.cols_];
                cplx* orow = &out.data_[i * out.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
            }
        }
        return out;
    }

    friend std::vector<cplx> operator*(const CMatrix& a, const std::vector<cplx>& v) {
        if (a.cols_ != v.size())
            throw BetheError(ErrorKind::Precondition, "matrix-vector shape mismatch");
        std::vector<cplx> out(a.rows_, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx acc(0.0, 0.0);
            const cplx* row = &a.data_[i * a.cols_];
            for (std::size_t j = 0; j < a.cols_; ++j) acc += row[j] * v[j];
            out[i] = acc;
        }
        return out;
    }

    CMatrix transpose() const {
        CMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    cplx trace() const {
        cplx t(0.0, 0.0);
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_finite() const {
        for (const auto& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

private:
    void require_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw BetheError(ErrorKind::Precondition, std::string(op) + ": shape mismatch");
    }

    std::size_t rows_, cols_;
    std::vector<cplx> data_;
};

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

// Kronecker product, row-major convention with the left factor slowest:
// (A⊗B)[(i*db+k),(j*db+l)] = A[i,j] * B[k,l].
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    if (a.rows() * b.rows() > kKronDimCap || a.cols() * b.cols() > kKronDimCap)
        throw BetheError(ErrorKind::SizeLimit, "kron: result dimension exceeds cap");
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

// Ordered factorization of a tensor-product index space. factor_dims lists the
// factors left (slowest-varying) to right (fastest-varying), matching kron().
struct TensorIndexLayout {
    std::vector<std::size_t> factor_dims;

    std::size_t dim() const {
        std::size_t d = 1;
        for (auto f : factor_dims) d *= f;
        return d;
    }

    // stride of factor k in the flattened index
    std::size_t stride(std::size_t k) const {
        std::size_t s = 1;
        for (std::size_t j = k + 1; j < factor_dims.size(); ++j) s *= factor_dims[j];
        return s;
    }
};

// Embed an operator acting on the listed factors (in that order) into the full
// space described by the layout; identity on the remaining factors.
inline CMatrix embed(const CMatrix& op, const TensorIndexLayout& layout,
                     const std::vector<std::size_t>& slots) {
    std::size_t op_dim = 1;
    for (auto s : slots) op_dim *= layout.factor_dims[s];
    if (op.rows() != op_dim || op.cols() != op_dim)
        throw BetheError(ErrorKind::Precondition, "embed: operator dim does not match slots");

    const std::size_t full = layout.dim();
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < layout.factor_dims.size(); ++k)
        if (std::find(slots.begin(), slots.end(), k) == slots.end()) rest.push_back(k);
    std::size_t rest_dim = 1;
    for (auto k : rest) rest_dim *= layout.factor_dims[k];

    // base index of an op multi-index within the full space
    auto op_base = [&](std::size_t opi) {
        std::size_t base = 0;
        for (std::size_t s = slots.size(); s-- > 0;) {
            const std::size_t d = layout.factor_dims[slots[s]];
            base += (opi % d) * layout.stride(slots[s]);
            opi /= d;
        }
        return base;
    };
    auto rest_base = [&](std::size_t ri) {
        std::size_t base = 0;
        for (std::size_t s = rest.size(); s-- > 0;) {
            const std::size_t d = layout.factor_dims[rest[s]];
            base += (ri % d) * layout.stride(rest[s]);
            ri /= d;
        }
        return base;
    };

    CMatrix out(full, full);
    for (std::size_t r = 0; r < op_dim; ++r) {
        const std::size_t rb = op_base(r);
        for (std::size_t c = 0; c < op_dim; ++c) {
            const cplx v = op(r, c);
            if (v == cplx(0.0, 0.0)) continue;
            const std::size_t cb = op_base(c);
            for (std::size_t ri = 0; ri < rest_dim; ++ri) {
                const std::size_t off = rest_base(ri);
                out(rb + off, cb + off) = v;
            }
        }
    }
    return out;
}

// Transpose only the indices of factor k (both row and column side).
inline CMatrix partial_transpose(const CMatrix& m, const TensorIndexLayout& layout,
                                 std::size_t k) {
    const std::size_t full = layout.dim();
    if (m.rows() != full || m.cols() != full)
        throw BetheError(ErrorKind::Precondition, "partial_transpose: layout mismatch");
    const std::size_t d = layout.factor_dims[k];
    const std::size_t st = layout.stride(k);
    CMatrix out(full, full);
    for (std::size_t i = 0; i < full; ++i) {
        const std::size_t ik = (i / st) % d;
        for (std::size_t j = 0; j < full; ++j) {
            const std::size_t jk = (j / st) % d;
            const std::size_t ii = i + (jk - ik) * st;
            const std::size_t jj = j + (ik - jk) * st;
            out(ii, jj) = m(i, j);
        }
    }
    return out;
}

// Trace out the leading factor of dimension head_dim.
inline CMatrix partial_trace_head(const CMatrix& m, std::size_t head_dim) {
    const std::size_t rest = m.rows() / head_dim;
    CMatrix out(rest, rest);
    for (std::size_t a = 0; a < head_dim; ++a)
        for (std::size_t i = 0; i < rest; ++i)
            for (std::size_t j = 0; j < rest; ++j) out(i, j) += m(a * rest + i, a * rest + j);
    return out;
}

// ---------------------------------------------------------------------------
// Linear solve, partial pivoting
// ---------------------------------------------------------------------------

inline std::vector<cplx> solve_linear(CMatrix a, std::vector<cplx> rhs) {
    const std::size_t n = a.rows();
    if (a.cols() != n || rhs.size() != n)
        throw BetheError(ErrorKind::Precondition, "solve_linear: non-square or size mismatch");
    const double scale = std::max(a.max_abs(), 1e-300);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best < 1e-14 * scale)
            throw BetheError(ErrorKind::SingularMatrix, "solve_linear: pivot below threshold");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(rhs[col], rhs[piv]);
        }
        const cplx inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a(r, col) * inv;
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx acc = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

// X with A X = B, column by column.
inline CMatrix solve_linear_matrix(const CMatrix& a, const CMatrix& b) {
    CMatrix x(b.rows(), b.cols());
    std::vector<cplx> col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        auto sol = solve_linear(a, col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Real-symmetric eigensolver (cyclic Jacobi sweeps)
// ---------------------------------------------------------------------------

struct SymEig {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // orthonormal columns, vectors(:,k) <-> values[k]
};

inline SymEig sym_eig_real(const CMatrix& h, int max_sweeps = 100) {
    const std::size_t n = h.rows();
    if (h.cols() != n) throw BetheError(ErrorKind::Precondition, "sym_eig_real: non-square");
    const double scale = std::max(h.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(h(i, j).imag()) > 1e-12 * scale)
                throw BetheError(ErrorKind::Precondition, "sym_eig_real: input not real");
            if (std::abs(h(i, j) - h(j, i)) > 1e-12 * scale)
                throw BetheError(ErrorKind::Precondition, "sym_eig_real: input not symmetric");
        }

    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (h(i, j).real() + h(j, i).real());
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto off_max = [&]() {
        double m = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) m = std::max(m, std::abs(a[p * n + q]));
        return m;
    };

    int sweep = 0;
    while (off_max() > 1e-14 * scale) {
        if (++sweep > max_sweeps)
            throw BetheError(ErrorKind::Convergence, "sym_eig_real: Jacobi sweep limit reached");
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= 1e-16 * scale) continue;
                const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

    SymEig out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i * n + order[k]];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Damped Newton iteration on a real vector function, finite-difference Jacobian
// ---------------------------------------------------------------------------

struct NewtonOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;
    double fd_step = 1e-7;
    double damping = 1.0;
};

struct NewtonResult {
    std::vector<double> x;
    double residual_norm = 0.0;  // max-abs of F at x
    int iterations = 0;
    bool converged = false;
};

inline NewtonResult newton_solve(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    std::vector<double> x, const NewtonOptions& opt) {
    const std::size_t m = x.size();
    auto max_abs = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s = std::max(s, std::abs(e));
        return s;
    };

    NewtonResult res;
    std::vector<double> fx = f(x);
    for (int it = 0; it <= opt.max_iterations; ++it) {
        res.iterations = it;
        res.residual_norm = max_abs(fx);
        if (res.residual_norm <= opt.tolerance) {
            res.converged = true;
            break;
        }
        if (it == opt.max_iterations) break;

        CMatrix jac(m, m);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> xp = x;
            xp[j] += opt.fd_step;
            std::vector<double> fp;
            try {
                fp = f(xp);
            } catch (const BetheError& e) {
                if (e.kind() == ErrorKind::DegenerateInput)
                    throw BetheError(ErrorKind::DomainEscape,
                                     std::string("newton: finite-difference probe left the "
                                                 "guarded domain: ") + e.what());
                throw;
            }
            for (std::size_t i = 0; i < m; ++i) jac(i, j) = (fp[i] - fx[i]) / opt.fd_step;
        }

        std::vector<cplx> rhs(m);
        for (std::size_t i = 0; i < m; ++i) rhs[i] = -fx[i];
        std::vector<cplx> step;
        try {
            step = solve_linear(jac, rhs);
        } catch (const BetheError& e) {
            if (e.kind() == ErrorKind::SingularMatrix)
                throw BetheError(ErrorKind::SingularMatrix, "newton: singular Jacobian");
            throw;
        }
        for (std::size_t i = 0; i < m; ++i) x[i] += opt.damping * step[i].real();
        try {
            fx = f(x);
        } catch (const BetheError& e) {
            if (e.kind() == ErrorKind::DegenerateInput) {
                std::string where;
                for (std::size_t i = 0; i < m; ++i)
                    where += (i ? ", " : "") + std::to_string(x[i]);
                throw BetheError(ErrorKind::DomainEscape,
                                 "newton: iterate left the guarded domain at (" + where + ")");
            }
            throw;
        }
    }
    res.x = std::move(x);
    return res;
}

}  // namespace bethemps
