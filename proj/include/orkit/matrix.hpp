#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rational.hpp"

namespace orkit {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatD = Mat<double>;
using VecD = Vec<double>;
using MatQ = Mat<Rational>;
using VecQ = Vec<Rational>;

inline MatD to_double(const MatQ& m) {
    MatD out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_double();
    return out;
}

inline VecD to_double(const VecQ& v) {
    VecD out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).to_double();
    return out;
}

struct RationalizeResult {
    MatQ value;
    bool lossy = false; // some entry was not representable with the denominator bound
};

inline RationalizeResult rationalize(const MatD& m, std::int64_t max_den = 1000000) {
    RationalizeResult r{MatQ(m.rows(), m.cols()), false};
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.value(i, j) = rationalize(m(i, j), max_den);
            if (r.value(i, j).to_double() != m(i, j)) r.lossy = true;
        }
    return r;
}

template <class T>
bool is_zero_matrix(const Mat<T>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!(m(i, j) == T(0))) return false;
    return true;
}

// Frobenius norm, evaluated in double for rational input.
inline double frobenius(const MatD& m) { return m.norm(); }
inline double frobenius(const MatQ& m) { return to_double(m).norm(); }

template <class T>
Mat<T> vstack(const Mat<T>& top, const Mat<T>& bottom) {
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    if (top.cols() != bottom.cols()) throw ShapeError("vstack: column counts differ");
    Mat<T> out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

template <class T>
Mat<T> hstack(const Mat<T>& left, const Mat<T>& right) {
    if (left.cols() == 0) return right;
    if (right.cols() == 0) return left;
    if (left.rows() != right.rows()) throw ShapeError("hstack: row counts differ");
    Mat<T> out(left.rows(), left.cols() + right.cols());
    out << left, right;
    return out;
}

inline std::string to_string(const MatQ& m) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    }
    os << "]";
    return os.str();
}

inline std::string to_string(const MatD& m) {
    std::ostringstream os;
    os.precision(10);
    os << "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Exact linear algebra over the rationals.
// ---------------------------------------------------------------------------

struct Echelon {
    MatQ reduced;            // reduced row-echelon form, same shape as input
    std::vector<int> pivots; // pivot column of each nonzero row
    int rank() const { return static_cast<int>(pivots.size()); }
};

// Gauss-Jordan elimination; pivots normalized to 1, zero rows at the bottom.
inline Echelon rref(MatQ m) {
    Echelon e;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index p = r;
        while (p < rows && m(p, c).is_zero()) ++p;
        if (p == rows) continue;
        if (p != r) m.row(p).swap(m.row(r));
        const Rational inv = Rational(1) / m(r, c);
        for (Eigen::Index j = c; j < cols; ++j) m(r, j) *= inv;
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (i == r || m(i, c).is_zero()) continue;
            const Rational f = m(i, c);
            for (Eigen::Index j = c; j < cols; ++j)
                if (!m(r, j).is_zero()) m(i, j) -= f * m(r, j);
        }
        e.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    e.reduced = std::move(m);
    return e;
}

inline int rank(const MatQ& m) { return rref(m).rank(); }

// Nonzero rows of the RREF: the canonical basis of the row space.
inline MatQ canonical_rows(const MatQ& m) {
    Echelon e = rref(m);
    return e.reduced.topRows(e.rank());
}

// Basis of {x | m x = 0} as columns; one column per free variable.
inline MatQ nullspace(const MatQ& m) {
    Echelon e = rref(m);
    const Eigen::Index cols = m.cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (int p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    std::vector<Eigen::Index> free;
    for (Eigen::Index c = 0; c < cols; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) free.push_back(c);
    MatQ basis = MatQ::Zero(cols, static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
        const Eigen::Index fc = free[k];
        basis(fc, static_cast<Eigen::Index>(k)) = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            basis(e.pivots[r], static_cast<Eigen::Index>(k)) = -e.reduced(static_cast<Eigen::Index>(r), fc);
    }
    return basis;
}

// A particular solution X of m X = rhs (free variables set to zero), or
// nullopt when the system is inconsistent.
inline std::optional<MatQ> solve(const MatQ& m, const MatQ& rhs) {
    if (m.rows() != rhs.rows()) throw ShapeError("solve: row counts differ");
    const Eigen::Index n = m.cols(), k = rhs.cols();
    Echelon e = rref(hstack(m, rhs));
    for (int p : e.pivots)
        if (p >= n) return std::nullopt;
    MatQ x = MatQ::Zero(n, k);
    for (std::size_t r = 0; r < e.pivots.size(); ++r)
        for (Eigen::Index j = 0; j < k; ++j)
            x(e.pivots[r], j) = e.reduced(static_cast<Eigen::Index>(r), n + j);
    return x;
}

// X with X w = rhs, or nullopt.
inline std::optional<MatQ> solve_left(const MatQ& w, const MatQ& rhs) {
    if (w.cols() != rhs.cols()) throw ShapeError("solve_left: column counts differ");
    auto xt = solve(w.transpose(), rhs.transpose());
    if (!xt) return std::nullopt;
    return MatQ(xt->transpose());
}

inline std::optional<MatQ> inverse(const MatQ& m) {
    if (m.rows() != m.cols()) throw ShapeError("inverse: matrix is not square");
    if (rank(m) != m.rows()) return std::nullopt;
    return solve(m, MatQ::Identity(m.rows(), m.rows()));
}

// Rank factorization m = F G with F of full column rank (pivot columns of m)
// and G of full row rank (nonzero RREF rows).
struct RankFactorization {
    MatQ left;  // F: rows x r
    MatQ right; // G: r x cols
};

inline RankFactorization rank_factorization(const MatQ& m) {
    Echelon e = rref(m);
    RankFactorization f{MatQ(m.rows(), e.rank()), e.reduced.topRows(e.rank())};
    for (int k = 0; k < e.rank(); ++k) f.left.col(k) = m.col(e.pivots[static_cast<std::size_t>(k)]);
    return f;
}

// Exact Moore-Penrose inverse: m = F G  =>  m+ = G^T (F^T m G^T)^-1 F^T.
inline MatQ pseudo_inverse(const MatQ& m) {
    if (m.rows() == 0 || m.cols() == 0) return MatQ::Zero(m.cols(), m.rows());
    RankFactorization f = rank_factorization(m);
    if (f.left.cols() == 0) return MatQ::Zero(m.cols(), m.rows());
    MatQ core = f.left.transpose() * m * f.right.transpose();
    auto core_inv = inverse(core);
    if (!core_inv) throw Error("pseudo_inverse: singular core in rank factorization");
    return f.right.transpose() * (*core_inv) * f.left.transpose();
}

// Floating Moore-Penrose inverse by SVD; singular values below
// rel_tol * sigma_max are treated as zero.
inline MatD pseudo_inverse(const MatD& m, double rel_tol = 1e-9) {
    if (m.size() == 0) return MatD::Zero(m.cols(), m.rows());
    Eigen::JacobiSVD<MatD> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cut = rel_tol * (s.size() ? s(0) : 0.0);
    VecD inv_s(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) inv_s(i) = s(i) > cut ? 1.0 / s(i) : 0.0;
    return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
}

inline int numerical_rank(const MatD& m, double rel_tol = 1e-9) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<MatD> svd(m);
    const auto& s = svd.singularValues();
    const double cut = rel_tol * s(0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

} // namespace orkit
