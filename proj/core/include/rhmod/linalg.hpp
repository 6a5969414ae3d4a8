#pragma once

#include <cmath>
#include <vector>

#include "rhmod/types.hpp"

// Dense complex linear algebra for the small (<= 2N+1) systems of the
// moment/determinant machinery. Partial-pivot LU, nothing fancy.

namespace rhmod::linalg {

class Mat {
public:
    Mat(int n, int m) : n_(n), m_(m), a_(static_cast<std::size_t>(n) * m) {}
    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * m_ + j]; }
    cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * m_ + j]; }
    int rows() const { return n_; }
    int cols() const { return m_; }

private:
    int n_, m_;
    std::vector<cplx> a_;
};

// determinant by LU with partial pivoting
inline cplx det(Mat a) {
    const int n = a.rows();
    cplx d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == cplx(0.0)) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            d = -d;
        }
        d *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            cplx f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

// solve a x = b in place; returns false when singular
inline bool solve(Mat a, std::vector<cplx>& b) {
    const int n = a.rows();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) == 0.0) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            std::swap(b[piv], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            cplx f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= a(i, j) * b[j];
        b[i] /= a(i, i);
    }
    return true;
}

inline double norm1(const Mat& a) {
    double best = 0;
    for (int j = 0; j < a.cols(); ++j) {
        double col = 0;
        for (int i = 0; i < a.rows(); ++i) col += std::abs(a(i, j));
        best = std::max(best, col);
    }
    return best;
}

// 1-norm condition number via the explicit inverse (fine at this size)
inline double cond1(const Mat& a) {
    const int n = a.rows();
    Mat inv(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> e(n, 0.0);
        e[j] = 1.0;
        if (!solve(a, e)) return std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) inv(i, j) = e[i];
    }
    return norm1(a) * norm1(inv);
}

} // namespace rhmod::linalg
