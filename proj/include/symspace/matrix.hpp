#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symspace/errors.hpp"

namespace symspace {

/// Dense matrix over an exact coefficient field F (PAdicNumber or
/// ExtElement).  F supplies +,-,*,/ and the precision-aware predicates
/// is_zero / vanishes / is_regular / regular_valuation / agrees_with,
/// plus zero_like / one_like prototypes.
template <class F>
class Mat {
public:
    Mat(int rows, int cols, const F& fill)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), fill) {}

    static Mat identity(int n, const F& proto) {
        Mat m(n, n, proto.zero_like());
        const F one = proto.one_like();
        for (int i = 0; i < n; ++i) m.at(i, i) = one;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    F& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const F& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const F& proto() const { return a_[0]; }

    Mat transpose() const {
        Mat t(cols_, rows_, a_[0].zero_like());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw DomainError("matrix product: shape mismatch");
        Mat r(rows_, o.cols_, a_[0].zero_like());
        for (int i = 0; i < rows_; ++i) {
            for (int k = 0; k < cols_; ++k) {
                const F& x = at(i, k);
                if (x.is_zero()) continue;
                for (int j = 0; j < o.cols_; ++j) {
                    const F& y = o.at(k, j);
                    if (y.is_zero()) continue;
                    r.at(i, j) = r.at(i, j) + x * y;
                }
            }
        }
        return r;
    }

    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = r.a_[i] + o.a_[i];
        return r;
    }

    Mat operator-(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = r.a_[i] - o.a_[i];
        return r;
    }

    Mat scaled(const F& c) const {
        Mat r = *this;
        for (auto& x : r.a_) x = x * c;
        return r;
    }

    std::vector<F> apply(const std::vector<F>& v) const {
        std::vector<F> r(static_cast<std::size_t>(rows_), a_[0].zero_like());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                if (!at(i, j).is_zero() && !v[static_cast<std::size_t>(j)].is_zero())
                    r[static_cast<std::size_t>(i)] =
                        r[static_cast<std::size_t>(i)] + at(i, j) * v[static_cast<std::size_t>(j)];
        return r;
    }

    std::vector<F> col(int j) const {
        std::vector<F> c;
        c.reserve(static_cast<std::size_t>(rows_));
        for (int i = 0; i < rows_; ++i) c.push_back(at(i, j));
        return c;
    }

    void set_col(int j, const std::vector<F>& v) {
        for (int i = 0; i < rows_; ++i) at(i, j) = v[static_cast<std::size_t>(i)];
    }

    /// Gauss-Jordan inverse with min-valuation pivoting (the pivot with the
    /// smallest valuation loses the fewest tracked digits on division).
    Mat inverse() const {
        if (rows_ != cols_) throw DomainError("inverse of non-square matrix");
        const int n = rows_;
        Mat a = *this;
        Mat inv = identity(n, a_[0]);
        for (int k = 0; k < n; ++k) {
            int pr = -1;
            long long best = 0;
            bool saw_uncertain = false;
            for (int i = k; i < n; ++i) {
                auto v = a.at(i, k).regular_valuation();
                if (v) {
                    if (pr < 0 || *v < best) { pr = i; best = *v; }
                } else if (!a.at(i, k).is_zero()) {
                    saw_uncertain = true;
                }
            }
            if (pr < 0) {
                if (saw_uncertain)
                    throw PrecisionError("matrix inverse: pivot column vanishes to precision");
                throw DomainError("matrix not invertible");
            }
            if (pr != k) {
                for (int j = 0; j < n; ++j) {
                    std::swap(a.at(pr, j), a.at(k, j));
                    std::swap(inv.at(pr, j), inv.at(k, j));
                }
            }
            const F piv = a.at(k, k);
            for (int j = 0; j < n; ++j) {
                a.at(k, j) = a.at(k, j) / piv;
                inv.at(k, j) = inv.at(k, j) / piv;
            }
            for (int i = 0; i < n; ++i) {
                if (i == k) continue;
                const F f = a.at(i, k);
                if (f.is_zero()) continue;
                for (int j = 0; j < n; ++j) {
                    a.at(i, j) = a.at(i, j) - f * a.at(k, j);
                    inv.at(i, j) = inv.at(i, j) - f * inv.at(k, j);
                }
            }
        }
        return inv;
    }

    /// Determinant by elimination with min-valuation pivoting.
    F determinant() const {
        if (rows_ != cols_) throw DomainError("determinant of non-square matrix");
        const int n = rows_;
        Mat a = *this;
        F det = a_[0].one_like();
        bool negate = false;
        for (int k = 0; k < n; ++k) {
            int pr = -1;
            long long best = 0;
            bool saw_uncertain = false;
            for (int i = k; i < n; ++i) {
                auto v = a.at(i, k).regular_valuation();
                if (v) {
                    if (pr < 0 || *v < best) { pr = i; best = *v; }
                } else if (!a.at(i, k).is_zero()) {
                    saw_uncertain = true;
                }
            }
            if (pr < 0) {
                if (saw_uncertain)
                    throw PrecisionError("determinant: column vanishes to precision");
                return a_[0].zero_like();
            }
            if (pr != k) {
                negate = !negate;
                for (int j = k; j < n; ++j) std::swap(a.at(pr, j), a.at(k, j));
            }
            const F piv = a.at(k, k);
            det = det * piv;
            for (int i = k + 1; i < n; ++i) {
                if (a.at(i, k).is_zero()) continue;
                const F f = a.at(i, k) / piv;
                for (int j = k + 1; j < n; ++j) a.at(i, j) = a.at(i, j) - f * a.at(k, j);
                a.at(i, k) = a_[0].zero_like();
            }
        }
        return negate ? -det : det;
    }

    /// Entrywise congruence on shared tracked windows.
    bool agrees_with(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (!a_[i].agrees_with(o.a_[i])) return false;
        return true;
    }

    std::string to_string() const {
        std::string s = "[";
        for (int i = 0; i < rows_; ++i) {
            s += i ? ", [" : "[";
            for (int j = 0; j < cols_; ++j) {
                if (j) s += ", ";
                s += at(i, j).to_string();
            }
            s += "]";
        }
        return s + "]";
    }

private:
    int rows_, cols_;
    std::vector<F> a_;
};

template <class F>
Mat<F> operator-(const Mat<F>& m) {
    Mat<F> r = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(i, j) = -m.at(i, j);
    return r;
}

} // namespace symspace
