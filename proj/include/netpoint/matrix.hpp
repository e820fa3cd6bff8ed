#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "netpoint/errors.hpp"

namespace netpoint {

/// Small dense real matrix, row-major. Sized for graph-scale work (a handful
/// of agents), not for large linear algebra.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static Matrix diagonal(const std::vector<double>& d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(i, i) = d[i];
        }
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        return from_rows(std::vector<std::vector<double>>(rows.begin(), rows.end()));
    }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.front().size();
        Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) {
                throw Error(ErrorCode::invalid_input, "Matrix::from_rows: ragged rows");
            }
            for (std::size_t j = 0; j < c; ++j) {
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o, "+");
        Matrix r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            r.data_[i] += o.data_[i];
        }
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o, "-");
        Matrix r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            r.data_[i] -= o.data_[i];
        }
        return r;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) {
            throw Error(ErrorCode::invalid_input, "Matrix::*: shape mismatch");
        }
        Matrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) {
                    r(i, j) += a * o(k, j);
                }
            }
        }
        return r;
    }

    Matrix scaled(double s) const {
        Matrix r = *this;
        for (double& v : r.data_) {
            v *= s;
        }
        return r;
    }

    std::vector<double> operator*(const std::vector<double>& v) const {
        if (v.size() != cols_) {
            throw Error(ErrorCode::invalid_input, "Matrix::*vec: size mismatch");
        }
        std::vector<double> r(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                r[i] += (*this)(i, j) * v[j];
            }
        }
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                r(j, i) = (*this)(i, j);
            }
        }
        return r;
    }

    double trace() const {
        if (!square()) {
            throw Error(ErrorCode::invalid_input, "Matrix::trace: non-square");
        }
        double t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

private:
    void require_same_shape(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw Error(ErrorCode::invalid_input,
                        std::string("Matrix::") + op + ": shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace netpoint
