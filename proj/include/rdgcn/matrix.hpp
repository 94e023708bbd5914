#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace rdgcn {

// Dense row-major matrix of 64-bit reals. All model tensors use this type.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, value) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::span<double> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
    std::span<const double> row(int r) const { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void zero() { data_.assign(data_.size(), 0.0); }

    bool operator==(const Matrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// c = a^T * b, without materializing the transpose
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// c = a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// y += alpha * x
void axpy(Matrix& y, double alpha, const Matrix& x);

bool all_finite(const Matrix& m);

// In-place uniform fill over [lo, hi); draw order is row-major.
void fill_uniform(Matrix& m, double lo, double hi, std::mt19937_64& rng);

}  // namespace rdgcn
