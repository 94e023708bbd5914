#include "rdgcn/matrix.hpp"

#include <cmath>
#include <string>

#include "rdgcn/error.hpp"

namespace rdgcn {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InternalError("matrix shape mismatch: " + what);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                      " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "matmul_tn");
    Matrix c(a.cols(), b.cols());
    for (int k = 0; k < a.rows(); ++k) {
        for (int i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "matmul_nt");
    Matrix c(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.rows(); ++j) {
            double sum = 0.0;
            for (int k = 0; k < a.cols(); ++k) sum += a(i, k) * b(j, k);
            c(i, j) = sum;
        }
    }
    return c;
}

void axpy(Matrix& y, double alpha, const Matrix& x) {
    require(y.same_shape(x), "axpy");
    for (size_t i = 0; i < y.size(); ++i) y.data()[i] += alpha * x.data()[i];
}

bool all_finite(const Matrix& m) {
    for (double v : m.data()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void fill_uniform(Matrix& m, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : m.data()) v = dist(rng);
}

}  // namespace rdgcn
