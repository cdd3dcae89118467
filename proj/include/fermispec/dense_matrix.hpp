#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fermispec {

/// Square real matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
    DenseMatrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
        if (data_.size() != n * n) {
            throw std::invalid_argument("DenseMatrix: expected " + std::to_string(n * n) + " entries, got " +
                                        std::to_string(data_.size()));
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept {
        assert(i < n_ && j < n_);
        return data_[i * n_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        assert(i < n_ && j < n_);
        return data_[i * n_ + j];
    }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

    std::span<const double> values() const noexcept { return data_; }
    std::span<double> values() noexcept { return data_; }

    double trace() const noexcept {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_sq() const noexcept {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return s;
    }

    DenseMatrix transposed() const {
        DenseMatrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    DenseMatrix& operator-=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    DenseMatrix& operator*=(double c) noexcept {
        for (double& v : data_) v *= c;
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(DenseMatrix a, double c) { return a *= c; }
    friend DenseMatrix operator*(double c, DenseMatrix a) { return a *= c; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    void check_same(const DenseMatrix& o) const {
        if (o.n_ != n_) throw std::invalid_argument("DenseMatrix: size mismatch");
    }

    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Plain matrix product a * b (i-k-j loop order).
inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.size() != b.size()) throw std::invalid_argument("multiply: size mismatch");
    const std::size_t n = a.size();
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

/// Gram matrix mᵀm, exploiting symmetry of the result.
inline DenseMatrix gram(const DenseMatrix& m) {
    const std::size_t n = m.size();
    const DenseMatrix t = m.transposed();
    DenseMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto ti = t.row(i);
        for (std::size_t j = i; j < n; ++j) {
            auto tj = t.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += ti[k] * tj[k];
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

}  // namespace fermispec
