#pragma once

#include <cstddef>
#include <vector>

#include "csent/errors.hpp"

namespace csent {

// Dense row-major matrix. The only tensor shape the models need; vectors are
// 1xN matrices. S is float for training and double for gradient-check builds.
template <typename S>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, S fill = S(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    S& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    S operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    S* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const S* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    S* data() { return data_.data(); }
    const S* data() const { return data_.data(); }

    void fill(S v) { std::fill(data_.begin(), data_.end(), v); }
    void zero() { fill(S(0)); }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    template <typename T>
    Matrix<T> cast() const {
        Matrix<T> out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<T>(data_[i]);
        return out;
    }

private:
    std::size_t rows_, cols_;
    std::vector<S> data_;
};

template <typename S>
void require_shape(const Matrix<S>& m, std::size_t rows, std::size_t cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols)
        throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
}

} // namespace csent
