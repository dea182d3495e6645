#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace netrisk {

// Dense row-major square matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * n_, n_};
    }
    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] std::size_t count_nonzero() const noexcept;

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline std::size_t SquareMatrix::count_nonzero() const noexcept {
    std::size_t count = 0;
    for (double v : data_) {
        if (v != 0.0) {
            ++count;
        }
    }
    return count;
}

}  // namespace netrisk
