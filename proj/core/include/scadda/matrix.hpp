#pragma once

#include <cstddef>
#include <vector>

namespace scadda {

// Symmetric nonnegative square matrix with zero diagonal, used for both the
// spatial (delta) and temporal (gamma) distance tables. Mirroring happens on
// write so builders only compute the upper triangle.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        return data_[i * n_ + j];
    }

    void set(std::size_t i, std::size_t j, double value) {
        data_[i * n_ + j] = value;
        data_[j * n_ + i] = value;
    }

    double max_entry() const {
        double m = 0.0;
        for (double v : data_) m = v > m ? v : m;
        return m;
    }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

} // namespace scadda
