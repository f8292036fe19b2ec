#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mslab {

// Regular box grid in n dimensions, node-centered: coord = lo + i*h,
// h = (hi-lo)/(count-1). Values attached to grids are stored flat,
// row-major with axis 0 slowest.
class DomainGrid {
public:
    DomainGrid() = default;

    DomainGrid(std::vector<double> lo, std::vector<double> hi,
               std::vector<std::size_t> count)
        : lo_(std::move(lo)), hi_(std::move(hi)), count_(std::move(count)) {
        if (lo_.size() != hi_.size() || lo_.size() != count_.size() || lo_.empty())
            throw std::invalid_argument("grid: mismatched axis arrays");
        for (std::size_t a = 0; a < lo_.size(); ++a) {
            if (!(lo_[a] < hi_[a]))
                throw std::invalid_argument("grid: lo must be < hi");
            if (count_[a] < 8)
                throw std::invalid_argument("grid: need at least 8 nodes per axis");
        }
    }

    static DomainGrid line(double lo, double hi, std::size_t count) {
        return DomainGrid({lo}, {hi}, {count});
    }

    std::size_t dim() const { return lo_.size(); }
    double lo(std::size_t axis) const { return lo_[axis]; }
    double hi(std::size_t axis) const { return hi_[axis]; }
    std::size_t count(std::size_t axis) const { return count_[axis]; }

    double spacing(std::size_t axis) const {
        return (hi_[axis] - lo_[axis]) / static_cast<double>(count_[axis] - 1);
    }

    double coord(std::size_t axis, std::size_t i) const {
        return lo_[axis] + static_cast<double>(i) * spacing(axis);
    }

    std::size_t nodes() const {
        std::size_t n = 1;
        for (std::size_t c : count_) n *= c;
        return n;
    }

    void unravel(std::size_t flat, std::size_t* idx) const {
        for (std::size_t a = dim(); a-- > 0;) {
            idx[a] = flat % count_[a];
            flat /= count_[a];
        }
    }

    // Trapezoidal quadrature weight along one axis (h, halved at the ends).
    double axis_weight(std::size_t axis, std::size_t i) const {
        double h = spacing(axis);
        return (i == 0 || i + 1 == count_[axis]) ? h / 2.0 : h;
    }

    // Product trapezoidal weight of a node given its multi-index.
    double node_weight(const std::size_t* idx) const {
        double w = 1.0;
        for (std::size_t a = 0; a < dim(); ++a) w *= axis_weight(a, idx[a]);
        return w;
    }

    bool same_as(const DomainGrid& o) const {
        return lo_ == o.lo_ && hi_ == o.hi_ && count_ == o.count_;
    }

private:
    std::vector<double> lo_, hi_;
    std::vector<std::size_t> count_;
};

} // namespace mslab
