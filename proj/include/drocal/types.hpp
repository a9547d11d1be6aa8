#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace drocal {

using Vector = std::vector<double>;

// Row-major dense matrix, sized once. Used for summary tables (n x m).
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<double>& data() const { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Axis-aligned box with strictly positive width in every dimension.
struct Box {
    Vector lower;
    Vector upper;

    Box() = default;
    Box(Vector lo, Vector hi);

    std::size_t dim() const { return lower.size(); }
    bool contains(const Vector& point) const;
    double width(std::size_t d) const { return upper[d] - lower[d]; }
};

struct AleatoryPoint {
    Vector a;
};

struct EpistemicPoint {
    Vector e;
};

struct Design {
    Vector theta;
};

// One simulated output record: channels of equal length sampled every dt,
// starting at t = 0.
struct Trajectory {
    std::vector<Vector> channels;
    double dt = 0.0;

    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
    void validate() const; // throws DomainError on malformed content
};

} // namespace drocal
