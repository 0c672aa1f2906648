#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wavelab {

/// Values on the characteristic lattice: node (i, k) sits at
/// (x_min + i*h, k*h). Rows are time levels, all of length n_x.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(double h, double x_min, std::size_t n_x, std::size_t n_rows, double fill = 0.0);

    double h() const noexcept { return h_; }
    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_min_ + h_ * static_cast<double>(n_x_ - 1); }
    double t_max() const noexcept { return h_ * static_cast<double>(rows() - 1); }
    std::size_t n_x() const noexcept { return n_x_; }
    std::size_t rows() const noexcept { return n_x_ == 0 ? 0 : values_.size() / n_x_; }

    double x(std::size_t i) const noexcept { return x_min_ + h_ * static_cast<double>(i); }
    double t(std::size_t k) const noexcept { return h_ * static_cast<double>(k); }

    double& operator()(std::size_t i, std::size_t k) noexcept { return values_[k * n_x_ + i]; }
    double operator()(std::size_t i, std::size_t k) const noexcept { return values_[k * n_x_ + i]; }

    std::span<double> row(std::size_t k) { return {values_.data() + k * n_x_, n_x_}; }
    std::span<const double> row(std::size_t k) const { return {values_.data() + k * n_x_, n_x_}; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    void append_row(std::span<const double> row);

    bool same_geometry(const GridFunction& other) const noexcept;

private:
    double h_ = 0.0;
    double x_min_ = 0.0;
    std::size_t n_x_ = 0;
    std::vector<double> values_;
};

/// Largest |value| over all nodes.
double sup_norm(const GridFunction& u);

/// sup_norm(u - v); throws GeometryError on mismatched lattices.
double sup_distance(const GridFunction& u, const GridFunction& v);

/// Lattice with 2*margin extra cells on each side of [-half_width, half_width],
/// rows 0..round(t_max/h). Used by both solvers so their nodes coincide.
GridFunction make_lattice(double h, double half_width, double t_max);

/// Writes "x,t,u" rows with a header.
void write_csv(const GridFunction& u, const std::string& path);

/// Binary dump: magic "WAVE1D\0" (7 bytes), version u16, then h, x_min, x_max,
/// t_max as little-endian float64, then row-major float64 values.
void write_binary(const GridFunction& u, const std::string& path);
GridFunction read_binary(const std::string& path);

inline constexpr std::uint16_t kBinaryVersion = 1;

}  // namespace wavelab
