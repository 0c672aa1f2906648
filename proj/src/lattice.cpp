#include "wavelab/lattice.hpp"

#include "wavelab/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace wavelab {

namespace {

constexpr std::array<char, 7> kMagic = {'W', 'A', 'V', 'E', '1', 'D', '\0'};
constexpr std::size_t kMargin = 2;

static_assert(std::endian::native == std::endian::little,
              "binary dumps are written in host order, which must be little-endian");

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw IoError("truncated binary dump '" + path + "'");
    }
    return value;
}

}  // namespace

GridFunction::GridFunction(double h, double x_min, std::size_t n_x, std::size_t n_rows, double fill)
    : h_(h), x_min_(x_min), n_x_(n_x), values_(n_x * n_rows, fill) {}

void GridFunction::append_row(std::span<const double> row) {
    if (row.size() != n_x_) throw GeometryError("append_row: row length does not match lattice");
    values_.insert(values_.end(), row.begin(), row.end());
}

bool GridFunction::same_geometry(const GridFunction& other) const noexcept {
    return h_ == other.h_ && x_min_ == other.x_min_ && n_x_ == other.n_x_ &&
           rows() == other.rows();
}

double sup_norm(const GridFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::fabs(v));
    return m;
}

double sup_distance(const GridFunction& u, const GridFunction& v) {
    if (!u.same_geometry(v)) throw GeometryError("sup_distance: lattices differ");
    double m = 0.0;
    const auto a = u.values();
    const auto b = v.values();
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::fabs(a[n] - b[n]));
    return m;
}

GridFunction make_lattice(double h, double half_width, double t_max) {
    const auto half = static_cast<std::size_t>(std::ceil(half_width / h - 1e-9)) + kMargin;
    const auto rows = static_cast<std::size_t>(std::llround(t_max / h)) + 1;
    return GridFunction(h, -h * static_cast<double>(half), 2 * half + 1, rows);
}

void write_csv(const GridFunction& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.precision(17);
    out << "x,t,u\n";
    for (std::size_t k = 0; k < u.rows(); ++k) {
        for (std::size_t i = 0; i < u.n_x(); ++i) {
            out << u.x(i) << ',' << u.t(k) << ',' << u(i, k) << '\n';
        }
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_binary(const GridFunction& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(kMagic.data(), kMagic.size());
    put<std::uint16_t>(out, kBinaryVersion);
    put<double>(out, u.h());
    put<double>(out, u.x_min());
    put<double>(out, u.x_max());
    put<double>(out, u.t_max());
    const auto vals = u.values();
    out.write(reinterpret_cast<const char*>(vals.data()),
              static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!out) throw IoError("write failed for '" + path + "'");
}

GridFunction read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::array<char, 7> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw IoError("'" + path + "' is not a WAVE1D dump");
    }
    const auto version = get<std::uint16_t>(in, path);
    if (version != kBinaryVersion) throw IoError("unsupported WAVE1D version in '" + path + "'");
    const double h = get<double>(in, path);
    const double x_min = get<double>(in, path);
    const double x_max = get<double>(in, path);
    const double t_max = get<double>(in, path);
    const auto n_x = static_cast<std::size_t>(std::llround((x_max - x_min) / h)) + 1;
    const auto rows = static_cast<std::size_t>(std::llround(t_max / h)) + 1;
    GridFunction u(h, x_min, n_x, rows);
    auto vals = u.values();
    if (!in.read(reinterpret_cast<char*>(vals.data()),
                 static_cast<std::streamsize>(vals.size() * sizeof(double)))) {
        throw IoError("truncated binary dump '" + path + "'");
    }
    return u;
}

}  // namespace wavelab
