#pragma once

// Dirichlet Laplacian eigenstructure on the box (0, pi)^d.
//
// Eigenfunctions e_k(x) = prod_i sqrt(2/pi) sin(n_i x_i) with eigenvalue
// alpha_k = sum_i n_i^2. Modes are sorted by eigenvalue, ties broken
// lexicographically on (n_1, ..., n_d), and indexed k = 1..K.

#include "sklimit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklimit {

struct Mode {
    std::array<int, 3> index{0, 0, 0};  // unused axes are 0
    double eigenvalue = 0.0;
};

class Basis {
public:
    /// First `modes` eigenpairs of -Laplacian on (0,pi)^dimension.
    /// `collocation` is the number of interior grid points per axis; 0 picks
    /// twice the largest axis index in use (2K when d = 1).
    [[nodiscard]] static Basis box(int dimension, std::size_t modes,
                                   std::size_t collocation = 0) {
        if (dimension < 1 || dimension > 3) {
            throw std::invalid_argument("basis dimension must be 1, 2 or 3");
        }
        if (modes == 0) {
            throw std::invalid_argument("basis needs at least one mode");
        }
        Basis b;
        b.dimension_ = dimension;
        b.modes_ = enumerate(dimension, modes);

        int max_axis = 0;
        for (const auto& m : b.modes_) {
            for (int i = 0; i < dimension; ++i) max_axis = std::max(max_axis, m.index[i]);
        }
        b.max_axis_index_ = static_cast<std::size_t>(max_axis);
        b.collocation_ = collocation == 0 ? 2 * b.max_axis_index_ : collocation;
        if (b.collocation_ < b.max_axis_index_) {
            throw std::invalid_argument("collocation grid needs at least " +
                                        std::to_string(b.max_axis_index_) +
                                        " points per axis");
        }
        b.eigenvalues_.reserve(modes);
        for (const auto& m : b.modes_) b.eigenvalues_.push_back(m.eigenvalue);
        b.build_collocation();
        return b;
    }

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return modes_.size(); }

    /// alpha_k for 1 <= k <= K.
    [[nodiscard]] double eigenvalue(std::size_t k) const {
        check_index(k);
        return eigenvalues_[k - 1];
    }

    /// Mode k, 1 <= k <= K.
    [[nodiscard]] const Mode& mode(std::size_t k) const {
        check_index(k);
        return modes_[k - 1];
    }

    /// All eigenvalues, 0-based.
    [[nodiscard]] std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

    [[nodiscard]] std::size_t collocation_per_axis() const noexcept { return collocation_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return grid_points_; }
    [[nodiscard]] std::size_t max_axis_index() const noexcept { return max_axis_index_; }

    /// Cell volume h^d, h = pi / (M + 1). Exact L2 quadrature weight for the
    /// retained modes.
    [[nodiscard]] double quadrature_weight() const noexcept { return weight_; }

    /// Interior grid coordinates along one axis.
    [[nodiscard]] std::vector<double> axis_points() const {
        std::vector<double> x(collocation_);
        const double h = std::numbers::pi / static_cast<double>(collocation_ + 1);
        for (std::size_t j = 0; j < collocation_; ++j) x[j] = h * static_cast<double>(j + 1);
        return x;
    }

    /// Grid values g_j = sum_k u_k e_k(x_j), grid in row-major axis order.
    void to_physical(std::span<const double> coeffs, std::span<double> grid) const {
        check_sizes(coeffs.size(), grid.size());
        const std::size_t K = size();
        for (std::size_t j = 0; j < grid_points_; ++j) {
            const double* row = samples_.data() + j * K;
            double acc = 0.0;
            for (std::size_t k = 0; k < K; ++k) acc += row[k] * coeffs[k];
            grid[j] = acc;
        }
    }

    /// Coefficients u_k = h^d sum_j g_j e_k(x_j).
    void from_physical(std::span<const double> grid, std::span<double> coeffs) const {
        check_sizes(coeffs.size(), grid.size());
        const std::size_t K = size();
        std::fill(coeffs.begin(), coeffs.end(), 0.0);
        for (std::size_t j = 0; j < grid_points_; ++j) {
            const double* row = samples_.data() + j * K;
            const double gj = grid[j];
            for (std::size_t k = 0; k < K; ++k) coeffs[k] += row[k] * gj;
        }
        for (auto& c : coeffs) c *= weight_;
    }

    /// e_k evaluated on the grid, 1 <= k <= K.
    [[nodiscard]] std::vector<double> eigenfunction_samples(std::size_t k) const {
        check_index(k);
        std::vector<double> out(grid_points_);
        for (std::size_t j = 0; j < grid_points_; ++j) out[j] = samples_[j * size() + (k - 1)];
        return out;
    }

private:
    Basis() = default;

    static std::vector<Mode> enumerate(int d, std::size_t count) {
        std::vector<Mode> all;
        if (d == 1) {
            all.reserve(count);
            for (std::size_t n = 1; n <= count; ++n) {
                Mode m;
                m.index[0] = static_cast<int>(n);
                m.eigenvalue = static_cast<double>(n * n);
                all.push_back(m);
            }
            return all;
        }
        // The c^d cube holds >= count modes, all with eigenvalue <= d c^2, so
        // an axis index n with n^2 + d - 1 > d c^2 cannot be among the first
        // `count`.
        std::size_t c = 1;
        while (std::pow(static_cast<double>(c), d) < static_cast<double>(count)) ++c;
        const auto cap = static_cast<int>(std::floor(
            std::sqrt(static_cast<double>(d) * static_cast<double>(c * c) - d + 1) + 1e-9));
        std::array<int, 3> idx{1, d >= 2 ? 1 : 0, d >= 3 ? 1 : 0};
        const int hi2 = d >= 2 ? cap : 0;
        const int hi3 = d >= 3 ? cap : 0;
        for (idx[0] = 1; idx[0] <= cap; ++idx[0]) {
            for (idx[1] = (d >= 2 ? 1 : 0); idx[1] <= hi2; ++idx[1]) {
                for (idx[2] = (d >= 3 ? 1 : 0); idx[2] <= hi3; ++idx[2]) {
                    Mode m;
                    m.index = idx;
                    m.eigenvalue = static_cast<double>(idx[0] * idx[0] + idx[1] * idx[1] +
                                                       idx[2] * idx[2]);
                    all.push_back(m);
                }
            }
        }
        std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
            if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
            return a.index < b.index;
        });
        all.resize(count);
        return all;
    }

    void build_collocation() {
        const std::size_t M = collocation_;
        const double h = std::numbers::pi / static_cast<double>(M + 1);
        const double norm1 = std::sqrt(2.0 / std::numbers::pi);
        grid_points_ = 1;
        for (int i = 0; i < dimension_; ++i) grid_points_ *= M;
        weight_ = std::pow(h, dimension_);

        const std::size_t K = size();
        samples_.assign(grid_points_ * K, 0.0);
        std::array<std::size_t, 3> j{0, 0, 0};
        for (std::size_t flat = 0; flat < grid_points_; ++flat) {
            std::size_t rest = flat;
            for (int i = dimension_ - 1; i >= 0; --i) {
                j[i] = rest % M;
                rest /= M;
            }
            for (std::size_t k = 0; k < K; ++k) {
                double value = 1.0;
                for (int i = 0; i < dimension_; ++i) {
                    const double x = h * static_cast<double>(j[i] + 1);
                    value *= norm1 * std::sin(modes_[k].index[i] * x);
                }
                samples_[flat * K + k] = value;
            }
        }
    }

    void check_index(std::size_t k) const {
        if (k < 1 || k > size()) {
            throw std::out_of_range("mode index " + std::to_string(k) + " outside 1.." +
                                    std::to_string(size()));
        }
    }

    void check_sizes(std::size_t coeffs, std::size_t grid) const {
        if (coeffs != size() || grid != grid_points_) {
            throw GridMismatchError("collocation transform expects " + std::to_string(size()) +
                                    " coefficients and " + std::to_string(grid_points_) +
                                    " grid values");
        }
    }

    int dimension_ = 1;
    std::vector<Mode> modes_;
    std::vector<double> eigenvalues_;
    std::size_t max_axis_index_ = 0;
    std::size_t collocation_ = 0;
    std::size_t grid_points_ = 0;
    double weight_ = 0.0;
    std::vector<double> samples_;  // grid_points x K, row-major
};

using BasisPtr = std::shared_ptr<const Basis>;

[[nodiscard]] inline BasisPtr make_box_basis(int dimension, std::size_t modes,
                                             std::size_t collocation = 0) {
    return std::make_shared<const Basis>(Basis::box(dimension, modes, collocation));
}

/// sqrt(sum_k alpha_k^s u_k^2). Negative s gives the dual norm.
[[nodiscard]] inline double sobolev_norm(const Basis& basis, std::span<const double> coeffs,
                                         double s) {
    if (coeffs.size() != basis.size()) {
        throw GridMismatchError("coefficient vector does not match basis size");
    }
    const auto alpha = basis.eigenvalues();
    double acc = 0.0;
    if (s == 0.0) {
        for (double c : coeffs) acc += c * c;
    } else if (s == 1.0) {
        for (std::size_t k = 0; k < coeffs.size(); ++k) acc += alpha[k] * coeffs[k] * coeffs[k];
    } else {
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            acc += std::pow(alpha[k], s) * coeffs[k] * coeffs[k];
        }
    }
    return std::sqrt(acc);
}

/// Spectral coordinates (u, e_k) of an L2 function, tied to its basis.
class SpectralField {
public:
    explicit SpectralField(BasisPtr basis)
        : basis_(std::move(basis)), coeffs_(basis_->size(), 0.0) {}

    SpectralField(BasisPtr basis, std::vector<double> coeffs)
        : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != basis_->size()) {
            throw GridMismatchError("coefficient vector does not match basis size");
        }
        for (double c : coeffs_) {
            if (!std::isfinite(c)) throw std::invalid_argument("spectral field is not finite");
        }
    }

    /// amplitude * e_k.
    [[nodiscard]] static SpectralField single_mode(BasisPtr basis, std::size_t k,
                                                   double amplitude = 1.0) {
        SpectralField f(std::move(basis));
        static_cast<void>(f.basis_->mode(k));  // range check
        f.coeffs_[k - 1] = amplitude;
        return f;
    }

    [[nodiscard]] const Basis& basis() const noexcept { return *basis_; }
    [[nodiscard]] const BasisPtr& basis_ptr() const noexcept { return basis_; }
    [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::span<double> coeffs() noexcept { return coeffs_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }

private:
    BasisPtr basis_;
    std::vector<double> coeffs_;
};

[[nodiscard]] inline double sobolev_norm(const SpectralField& field, double s) {
    return sobolev_norm(field.basis(), field.coeffs(), s);
}

[[nodiscard]] inline std::vector<double> to_physical(const SpectralField& field) {
    std::vector<double> grid(field.basis().grid_size());
    field.basis().to_physical(field.coeffs(), grid);
    return grid;
}

[[nodiscard]] inline SpectralField from_physical(BasisPtr basis, std::span<const double> grid) {
    if (grid.size() != basis->grid_size()) {
        throw GridMismatchError("grid has " + std::to_string(grid.size()) + " values, basis expects " +
                                std::to_string(basis->grid_size()));
    }
    std::vector<double> coeffs(basis->size());
    basis->from_physical(grid, coeffs);
    return SpectralField(std::move(basis), std::move(coeffs));
}

/// sqrt(h^d sum_j g_j^2): the grid L2 norm, equal to sobolev_norm(., 0) for
/// fields in the span of the basis.
[[nodiscard]] inline double grid_l2_norm(const Basis& basis, std::span<const double> grid) {
    double acc = 0.0;
    for (double g : grid) acc += g * g;
    return std::sqrt(basis.quadrature_weight() * acc);
}

}  // namespace sklimit
