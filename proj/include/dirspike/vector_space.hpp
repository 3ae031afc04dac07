#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace dirspike {

/// Finite-dimensional real vector with the Euclidean inner product.
///
/// The dimension is fixed at construction. Entries supplied from outside
/// are checked to be finite; arithmetic results are not re-checked (the
/// integrators check their own output once per step).
class StateVec {
public:
    StateVec() = default;
    explicit StateVec(std::size_t n, double fill = 0.0);
    StateVec(std::initializer_list<double> entries);
    explicit StateVec(std::vector<double> entries);

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return data_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) { return data_[i]; }

    [[nodiscard]] std::span<const double> entries() const noexcept { return data_; }
    [[nodiscard]] std::span<double> entries() noexcept { return data_; }

    [[nodiscard]] bool all_finite() const noexcept;

    StateVec& operator+=(const StateVec& other);
    StateVec& operator-=(const StateVec& other);
    StateVec& operator*=(double s) noexcept;

    friend bool operator==(const StateVec&, const StateVec&) = default;

private:
    std::vector<double> data_;
};

[[nodiscard]] StateVec operator+(StateVec a, const StateVec& b);
[[nodiscard]] StateVec operator-(StateVec a, const StateVec& b);
[[nodiscard]] StateVec operator*(double s, StateVec a);
[[nodiscard]] StateVec operator*(StateVec a, double s);

/// Euclidean dot product. Throws UsageError on dimension mismatch.
[[nodiscard]] double inner(const StateVec& a, const StateVec& b);

[[nodiscard]] double norm(const StateVec& a) noexcept;

/// inner(a,b) / (|a| |b|); std::nullopt when either vector is zero.
[[nodiscard]] std::optional<double> cosine(const StateVec& a, const StateVec& b);

// Span versions used by the integrators' work buffers.
[[nodiscard]] double inner(std::span<const double> a, std::span<const double> b) noexcept;
[[nodiscard]] double norm(std::span<const double> a) noexcept;

}  // namespace dirspike
