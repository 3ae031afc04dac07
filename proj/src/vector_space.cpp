#include "dirspike/vector_space.hpp"

#include "dirspike/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dirspike {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) {
        throw UsageError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

void require_finite(const std::vector<double>& v) {
    if (!std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); })) {
        throw UsageError("StateVec entries must be finite");
    }
}

}  // namespace

StateVec::StateVec(std::size_t n, double fill) : data_(n, fill) {
    require_finite(data_);
}

StateVec::StateVec(std::initializer_list<double> entries) : data_(entries) {
    require_finite(data_);
}

StateVec::StateVec(std::vector<double> entries) : data_(std::move(entries)) {
    require_finite(data_);
}

bool StateVec::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double e) { return std::isfinite(e); });
}

StateVec& StateVec::operator+=(const StateVec& other) {
    require_same_size(size(), other.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

StateVec& StateVec::operator-=(const StateVec& other) {
    require_same_size(size(), other.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

StateVec& StateVec::operator*=(double s) noexcept {
    for (double& e : data_) {
        e *= s;
    }
    return *this;
}

StateVec operator+(StateVec a, const StateVec& b) { return a += b; }
StateVec operator-(StateVec a, const StateVec& b) { return a -= b; }
StateVec operator*(double s, StateVec a) { return a *= s; }
StateVec operator*(StateVec a, double s) { return a *= s; }

double inner(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm(std::span<const double> a) noexcept {
    return std::sqrt(inner(a, a));
}

double inner(const StateVec& a, const StateVec& b) {
    require_same_size(a.size(), b.size());
    return inner(a.entries(), b.entries());
}

double norm(const StateVec& a) noexcept {
    return norm(a.entries());
}

std::optional<double> cosine(const StateVec& a, const StateVec& b) {
    const double dot = inner(a, b);
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) {
        return std::nullopt;
    }
    // Rounding can push |cos| a hair past 1 for parallel inputs.
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

}  // namespace dirspike
