#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rspde {

/// Values of u(t, .) on the interior nodes of a uniform mesh of [0,1].
/// Boundary nodes are implicit and always zero.
class Field {
public:
    Field() = default;
    explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
    explicit Field(std::vector<double> values) : values_(std::move(values)) {}
    Field(std::initializer_list<double> values) : values_(values) {}

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    std::span<double> span() noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }
    operator std::span<const double>() const noexcept { return values_; }

    const std::vector<double>& values() const noexcept { return values_; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// <a, b> = dx * sum a_i b_i, the discrete L2(0,1) inner product.
double inner(std::span<const double> a, std::span<const double> b, double dx);
/// sqrt(dx * sum a_i^2).
double l2_norm(std::span<const double> a, double dx);
double sup_norm(std::span<const double> a);
double sup_distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);
/// Membership in the cone K0 of nonnegative fields.
bool is_nonnegative(std::span<const double> a);

/// Positive and negative parts, a = a^+ - a^-.
Field positive_part(const Field& a);
Field negative_part(const Field& a);

}  // namespace rspde
