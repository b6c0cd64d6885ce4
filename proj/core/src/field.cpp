#include "rspde/field.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace rspde {

Field& Field::operator+=(const Field& other) {
    assert(other.size() == size());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    assert(other.size() == size());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double inner(std::span<const double> a, std::span<const double> b, double dx) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return dx * s;
}

double l2_norm(std::span<const double> a, double dx) { return std::sqrt(inner(a, a, dx)); }

double sup_norm(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

bool is_nonnegative(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return v >= 0.0; });
}

Field positive_part(const Field& a) {
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
    return out;
}

Field negative_part(const Field& a) {
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] < 0.0 ? -a[i] : 0.0;
    return out;
}

}  // namespace rspde
