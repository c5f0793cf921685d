#include "metro/tropical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metro {

TropicalValue::TropicalValue(double v) : v_(v), epsilon_(false) {
    if (!std::isfinite(v)) throw std::invalid_argument("TropicalValue: value must be finite");
}

double TropicalValue::value() const {
    if (epsilon_) throw std::logic_error("TropicalValue: epsilon has no finite value");
    return v_;
}

double TropicalValue::as_double() const {
    return epsilon_ ? -std::numeric_limits<double>::infinity() : v_;
}

std::string TropicalValue::to_string() const {
    if (epsilon_) return "eps";
    std::string s = std::to_string(v_);
    return s;
}

TropicalValue trop_add(TropicalValue a, TropicalValue b) {
    if (a.is_epsilon()) return b;
    if (b.is_epsilon()) return a;
    return TropicalValue{std::max(a.value(), b.value())};
}

TropicalValue trop_mul(TropicalValue a, TropicalValue b) {
    if (a.is_epsilon() || b.is_epsilon()) return TropicalValue::epsilon();
    return TropicalValue{a.value() + b.value()};
}

TropicalMatrix::TropicalMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) throw std::invalid_argument("TropicalMatrix: dimension must be positive");
}

TropicalMatrix::TropicalMatrix(std::initializer_list<std::initializer_list<TropicalValue>> rows)
    : TropicalMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != dim_) throw std::invalid_argument("TropicalMatrix: rows must form a square grid");
        std::size_t j = 0;
        for (auto v : row) (*this)(i, j++) = v;
        ++i;
    }
}

TropicalMatrix TropicalMatrix::identity(std::size_t dim) {
    TropicalMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = TropicalValue::unit();
    return m;
}

TropicalMatrix TropicalMatrix::star() const {
    // Floyd-Warshall longest paths; a positive diagonal means a positive circuit.
    TropicalMatrix s = *this + identity(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        for (std::size_t i = 0; i < dim_; ++i) {
            if (s(i, k).is_epsilon()) continue;
            for (std::size_t j = 0; j < dim_; ++j) s(i, j) = s(i, j) + s(i, k) * s(k, j);
        }
        if (s(k, k).value() > 0.0) throw std::domain_error("TropicalMatrix::star: positive circuit");
    }
    for (std::size_t i = 0; i < dim_; ++i)
        if (s(i, i).value() > 0.0) throw std::domain_error("TropicalMatrix::star: positive circuit");
    return s;
}

std::vector<TropicalValue> TropicalMatrix::apply(std::span<const TropicalValue> u) const {
    if (u.size() != dim_) throw std::invalid_argument("TropicalMatrix::apply: dimension mismatch");
    std::vector<TropicalValue> y(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) y[i] = y[i] + (*this)(i, j) * u[j];
    return y;
}

TropicalMatrix mat_mul(const TropicalMatrix& a, const TropicalMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("mat_mul: dimension mismatch");
    const std::size_t n = a.dim();
    TropicalMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a(i, k).is_epsilon()) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
        }
    return c;
}

TropicalMatrix mat_add(const TropicalMatrix& a, const TropicalMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("mat_add: dimension mismatch");
    TropicalMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

double sup_distance(std::span<const TropicalValue> u, std::span<const TropicalValue> v) {
    if (u.size() != v.size()) throw std::invalid_argument("sup_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i].is_epsilon() != v[i].is_epsilon())
            throw std::invalid_argument("sup_distance: epsilon pattern mismatch");
        if (u[i].is_finite()) d = std::max(d, std::abs(u[i].value() - v[i].value()));
    }
    return d;
}

}  // namespace metro
