#pragma once

/**
 * @file tropical.hpp
 * @brief Max-plus scalars and square matrices.
 *
 * The max-plus semiring is (R u {-inf}, max, +). We write a (+) b = max(a, b)
 * and a (x) b = a + b. The additive identity epsilon stands for -inf and is
 * stored as a tagged value, never as a large negative sentinel, so that sums
 * of weights along a path stay exact.
 */

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace metro {

class TropicalValue {
public:
    /// Epsilon (the (+)-neutral element).
    constexpr TropicalValue() = default;

    /// Finite value. Throws std::invalid_argument for NaN or infinities.
    explicit TropicalValue(double v);

    static constexpr TropicalValue epsilon() { return TropicalValue{}; }
    /// The (x)-neutral element.
    static TropicalValue unit() { return TropicalValue{0.0}; }

    constexpr bool is_epsilon() const { return epsilon_; }
    constexpr bool is_finite() const { return !epsilon_; }

    /// Finite payload. Throws std::logic_error on epsilon.
    double value() const;

    /// Finite payload or -inf for epsilon.
    double as_double() const;

    friend constexpr bool operator==(TropicalValue a, TropicalValue b) {
        if (a.epsilon_ || b.epsilon_) return a.epsilon_ == b.epsilon_;
        return a.v_ == b.v_;
    }

    std::string to_string() const;

private:
    double v_ = 0.0;
    bool epsilon_ = true;
};

inline const TropicalValue eps = TropicalValue::epsilon();

/// a (+) b = max(a, b); epsilon is neutral.
TropicalValue trop_add(TropicalValue a, TropicalValue b);
/// a (x) b = a + b; epsilon absorbs.
TropicalValue trop_mul(TropicalValue a, TropicalValue b);

inline TropicalValue operator+(TropicalValue a, TropicalValue b) { return trop_add(a, b); }
inline TropicalValue operator*(TropicalValue a, TropicalValue b) { return trop_mul(a, b); }

/// Dense square matrix over the max-plus semiring. Entries default to epsilon.
class TropicalMatrix {
public:
    explicit TropicalMatrix(std::size_t dim);
    TropicalMatrix(std::initializer_list<std::initializer_list<TropicalValue>> rows);

    static TropicalMatrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }

    TropicalValue& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const TropicalValue& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    bool operator==(const TropicalMatrix&) const = default;

    /// Kleene star I (+) A (+) A^2 (+) ... Throws if A has a positive-weight
    /// circuit (the series diverges).
    TropicalMatrix star() const;

    /// y = A (x) u
    std::vector<TropicalValue> apply(std::span<const TropicalValue> u) const;

private:
    std::size_t dim_;
    std::vector<TropicalValue> data_;
};

/// (A (x) B)_ij = max_k A_ik + B_kj. Throws std::invalid_argument on dimension mismatch.
TropicalMatrix mat_mul(const TropicalMatrix& a, const TropicalMatrix& b);
/// Entrywise (+).
TropicalMatrix mat_add(const TropicalMatrix& a, const TropicalMatrix& b);

inline TropicalMatrix operator*(const TropicalMatrix& a, const TropicalMatrix& b) { return mat_mul(a, b); }
inline TropicalMatrix operator+(const TropicalMatrix& a, const TropicalMatrix& b) { return mat_add(a, b); }

/// Sup-norm distance between two vectors with identical epsilon patterns.
/// Throws std::invalid_argument if one side is epsilon where the other is not.
double sup_distance(std::span<const TropicalValue> u, std::span<const TropicalValue> v);

}  // namespace metro
