#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "springstring/types.hpp"

namespace springstring {

/// Row-major 2×2 complex matrix (S, T and R blocks).
struct Matrix2 {
    std::array<Complex, 4> a{};

    Complex& operator()(int r, int c) { return a[static_cast<std::size_t>(2 * r + c)]; }
    const Complex& operator()(int r, int c) const { return a[static_cast<std::size_t>(2 * r + c)]; }

    static Matrix2 identity() { return {{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}}}; }

    Complex det() const { return a[0] * a[3] - a[1] * a[2]; }

    Matrix2 adjoint() const
    {
        return {{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}};
    }

    Matrix2 inverse() const
    {
        const Complex d = det();
        return {{a[3] / d, -a[1] / d, -a[2] / d, a[0] / d}};
    }

    friend Matrix2 operator*(const Matrix2& x, const Matrix2& y)
    {
        Matrix2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
        return r;
    }
};

/// Largest entrywise modulus of (m − identity).
inline double distance_from_identity(const Matrix2& m)
{
    const Matrix2 id = Matrix2::identity();
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(m.a[i] - id.a[i]));
    return worst;
}

inline bool all_finite(const Matrix2& m)
{
    for (const auto& z : m.a)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return false;
    return true;
}

} // namespace springstring
