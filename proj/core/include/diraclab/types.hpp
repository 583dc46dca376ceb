#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace diraclab {

using cplx = std::complex<double>;

// ----------------------------------------------------------------------------
// error taxonomy; the CLI maps ConfigError -> exit 2, failed checks -> exit 1
// ----------------------------------------------------------------------------
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct UnsupportedMetric : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };
struct StabilityError : Error { using Error::Error; };
struct WindowError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct EvaluationAtSingularSurface : Error { using Error::Error; };
struct IOError : Error { using Error::Error; };

// ----------------------------------------------------------------------------
// small dense tensors; coordinates are chart coordinates (Cartesian or product)
// ----------------------------------------------------------------------------
using Point3 = std::array<double, 3>;

inline double norm2(const Point3& x) {
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

/// Japanese bracket <x> = sqrt(1 + |x|^2)
inline double jbracket(double r) { return std::sqrt(1.0 + r * r); }

struct SymMatrix3 {
    // row-major 3x3, kept symmetric by construction
    std::array<double, 9> a{};

    double& operator()(int i, int j) { return a[static_cast<size_t>(3 * i + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(3 * i + j)]; }

    static SymMatrix3 identity() {
        SymMatrix3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }
    static SymMatrix3 diag(double a0, double a1, double a2) {
        SymMatrix3 m;
        m(0, 0) = a0;
        m(1, 1) = a1;
        m(2, 2) = a2;
        return m;
    }
    SymMatrix3 operator*(const SymMatrix3& o) const {
        SymMatrix3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    double det() const {
        const auto& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
             - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
             + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
};

inline double max_abs_diff(const SymMatrix3& a, const SymMatrix3& b) {
    double m = 0;
    for (int i = 0; i < 9; ++i) m = std::max(m, std::abs(a.a[size_t(i)] - b.a[size_t(i)]));
    return m;
}

/// Connection coefficients of the spatial metric, lowered and raised forms:
///   Lambda^k_{ij} = 1/2 h^{kl} (d_i h_lj + d_j h_il - d_l h_ij)
///   Lambda^{k,ij} = h^{il} h^{jm} Lambda^k_{lm}
struct Connection3 {
    std::array<double, 27> lower{};   // [k][i][j]
    std::array<double, 27> raised{};  // [k][i][j]

    double& low(int k, int i, int j) { return lower[size_t(9 * k + 3 * i + j)]; }
    double low(int k, int i, int j) const { return lower[size_t(9 * k + 3 * i + j)]; }
    double& up(int k, int i, int j) { return raised[size_t(9 * k + 3 * i + j)]; }
    double up(int k, int i, int j) const { return raised[size_t(9 * k + 3 * i + j)]; }
};

}  // namespace diraclab
