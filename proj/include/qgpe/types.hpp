#ifndef QGPE_TYPES_HPP
#define QGPE_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qgpe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

constexpr Complex I_UNIT{0.0, 1.0};

// ---- error types ----------------------------------------------------------

struct SingularSpectrum : std::runtime_error {
    explicit SingularSpectrum(const std::string& m) : std::runtime_error(m) {}
};
struct IllConditioned : std::runtime_error {
    explicit IllConditioned(const std::string& m) : std::runtime_error(m) {}
};
struct NonFiniteDerivative : std::runtime_error {
    explicit NonFiniteDerivative(const std::string& m) : std::runtime_error(m) {}
};
struct SingularGauge : std::runtime_error {
    explicit SingularGauge(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateFixedPoint : std::runtime_error {
    explicit DegenerateFixedPoint(const std::string& m) : std::runtime_error(m) {}
};
struct NonInjective : std::runtime_error {
    explicit NonInjective(const std::string& m) : std::runtime_error(m) {}
};
struct SingularDensity : std::runtime_error {
    explicit SingularDensity(const std::string& m) : std::runtime_error(m) {}
};
struct GaugeFixingViolated : std::runtime_error {
    explicit GaugeFixingViolated(const std::string& m) : std::runtime_error(m) {}
};
struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& m) : std::runtime_error(m) {}
};
struct StepTooLarge : std::runtime_error {
    explicit StepTooLarge(const std::string& m) : std::runtime_error(m) {}
};
struct NotStationary : std::runtime_error {
    explicit NotStationary(const std::string& m) : std::runtime_error(m) {}
};
struct Resonance : std::runtime_error {
    explicit Resonance(const std::string& m) : std::runtime_error(m) {}
};
struct ShiftSingular : std::runtime_error {
    explicit ShiftSingular(const std::string& m) : std::runtime_error(m) {}
};
struct ResourceLimit : std::runtime_error {
    explicit ResourceLimit(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// ---- small helpers ---------------------------------------------------------

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double herm_residual(const Matrix& m) { return (m - m.adjoint()).norm(); }

/// tr(A^dag B), the Frobenius inner product.
inline Complex frob_inner(const Matrix& a, const Matrix& b) {
    return (a.adjoint() * b).trace();
}

/// Deterministic normal deviates: splitmix-seeded xorshift + Box-Muller.
/// Self-contained so that streams are identical across standard libraries.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) {
        // splitmix64 warm-up to decorrelate small seeds
        state_ = seed + 0x9e3779b97f4a7c15ULL;
        for (int i = 0; i < 4; ++i) next_u64();
    }

    double uniform() {  // in (0,1)
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Complex cgaussian() {  // unit-variance complex normal
        return Complex(gaussian(), gaussian()) / std::sqrt(2.0);
    }

    Matrix gaussian_matrix(int rows, int cols, double scale = 1.0) {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = scale * cgaussian();
        return m;
    }

  private:
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qgpe

#endif
