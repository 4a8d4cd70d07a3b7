#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

namespace hsim {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

/// Polar complex value: magnitude * e^{j*angle}.
///
/// Arithmetic happens in rectangular coordinates; polar is the API boundary.
/// Zero-magnitude values carry angle 0 canonically.
struct Phasor {
    double magnitude = 0.0;  // >= 0
    double angle = 0.0;      // radians, stored unnormalized

    constexpr Phasor() = default;
    constexpr Phasor(double mag, double ang) : magnitude(mag), angle(ang) {}

    [[nodiscard]] Complex to_complex() const {
        return std::polar(magnitude, angle);
    }

    [[nodiscard]] static Phasor from_complex(Complex c) {
        double mag = std::abs(c);
        if (mag == 0.0) return {0.0, 0.0};
        return {mag, std::arg(c)};
    }
};

/// Line or load admittance |Y| e^{j*phi}, in per-unit siemens.
/// Passive branches have phi in [-pi/2, pi/2].
struct Admittance {
    double magnitude = 0.0;
    double angle = 0.0;

    constexpr Admittance() = default;
    constexpr Admittance(double mag, double ang) : magnitude(mag), angle(ang) {}

    [[nodiscard]] Complex to_complex() const {
        return std::polar(magnitude, angle);
    }

    [[nodiscard]] static Admittance from_complex(Complex c) {
        double mag = std::abs(c);
        if (mag == 0.0) return {0.0, 0.0};
        return {mag, std::arg(c)};
    }

    [[nodiscard]] bool passive() const {
        return angle >= -std::numbers::pi / 2 && angle <= std::numbers::pi / 2;
    }

    bool operator==(const Admittance&) const = default;
};

inline Phasor multiply(const Phasor& a, const Phasor& b) {
    if (a.magnitude == 0.0 || b.magnitude == 0.0) return {0.0, 0.0};
    return {a.magnitude * b.magnitude, a.angle + b.angle};
}

inline Phasor multiply(const Phasor& a, const Admittance& b) {
    return multiply(a, Phasor{b.magnitude, b.angle});
}

inline Phasor multiply(const Admittance& a, const Admittance& b) {
    return multiply(Phasor{a.magnitude, a.angle}, Phasor{b.magnitude, b.angle});
}

inline Phasor conjugate(const Phasor& a) {
    if (a.magnitude == 0.0) return {0.0, 0.0};
    return {a.magnitude, -a.angle};
}

/// Rectangular sum of phasors, re-expressed in polar form.
inline Phasor sum(std::span<const Phasor> terms) {
    Complex acc{0.0, 0.0};
    for (const auto& p : terms) acc += p.to_complex();
    return Phasor::from_complex(acc);
}

/// Equality modulo 2*pi on the angle; zero-magnitude values compare equal
/// regardless of angle.
inline bool approx_equal(const Phasor& a, const Phasor& b,
                         double tol = 1e-12) {
    if (std::abs(a.magnitude - b.magnitude) > tol * std::max(1.0, std::max(a.magnitude, b.magnitude)))
        return false;
    if (a.magnitude <= tol && b.magnitude <= tol) return true;
    return std::abs(wrap_angle(a.angle - b.angle)) <= tol;
}

}  // namespace hsim
