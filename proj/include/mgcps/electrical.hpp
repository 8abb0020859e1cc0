// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

namespace mgcps {

/// Normalizes an angle in degrees to (-180, 180].
[[nodiscard]] double normalize_angle_deg(double deg) noexcept;

/// Polar phasor. Magnitude is never negative; angle is in degrees in
/// (-180, 180]; a zero magnitude always carries angle 0.
class Phasor {
public:
    Phasor() = default;
    /// A negative magnitude is folded into the angle.
    Phasor(double magnitude, double angle_deg) noexcept;

    [[nodiscard]] static Phasor from_complex(std::complex<double> z) noexcept;

    [[nodiscard]] double magnitude() const noexcept { return magnitude_; }
    [[nodiscard]] double angle_deg() const noexcept { return angle_deg_; }
    [[nodiscard]] std::complex<double> to_complex() const noexcept;
    [[nodiscard]] bool finite() const noexcept;

    /// Equality on the complex value.
    friend bool operator==(const Phasor& a, const Phasor& b) noexcept {
        return a.to_complex() == b.to_complex();
    }

private:
    double magnitude_ = 0.0;
    double angle_deg_ = 0.0;
};

/// Complex-plane distance between two phasors.
[[nodiscard]] double distance(const Phasor& a, const Phasor& b) noexcept;

/// Rounds magnitude and angle to `decimals` places. A magnitude that rounds
/// to zero yields angle 0; -180 after rounding maps to 180.
[[nodiscard]] Phasor quantize(const Phasor& p, int decimals) noexcept;

struct ThreePhase {
    Phasor a;
    Phasor b;
    Phasor c;

    [[nodiscard]] bool finite() const noexcept { return a.finite() && b.finite() && c.finite(); }
    friend bool operator==(const ThreePhase&, const ThreePhase&) = default;
};

struct SequenceComponents {
    Phasor positive;
    Phasor negative;
    Phasor zero;

    [[nodiscard]] bool finite() const noexcept {
        return positive.finite() && negative.finite() && zero.finite();
    }
    friend bool operator==(const SequenceComponents&, const SequenceComponents&) = default;
};

/// Balanced abc set with phase a at `angle_deg`, b lagging 120 and c leading 120.
[[nodiscard]] ThreePhase balanced(double magnitude, double angle_deg) noexcept;

[[nodiscard]] ThreePhase quantize(const ThreePhase& p, int decimals) noexcept;
[[nodiscard]] SequenceComponents quantize(const SequenceComponents& s, int decimals) noexcept;

/// Fortescue decomposition with a = 1 at +120 degrees:
///   zero     = (A + B + C) / 3
///   positive = (A + aB + a^2 C) / 3
///   negative = (A + a^2 B + aC) / 3
[[nodiscard]] SequenceComponents to_sequence(const ThreePhase& abc) noexcept;

/// Inverse transform: A = 0 + 1 + 2, B = 0 + a^2 1 + a 2, C = 0 + a 1 + a^2 2.
[[nodiscard]] ThreePhase from_sequence(const SequenceComponents& seq) noexcept;

}  // namespace mgcps
