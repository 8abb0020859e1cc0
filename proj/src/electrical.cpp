// SPDX-License-Identifier: Apache-2.0

#include "mgcps/electrical.hpp"

#include <cmath>
#include <numbers>

namespace mgcps {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

std::complex<double> unit(double deg) noexcept {
    return std::polar(1.0, deg / kDegPerRad);
}

const std::complex<double> kAlpha = unit(120.0);
const std::complex<double> kAlpha2 = unit(-120.0);

double round_to(double v, int decimals) noexcept {
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(v * scale) / scale;
    return r == 0.0 ? 0.0 : r;  // drop negative zero
}

}  // namespace

double normalize_angle_deg(double deg) noexcept {
    if (!std::isfinite(deg)) return deg;
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0) r += 360.0;
    if (r > 180.0) r -= 360.0;
    return r == 0.0 ? 0.0 : r;
}

Phasor::Phasor(double magnitude, double angle_deg) noexcept {
    if (magnitude < 0.0) {
        magnitude = -magnitude;
        angle_deg += 180.0;
    }
    magnitude_ = magnitude;
    angle_deg_ = magnitude == 0.0 ? 0.0 : normalize_angle_deg(angle_deg);
}

Phasor Phasor::from_complex(std::complex<double> z) noexcept {
    const double mag = std::abs(z);
    return Phasor(mag, mag == 0.0 ? 0.0 : std::arg(z) * kDegPerRad);
}

std::complex<double> Phasor::to_complex() const noexcept {
    return std::polar(magnitude_, angle_deg_ / kDegPerRad);
}

bool Phasor::finite() const noexcept {
    return std::isfinite(magnitude_) && std::isfinite(angle_deg_);
}

double distance(const Phasor& a, const Phasor& b) noexcept {
    return std::abs(a.to_complex() - b.to_complex());
}

Phasor quantize(const Phasor& p, int decimals) noexcept {
    const double mag = round_to(p.magnitude(), decimals);
    if (mag == 0.0) return {};
    double ang = round_to(p.angle_deg(), decimals);
    if (ang <= -180.0) ang = 180.0;
    return Phasor(mag, ang);
}

ThreePhase balanced(double magnitude, double angle_deg) noexcept {
    return {Phasor(magnitude, angle_deg), Phasor(magnitude, angle_deg - 120.0),
            Phasor(magnitude, angle_deg + 120.0)};
}

ThreePhase quantize(const ThreePhase& p, int decimals) noexcept {
    return {quantize(p.a, decimals), quantize(p.b, decimals), quantize(p.c, decimals)};
}

SequenceComponents quantize(const SequenceComponents& s, int decimals) noexcept {
    return {quantize(s.positive, decimals), quantize(s.negative, decimals), quantize(s.zero, decimals)};
}

SequenceComponents to_sequence(const ThreePhase& abc) noexcept {
    const auto a = abc.a.to_complex();
    const auto b = abc.b.to_complex();
    const auto c = abc.c.to_complex();
    return {Phasor::from_complex((a + kAlpha * b + kAlpha2 * c) / 3.0),
            Phasor::from_complex((a + kAlpha2 * b + kAlpha * c) / 3.0),
            Phasor::from_complex((a + b + c) / 3.0)};
}

ThreePhase from_sequence(const SequenceComponents& seq) noexcept {
    const auto p = seq.positive.to_complex();
    const auto n = seq.negative.to_complex();
    const auto z = seq.zero.to_complex();
    return {Phasor::from_complex(z + p + n), Phasor::from_complex(z + kAlpha2 * p + kAlpha * n),
            Phasor::from_complex(z + kAlpha * p + kAlpha2 * n)};
}

}  // namespace mgcps
