#include "ltvwc/launcher/atmosphere.hpp"

#include <cmath>
#include <stdexcept>

namespace ltvwc::launcher {

namespace {
constexpr double kG0 = 9.80665;       // m/s^2, standard gravity
constexpr double kRAir = 287.05287;   // J/(kg K)
constexpr double kGammaAir = 1.4;
constexpr double kEarthRadius = 6378137.0;  // m, WGS-84 equatorial

constexpr double kT0 = 288.15;   // K at sea level
constexpr double kP0 = 101325.0; // Pa at sea level
constexpr double kLapse0 = -0.0065;  // K/m, 0-11 km
constexpr double kH1 = 11000.0, kH2 = 20000.0, kH3 = 32000.0, kH4 = 47000.0;
constexpr double kT1 = kT0 + kLapse0 * kH1;          // 216.65 K
constexpr double kLapse2 = 0.001;                    // K/m, 20-32 km
constexpr double kLapse3 = 0.0028;                   // K/m, 32-47 km
constexpr double kT3 = kT1 + kLapse2 * (kH3 - kH2);  // 228.65 K
constexpr double kT4 = kT3 + kLapse3 * (kH4 - kH3);  // 270.65 K
}  // namespace

double isa_temperature(double h) {
  if (h < 0.0) h = 0.0;
  if (h <= kH1) return kT0 + kLapse0 * h;
  if (h <= kH2) return kT1;
  if (h <= kH3) return kT1 + kLapse2 * (h - kH2);
  if (h <= kH4) return kT3 + kLapse3 * (h - kH3);
  return kT4;  // isothermal continuation above 47 km
}

double isa_pressure(double h) {
  if (h < 0.0) h = 0.0;
  const double p1 = kP0 * std::pow(kT1 / kT0, -kG0 / (kRAir * kLapse0));
  if (h <= kH1) {
    const double T = kT0 + kLapse0 * h;
    return kP0 * std::pow(T / kT0, -kG0 / (kRAir * kLapse0));
  }
  const double p2 = p1 * std::exp(-kG0 * (kH2 - kH1) / (kRAir * kT1));
  if (h <= kH2) return p1 * std::exp(-kG0 * (h - kH1) / (kRAir * kT1));
  const double p3 = p2 * std::pow(kT3 / kT1, -kG0 / (kRAir * kLapse2));
  if (h <= kH3) {
    const double T = kT1 + kLapse2 * (h - kH2);
    return p2 * std::pow(T / kT1, -kG0 / (kRAir * kLapse2));
  }
  const double p4 = p3 * std::pow(kT4 / kT3, -kG0 / (kRAir * kLapse3));
  if (h <= kH4) {
    const double T = kT3 + kLapse3 * (h - kH3);
    return p3 * std::pow(T / kT3, -kG0 / (kRAir * kLapse3));
  }
  return p4 * std::exp(-kG0 * (h - kH4) / (kRAir * kT4));
}

double isa_density(double h) { return isa_pressure(h) / (kRAir * isa_temperature(h)); }

double speed_of_sound(double h) { return std::sqrt(kGammaAir * kRAir * isa_temperature(h)); }

double gravity(double h) {
  const double r = kEarthRadius / (kEarthRadius + h);
  return kG0 * r * r;
}

}  // namespace ltvwc::launcher
