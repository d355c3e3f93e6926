#pragma once

namespace ltvwc::launcher {

/// International standard atmosphere, troposphere through lower stratosphere
/// (valid to 32 km). Altitude in metres.
double isa_temperature(double h);  // K
double isa_pressure(double h);     // Pa
double isa_density(double h);      // kg/m^3
double speed_of_sound(double h);   // m/s

/// WGS-84 gravitational acceleration as a function of altitude.
double gravity(double h);  // m/s^2

}  // namespace ltvwc::launcher
