#pragma once

#include <compare>
#include <numbers>

namespace spdc {

/// A physical length. Stored in micrometres, the library's internal unit;
/// millimetres and nanometres are accepted only at construction.
class Length {
public:
  constexpr Length() = default;

  static constexpr Length um(double v) { return Length{v}; }
  static constexpr Length mm(double v) { return Length{v * 1e3}; }
  static constexpr Length nm(double v) { return Length{v * 1e-3}; }

  constexpr double in_um() const { return um_; }
  constexpr double in_mm() const { return um_ * 1e-3; }
  constexpr double in_nm() const { return um_ * 1e3; }

  constexpr auto operator<=>(const Length&) const = default;

private:
  constexpr explicit Length(double um) : um_(um) {}
  double um_ = 0.0;
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Vacuum wavenumber 2*pi*n/lambda in rad/um.
constexpr double wavenumber(double index, Length wavelength) {
  return two_pi * index / wavelength.in_um();
}

}  // namespace spdc
