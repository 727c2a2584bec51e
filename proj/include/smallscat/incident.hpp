// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_INCIDENT_HPP
#define SMALLSCAT_INCIDENT_HPP

#include <functional>
#include <vector>

#include "smallscat/types.hpp"

namespace smallscat
{

// Value, gradient and Laplacian of a field at one point.
struct LocalField
{
  complex value = 0.0;
  CVec3 gradient = CVec3::Zero();
  complex laplacian = 0.0;
};

//
// Incident field: a superposition of plane waves A e^{ik alpha.x}, optionally plus a
// user-supplied smooth solution given through value/gradient/Laplacian callbacks.
//
class IncidentField
{
public:
  struct PlaneWave
  {
    Vec3 direction;
    double k = 0.0;
    complex amplitude = 1.0;
  };

  using ValueFn = std::function<complex(const Vec3 &)>;
  using GradientFn = std::function<CVec3(const Vec3 &)>;

private:
  std::vector<PlaneWave> waves;
  ValueFn custom_value;
  GradientFn custom_gradient;
  ValueFn custom_laplacian;

public:
  IncidentField() = default;

  // Direction is normalized; it must be non-zero.
  static IncidentField plane_wave(const Vec3 &direction, double k, complex amplitude = 1.0);
  static IncidentField custom(ValueFn value, GradientFn gradient, ValueFn laplacian);

  IncidentField operator+(const IncidentField &other) const;
  IncidentField scaled(complex factor) const;

  complex value(const Vec3 &x) const;
  CVec3 gradient(const Vec3 &x) const;
  complex laplacian(const Vec3 &x) const;
  LocalField local(const Vec3 &x) const;

  bool is_plane_wave() const { return waves.size() == 1 && !custom_value; }
  const std::vector<PlaneWave> &plane_waves() const { return waves; }
  bool has_custom_part() const { return static_cast<bool>(custom_value); }
};

}  // namespace smallscat

#endif  // SMALLSCAT_INCIDENT_HPP
