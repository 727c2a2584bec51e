// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/incident.hpp"

#include <cmath>

namespace smallscat
{

IncidentField IncidentField::plane_wave(const Vec3 &direction, double k, complex amplitude)
{
  const double norm = direction.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
  {
    throw ValidationError("invalid_argument", "plane-wave direction must be a non-zero vector");
  }
  if (!(k >= 0.0))
  {
    throw ValidationError("invalid_argument", "wavenumber must be non-negative");
  }
  IncidentField f;
  f.waves.push_back({direction / norm, k, amplitude});
  return f;
}

IncidentField IncidentField::custom(ValueFn value, GradientFn gradient, ValueFn laplacian)
{
  if (!value || !gradient || !laplacian)
  {
    throw ValidationError("invalid_argument", "custom incident field needs value, gradient and "
                                              "laplacian");
  }
  IncidentField f;
  f.custom_value = std::move(value);
  f.custom_gradient = std::move(gradient);
  f.custom_laplacian = std::move(laplacian);
  return f;
}

IncidentField IncidentField::operator+(const IncidentField &other) const
{
  IncidentField sum = *this;
  sum.waves.insert(sum.waves.end(), other.waves.begin(), other.waves.end());
  if (other.custom_value)
  {
    if (!sum.custom_value)
    {
      sum.custom_value = other.custom_value;
      sum.custom_gradient = other.custom_gradient;
      sum.custom_laplacian = other.custom_laplacian;
    }
    else
    {
      auto v1 = sum.custom_value, v2 = other.custom_value;
      auto g1 = sum.custom_gradient, g2 = other.custom_gradient;
      auto l1 = sum.custom_laplacian, l2 = other.custom_laplacian;
      sum.custom_value = [v1, v2](const Vec3 &x) { return v1(x) + v2(x); };
      sum.custom_gradient = [g1, g2](const Vec3 &x) -> CVec3 { return g1(x) + g2(x); };
      sum.custom_laplacian = [l1, l2](const Vec3 &x) { return l1(x) + l2(x); };
    }
  }
  return sum;
}

IncidentField IncidentField::scaled(complex factor) const
{
  IncidentField out = *this;
  for (auto &w : out.waves)
  {
    w.amplitude *= factor;
  }
  if (custom_value)
  {
    auto v = custom_value;
    auto g = custom_gradient;
    auto l = custom_laplacian;
    out.custom_value = [v, factor](const Vec3 &x) { return factor * v(x); };
    out.custom_gradient = [g, factor](const Vec3 &x) -> CVec3 { return factor * g(x); };
    out.custom_laplacian = [l, factor](const Vec3 &x) { return factor * l(x); };
  }
  return out;
}

complex IncidentField::value(const Vec3 &x) const
{
  complex sum = custom_value ? custom_value(x) : complex(0.0);
  for (const auto &w : waves)
  {
    sum += w.amplitude * std::exp(I * (w.k * w.direction.dot(x)));
  }
  return sum;
}

CVec3 IncidentField::gradient(const Vec3 &x) const
{
  CVec3 sum = custom_gradient ? custom_gradient(x) : CVec3::Zero();
  for (const auto &w : waves)
  {
    const complex u = w.amplitude * std::exp(I * (w.k * w.direction.dot(x)));
    sum += (I * w.k * u) * w.direction.cast<complex>();
  }
  return sum;
}

complex IncidentField::laplacian(const Vec3 &x) const
{
  complex sum = custom_laplacian ? custom_laplacian(x) : complex(0.0);
  for (const auto &w : waves)
  {
    sum += -w.k * w.k * w.amplitude * std::exp(I * (w.k * w.direction.dot(x)));
  }
  return sum;
}

LocalField IncidentField::local(const Vec3 &x) const
{
  return {value(x), gradient(x), laplacian(x)};
}

}  // namespace smallscat
