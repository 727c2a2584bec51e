// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/one_body.hpp"

#include <cmath>
#include <sstream>

#include "smallscat/potential_ops.hpp"

namespace smallscat
{

std::string to_string(BoundaryCondition bc)
{
  switch (bc)
  {
    case BoundaryCondition::dirichlet:
      return "dirichlet";
    case BoundaryCondition::impedance:
      return "impedance";
    case BoundaryCondition::neumann:
      return "neumann";
    case BoundaryCondition::transmission:
      return "transmission";
  }
  return "unknown";
}

BoundaryCondition boundary_condition_from_string(const std::string &name)
{
  if (name == "dirichlet" || name == "soft")
  {
    return BoundaryCondition::dirichlet;
  }
  if (name == "impedance")
  {
    return BoundaryCondition::impedance;
  }
  if (name == "neumann" || name == "hard")
  {
    return BoundaryCondition::neumann;
  }
  if (name == "transmission")
  {
    return BoundaryCondition::transmission;
  }
  throw ValidationError("invalid_argument", "unknown boundary condition '" + name + "'");
}

complex OneBodyResult::far_field_moment(const Vec3 &beta) const
{
  const CVec3 b = beta.normalized().cast<complex>();
  return charge - I * k * b.dot(dipole);
}

complex OneBodyResult::amplitude(const Vec3 &beta) const
{
  return (far_field_moment(beta) + volume_term) / (4.0 * pi);
}

complex amplitude_dirichlet(double capacitance, complex u0_at_center)
{
  if (!(capacitance > 0.0))
  {
    throw ValidationError("invalid_argument", "capacitance must be positive");
  }
  return -capacitance * u0_at_center / (4.0 * pi);
}

complex amplitude_impedance(complex zeta, double area, complex u0_at_center)
{
  if (zeta.imag() > 0.0)
  {
    throw ValidationError("constraint_violation", "impedance must satisfy Im zeta <= 0");
  }
  if (!(area > 0.0))
  {
    throw ValidationError("invalid_argument", "surface area must be positive");
  }
  return -zeta * area * u0_at_center / (4.0 * pi);
}

complex amplitude_neumann(double volume, const Mat3 &polarizability, double k,
                          const LocalField &u0_at_center, const Vec3 &beta)
{
  const CVec3 b = beta.normalized().cast<complex>();
  const complex tensor_term = b.dot(polarizability.cast<complex>() * u0_at_center.gradient);
  return volume / (4.0 * pi) * (I * k * tensor_term + u0_at_center.laplacian);
}

OneBodyResult one_body_dirichlet(double capacitance, double k, const IncidentField &incident,
                                 const Vec3 &center, double size)
{
  const complex u0 = incident.value(center);
  OneBodyResult r;
  r.bc = BoundaryCondition::dirichlet;
  r.charge = 4.0 * pi * amplitude_dirichlet(capacitance, u0);
  r.k = k;
  r.center = center;
  r.size = size;
  r.incident = incident;
  return r;
}

OneBodyResult one_body_impedance(complex zeta, double area, double k,
                                 const IncidentField &incident, const Vec3 &center, double size)
{
  const complex u0 = incident.value(center);
  OneBodyResult r;
  r.bc = BoundaryCondition::impedance;
  r.charge = 4.0 * pi * amplitude_impedance(zeta, area, u0);
  r.k = k;
  r.center = center;
  r.size = size;
  r.incident = incident;
  return r;
}

OneBodyResult one_body_neumann(double volume, const Mat3 &polarizability, double k,
                               const IncidentField &incident, const Vec3 &center, double size)
{
  const LocalField u0 = incident.local(center);
  OneBodyResult r;
  r.bc = BoundaryCondition::neumann;
  r.charge = volume * u0.laplacian;
  r.dipole = -volume * (polarizability.cast<complex>() * u0.gradient);
  r.k = k;
  r.center = center;
  r.size = size;
  r.incident = incident;
  return r;
}

OneBodyResult one_body_transmission(const ShapeFunctionals &functionals, double rho, double k,
                                    double k1, const IncidentField &incident, const Vec3 &center,
                                    double size)
{
  const double lambda = transmission_lambda(rho);
  if (!(k1 > 0.0))
  {
    throw ValidationError("invalid_argument", "interior wavenumber must be positive");
  }
  if (std::abs(functionals.lambda - lambda) > 1e-12 && !functionals.polarizability.isZero(0.0))
  {
    std::ostringstream os;
    os << "polarizability was computed at lambda = " << functionals.lambda
       << " but rho = " << rho << " requires lambda = " << lambda;
    throw ValidationError("invalid_argument", os.str());
  }
  const double kappa = k1 * k1 - k * k;
  const double volume = functionals.volume;
  const LocalField u0 = incident.local(center);

  OneBodyResult r;
  r.bc = BoundaryCondition::transmission;
  r.charge = volume * (1.0 - rho) * (u0.laplacian - kappa * u0.value);
  // lambda = 0 gives sigma_q = 0, hence no dipole whatever the stored tensor.
  if (lambda != 0.0)
  {
    r.dipole = -volume * (functionals.polarizability.cast<complex>() * u0.gradient);
  }
  r.volume_term = kappa * u0.value * volume;
  r.k = k;
  r.center = center;
  r.size = size;
  r.incident = incident;
  return r;
}

complex scattered_field_one_body(const OneBodyResult &result, const Vec3 &x)
{
  const Vec3 d = x - result.center;
  const double r = d.norm();
  if (r < 5.0 * result.size)
  {
    std::ostringstream os;
    os << "field point at distance " << r << " is closer than 5a = " << 5.0 * result.size
       << " to the body; the point-scatterer formula is inaccurate there";
    warn(os.str());
  }
  return result.incident.value(x) + kernel_g(x, result.center, result.k) * 4.0 * pi *
                                         result.amplitude(d);
}

}  // namespace smallscat
