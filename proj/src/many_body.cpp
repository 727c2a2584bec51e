// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/many_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "smallscat/potential_ops.hpp"
#include "smallscat/shape_functionals.hpp"

namespace smallscat
{

ParticleShape ParticleShape::sphere() { return ParticleShape(); }

ParticleShape ParticleShape::from_mesh(const SurfaceMesh &mesh)
{
  const double s = 1.0 / mesh.size();
  auto unit = std::make_shared<SurfaceMesh>(mesh.translated(-mesh.barycenter()).scaled(s));
  ParticleShape shape;
  shape.label = "mesh";
  shape.unit_capacitance = capacitance_bem(*unit);
  shape.unit_area = unit->area();
  shape.unit_volume = unit->volume();
  shape.mesh = unit;
  shape.tensor_cache = std::make_shared<std::map<double, Mat3>>();
  return shape;
}

Mat3 ParticleShape::polarizability(double lambda) const
{
  if (!mesh)
  {
    if (!(lambda > -1.0 && lambda <= 1.0))
    {
      throw ValidationError("invalid_argument", "lambda must lie in (-1, 1]");
    }
    return -6.0 * lambda / (3.0 + lambda) * Mat3::Identity();
  }
  auto it = tensor_cache->find(lambda);
  if (it != tensor_cache->end())
  {
    return it->second;
  }
  const Mat3 beta = polarizability_tensor(*mesh, lambda);
  tensor_cache->emplace(lambda, beta);
  return beta;
}

double ParticleCloud::min_separation() const
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i)
  {
    for (std::size_t j = i + 1; j < centers.size(); ++j)
    {
      best = std::min(best, (centers[i] - centers[j]).norm());
    }
  }
  return best;
}

void ParticleCloud::validate() const
{
  if (!(a > 0.0))
  {
    throw ValidationError("invalid_argument", "particle size a must be positive");
  }
  const std::size_t m = centers.size();
  auto need = [m](std::size_t n, const char *what) {
    if (n != m)
    {
      throw ValidationError("invalid_argument",
                            std::string("per-particle array '") + what + "' has wrong length");
    }
  };
  switch (bc)
  {
    case BoundaryCondition::dirichlet:
      need(capacitance.size(), "capacitance");
      for (double c : capacitance)
        if (!(c > 0.0))
          throw ValidationError("constraint_violation", "capacitance must be positive");
      break;
    case BoundaryCondition::impedance:
      need(impedance.size(), "impedance");
      need(area_factor.size(), "area_factor");
      if (!(kappa > 0.0 && kappa < 1.0))
        throw ValidationError("constraint_violation", "impedance exponent kappa must lie in (0, 1)");
      for (const complex &h : impedance)
        if (h.imag() > 0.0)
          throw ValidationError("constraint_violation", "impedance must satisfy Im h <= 0");
      break;
    case BoundaryCondition::transmission:
      need(rho.size(), "rho");
      need(k_interior.size(), "k_interior");
      for (double r : rho)
        if (!(r > 0.0))
          throw ValidationError("constraint_violation", "density ratio rho must be positive");
      for (double km : k_interior)
        if (!(km > 0.0))
          throw ValidationError("constraint_violation", "interior wavenumber must be positive");
      [[fallthrough]];
    case BoundaryCondition::neumann:
      need(volume.size(), "volume");
      need(polarizability.size(), "polarizability");
      break;
  }
  for (const auto &c : centers)
  {
    if (!box.contains(c))
    {
      throw ValidationError("constraint_violation", "particle center lies outside the box");
    }
  }
  if (m > 1)
  {
    const double d = min_separation();
    if (!(d > 2.0 * a))
    {
      std::ostringstream os;
      os << "particles overlap: minimum separation " << d << " <= 2a = " << 2.0 * a;
      throw ValidationError("constraint_violation", os.str());
    }
  }
}

double expected_particle_count(BoundaryCondition bc, double integral_n, double a, double kappa,
                               double unit_volume)
{
  switch (bc)
  {
    case BoundaryCondition::dirichlet:
      return integral_n / a;
    case BoundaryCondition::impedance:
      return integral_n / std::pow(a, 2.0 - kappa);
    case BoundaryCondition::neumann:
    case BoundaryCondition::transmission:
      break;
  }
  return integral_n / (unit_volume * a * a * a);
}

namespace
{

void check_options(const CloudOptions &o)
{
  if (!(o.a > 0.0))
    throw ValidationError("invalid_argument", "particle size a must be positive");
  if (!((o.box.hi.array() > o.box.lo.array()).all()))
    throw ValidationError("invalid_argument", "box must have positive extent");
  if (o.bc == BoundaryCondition::impedance && !(o.kappa > 0.0 && o.kappa < 1.0))
    throw ValidationError("constraint_violation", "impedance exponent kappa must lie in (0, 1)");
  if (!(o.jitter >= 0.0 && o.jitter <= 1.0))
    throw ValidationError("invalid_argument", "jitter must lie in [0, 1]");
}

double real_density(const ScalarField &n, const Vec3 &x)
{
  const complex v = n(x);
  if (v.imag() != 0.0 || !std::isfinite(v.real()))
  {
    throw ValidationError("invalid_argument", "number density must be real and finite");
  }
  if (v.real() < 0.0)
  {
    std::ostringstream os;
    os << "number density is negative (" << v.real() << ") at (" << x.x() << ", " << x.y()
       << ", " << x.z() << ")";
    throw ValidationError("constraint_violation", os.str());
  }
  return v.real();
}

// Two-point Gauss rule per axis over a cell.
double integrate_density(const ScalarField &n, const Vec3 &lo, const Vec3 &ext)
{
  const double g = 0.5 / std::sqrt(3.0);
  double sum = 0.0;
  for (int c = 0; c < 8; ++c)
  {
    Vec3 p;
    for (int d = 0; d < 3; ++d)
    {
      p[d] = lo[d] + ext[d] * (0.5 + (((c >> d) & 1) ? g : -g));
    }
    sum += real_density(n, p);
  }
  return sum / 8.0 * ext.prod();
}

// Uniform double in [0, 1) from the raw engine output; independent of library distributions.
double uniform(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void fill_parameters(ParticleCloud &cloud, const CloudOptions &o)
{
  const std::size_t m = cloud.size();
  const double a = cloud.a;
  switch (cloud.bc)
  {
    case BoundaryCondition::dirichlet:
    {
      const bool from_shape =
          o.capacitance_density.is_constant() && o.capacitance_density.constant_value() == 0.0;
      cloud.capacitance.resize(m);
      for (std::size_t i = 0; i < m; ++i)
      {
        cloud.capacitance[i] = from_shape ? o.shape.capacitance() * a
                                          : o.capacitance_density(cloud.centers[i]).real() * a;
      }
      break;
    }
    case BoundaryCondition::impedance:
      cloud.kappa = o.kappa;
      cloud.impedance.resize(m);
      cloud.area_factor.assign(m, o.shape.area());
      for (std::size_t i = 0; i < m; ++i)
      {
        cloud.impedance[i] = o.impedance(cloud.centers[i]);
      }
      break;
    case BoundaryCondition::neumann:
      cloud.volume.assign(m, o.shape.volume() * a * a * a);
      cloud.polarizability.assign(m, o.shape.polarizability(1.0));
      break;
    case BoundaryCondition::transmission:
      cloud.volume.assign(m, o.shape.volume() * a * a * a);
      cloud.rho.resize(m);
      cloud.k_interior.resize(m);
      cloud.polarizability.resize(m);
      for (std::size_t i = 0; i < m; ++i)
      {
        cloud.rho[i] = o.rho(cloud.centers[i]).real();
        cloud.k_interior[i] = o.k_interior(cloud.centers[i]).real();
        if (!(cloud.rho[i] > 0.0))
        {
          throw ValidationError("constraint_violation", "density ratio rho must be positive");
        }
        cloud.polarizability[i] = o.shape.polarizability(transmission_lambda(cloud.rho[i]));
      }
      break;
  }
}

}  // namespace

ParticleCloud generate_cloud(const CloudOptions &o)
{
  check_options(o);
  const Vec3 ext = o.box.extent();
  const double unit_volume = o.shape.volume();

  // Coarse estimate of the total count to size the stratification cells.
  const int coarse = 8;
  double total_n = 0.0;
  for (int i = 0; i < coarse * coarse * coarse; ++i)
  {
    const Vec3 idx(i % coarse, (i / coarse) % coarse, i / (coarse * coarse));
    const Vec3 lo = o.box.lo + (idx.array() * ext.array() / coarse).matrix();
    total_n += integrate_density(o.density, lo, ext / coarse);
  }
  const double m_estimate =
      expected_particle_count(o.bc, total_n, o.a, o.kappa, unit_volume);
  if (m_estimate > 2.0 * static_cast<double>(o.max_particles))
  {
    std::ostringstream os;
    os << "placement law asks for about " << std::llround(m_estimate)
       << " particles, above the cap " << o.max_particles;
    throw ValidationError("resource_limit", os.str());
  }

  std::array<int, 3> cells{1, 1, 1};
  if (m_estimate >= 1.0)
  {
    const double side = std::cbrt(o.box.volume() / m_estimate);
    for (int d = 0; d < 3; ++d)
    {
      cells[d] = std::max(1, static_cast<int>(std::lround(ext[d] / side)));
    }
  }
  const Vec3 cell_ext(ext.x() / cells[0], ext.y() / cells[1], ext.z() / cells[2]);
  const double d_min = std::max(5.0 * o.a, o.min_separation);

  ParticleCloud cloud;
  cloud.box = o.box;
  cloud.a = o.a;
  cloud.bc = o.bc;
  cloud.kappa = o.kappa;

  std::mt19937_64 rng(o.seed);
  // Cumulative rounding keeps the running total within 1/2 of the expected running total.
  double running = 0.0;
  long long placed = 0;
  for (int iz = 0; iz < cells[2]; ++iz)
  {
    for (int iy = 0; iy < cells[1]; ++iy)
    {
      for (int ix = 0; ix < cells[0]; ++ix)
      {
        const Vec3 lo = o.box.lo + Vec3(ix * cell_ext.x(), iy * cell_ext.y(), iz * cell_ext.z());
        running += expected_particle_count(o.bc, integrate_density(o.density, lo, cell_ext), o.a,
                                           o.kappa, unit_volume);
        const long long target = std::llround(running);
        const long long count = std::max(0LL, target - placed);
        placed += count;
        if (static_cast<std::size_t>(placed) > o.max_particles)
        {
          std::ostringstream os;
          os << "cloud exceeds the particle cap " << o.max_particles;
          throw ValidationError("resource_limit", os.str());
        }
        if (count == 0)
        {
          continue;
        }
        const int s = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(count)) - 1e-12));
        const Vec3 sub = cell_ext / s;
        if (sub.minCoeff() < d_min)
        {
          std::ostringstream os;
          os << "cell (" << ix << ", " << iy << ", " << iz << ") centered at ("
             << (lo + 0.5 * cell_ext).transpose() << ") needs " << count
             << " particles but its sub-cell width " << sub.minCoeff()
             << " is below the minimum separation " << d_min;
          throw ValidationError("density_too_high", os.str());
        }
        // Pick `count` of the s^3 sub-cells with a seeded Fisher-Yates shuffle.
        std::vector<int> slots(static_cast<std::size_t>(s * s * s));
        for (std::size_t i = 0; i < slots.size(); ++i)
        {
          slots[i] = static_cast<int>(i);
        }
        for (std::size_t i = slots.size(); i > 1; --i)
        {
          const std::size_t j = static_cast<std::size_t>(rng() % i);
          std::swap(slots[i - 1], slots[j]);
        }
        const Vec3 room = o.jitter * (0.5 * sub.array() - 0.5 * d_min).matrix();
        for (long long p = 0; p < count; ++p)
        {
          const int slot = slots[static_cast<std::size_t>(p)];
          const Vec3 sidx(slot % s, (slot / s) % s, slot / (s * s));
          Vec3 x = lo + ((sidx.array() + 0.5) * sub.array()).matrix();
          for (int d = 0; d < 3; ++d)
          {
            x[d] += room[d] * (2.0 * uniform(rng) - 1.0);
          }
          cloud.centers.push_back(x);
        }
      }
    }
  }
  fill_parameters(cloud, o);
  cloud.validate();
  return cloud;
}

ParticleCloud make_cloud(const std::vector<Vec3> &centers, const CloudOptions &options)
{
  check_options(options);
  ParticleCloud cloud;
  cloud.box = options.box;
  cloud.a = options.a;
  cloud.bc = options.bc;
  cloud.kappa = options.kappa;
  cloud.centers = centers;
  fill_parameters(cloud, options);
  cloud.validate();
  return cloud;
}

namespace
{

struct Coefficients
{
  std::vector<complex> mu, nu;
  std::vector<CMat3> tensor;
  bool vector_system = false;
};

Coefficients coefficients(const ParticleCloud &cloud, double k, bool keep_laplacian)
{
  const std::size_t m = cloud.size();
  Coefficients c;
  c.mu.assign(m, 0.0);
  c.nu.assign(m, 0.0);
  c.tensor.assign(m, CMat3::Zero());
  switch (cloud.bc)
  {
    case BoundaryCondition::dirichlet:
      for (std::size_t i = 0; i < m; ++i)
        c.mu[i] = -cloud.capacitance[i];
      return c;
    case BoundaryCondition::impedance:
    {
      const double scale = std::pow(cloud.a, 2.0 - cloud.kappa);
      for (std::size_t i = 0; i < m; ++i)
        c.mu[i] = -scale * cloud.area_factor[i] * cloud.impedance[i];
      return c;
    }
    case BoundaryCondition::neumann:
      for (std::size_t i = 0; i < m; ++i)
      {
        c.nu[i] = cloud.volume[i];
        c.tensor[i] = I * k * cloud.volume[i] * cloud.polarizability[i].cast<complex>();
      }
      break;
    case BoundaryCondition::transmission:
      for (std::size_t i = 0; i < m; ++i)
      {
        const double km = cloud.k_interior[i];
        const double kappa_m = km * km - k * k;
        c.mu[i] = cloud.rho[i] * kappa_m * cloud.volume[i];
        c.nu[i] = (1.0 - cloud.rho[i]) * cloud.volume[i];
        c.tensor[i] = I * k * cloud.volume[i] * cloud.polarizability[i].cast<complex>();
      }
      break;
  }
  c.vector_system = true;
  if (!keep_laplacian)
  {
    for (std::size_t i = 0; i < m; ++i)
    {
      c.mu[i] -= k * k * c.nu[i];
      c.nu[i] = 0.0;
    }
  }
  return c;
}

// Coupling block: contribution of particle m's unknowns to the equations collocated at x.
// Rows: value, gradient (3) and, with Laplacian unknowns, Laplacian. Columns likewise.
void coupling_block(const Vec3 &x, const Vec3 &xm, double k, complex mu, complex nu,
                    const CMat3 &t, int n, complex mu_static, Eigen::Matrix<complex, 5, 5> &b)
{
  const Vec3 d = x - xm;
  const double r = d.norm();
  const Vec3 e = d / r;
  const complex g = kernel_g(x, xm, k);
  const complex radial = g * (I * k - 1.0 / r);
  const CVec3 ec = e.cast<complex>();
  const Eigen::Matrix<complex, 1, 3> et = ec.transpose() * t;

  b.setZero();
  b(0, 0) = g * mu;
  b.block<1, 3>(0, 1) = g * et;
  for (int i = 0; i < 3; ++i)
  {
    b(1 + i, 0) = radial * e[i] * mu;
    // d/dx_i (g e_p) = radial e_i e_p + g (delta_ip - e_i e_p) / r
    Eigen::Matrix<complex, 1, 3> row;
    for (int p = 0; p < 3; ++p)
    {
      const double delta = i == p ? 1.0 : 0.0;
      row[p] = radial * e[i] * e[p] + g * (delta - e[i] * e[p]) / r;
    }
    b.block<1, 3>(1 + i, 1) = row * t;
  }
  if (n == 5)
  {
    b(0, 4) = g * nu;
    for (int i = 0; i < 3; ++i)
    {
      b(1 + i, 4) = radial * e[i] * nu;
    }
    b(4, 0) = -k * k * g * mu_static;
    b.block<1, 3>(4, 1) = (-k * k - 2.0 / (r * r)) * g * et;
    b(4, 4) = -k * k * g * nu;
  }
}

void check_bc(const ParticleCloud &cloud, BoundaryCondition expected)
{
  if (cloud.bc != expected)
  {
    throw ValidationError("invalid_argument", "cloud boundary condition is " + to_string(cloud.bc) +
                                                  ", solver expects " + to_string(expected));
  }
  cloud.validate();
}

CVector solve_system(const CMatrix *dense, const LinearOperator &apply, const CVector &rhs,
                     const LasOptions &options, EffectiveFieldSolution &out)
{
  if (rhs.size() == 0)
  {
    out.dense = true;
    return rhs;
  }
  if (dense)
  {
    DenseSolver solver(*dense, options.min_rcond);
    CVector x = solver.solve(rhs);
    const double bn = rhs.norm();
    out.residual = bn > 0.0 ? (*dense * x - rhs).norm() / bn : 0.0;
    out.dense = true;
    return x;
  }
  GmresResult r = gmres(apply, rhs, options.gmres);
  out.dense = false;
  out.residual = r.relative_residual;
  out.iterations = r.iterations;
  if (!r.converged)
  {
    std::ostringstream os;
    os << "GMRES stopped after " << r.iterations << " iterations at relative residual "
       << r.relative_residual;
    throw SolverError("not_converged", os.str());
  }
  return r.solution;
}

EffectiveFieldSolution solve_scalar(const ParticleCloud &cloud, double k,
                                    const IncidentField &incident, const LasOptions &options)
{
  const Coefficients c = coefficients(cloud, k, false);
  const auto m = static_cast<Eigen::Index>(cloud.size());
  EffectiveFieldSolution out;
  out.bc = cloud.bc;
  out.k = k;
  out.incident = incident;
  out.kernel = options.kernel;
  out.mu = c.mu;
  out.nu = c.nu;
  out.tensor = c.tensor;
  const KernelFn kernel =
      options.kernel ? options.kernel
                     : KernelFn([k](const Vec3 &x, const Vec3 &y) { return kernel_g(x, y, k); });

  CVector rhs(m);
  for (Eigen::Index j = 0; j < m; ++j)
  {
    rhs[j] = incident.value(cloud.centers[j]);
  }
  CVector x;
  if (static_cast<std::size_t>(m) <= options.dense_limit)
  {
    CMatrix a(m, m);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < m; ++j)
    {
      for (Eigen::Index i = 0; i < m; ++i)
      {
        a(j, i) = i == j ? complex(1.0) : -kernel(cloud.centers[j], cloud.centers[i]) * c.mu[i];
      }
    }
    x = solve_system(&a, {}, rhs, options, out);
  }
  else
  {
    LinearOperator apply = [&](const CVector &v, CVector &y) {
      y.resize(m);
#pragma omp parallel for schedule(dynamic, 8)
      for (Eigen::Index j = 0; j < m; ++j)
      {
        complex s = v[j];
        for (Eigen::Index i = 0; i < m; ++i)
        {
          if (i != j)
            s -= kernel(cloud.centers[j], cloud.centers[i]) * c.mu[i] * v[i];
        }
        y[j] = s;
      }
    };
    x = solve_system(nullptr, apply, rhs, options, out);
  }
  out.values.assign(x.data(), x.data() + m);
  return out;
}

EffectiveFieldSolution solve_vector(const ParticleCloud &cloud, double k,
                                    const IncidentField &incident, const LasOptions &options)
{
  if (options.kernel)
  {
    throw ValidationError("unsupported_option", "a background kernel can only replace the "
                                                "free-space kernel in Dirichlet and impedance "
                                                "systems");
  }
  const int n = options.keep_laplacian ? 5 : 4;
  const Coefficients c = coefficients(cloud, k, options.keep_laplacian);
  // Value coefficient before elimination, needed by the Laplacian rows.
  const Coefficients raw = coefficients(cloud, k, true);
  const auto m = static_cast<Eigen::Index>(cloud.size());
  const Eigen::Index dim = n * m;

  EffectiveFieldSolution out;
  out.bc = cloud.bc;
  out.k = k;
  out.incident = incident;
  out.laplacian_unknowns = options.keep_laplacian;
  out.mu = c.mu;
  out.nu = c.nu;
  out.tensor = c.tensor;

  CVector rhs(dim);
  for (Eigen::Index j = 0; j < m; ++j)
  {
    const LocalField f = incident.local(cloud.centers[j]);
    rhs[n * j] = f.value;
    rhs.segment<3>(n * j + 1) = f.gradient;
    if (n == 5)
      rhs[n * j + 4] = f.laplacian;
  }

  auto block = [&](Eigen::Index j, Eigen::Index i, Eigen::Matrix<complex, 5, 5> &b) {
    coupling_block(cloud.centers[j], cloud.centers[i], k, c.mu[i], c.nu[i], c.tensor[i], n,
                   raw.mu[i], b);
  };

  CVector x;
  if (static_cast<std::size_t>(dim) <= options.dense_limit)
  {
    CMatrix a = CMatrix::Identity(dim, dim);
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index j = 0; j < m; ++j)
    {
      Eigen::Matrix<complex, 5, 5> b;
      for (Eigen::Index i = 0; i < m; ++i)
      {
        if (i == j)
          continue;
        block(j, i, b);
        a.block(n * j, n * i, n, n) -= b.topLeftCorner(n, n);
      }
    }
    x = solve_system(&a, {}, rhs, options, out);
  }
  else
  {
    LinearOperator apply = [&](const CVector &v, CVector &y) {
      y = v;
#pragma omp parallel for schedule(dynamic, 4)
      for (Eigen::Index j = 0; j < m; ++j)
      {
        Eigen::Matrix<complex, 5, 5> b;
        Eigen::Matrix<complex, 5, 1> acc = Eigen::Matrix<complex, 5, 1>::Zero();
        for (Eigen::Index i = 0; i < m; ++i)
        {
          if (i == j)
            continue;
          block(j, i, b);
          acc.head(n) += b.topLeftCorner(n, n) * v.segment(n * i, n);
        }
        y.segment(n * j, n) -= acc.head(n);
      }
    };
    x = solve_system(nullptr, apply, rhs, options, out);
  }
  out.values.resize(static_cast<std::size_t>(m));
  out.gradients.resize(static_cast<std::size_t>(m));
  if (n == 5)
    out.laplacians.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j)
  {
    out.values[j] = x[n * j];
    out.gradients[j] = x.segment<3>(n * j + 1);
    if (n == 5)
      out.laplacians[j] = x[n * j + 4];
  }
  return out;
}

}  // namespace

EffectiveFieldSolution solve_las_dirichlet(const ParticleCloud &cloud, double k,
                                           const IncidentField &incident,
                                           const LasOptions &options)
{
  check_bc(cloud, BoundaryCondition::dirichlet);
  return solve_scalar(cloud, k, incident, options);
}

EffectiveFieldSolution solve_las_impedance(const ParticleCloud &cloud, double k,
                                           const IncidentField &incident,
                                           const LasOptions &options)
{
  check_bc(cloud, BoundaryCondition::impedance);
  return solve_scalar(cloud, k, incident, options);
}

EffectiveFieldSolution solve_las_neumann(const ParticleCloud &cloud, double k,
                                         const IncidentField &incident, const LasOptions &options)
{
  check_bc(cloud, BoundaryCondition::neumann);
  return solve_vector(cloud, k, incident, options);
}

EffectiveFieldSolution solve_las_transmission(const ParticleCloud &cloud, double k,
                                              const IncidentField &incident,
                                              const LasOptions &options)
{
  check_bc(cloud, BoundaryCondition::transmission);
  return solve_vector(cloud, k, incident, options);
}

EffectiveFieldSolution solve_las(const ParticleCloud &cloud, double k,
                                 const IncidentField &incident, const LasOptions &options)
{
  switch (cloud.bc)
  {
    case BoundaryCondition::dirichlet:
      return solve_las_dirichlet(cloud, k, incident, options);
    case BoundaryCondition::impedance:
      return solve_las_impedance(cloud, k, incident, options);
    case BoundaryCondition::neumann:
      return solve_las_neumann(cloud, k, incident, options);
    case BoundaryCondition::transmission:
      break;
  }
  return solve_las_transmission(cloud, k, incident, options);
}

namespace
{

complex scattered_part(const ParticleCloud &cloud, const EffectiveFieldSolution &s, const Vec3 &x,
                       double &closest)
{
  complex v = 0.0;
  const bool vec = !s.gradients.empty();
  for (std::size_t m = 0; m < cloud.size(); ++m)
  {
    const Vec3 d = x - cloud.centers[m];
    const double r = d.norm();
    closest = std::min(closest, r);
    const complex g = s.kernel ? s.kernel(x, cloud.centers[m]) : kernel_g(x, cloud.centers[m], s.k);
    complex q = s.mu[m] * s.values[m];
    if (vec)
    {
      const CVec3 e = (d / r).cast<complex>();
      q += e.dot(s.tensor[m] * s.gradients[m]);
      if (s.laplacian_unknowns)
        q += s.nu[m] * s.laplacians[m];
    }
    v += g * q;
  }
  return v;
}

void warn_if_close(const ParticleCloud &cloud, double closest)
{
  if (closest < 3.0 * cloud.a)
  {
    std::ostringstream os;
    os << "field point at distance " << closest << " from a particle center, closer than 3a = "
       << 3.0 * cloud.a << "; the point-interaction field is inaccurate there";
    warn(os.str());
  }
}

}  // namespace

complex evaluate_field(const ParticleCloud &cloud, const EffectiveFieldSolution &solution,
                       const Vec3 &x)
{
  double closest = std::numeric_limits<double>::infinity();
  const complex v = scattered_part(cloud, solution, x, closest);
  warn_if_close(cloud, closest);
  return solution.incident.value(x) + v;
}

std::vector<complex> evaluate_field(const ParticleCloud &cloud,
                                    const EffectiveFieldSolution &solution,
                                    const std::vector<Vec3> &points)
{
  std::vector<complex> out(points.size());
  std::vector<double> closest(points.size(), std::numeric_limits<double>::infinity());
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i)
  {
    out[i] = solution.incident.value(points[i]) + scattered_part(cloud, solution, points[i],
                                                                 closest[i]);
  }
  if (!closest.empty())
  {
    warn_if_close(cloud, *std::min_element(closest.begin(), closest.end()));
  }
  return out;
}

complex cloud_amplitude(const ParticleCloud &cloud, const EffectiveFieldSolution &solution,
                        const Vec3 &beta)
{
  if (solution.kernel)
  {
    throw ValidationError("unsupported_option",
                          "far-field amplitude needs the free-space kernel");
  }
  const Vec3 b = beta.normalized();
  const CVec3 bc = b.cast<complex>();
  const bool vec = !solution.gradients.empty();
  complex sum = 0.0;
  for (std::size_t m = 0; m < cloud.size(); ++m)
  {
    complex q = solution.mu[m] * solution.values[m];
    if (vec)
    {
      q += bc.dot(solution.tensor[m] * solution.gradients[m]);
      if (solution.laplacian_unknowns)
        q += solution.nu[m] * solution.laplacians[m];
    }
    sum += std::exp(-I * (solution.k * b.dot(cloud.centers[m]))) * q;
  }
  return sum / (4.0 * pi);
}

}  // namespace smallscat
