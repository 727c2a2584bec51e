// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_POTENTIAL_OPS_HPP
#define SMALLSCAT_POTENTIAL_OPS_HPP

#include <vector>

#include "smallscat/geometry.hpp"
#include "smallscat/types.hpp"

namespace smallscat
{

// Complex density sampled at panel centroids.
using PanelDensity = CVector;

// Outgoing free-space kernel e^{ik|x-y|} / (4 pi |x-y|). Throws on coincident points.
complex kernel_g(const Vec3 &x, const Vec3 &y, double k);

// Gradient of kernel_g with respect to x.
CVec3 kernel_g_gradient(const Vec3 &x, const Vec3 &y, double k);

// Integral of the kernel over a flat disc of the given area, observed from its center.
complex disc_self_integral(double area, double k);

// Integral of the kernel over one panel seen from x, refined by subdivision when x is close
// to the panel. x must not lie on the panel.
complex panel_integral_g(const SurfaceMesh &mesh, std::size_t panel, const Vec3 &x, double k);

// Integral of g(x, t) sigma(t) dt over the surface. Points that coincide with a panel
// centroid use the disc self-term for that panel.
complex single_layer(const SurfaceMesh &mesh, const PanelDensity &density, double k,
                     const Vec3 &x);

//
// Panels of one or more bodies, concatenated. Operator matrices over several bodies are
// indexed in this order.
//
struct PanelSet
{
  std::vector<Vec3> centroid;
  std::vector<Vec3> normal;
  std::vector<double> area;
  std::vector<int> body;
  std::vector<std::size_t> offset;  // first panel of each body, plus end sentinel

  std::size_t size() const { return area.size(); }
  std::size_t body_count() const { return offset.empty() ? 0 : offset.size() - 1; }
};

PanelSet make_panel_set(const std::vector<const SurfaceMesh *> &meshes);

struct BoundaryOperatorMatrix
{
  CMatrix entries;
  double wavenumber = 0.0;

  Eigen::Index dimension() const { return entries.rows(); }
};

enum class A0Diagonal
{
  // Diagonal of A0 chosen so that sum_s w_s K0(s, t) = -1 exactly for each column.
  column_identity,
  // Zero self-panel contribution (exact for a flat panel); used to check the identity.
  flat_panel
};

// Nystrom matrix of A sigma = 2 int dg(s,t)/dN_s sigma(t) dt at panel centroids.
// For k > 0 the matrix is A0 plus the bounded remainder kernel.
BoundaryOperatorMatrix assemble_A(const SurfaceMesh &mesh, double k,
                                  A0Diagonal diagonal = A0Diagonal::column_identity);
BoundaryOperatorMatrix assemble_A(const PanelSet &panels, double k,
                                  A0Diagonal diagonal = A0Diagonal::column_identity);

// Nystrom matrix of the single-layer operator at panel centroids, disc self-terms.
CMatrix assemble_single_layer(const PanelSet &panels, double k);
CMatrix assemble_single_layer(const SurfaceMesh &mesh, double k);

//
// Volume cells. A cell of volume v centered at y acts like a uniform ball of equal volume:
// the static part of the kernel is the exact ball potential (equal to the point value
// outside the ball), the bounded dynamic remainder g - g0 is sampled at the center.
//
complex cell_potential(const Vec3 &x, const Vec3 &y, double volume, double k);
CVec3 cell_potential_gradient(const Vec3 &x, const Vec3 &y, double volume, double k);

// kappa * int_D g(x,y) u(y) dy on the grid.
complex volume_potential(const VolumeGrid &grid, const CVector &u_values, double k,
                         complex kappa, const Vec3 &x);

// Normal derivative of the volume potential at each panel centroid.
PanelDensity normal_derivative_volume_potential(const VolumeGrid &grid, const CVector &u_values,
                                                double k, complex kappa,
                                                const SurfaceMesh &mesh);

}  // namespace smallscat

#endif  // SMALLSCAT_POTENTIAL_OPS_HPP
