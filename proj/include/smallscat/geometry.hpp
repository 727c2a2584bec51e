// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_GEOMETRY_HPP
#define SMALLSCAT_GEOMETRY_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "smallscat/types.hpp"

namespace smallscat
{

//
// Closed, outward-oriented triangulated surface of a single small body. Construction
// validates watertightness and orientation; instances are immutable afterwards.
//
class SurfaceMesh
{
  std::vector<Vec3> vertex_list;
  std::vector<std::array<int, 3>> panel_list;
  std::vector<double> areas;
  std::vector<Vec3> centroids;
  std::vector<Vec3> normals;
  double total_area = 0.0;
  double signed_volume = 0.0;
  Vec3 volume_centroid = Vec3::Zero();
  double max_panel_diameter = 0.0;

public:
  // Throws ValidationError if the surface is not watertight, not outward oriented, or has
  // degenerate panels.
  SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> panels);

  const std::vector<Vec3> &vertices() const { return vertex_list; }
  const std::vector<std::array<int, 3>> &panels() const { return panel_list; }
  std::size_t panel_count() const { return panel_list.size(); }

  double panel_area(std::size_t i) const { return areas[i]; }
  const Vec3 &panel_centroid(std::size_t i) const { return centroids[i]; }
  const Vec3 &panel_normal(std::size_t i) const { return normals[i]; }
  const std::vector<double> &panel_areas() const { return areas; }
  const std::vector<Vec3> &panel_centroids() const { return centroids; }
  const std::vector<Vec3> &panel_normals() const { return normals; }

  double area() const { return total_area; }
  double volume() const { return signed_volume; }
  // Centroid of the enclosed volume.
  const Vec3 &barycenter() const { return volume_centroid; }
  // Half the largest vertex-to-vertex distance.
  double size() const;
  double max_panel_size() const { return max_panel_diameter; }
  Box bounding_box() const;

  // Copies with transformed vertices. The linear map must have positive determinant.
  SurfaceMesh transformed(const Mat3 &linear, const Vec3 &shift = Vec3::Zero()) const;
  SurfaceMesh scaled(double s) const { return transformed(s * Mat3::Identity()); }
  SurfaceMesh translated(const Vec3 &shift) const
  {
    return transformed(Mat3::Identity(), shift);
  }

  // Generalized winding number; ~1 inside, ~0 outside.
  double winding_number(const Vec3 &x) const;
  bool contains(const Vec3 &x) const { return winding_number(x) > 0.5; }
};

// Icosahedral subdivision, 20 * 4^refinement panels. refinement <= 8.
SurfaceMesh make_sphere_mesh(double radius, int refinement, const Vec3 &center = Vec3::Zero());

// Unit icosphere mapped by diag(semi_axes).
SurfaceMesh make_ellipsoid_mesh(const Vec3 &semi_axes, int refinement,
                                const Vec3 &center = Vec3::Zero());

// Axis-aligned cube with each face split into subdivisions^2 squares (two panels each).
SurfaceMesh make_cube_mesh(double edge, int subdivisions, const Vec3 &center = Vec3::Zero());

double mesh_volume(const SurfaceMesh &mesh);
double mesh_area(const SurfaceMesh &mesh);

// ASCII triangle list: "V F", V vertex lines, F zero-based index triples.
SurfaceMesh read_mesh(std::istream &in);
SurfaceMesh read_mesh_file(const std::string &path);
void write_mesh(std::ostream &out, const SurfaceMesh &mesh);

//
// Regular lattice of cubic cells whose centers lie inside a mesh.
//
struct VolumeGrid
{
  std::vector<Vec3> cells;
  double cell_volume = 0.0;
  double spacing = 0.0;

  std::size_t size() const { return cells.size(); }
  double total_volume() const { return cell_volume * static_cast<double>(cells.size()); }
};

inline constexpr int default_volume_resolution = 20;

// `resolution` cells span the longest bounding-box edge.
VolumeGrid make_volume_grid(const SurfaceMesh &mesh, int resolution = default_volume_resolution);

// Rotation matrix about a unit axis.
Mat3 rotation_matrix(const Vec3 &axis, double angle);

}  // namespace smallscat

#endif  // SMALLSCAT_GEOMETRY_HPP
