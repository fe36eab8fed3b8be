#pragma once

#include <array>
#include <string>
#include <vector>

#include "hmt/common.hpp"
#include "hmt/point.hpp"

namespace hmt {

// Closed polygonal curve(s). Panel k runs from vertices[panels[k][0]] to
// vertices[panels[k][1]]; the region owning the mesh lies on the left, so the
// right-hand normal is the outward normal.
struct CurveMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 2>> panels;
  bool closed = true;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_panels() const { return static_cast<int>(panels.size()); }
  Point start(int k) const { return vertices[panels[k][0]]; }
  Point end(int k) const { return vertices[panels[k][1]]; }
  double length(int k) const { return norm(end(k) - start(k)); }
  Point tangent(int k) const;
  Point normal(int k) const { return right_normal(tangent(k)); }
  Point midpoint(int k) const { return 0.5 * (start(k) + end(k)); }
  double min_panel_length() const;
  double max_panel_length() const;
  double total_length() const;
  // Twice the signed enclosed area (positive for counter-clockwise cycles).
  double signed_area() const;
};

// Single closed circle mesh with n panels, counter-clockwise, first vertex on the +x axis.
CurveMesh make_circle_mesh(double radius, int n_panels, Point center = {0.0, 0.0});

struct SkeletonPanel {
  int v0 = 0;
  int v1 = 0;
  // Regions left/right of the stored direction v0 -> v1. The stored normal is the
  // right-hand normal, i.e. the outward normal of owner_left.
  int owner_left = 0;
  int owner_right = 0;
};

// Boundary of one region with links to the skeleton.
struct BoundaryMesh {
  CurveMesh curve;
  std::vector<int> skel_vertex;  // local vertex -> skeleton vertex
  std::vector<int> skel_panel;   // local panel -> skeleton panel
  std::vector<int> sign;         // +1 when local orientation equals the stored one
};

// Regions are indexed 0..n for the homogeneous subdomains and n+1 for Omega_Sigma.
struct SubdomainPartition {
  int n = 0;
  std::string name;
  std::vector<Point> skeleton_vertices;
  std::vector<SkeletonPanel> skeleton_panels;
  std::vector<BoundaryMesh> gamma;  // j = 0..n
  BoundaryMesh sigma;

  int sigma_index() const { return n + 1; }
  int num_regions() const { return n + 2; }
  const BoundaryMesh& boundary(int region) const { return region == n + 1 ? sigma : gamma.at(region); }
  BoundaryMesh& boundary(int region) { return region == n + 1 ? sigma : gamma.at(region); }
  Point stored_normal(int skel_panel) const;
  // Which region a point belongs to (by winding of the region boundaries).
  int locate(Point p) const;
  // Distance from p to the nearest skeleton panel.
  double distance_to_skeleton(Point p) const;
};

struct VolumeMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_vertex_map;  // Sigma vertex -> volume vertex

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double area() const;
  double max_edge_length() const;
};

struct Configuration {
  SubdomainPartition partition;
  VolumeMesh volume;
};

// Builds a partition from skeleton panels; the region boundaries are derived by
// chaining the panels each region owns.
SubdomainPartition build_partition(int n, std::vector<Point> vertices, std::vector<SkeletonPanel> panels,
                                   std::string name = "");

Configuration make_concentric_config(double a, double b, int n_panels_inner, int n_panels_outer,
                                     double volume_h = 0.0);
Configuration make_halfdisk_config(double a, double b, int n_arc, double volume_h = 0.0);
// Disk radius a (Sigma) inside the gap a<r<b (part of Omega_0), annulus b<r<c (Omega_1),
// exterior r>c (Omega_0).
Configuration make_gap_demo_config(double a, double b, double c, int n_panels, double volume_h = 0.0);
// Omega_Sigma = disk, Omega_0 = exterior.
Configuration make_disk_config(double a, int n_panels, double volume_h = 0.0);
// Omega_Sigma = a supplied triangulation whose boundary_vertex_map lists Sigma in order; Omega_0 = exterior.
Configuration make_external_config(VolumeMesh volume);

// Empty list means valid.
std::vector<std::string> validate_partition(const SubdomainPartition& p);

std::vector<Point> cross_points(const SubdomainPartition& p);

// Fan plus concentric rings. The outer ring is exactly the vertex set of sigma.
VolumeMesh triangulate_disk(const CurveMesh& sigma, double target_h);

// Reverse every panel of a boundary mesh (used to inject orientation faults).
void reverse_orientation(BoundaryMesh& b);

}  // namespace hmt
