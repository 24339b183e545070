#pragma once
/// @file mesh.hpp
/// Structured background triangulations, active-mesh extraction against a
/// level set, edge-set bookkeeping, and the macroelement partition.
///
/// A BackgroundMesh tiles a bounding rectangle with 2*nx*ny counter-clockwise
/// triangles.  classify() intersects it with a LevelSetDomain and records,
/// per element, the cut geometry plus the derived element and edge sets:
///
///   active elements   |T ∩ Ω| > 0
///   cut elements      the interface crosses the element interior
///   large elements    |T ∩ Ω| / |T| >= delta
///
///   active edges      shared by two active elements
///   ghost edges       edges of cut elements shared by two active elements
///   cut-cut edges     shared by two cut elements
///
/// build_macro_partition() groups every small element with its closest large
/// element (breadth-first over shared faces, ties to the smallest root id)
/// and lists the edges interior to each patch.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cutstokes/geometry.hpp"

namespace cutstokes {

/// A small element with no face path to any large element: the mesh cannot
/// be stabilized at this delta.
struct OrphanSmallElementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// How each rectangular cell is split into two triangles.
enum class DiagonalPattern {
  Uniform,      ///< every cell split along the same (lower-left) diagonal
  Alternating,  ///< diagonals alternate in a checkerboard
};

/// Classification of a background triangle against the level set.
enum class ElementClass { Outside, Inside, Cut };

/// Uniform triangulation of a rectangle.  Triangles are counter-clockwise;
/// edges store sorted vertex ids, and every edge carries a globally unique
/// tangent (lower to higher vertex id) and normal (tangent rotated by -pi/2).
struct BackgroundMesh {
  std::array<double, 4> bbox{};  ///< xmin, ymin, xmax, ymax
  int nx = 0;
  int ny = 0;

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< CCW vertex ids
  std::vector<std::array<int, 2>> edges;      ///< vertex ids, v0 < v1
  std::vector<std::array<int, 2>> edge_tris;  ///< incident triangles; [1] = -1 on the rim
  std::vector<std::array<int, 3>> tri_edges;  ///< local edge i joins vertices (i, i+1 mod 3)
  std::vector<double> tri_diameter;           ///< longest edge per triangle
  double h = 0.0;                             ///< max diameter over all triangles

  std::array<Vec2, 3> tri_coords(int t) const {
    const auto& v = triangles[t];
    return {vertices[v[0]], vertices[v[1]], vertices[v[2]]};
  }
  double tri_area(int t) const {
    const auto c = tri_coords(t);
    return 0.5 * (c[1] - c[0]).cross(c[2] - c[0]);
  }
  double edge_length(int e) const {
    return (vertices[edges[e][1]] - vertices[edges[e][0]]).norm();
  }
  /// Unit tangent from the lower to the higher vertex id.
  Vec2 edge_tangent(int e) const {
    return (vertices[edges[e][1]] - vertices[edges[e][0]]).normalized();
  }
  /// Unit normal, the tangent rotated by -pi/2 (fixed per edge, not per side).
  Vec2 edge_normal(int e) const { return edge_tangent(e).rot_cw(); }
  Vec2 edge_midpoint(int e) const {
    return (vertices[edges[e][0]] + vertices[edges[e][1]]) * 0.5;
  }
};

/// Tile bbox with 2*nx*ny CCW triangles.
BackgroundMesh build_background(std::array<double, 4> bbox, int nx, int ny,
                                DiagonalPattern diag);

/// Background mesh intersected with a level-set domain: per-element cut
/// geometry, the element sets (active / cut / large), and the edge sets used
/// by the interior-penalty and stabilization forms.
struct ActiveMesh {
  BackgroundMesh bg;
  LevelSetDomain domain;
  double delta = 1.0;
  double snap_tol = 0.0;  ///< vertex values with |phi| <= snap_tol count as 0

  std::vector<double> vertex_phi;        ///< phi cached per vertex (raw)
  std::vector<ElementClass> elem_class;  ///< per triangle
  std::vector<CutRegion> cut_geom;       ///< per triangle; trivial when uncut
  std::vector<double> inside_area;       ///< |T ∩ Ω|
  std::vector<double> inside_ratio;      ///< |T ∩ Ω| / |T|

  std::vector<char> is_active, is_cut, is_large;  ///< per-triangle masks
  std::vector<int> active_elems, cut_elems, large_elems;  ///< ascending ids

  std::vector<char> edge_active, edge_ghost, edge_cutcut;  ///< per-edge masks
  std::vector<int> active_edges;  ///< ℰ_h: shared by two active elements
  std::vector<int> ghost_edges;   ///< 𝓕_h: cut-element edges shared by two active
  std::vector<int> cutcut_edges;  ///< 𝓕_{h,∂Ω}: shared by two cut elements

  /// Parameter range [s0, s1] of E ∩ Ω along each edge (s measured from the
  /// lower vertex id); s0 > s1 encodes an empty intersection.
  std::vector<std::array<double, 2>> edge_inside;

  /// Endpoints of E ∩ Ω, or nullopt when the edge lies outside Ω.
  std::optional<std::pair<Vec2, Vec2>> edge_inside_segment(int e) const;

  /// A boundary edge of the active mesh with a positive-length part in Ω:
  /// where the mesh rim coincides with a fitted piece of ∂Ω.
  struct BoundaryFacet {
    int edge = -1;            ///< background edge id
    int element = -1;         ///< the unique incident active element
    Vec2 a, b;                ///< endpoints of E ∩ Ω, a before b along +tangent
    double orientation = 1;   ///< +1 if the global edge normal points out of element
    Vec2 outward_normal() const { return normal * orientation; }
    Vec2 normal;              ///< global edge normal
  };
  std::vector<BoundaryFacet> boundary_facets() const;
};

/// Intersect a background mesh with a level-set domain.  Requires
/// 0 < delta <= 1; large means inside ratio >= delta.
ActiveMesh classify(BackgroundMesh bg, LevelSetDomain ls, double delta);

/// Grouping of every active element under a unique large root, with the
/// stabilization edges interior to each macro patch.
struct MacroPartition {
  std::vector<int> root;  ///< per triangle: macro root id, -1 if inactive
  std::vector<int> dist;  ///< face-path length to the root, 0 for large
  std::vector<int> macro_roots;            ///< sorted root ids
  std::vector<std::vector<int>> members;   ///< aligned with macro_roots, sorted
  std::vector<int> stab_edges;  ///< union of 𝓕_h(M): interior to some macro
  std::vector<char> edge_in_macro;  ///< per-edge mask for stab_edges
};

/// Assign each small element to the large element reachable through the
/// fewest shared faces (ties to the smallest root id).  Throws
/// OrphanSmallElementError when a small element cannot reach any large one.
MacroPartition build_macro_partition(const ActiveMesh& am);

/// Plain-text node/element/edge listing for debugging.
void dump_text(const ActiveMesh& am, const std::string& path);

/// SVG rendering: elements colored by classification, interface segments
/// drawn; with a partition, small elements are tinted by macro and the
/// stabilization edges are highlighted.
void dump_svg(const ActiveMesh& am, const std::string& path,
              const MacroPartition* mp = nullptr);

}  // namespace cutstokes
