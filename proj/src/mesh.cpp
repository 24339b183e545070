/// @file mesh.cpp

#include "cutstokes/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>

namespace cutstokes {

namespace {

int snapped_sign(double f, double tol) {
  return (f > tol) ? 1 : (f < -tol ? -1 : 0);
}

void append_svg_polygon(std::string& out, const std::array<Vec2, 3>& c,
                        const char* fill, const char* stroke,
                        double stroke_width) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "  <polygon points=\"%.6f,%.6f %.6f,%.6f %.6f,%.6f\" "
                "fill=\"%s\" stroke=\"%s\" stroke-width=\"%.2f\"/>\n",
                c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y, fill, stroke,
                stroke_width);
  out += buf;
}

void append_svg_line(std::string& out, Vec2 a, Vec2 b, const char* stroke,
                     double stroke_width) {
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "  <line x1=\"%.6f\" y1=\"%.6f\" x2=\"%.6f\" y2=\"%.6f\" "
                "stroke=\"%s\" stroke-width=\"%.2f\"/>\n",
                a.x, a.y, b.x, b.y, stroke, stroke_width);
  out += buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Background mesh
// ---------------------------------------------------------------------------

BackgroundMesh build_background(std::array<double, 4> bbox, int nx, int ny,
                                DiagonalPattern diag) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_background: nx and ny must be >= 1");
  BackgroundMesh bg;
  bg.bbox = bbox;
  bg.nx = nx;
  bg.ny = ny;

  const auto [xmin, ymin, xmax, ymax] = bbox;
  // Convex combination, with exact endpoints (matters for sliver boxes).
  const auto coord = [](double lo, double hi, int k, int n) {
    return k == 0 ? lo : (k == n ? hi : (lo * (n - k) + hi * k) / n);
  };
  bg.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      bg.vertices.push_back(
          {coord(xmin, xmax, i, nx), coord(ymin, ymax, j, ny)});

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  bg.triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      const bool main_diag =
          diag == DiagonalPattern::Uniform || (i + j) % 2 == 0;
      if (main_diag) {
        bg.triangles.push_back({v00, v10, v11});
        bg.triangles.push_back({v00, v11, v01});
      } else {
        bg.triangles.push_back({v00, v10, v01});
        bg.triangles.push_back({v10, v11, v01});
      }
    }

  // Edges in first-seen order over triangles; ids are deterministic.
  std::unordered_map<long long, int> edge_id;
  const long long nv = static_cast<long long>(bg.vertices.size());
  bg.tri_edges.resize(bg.triangles.size());
  for (std::size_t t = 0; t < bg.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int a = bg.triangles[t][k];
      const int b = bg.triangles[t][(k + 1) % 3];
      const long long key = static_cast<long long>(std::min(a, b)) * nv +
                            std::max(a, b);
      auto [it, inserted] = edge_id.try_emplace(
          key, static_cast<int>(bg.edges.size()));
      if (inserted) {
        bg.edges.push_back({std::min(a, b), std::max(a, b)});
        bg.edge_tris.push_back({static_cast<int>(t), -1});
      } else {
        bg.edge_tris[it->second][1] = static_cast<int>(t);
      }
      bg.tri_edges[t][k] = it->second;
    }

  bg.tri_diameter.resize(bg.triangles.size());
  for (std::size_t t = 0; t < bg.triangles.size(); ++t) {
    const auto c = bg.tri_coords(static_cast<int>(t));
    bg.tri_diameter[t] = std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(),
                                   (c[0] - c[2]).norm()});
    bg.h = std::max(bg.h, bg.tri_diameter[t]);
  }
  return bg;
}

// ---------------------------------------------------------------------------
// Active mesh
// ---------------------------------------------------------------------------

ActiveMesh classify(BackgroundMesh bg, LevelSetDomain ls, double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("classify: delta must lie in (0, 1]");

  ActiveMesh am;
  am.bg = std::move(bg);
  am.domain = std::move(ls);
  am.delta = delta;
  am.snap_tol = 1e-12 * am.bg.h;
  const auto& mesh = am.bg;

  am.vertex_phi.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    am.vertex_phi[v] = am.domain.phi(mesh.vertices[v]);

  const std::size_t nt = mesh.triangles.size();
  am.elem_class.resize(nt);
  am.cut_geom.resize(nt);
  am.inside_area.assign(nt, 0.0);
  am.inside_ratio.assign(nt, 0.0);
  am.is_active.assign(nt, 0);
  am.is_cut.assign(nt, 0);
  am.is_large.assign(nt, 0);

  for (std::size_t t = 0; t < nt; ++t) {
    const int ti = static_cast<int>(t);
    const auto& v = mesh.triangles[t];
    am.cut_geom[t] = cut_triangle(
        mesh.tri_coords(ti), am.domain.phi,
        {am.vertex_phi[v[0]], am.vertex_phi[v[1]], am.vertex_phi[v[2]]},
        am.snap_tol);
    switch (am.cut_geom[t].kind) {
      case CutRegion::Kind::Inside:
        am.elem_class[t] = ElementClass::Inside;
        am.inside_area[t] = mesh.tri_area(ti);
        break;
      case CutRegion::Kind::Cut:
        am.elem_class[t] = ElementClass::Cut;
        am.inside_area[t] = am.cut_geom[t].inside.area();
        break;
      case CutRegion::Kind::Outside:
        am.elem_class[t] = ElementClass::Outside;
        break;
    }
    am.inside_ratio[t] = am.inside_area[t] / mesh.tri_area(ti);
    am.is_active[t] = am.inside_area[t] > 0.0;
    am.is_large[t] = am.is_active[t] && am.inside_ratio[t] >= delta;
    if (am.is_active[t]) am.active_elems.push_back(ti);
    if (am.is_large[t]) am.large_elems.push_back(ti);
  }

  const std::size_t ne = mesh.edges.size();
  am.edge_active.assign(ne, 0);
  am.edge_ghost.assign(ne, 0);
  am.edge_cutcut.assign(ne, 0);
  am.edge_inside.assign(ne, {1.0, 0.0});
  for (std::size_t e = 0; e < ne; ++e) {
    const int t0 = mesh.edge_tris[e][0], t1 = mesh.edge_tris[e][1];
    am.edge_active[e] = t1 >= 0 && am.is_active[t0] && am.is_active[t1];
    if (am.edge_active[e]) am.active_edges.push_back(static_cast<int>(e));

    // Clip E ∩ Ω along the edge, reusing the cached vertex values so the
    // result is consistent with the element classification.
    const int va = mesh.edges[e][0], vb = mesh.edges[e][1];
    const int sa = snapped_sign(am.vertex_phi[va], am.snap_tol);
    const int sb = snapped_sign(am.vertex_phi[vb], am.snap_tol);
    const Vec2 pa = mesh.vertices[va], pb = mesh.vertices[vb];
    if (sa <= 0 && sb <= 0) {
      am.edge_inside[e] = {0.0, 1.0};
    } else if (sa <= 0 && sb > 0) {
      am.edge_inside[e] = {
          0.0, sa == 0 ? 0.0 : bisect_edge_root(pa, pb, am.domain.phi)};
    } else if (sa > 0 && sb <= 0) {
      am.edge_inside[e] = {
          sb == 0 ? 1.0 : bisect_edge_root(pa, pb, am.domain.phi), 1.0};
    }  // else both strictly outside: keep the empty default
  }

  // The cut band collects the elements carrying a proper interface segment.
  // An interface that passes exactly through a mesh vertex splits the band
  // into arcs that touch only at that vertex; each arc is well posed on its
  // own (its constant multiplier mode pairs with the mean flux through the
  // arc), so no vertex-touching elements are pulled in.
  for (int t : am.active_elems) {
    if (am.elem_class[t] == ElementClass::Cut) {
      am.is_cut[t] = 1;
      am.cut_elems.push_back(t);
    }
  }

  for (std::size_t e = 0; e < ne; ++e) {
    const int t0 = mesh.edge_tris[e][0], t1 = mesh.edge_tris[e][1];
    am.edge_ghost[e] = am.edge_active[e] && (am.is_cut[t0] || am.is_cut[t1]);
    am.edge_cutcut[e] = t1 >= 0 && am.is_cut[t0] && am.is_cut[t1];
    if (am.edge_ghost[e]) am.ghost_edges.push_back(static_cast<int>(e));
    if (am.edge_cutcut[e]) am.cutcut_edges.push_back(static_cast<int>(e));
  }
  return am;
}

std::optional<std::pair<Vec2, Vec2>> ActiveMesh::edge_inside_segment(
    int e) const {
  const auto [s0, s1] = edge_inside[e];
  if (!(s1 > s0)) return std::nullopt;
  const Vec2 a = bg.vertices[bg.edges[e][0]];
  const Vec2 b = bg.vertices[bg.edges[e][1]];
  return std::make_pair(a + (b - a) * s0, a + (b - a) * s1);
}

std::vector<ActiveMesh::BoundaryFacet> ActiveMesh::boundary_facets() const {
  std::vector<BoundaryFacet> out;
  for (std::size_t e = 0; e < bg.edges.size(); ++e) {
    const int t0 = bg.edge_tris[e][0], t1 = bg.edge_tris[e][1];
    const int a0 = is_active[t0], a1 = t1 >= 0 && is_active[t1];
    if (a0 + a1 != 1) continue;
    const auto seg = edge_inside_segment(static_cast<int>(e));
    if (!seg) continue;
    BoundaryFacet f;
    f.edge = static_cast<int>(e);
    f.element = a0 ? t0 : t1;
    f.a = seg->first;
    f.b = seg->second;
    f.normal = bg.edge_normal(f.edge);
    const auto c = bg.tri_coords(f.element);
    const Vec2 centroid = (c[0] + c[1] + c[2]) / 3.0;
    f.orientation =
        f.normal.dot(bg.edge_midpoint(f.edge) - centroid) > 0.0 ? 1.0 : -1.0;
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Macro partition
// ---------------------------------------------------------------------------

MacroPartition build_macro_partition(const ActiveMesh& am) {
  const auto& bg = am.bg;
  MacroPartition mp;
  mp.root.assign(bg.triangles.size(), -1);
  mp.dist.assign(bg.triangles.size(), -1);

  // Multi-source BFS from the large elements.  A layer-by-layer sweep that
  // takes the minimum root over all frontier neighbors assigns each small
  // element the smallest large id among those at minimal face distance.
  std::vector<int> frontier = am.large_elems;
  for (int t : frontier) {
    mp.root[t] = t;
    mp.dist[t] = 0;
  }
  int level = 0;
  while (!frontier.empty()) {
    ++level;
    std::vector<int> next;
    for (int t : frontier)
      for (int e : bg.tri_edges[t])
        for (int nb : bg.edge_tris[e]) {
          if (nb < 0 || !am.is_active[nb] || mp.dist[nb] == 0) continue;
          if (mp.dist[nb] == level) {
            mp.root[nb] = std::min(mp.root[nb], mp.root[t]);
          } else if (mp.dist[nb] < 0) {
            mp.dist[nb] = level;
            mp.root[nb] = mp.root[t];
            next.push_back(nb);
          }
        }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }

  for (int t : am.active_elems)
    if (mp.dist[t] < 0)
      throw OrphanSmallElementError(
          "element " + std::to_string(t) +
          " has no face path to a large element; the mesh cannot be "
          "stabilized at delta = " +
          std::to_string(am.delta));

  std::map<int, std::vector<int>> groups;
  for (int t : am.active_elems) groups[mp.root[t]].push_back(t);
  for (auto& [root, members] : groups) {
    mp.macro_roots.push_back(root);
    mp.members.push_back(std::move(members));
  }

  mp.edge_in_macro.assign(bg.edges.size(), 0);
  for (std::size_t e = 0; e < bg.edges.size(); ++e) {
    const int t0 = bg.edge_tris[e][0], t1 = bg.edge_tris[e][1];
    if (t1 < 0 || !am.is_active[t0] || !am.is_active[t1]) continue;
    if (mp.root[t0] != mp.root[t1]) continue;
    mp.edge_in_macro[e] = 1;
    mp.stab_edges.push_back(static_cast<int>(e));
  }
  return mp;
}

// ---------------------------------------------------------------------------
// Dumps
// ---------------------------------------------------------------------------

void dump_text(const ActiveMesh& am, const std::string& path) {
  const auto& bg = am.bg;
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "bbox %.17g %.17g %.17g %.17g\nh %.17g\n",
                bg.bbox[0], bg.bbox[1], bg.bbox[2], bg.bbox[3], bg.h);
  out += buf;

  std::snprintf(buf, sizeof buf, "vertices %zu\n", bg.vertices.size());
  out += buf;
  for (std::size_t v = 0; v < bg.vertices.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g\n", v,
                  bg.vertices[v].x, bg.vertices[v].y, am.vertex_phi[v]);
    out += buf;
  }

  std::snprintf(buf, sizeof buf, "triangles %zu\n", bg.triangles.size());
  out += buf;
  for (std::size_t t = 0; t < bg.triangles.size(); ++t) {
    const char cls = am.elem_class[t] == ElementClass::Inside   ? 'I'
                     : am.elem_class[t] == ElementClass::Cut    ? 'C'
                                                                : 'O';
    std::snprintf(buf, sizeof buf, "%zu %d %d %d %c %.17g\n", t,
                  bg.triangles[t][0], bg.triangles[t][1], bg.triangles[t][2],
                  cls, am.inside_ratio[t]);
    out += buf;
  }

  std::snprintf(buf, sizeof buf, "edges %zu\n", bg.edges.size());
  out += buf;
  for (std::size_t e = 0; e < bg.edges.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu %d %d %d %d %d%d%d %.17g %.17g\n", e,
                  bg.edges[e][0], bg.edges[e][1], bg.edge_tris[e][0],
                  bg.edge_tris[e][1], int(am.edge_active[e]),
                  int(am.edge_ghost[e]), int(am.edge_cutcut[e]),
                  am.edge_inside[e][0], am.edge_inside[e][1]);
    out += buf;
  }
  std::ofstream(path, std::ios::binary) << out;
}

void dump_svg(const ActiveMesh& am, const std::string& path,
              const MacroPartition* mp) {
  const auto& bg = am.bg;
  const double w = bg.bbox[2] - bg.bbox[0], h = bg.bbox[3] - bg.bbox[1];
  const double margin = 0.03 * std::max(w, h);

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" "
                "viewBox=\"%.6f %.6f %.6f %.6f\">\n"
                "<g transform=\"translate(0,%.6f) scale(1,-1)\" "
                "stroke-linecap=\"round\">\n",
                bg.bbox[0] - margin, bg.bbox[1] - margin, w + 2 * margin,
                h + 2 * margin, bg.bbox[1] + bg.bbox[3]);
  out += buf;

  static const char* kMacroFills[] = {"#f9cb9c", "#b6d7a8", "#9fc5e8",
                                      "#d5a6bd", "#ffe599", "#a2c4c9"};
  const double stroke_w = 0.004 * std::max(w, h);
  for (std::size_t t = 0; t < bg.triangles.size(); ++t) {
    const char* fill = "#f7f7f7";
    if (am.is_active[t]) fill = "#cfe2f3";
    if (am.is_cut[t]) fill = "#ffe599";
    if (mp && am.is_active[t] && !am.is_large[t]) {
      const auto it = std::lower_bound(mp->macro_roots.begin(),
                                       mp->macro_roots.end(), mp->root[t]);
      fill = kMacroFills[(it - mp->macro_roots.begin()) % 6];
    }
    append_svg_polygon(out, bg.tri_coords(static_cast<int>(t)), fill,
                       "#999999", stroke_w);
  }
  if (mp)
    for (int e : mp->stab_edges)
      append_svg_line(out, bg.vertices[bg.edges[e][0]],
                      bg.vertices[bg.edges[e][1]], "#38761d", 2.5 * stroke_w);
  for (int t : am.cut_elems)
    if (am.cut_geom[t].is_cut())
      append_svg_line(out, am.cut_geom[t].seg_a, am.cut_geom[t].seg_b,
                      "#cc0000", 2.0 * stroke_w);
  out += "</g>\n</svg>\n";
  std::ofstream(path, std::ios::binary) << out;
}

}  // namespace cutstokes
