#include "eitshape/mesh.hpp"

#include <algorithm>

namespace eitshape {

StructuredMesh build_unit_square_mesh(int n) {
  if (n < 1) throw InvalidParameterError("mesh: cells-per-side must be >= 1");
  StructuredMesh m;
  m.n = n;
  m.h = 1.0 / n;
  const int np = n + 1;
  m.x.resize(static_cast<std::size_t>(np) * np);
  m.y.resize(m.x.size());
  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i) {
      m.x[m.node_index(i, j)] = i * m.h;
      m.y[m.node_index(i, j)] = j * m.h;
    }

  m.tri.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = m.node_index(i, j);
      int b = m.node_index(i + 1, j);
      int c = m.node_index(i + 1, j + 1);
      int d = m.node_index(i, j + 1);
      m.tri.push_back({a, b, c});
      m.tri.push_back({a, c, d});
    }

  auto& left = m.side_edges[static_cast<int>(Side::left)];
  auto& right = m.side_edges[static_cast<int>(Side::right)];
  auto& top = m.side_edges[static_cast<int>(Side::top)];
  auto& bottom = m.side_edges[static_cast<int>(Side::bottom)];
  for (int j = 0; j < n; ++j) {
    left.push_back({m.node_index(0, j), m.node_index(0, j + 1)});
    right.push_back({m.node_index(n, j), m.node_index(n, j + 1)});
  }
  for (int i = 0; i < n; ++i) {
    bottom.push_back({m.node_index(i, 0), m.node_index(i + 1, 0)});
    top.push_back({m.node_index(i, n), m.node_index(i + 1, n)});
  }
  return m;
}

std::vector<int> boundary_nodes(const StructuredMesh& mesh, SideSet sides) {
  if (sides.empty()) throw InvalidParameterError("boundary_nodes: empty side set");
  std::vector<int> out;
  for (int s = 0; s < 4; ++s) {
    if (!sides.contains(static_cast<Side>(s))) continue;
    for (const auto& e : mesh.side_edges[s]) {
      out.push_back(e[0]);
      out.push_back(e[1]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TriGeometry tri_geometry(const StructuredMesh& mesh, int t) {
  const auto& v = mesh.tri[t];
  double x0 = mesh.x[v[0]], y0 = mesh.y[v[0]];
  double x1 = mesh.x[v[1]], y1 = mesh.y[v[1]];
  double x2 = mesh.x[v[2]], y2 = mesh.y[v[2]];
  double twice_area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  TriGeometry g;
  g.area = 0.5 * twice_area;
  // grad of hat_k = perpendicular of the opposite edge / (2 * area)
  g.gx = {(y1 - y2) / twice_area, (y2 - y0) / twice_area, (y0 - y1) / twice_area};
  g.gy = {(x2 - x1) / twice_area, (x0 - x2) / twice_area, (x1 - x0) / twice_area};
  return g;
}

}  // namespace eitshape
