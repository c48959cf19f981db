#pragma once

#include <array>
#include <vector>

#include "eitshape/common.hpp"

namespace eitshape {

// Regular triangulation of the unit square: n x n grid cells, each split
// along its lower-left -> upper-right diagonal into two counterclockwise
// triangles.  Nodes are lexicographic with x fastest: index = j*(n+1) + i.
// Immutable after construction.
struct StructuredMesh {
  int n = 0;
  double h = 0;
  std::vector<double> x, y;                       // node coordinates
  std::vector<std::array<int, 3>> tri;            // CCW vertex triples
  std::array<std::vector<std::array<int, 2>>, 4> side_edges;  // indexed by Side

  int node_count() const { return static_cast<int>(x.size()); }
  int tri_count() const { return static_cast<int>(tri.size()); }
  int node_index(int i, int j) const { return j * (n + 1) + i; }

  const std::vector<std::array<int, 2>>& edges(Side s) const {
    return side_edges[static_cast<int>(s)];
  }
};

StructuredMesh build_unit_square_mesh(int n);

// Sorted, duplicate-free indices of all nodes on the requested sides.
// Corner nodes belong to both adjacent sides.
std::vector<int> boundary_nodes(const StructuredMesh& mesh, SideSet sides);

// Signed area and P1 shape-function gradients of one triangle.
struct TriGeometry {
  double area;
  std::array<double, 3> gx, gy;  // gradient of the hat function at vertex k
};

TriGeometry tri_geometry(const StructuredMesh& mesh, int t);

}  // namespace eitshape
