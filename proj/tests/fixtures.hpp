#pragma once

#include <array>
#include <random>
#include <vector>

#include "rectflow/network.hpp"
#include "rectflow/surface.hpp"

namespace fixtures {

using rectflow::BoundaryLabels;
using rectflow::ConductanceNetwork;
using rectflow::ConductanceSpec;
using rectflow::Embedding;
using rectflow::TriangulatedSurface;

inline TriangulatedSurface tetrahedron() {
    return TriangulatedSurface(4, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}});
}

/// Triangulated disk: a fan over a convex polygon with `sides` boundary
/// vertices (vertex 0 in the center).
inline TriangulatedSurface disk(int sides = 5) {
    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < sides; ++i)
        tris.push_back({0, 1 + i, 1 + (i + 1) % sides});
    return TriangulatedSurface(sides + 1, tris);
}

/// Vertex (ring r, column i) of a grid with `cols` columns; columns wrap.
inline int grid_vertex(int r, int i, int cols) { return r * cols + ((i % cols) + cols) % cols; }

/// Triangulated cylinder: rings 0..rings (ring 0 on top), columns wrap.
/// Quads are split by the NW-SE diagonal unless a flip mask says otherwise.
inline TriangulatedSurface cylinder_tri(int rings, int cols,
                                        const std::vector<char>& flip = {}) {
    std::vector<std::array<int, 3>> tris;
    for (int r = 0; r < rings; ++r)
        for (int i = 0; i < cols; ++i) {
            int nw = grid_vertex(r, i, cols), ne = grid_vertex(r, i + 1, cols);
            int sw = grid_vertex(r + 1, i, cols), se = grid_vertex(r + 1, i + 1, cols);
            bool f = !flip.empty() && flip[r * cols + i];
            if (!f) {
                tris.push_back({nw, sw, se});
                tris.push_back({nw, se, ne});
            } else {
                tris.push_back({ne, nw, sw});
                tris.push_back({ne, sw, se});
            }
        }
    return TriangulatedSurface((rings + 1) * cols, tris);
}

/// Closed triangulated torus on a rings x cols grid (both directions wrap).
inline TriangulatedSurface torus_tri(int rings, int cols) {
    std::vector<std::array<int, 3>> tris;
    auto v = [&](int r, int i) { return grid_vertex(((r % rings) + rings) % rings, i, cols); };
    for (int r = 0; r < rings; ++r)
        for (int i = 0; i < cols; ++i) {
            int nw = v(r, i), ne = v(r, i + 1), sw = v(r + 1, i), se = v(r + 1, i + 1);
            tris.push_back({nw, sw, se});
            tris.push_back({nw, se, ne});
        }
    return TriangulatedSurface(rings * cols, tris);
}

/// Quad-grid cylinder as a raw embedding (no triangles): the classic
/// fixture for the tiler. Hole 0 is the top ring (potential k side).
inline Embedding cylinder_quads(int rings, int cols) {
    std::vector<std::vector<int>> faces, holes;
    for (int r = 0; r < rings; ++r)
        for (int i = 0; i < cols; ++i)
            faces.push_back({grid_vertex(r, i, cols), grid_vertex(r + 1, i, cols),
                             grid_vertex(r + 1, i + 1, cols), grid_vertex(r, i + 1, cols)});
    std::vector<int> top, bottom;
    for (int i = 0; i < cols; ++i) top.push_back(grid_vertex(0, i, cols));
    for (int i = 0; i < cols; ++i) bottom.push_back(grid_vertex(rings, -i, cols));
    holes.push_back(top);
    holes.push_back(bottom);
    return Embedding((rings + 1) * cols, faces, holes);
}

/// The two-edge path u-w-v embedded as a doubled walk (a degenerate
/// sphere); labels make u the k side and v the 0 side.
inline ConductanceNetwork path_network(double c_uw = 1.0, double c_wv = 1.0) {
    Embedding emb(3, {{0, 1, 2, 1}}, {});
    ConductanceSpec spec;
    spec.overrides = {{0, 1, c_uw}, {1, 2, c_wv}};
    BoundaryLabels labels;
    labels.e1 = {0};
    labels.e2 = {{2}};
    return ConductanceNetwork::with_labels(emb, spec, labels);
}

/// Planar disk with `holes_x` unit cells removed from row `holes_row`: a
/// (holes+1)-connected Jordan region. Cell diagonals are chosen so that
/// every interior edge has an interior endpoint, which keeps the mesh
/// double-ready. Defaults give the 3-holed fixture of the doubling pipeline.
inline TriangulatedSurface holed_rectangle(int cells_x = 9, int cells_y = 5,
                                           std::vector<int> holes_x = {2, 6},
                                           int holes_row = 2) {
    int vx = cells_x + 1;
    auto v = [&](int row, int col) { return row * vx + col; };
    auto removed = [&](int r, int i) {
        for (int h : holes_x)
            if (r == holes_row && i == h) return true;
        return false;
    };
    auto interior = [&](int row, int col) {
        if (row == 0 || row == cells_y || col == 0 || col == cells_x) return false;
        for (int h : holes_x)
            if (row >= holes_row && row <= holes_row + 1 && col >= h && col <= h + 1)
                return false;
        return true;
    };
    std::vector<std::array<int, 3>> tris;
    for (int r = 0; r < cells_y; ++r)
        for (int i = 0; i < cells_x; ++i) {
            if (removed(r, i)) continue;
            int nw = v(r, i), ne = v(r, i + 1), sw = v(r + 1, i), se = v(r + 1, i + 1);
            if (interior(r, i) || interior(r + 1, i + 1)) {
                tris.push_back({nw, sw, se});
                tris.push_back({nw, se, ne});
            } else if (interior(r, i + 1) || interior(r + 1, i)) {
                tris.push_back({ne, nw, sw});
                tris.push_back({ne, sw, se});
            } else {
                throw std::invalid_argument("holed_rectangle: holes too close for a "
                                            "double-ready triangulation");
            }
        }
    return TriangulatedSurface(vx * (cells_y + 1), tris);
}

/// Random triangulated annulus with randomized diagonals. Deterministic in
/// the seed.
inline TriangulatedSurface random_annulus(std::mt19937& rng) {
    int rings = std::uniform_int_distribution<int>(1, 3)(rng);
    int cols = std::uniform_int_distribution<int>(3, 7)(rng);
    std::vector<char> flip(rings * cols);
    for (auto& f : flip) f = std::uniform_int_distribution<int>(0, 1)(rng);
    return cylinder_tri(rings, cols, flip);
}

inline ConductanceSpec random_conductances(const Embedding& emb, std::mt19937& rng,
                                           double lo = 0.1, double hi = 10.0) {
    ConductanceSpec spec;
    std::uniform_real_distribution<double> dist(lo, hi);
    for (const auto& e : emb.edges()) spec.overrides.push_back({e.a, e.b, dist(rng)});
    return spec;
}

/// Network on a surface with E1 = the given boundary component (default 0).
inline ConductanceNetwork surface_network(const TriangulatedSurface& s,
                                          const ConductanceSpec& spec = {},
                                          int e1_component = 0) {
    return ConductanceNetwork::from_embedding(s.embedding(), spec, e1_component);
}

}  // namespace fixtures
