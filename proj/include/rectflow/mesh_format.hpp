#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rectflow/numeric.hpp"
#include "rectflow/surface.hpp"

namespace rectflow {

/// A parsed mesh file: the combinatorial surface plus optional per-vertex
/// coordinates. Coordinates are rendering hints only; no computation reads
/// them.
struct MeshData {
    TriangulatedSurface surface;
    std::vector<std::array<double, 3>> coords;  // empty when the file has none
};

/// Line-oriented mesh format:
///
///   # comment
///   mesh <vertex-count> <triangle-count>
///   v <index> [<x> <y> <z>]
///   t <a> <b> <c>
///
/// Vertex records must appear in index order; triangles are oriented.
inline MeshData parse_mesh(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("mesh: line " + std::to_string(lineno) + ": " + why);
    };
    int nv = -1, nf = -1;
    int seen_v = 0;
    bool any_coords = false;
    std::vector<std::array<double, 3>> coords;
    std::vector<std::array<int, 3>> tris;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "mesh") {
            if (nv >= 0) fail("duplicate mesh header");
            if (!(ls >> nv >> nf) || nv <= 0 || nf < 0) fail("malformed counts");
            coords.reserve(nv);
            tris.reserve(nf);
        } else if (tag == "v") {
            if (nv < 0) fail("vertex before the mesh header");
            int idx;
            if (!(ls >> idx)) fail("malformed vertex record");
            if (idx != seen_v) fail("vertex records out of order (expected " +
                                    std::to_string(seen_v) + ")");
            if (idx >= nv) fail("vertex index beyond the declared count");
            double x, y, z;
            if (ls >> x >> y >> z) {
                any_coords = true;
                coords.push_back({x, y, z});
            } else {
                coords.push_back({0, 0, 0});
            }
            ++seen_v;
        } else if (tag == "t") {
            if (nv < 0) fail("triangle before the mesh header");
            int a, b, c;
            if (!(ls >> a >> b >> c)) fail("malformed triangle record");
            for (int v : {a, b, c})
                if (v < 0 || v >= nv)
                    fail("triangle references vertex " + std::to_string(v) + " of " +
                         std::to_string(nv));
            tris.push_back({a, b, c});
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    lineno = 0;
    if (nv < 0) throw std::invalid_argument("mesh: missing header");
    if (seen_v != nv)
        throw std::invalid_argument("mesh: declared " + std::to_string(nv) +
                                    " vertices, found " + std::to_string(seen_v));
    if (static_cast<int>(tris.size()) != nf)
        throw std::invalid_argument("mesh: declared " + std::to_string(nf) +
                                    " triangles, found " + std::to_string(tris.size()));
    if (!any_coords) coords.clear();
    return {TriangulatedSurface(nv, std::move(tris)), std::move(coords)};
}

/// Canonical form: header, vertex records, triangle records.
inline std::string emit_mesh(const MeshData& mesh) {
    std::ostringstream os;
    const auto& s = mesh.surface;
    os << "mesh " << s.vertex_count() << " " << s.triangle_count() << "\n";
    for (int v = 0; v < s.vertex_count(); ++v) {
        os << "v " << v;
        if (!mesh.coords.empty())
            os << " " << format_number(mesh.coords[v][0]) << " "
               << format_number(mesh.coords[v][1]) << " " << format_number(mesh.coords[v][2]);
        os << "\n";
    }
    for (const auto& t : s.triangles())
        os << "t " << t[0] << " " << t[1] << " " << t[2] << "\n";
    return os.str();
}

}  // namespace rectflow
