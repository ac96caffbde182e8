#pragma once

#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rectflow/embedding.hpp"

namespace rectflow {

/// Oriented triangulated surface, possibly with boundary. Validated on
/// construction: consistent orientation (each directed edge at most once),
/// manifold edges, and single-cycle vertex links via the embedding.
/// Immutable afterwards; all operations are free functions returning new
/// surfaces.
class TriangulatedSurface {
public:
    TriangulatedSurface(int vertex_count, std::vector<std::array<int, 3>> triangles)
        : n_(vertex_count), tris_(std::move(triangles)), embedding_(derive_embedding()) {}

    int vertex_count() const { return n_; }
    int triangle_count() const { return static_cast<int>(tris_.size()); }
    const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
    const Embedding& embedding() const { return embedding_; }

    int edge_count() const { return embedding_.edge_count(); }

    int euler_characteristic() const { return n_ - edge_count() + triangle_count(); }

    /// Boundary cycles, each rotated to start at its least vertex and the
    /// list ordered by that vertex. The walk direction keeps the surface on
    /// the right (it is the hole-face walk of the embedding).
    const std::vector<std::vector<int>>& boundary_components() const {
        return embedding_.holes();
    }

    bool is_closed() const { return embedding_.hole_count() == 0; }

    bool is_connected() const {
        std::vector<int> parent(n_);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& e : embedding_.edges()) parent[find(e.a)] = find(e.b);
        for (int v = 1; v < n_; ++v)
            if (find(v) != find(0)) return false;
        return true;
    }

    /// Genus of a connected surface: chi = 2 - 2g - (#boundary components).
    int genus() const {
        if (!is_connected())
            throw std::invalid_argument("genus: surface is not connected");
        int two_g = 2 - euler_characteristic() - embedding_.hole_count();
        if (two_g < 0 || two_g % 2 != 0)
            throw std::runtime_error("genus: inconsistent Euler characteristic");
        return two_g / 2;
    }

private:
    Embedding derive_embedding() {
        if (n_ <= 0) throw std::invalid_argument("surface: vertex count must be positive");
        std::map<int64_t, int> directed;  // u*n+v -> triangle
        auto key = [&](int u, int v) { return static_cast<int64_t>(u) * n_ + v; };
        for (size_t t = 0; t < tris_.size(); ++t) {
            const auto& tr = tris_[t];
            for (int i = 0; i < 3; ++i) {
                if (tr[i] < 0 || tr[i] >= n_)
                    throw std::invalid_argument("surface: triangle " + std::to_string(t) +
                                                " has vertex out of range");
                if (tr[i] == tr[(i + 1) % 3])
                    throw std::invalid_argument("surface: triangle " + std::to_string(t) +
                                                " repeats a vertex");
            }
            for (int i = 0; i < 3; ++i) {
                int u = tr[i], v = tr[(i + 1) % 3];
                if (!directed.try_emplace(key(u, v), static_cast<int>(t)).second)
                    throw std::invalid_argument(
                        "surface: directed edge " + std::to_string(u) + "->" + std::to_string(v) +
                        " used twice (inconsistent orientation, duplicate triangle, or "
                        "non-manifold edge)");
            }
        }
        // Boundary: directed edges whose reverse is unused. The hole walk
        // traverses them reversed.
        std::map<int, int> hole_next;
        for (const auto& [k, t] : directed) {
            int u = static_cast<int>(k / n_), v = static_cast<int>(k % n_);
            if (!directed.count(key(v, u))) {
                if (!hole_next.try_emplace(v, u).second)
                    throw std::invalid_argument("surface: boundary is non-manifold at vertex " +
                                                std::to_string(v));
            }
        }
        std::vector<std::vector<int>> holes;
        std::set<int> seen;
        for (const auto& [start, unused] : hole_next) {
            if (seen.count(start)) continue;
            std::vector<int> walk;
            int cur = start;
            do {
                walk.push_back(cur);
                seen.insert(cur);
                auto it = hole_next.find(cur);
                if (it == hole_next.end())
                    throw std::invalid_argument("surface: open boundary walk at vertex " +
                                                std::to_string(cur));
                cur = it->second;
            } while (cur != start);
            // canonical rotation: least vertex first
            auto least = std::min_element(walk.begin(), walk.end());
            std::rotate(walk.begin(), least, walk.end());
            holes.push_back(std::move(walk));
        }
        std::sort(holes.begin(), holes.end(),
                  [](const auto& x, const auto& y) { return x[0] < y[0]; });

        std::vector<std::vector<int>> faces;
        faces.reserve(tris_.size());
        for (const auto& t : tris_) faces.push_back({t[0], t[1], t[2]});
        return Embedding(n_, std::move(faces), std::move(holes));
    }

    int n_;
    std::vector<std::array<int, 3>> tris_;
    Embedding embedding_;
};

// ---------------------------------------------------------------------------
// Cutting along cycle systems
// ---------------------------------------------------------------------------

/// A disjoint union of embedded closed cycles in the 1-skeleton, given as
/// vertex lists (the closing edge is implied).
struct CutSystem {
    std::vector<std::vector<int>> cycles;
};

struct SeamSide {
    int piece = -1;
    int boundary_component = -1;
    std::vector<int> vertices;  // piece-local ids, aligned with the cycle order
};

/// For one cut cycle: the two boundary cycles produced. `left` is the side
/// that kept the original vertex ids (the side to the left of the directed
/// cycle), `right` the duplicated side.
struct Seam {
    SeamSide left, right;
};

struct PieceDecomposition {
    std::vector<TriangulatedSurface> pieces;           // ordered by least original vertex
    std::vector<std::vector<int>> piece_to_original;   // local vertex -> original vertex
    std::vector<Seam> seams;                           // per cut cycle
};

inline void validate_cut_system(const TriangulatedSurface& s, const CutSystem& cut) {
    const auto& emb = s.embedding();
    std::set<int> used;
    for (const auto& cyc : cut.cycles) {
        if (cyc.size() < 3)
            throw std::invalid_argument("cut system: cycle has fewer than 3 vertices");
        std::set<int> in_cycle(cyc.begin(), cyc.end());
        if (in_cycle.size() != cyc.size())
            throw std::invalid_argument("cut system: cycle is not embedded (repeated vertex)");
        for (int v : cyc) {
            if (v < 0 || v >= s.vertex_count())
                throw std::invalid_argument("cut system: vertex out of range");
            if (emb.on_boundary(v))
                throw std::invalid_argument("cut system: cycle touches the boundary at vertex " +
                                            std::to_string(v));
            if (!used.insert(v).second)
                throw std::invalid_argument("cut system: cycles are not disjoint at vertex " +
                                            std::to_string(v));
        }
        for (size_t i = 0; i < cyc.size(); ++i) {
            if (emb.edge_index(cyc[i], cyc[(i + 1) % cyc.size()]) < 0)
                throw std::invalid_argument("cut system: cycle edge " + std::to_string(cyc[i]) +
                                            "-" + std::to_string(cyc[(i + 1) % cyc.size()]) +
                                            " is not in the 1-skeleton");
        }
    }
}

/// Cuts the surface along every cycle of the system. Cycle vertices and
/// edges are duplicated; the side to the left of each directed cycle keeps
/// the original ids. Total Euler characteristic is preserved.
inline PieceDecomposition cut_along(const TriangulatedSurface& s, const CutSystem& cut) {
    validate_cut_system(s, cut);
    const auto& emb = s.embedding();
    int n = s.vertex_count();

    // Duplicate ids, assigned in cycle order.
    std::map<int, int> dup;     // original cut vertex -> duplicate id
    std::vector<int> dup_origin;                   // duplicate id - n -> original
    std::map<int, std::pair<int, int>> cycle_pos;  // vertex -> (cycle, index)
    int next_id = n;
    for (size_t c = 0; c < cut.cycles.size(); ++c)
        for (size_t i = 0; i < cut.cycles[c].size(); ++i) {
            dup[cut.cycles[c][i]] = next_id++;
            dup_origin.push_back(cut.cycles[c][i]);
            cycle_pos[cut.cycles[c][i]] = {static_cast<int>(c), static_cast<int>(i)};
        }

    // For each cut vertex: triangles in the fan to the left of prev->v->next
    // keep v. The corner between rotation-consecutive neighbors (x, sigma(x))
    // is the triangle containing the directed edge (v, x); the left fan runs
    // counterclockwise from `next` to `prev`.
    std::map<int64_t, bool> corner_left;  // (triangle, vertex) -> keeps original?
    auto corner_key = [&](int t, int v) { return static_cast<int64_t>(t) * n + v; };
    for (const auto& [v, cp] : cycle_pos) {
        const auto& cyc = cut.cycles[cp.first];
        size_t m = cyc.size();
        int prev = cyc[(cp.second + m - 1) % m];
        int next = cyc[(cp.second + 1) % m];
        const auto& rot = emb.rotation(v);
        size_t start = 0;
        while (rot[start].first != next) ++start;
        bool left = true;
        for (size_t i = 0; i < rot.size(); ++i) {
            int x = rot[(start + i) % rot.size()].first;
            if (i > 0 && x == prev) left = false;
            auto [face, pos] = emb.directed_edge_location(v, x);
            corner_left[corner_key(face, v)] = left;
        }
    }

    std::vector<std::array<int, 3>> new_tris(s.triangles());
    for (size_t t = 0; t < new_tris.size(); ++t)
        for (int& v : new_tris[t]) {
            auto it = corner_left.find(corner_key(static_cast<int>(t), v));
            if (it != corner_left.end() && !it->second) v = dup.at(v);
        }

    // Connected components over triangles sharing an edge.
    int total = next_id;
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : new_tris)
        for (int i = 0; i < 3; ++i) parent[find(t[i])] = find(t[(i + 1) % 3]);

    auto original_of = [&](int v) { return v < n ? v : dup_origin[v - n]; };

    // Group vertices by component root; order pieces by least original vertex.
    std::map<int, std::vector<int>> comp_vertices;
    for (int v = 0; v < total; ++v) comp_vertices[find(v)].push_back(v);
    std::vector<std::pair<int, std::vector<int>>> comps;  // (least original, vertices)
    for (auto& [root, verts] : comp_vertices) {
        int least = total;
        for (int v : verts) least = std::min(least, original_of(v));
        comps.push_back({least, std::move(verts)});
    }
    std::sort(comps.begin(), comps.end());

    PieceDecomposition out;
    std::vector<std::pair<int, int>> where(total, {-1, -1});  // cut id -> (piece, local)
    for (auto& [least, verts] : comps) {
        int p = static_cast<int>(out.pieces.size());
        std::vector<int> to_orig;
        std::map<int, int> local;
        for (int v : verts) {
            local[v] = static_cast<int>(to_orig.size());
            where[v] = {p, local[v]};
            to_orig.push_back(original_of(v));
        }
        std::vector<std::array<int, 3>> tris;
        for (const auto& t : new_tris)
            if (local.count(t[0]))
                tris.push_back({local.at(t[0]), local.at(t[1]), local.at(t[2])});
        out.pieces.emplace_back(static_cast<int>(to_orig.size()), std::move(tris));
        out.piece_to_original.push_back(std::move(to_orig));
    }

    // Seams: locate each side's boundary component in its piece.
    for (const auto& cyc : cut.cycles) {
        Seam seam;
        for (int side = 0; side < 2; ++side) {
            SeamSide ss;
            std::vector<int> ids;
            for (int v : cyc) ids.push_back(side == 0 ? v : dup.at(v));
            ss.piece = where[ids[0]].first;
            for (int id : ids) {
                if (where[id].first != ss.piece)
                    throw std::runtime_error("cut_along: seam side spans two pieces");
                ss.vertices.push_back(where[id].second);
            }
            const auto& bcs = out.pieces[ss.piece].boundary_components();
            std::set<int> want(ss.vertices.begin(), ss.vertices.end());
            for (size_t b = 0; b < bcs.size(); ++b)
                if (std::set<int>(bcs[b].begin(), bcs[b].end()) == want) {
                    ss.boundary_component = static_cast<int>(b);
                    break;
                }
            if (ss.boundary_component < 0)
                throw std::runtime_error("cut_along: seam does not match a boundary component");
            (side == 0 ? seam.left : seam.right) = std::move(ss);
        }
        out.seams.push_back(std::move(seam));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pants-cut validation
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct PantsCutReport {
    std::vector<CheckResult> checks;
    bool ok = true;
    std::string first_failure;
    std::optional<PieceDecomposition> decomposition;

    void add(const std::string& name, bool pass, const std::string& detail = "") {
        checks.push_back({name, pass, detail});
        if (!pass && ok) {
            ok = false;
            first_failure = name;
        }
    }
};

/// Checks that a cut system realizes the genus >= 2 decomposition of the
/// closed-surface construction: m+1 cycles cutting into exactly two genus-0
/// pieces with m+1 boundary components each, boundary components in
/// bijection with the cycles. Failures are reported, not thrown.
inline PantsCutReport validate_pants_cut(const TriangulatedSurface& s, const CutSystem& cut) {
    PantsCutReport r;
    r.add("surface closed", s.is_closed());
    if (!r.ok) return r;
    r.add("surface connected", s.is_connected());
    if (!r.ok) return r;
    int m = s.genus();
    r.add("genus >= 2", m >= 2, "genus = " + std::to_string(m));
    if (!r.ok) return r;
    r.add("cycle count = m+1",
          cut.cycles.size() == static_cast<size_t>(m + 1),
          "expected " + std::to_string(m + 1) + ", got " + std::to_string(cut.cycles.size()));
    if (!r.ok) return r;
    PieceDecomposition dec;
    try {
        dec = cut_along(s, cut);
        r.add("cut system valid", true);
    } catch (const std::exception& e) {
        r.add("cut system valid", false, e.what());
        return r;
    }
    r.add("piece count = 2", dec.pieces.size() == 2,
          "got " + std::to_string(dec.pieces.size()));
    if (!r.ok) return r;
    for (int p = 0; p < 2; ++p) {
        const auto& piece = dec.pieces[p];
        r.add("piece " + std::to_string(p) + " genus 0", piece.genus() == 0,
              "genus = " + std::to_string(piece.genus()));
        if (!r.ok) return r;
        r.add("piece " + std::to_string(p) + " boundary count = m+1",
              piece.boundary_components().size() == static_cast<size_t>(m + 1),
              "got " + std::to_string(piece.boundary_components().size()));
        if (!r.ok) return r;
    }
    // Each piece must see every cycle exactly once.
    bool bijective = true;
    for (int p = 0; p < 2; ++p) {
        std::set<int> comps;
        for (const auto& seam : dec.seams) {
            if (seam.left.piece == p) comps.insert(seam.left.boundary_component);
            if (seam.right.piece == p) comps.insert(seam.right.boundary_component);
        }
        if (comps.size() != cut.cycles.size()) bijective = false;
    }
    r.add("boundary components in bijection with cycles", bijective);
    if (r.ok) r.decomposition = std::move(dec);
    return r;
}

// ---------------------------------------------------------------------------
// Subdivision
// ---------------------------------------------------------------------------

enum class SubdivisionScheme { EdgeMidpoint, Barycentric };

/// One round of refinement. New vertices are indexed deterministically:
/// edge midpoints at V + edge_id, barycentric face centers at V + E + face_id.
inline TriangulatedSurface subdivide_once(const TriangulatedSurface& s,
                                          SubdivisionScheme scheme) {
    const auto& emb = s.embedding();
    int n = s.vertex_count();
    auto mid = [&](int u, int v) { return n + emb.edge_index(u, v); };
    std::vector<std::array<int, 3>> tris;
    if (scheme == SubdivisionScheme::EdgeMidpoint) {
        for (const auto& t : s.triangles()) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            tris.push_back({t[0], ab, ca});
            tris.push_back({t[1], bc, ab});
            tris.push_back({t[2], ca, bc});
            tris.push_back({ab, bc, ca});
        }
        return TriangulatedSurface(n + emb.edge_count(), std::move(tris));
    }
    int center0 = n + emb.edge_count();
    for (size_t f = 0; f < s.triangles().size(); ++f) {
        const auto& t = s.triangles()[f];
        int z = center0 + static_cast<int>(f);
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            tris.push_back({a, mid(a, b), z});
            tris.push_back({mid(a, b), b, z});
        }
    }
    return TriangulatedSurface(center0 + s.triangle_count(), std::move(tris));
}

inline TriangulatedSurface subdivide(const TriangulatedSurface& s, SubdivisionScheme scheme,
                                     int rounds) {
    if (rounds < 0) throw std::invalid_argument("subdivide: rounds must be >= 0");
    TriangulatedSurface out = s;
    for (int i = 0; i < rounds; ++i) out = subdivide_once(out, scheme);
    return out;
}

// ---------------------------------------------------------------------------
// Combinatorial isomorphism
// ---------------------------------------------------------------------------

struct IsomorphismReport {
    bool isomorphic = false;
    bool orientation_reversing = false;
    std::string first_mismatch;
    std::vector<std::pair<int, int>> boundary_pairing;  // induced P1 comp -> P2 comp
};

/// Verifies that phi maps triangles to triangles (up to cyclic rotation;
/// orientation reversal is allowed and reported) and carries boundary
/// components onto boundary components, honoring `required_pairing` when
/// given.
inline IsomorphismReport check_isomorphism(
    const TriangulatedSurface& p1, const TriangulatedSurface& p2, const std::vector<int>& phi,
    const std::vector<std::pair<int, int>>& required_pairing = {}) {
    IsomorphismReport r;
    auto fail = [&](const std::string& why) {
        r.first_mismatch = why;
        return r;
    };
    if (static_cast<int>(phi.size()) != p1.vertex_count())
        return fail("vertex map is not total on P1");
    if (p1.vertex_count() != p2.vertex_count()) return fail("vertex counts differ");
    if (p1.triangle_count() != p2.triangle_count()) return fail("triangle counts differ");
    std::vector<int> seen(p2.vertex_count(), 0);
    for (int v : phi) {
        if (v < 0 || v >= p2.vertex_count()) return fail("vertex map image out of range");
        if (seen[v]++) return fail("vertex map is not injective");
    }

    auto canon = [](std::array<int, 3> t) {
        while (!(t[0] < t[1] && t[0] < t[2])) t = {t[1], t[2], t[0]};
        return t;
    };
    std::set<std::array<int, 3>> target;
    for (const auto& t : p2.triangles()) target.insert(canon(t));
    int preserving = 0, reversing = 0;
    for (const auto& t : p1.triangles()) {
        std::array<int, 3> img = {phi[t[0]], phi[t[1]], phi[t[2]]};
        if (target.count(canon(img))) {
            ++preserving;
        } else if (target.count(canon({img[0], img[2], img[1]}))) {
            ++reversing;
        } else {
            return fail("triangle " + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                        std::to_string(t[2]) + " has no image triangle");
        }
    }
    if (preserving && reversing) return fail("mixed orientation behavior");
    r.orientation_reversing = reversing > 0;

    // Boundary components map onto boundary components.
    const auto& b1 = p1.boundary_components();
    const auto& b2 = p2.boundary_components();
    if (b1.size() != b2.size()) return fail("boundary component counts differ");
    std::map<int, int> comp_of;  // p2 vertex -> component
    for (size_t j = 0; j < b2.size(); ++j)
        for (int v : b2[j]) comp_of[v] = static_cast<int>(j);
    for (size_t i = 0; i < b1.size(); ++i) {
        std::set<int> image;
        for (int v : b1[i]) {
            auto it = comp_of.find(phi[v]);
            if (it == comp_of.end())
                return fail("boundary vertex maps to interior vertex");
            image.insert(it->second);
        }
        if (image.size() != 1)
            return fail("boundary component " + std::to_string(i) + " is split by the map");
        int j = *image.begin();
        if (b1[i].size() != b2[j].size())
            return fail("boundary component lengths differ");
        r.boundary_pairing.push_back({static_cast<int>(i), j});
    }
    for (const auto& req : required_pairing) {
        bool found = false;
        for (const auto& got : r.boundary_pairing) found |= got == req;
        if (!found)
            return fail("required boundary pairing (" + std::to_string(req.first) + "," +
                        std::to_string(req.second) + ") not realized");
    }
    r.isomorphic = true;
    return r;
}

/// Brute-force isomorphism search by seed-and-propagate over anchor edges.
/// Only offered for small pieces; supply the map explicitly beyond the cap.
inline std::optional<std::pair<std::vector<int>, bool>> find_isomorphism(
    const TriangulatedSurface& p1, const TriangulatedSurface& p2,
    const std::vector<std::pair<int, int>>& required_pairing = {}, int max_triangles = 200) {
    if (p1.triangle_count() > max_triangles)
        throw std::invalid_argument(
            "find_isomorphism: piece exceeds " + std::to_string(max_triangles) +
            " triangles; supply the isomorphism explicitly");
    if (p1.triangle_count() != p2.triangle_count() || p1.vertex_count() != p2.vertex_count())
        return std::nullopt;

    // Directed edge -> (triangle, third vertex); boundary-only directions map
    // to (-1, -1).
    auto build_lookup = [](const TriangulatedSurface& s) {
        std::map<std::pair<int, int>, std::pair<int, int>> lut;
        const auto& ts = s.triangles();
        for (size_t t = 0; t < ts.size(); ++t)
            for (int i = 0; i < 3; ++i)
                lut[{ts[t][i], ts[t][(i + 1) % 3]}] = {static_cast<int>(t), ts[t][(i + 2) % 3]};
        return lut;
    };
    auto lut1 = build_lookup(p1), lut2 = build_lookup(p2);

    // Anchor: a boundary directed edge of P1 when there is boundary, else the
    // least directed triangle edge.
    std::pair<int, int> anchor;
    if (!p1.boundary_components().empty()) {
        const auto& b = p1.boundary_components()[0];
        anchor = {b[0], b[1]};
    } else {
        anchor = lut1.begin()->first;
    }

    std::vector<std::pair<int, int>> seeds;
    if (!p2.boundary_components().empty()) {
        for (const auto& b : p2.boundary_components())
            for (size_t i = 0; i < b.size(); ++i) {
                seeds.push_back({b[i], b[(i + 1) % b.size()]});
                seeds.push_back({b[(i + 1) % b.size()], b[i]});
            }
    } else {
        for (const auto& [de, unused] : lut2) seeds.push_back(de);
    }

    for (bool reversing : {false, true}) {
        for (const auto& seed : seeds) {
            std::vector<int> phi(p1.vertex_count(), -1);
            std::vector<char> img_used(p2.vertex_count(), 0);
            auto assign = [&](int a, int x) {
                if (phi[a] == x) return true;
                if (phi[a] != -1 || x < 0 || img_used[x]) return false;
                phi[a] = x;
                img_used[x] = 1;
                return true;
            };
            if (!assign(anchor.first, seed.first) || !assign(anchor.second, seed.second))
                continue;
            std::vector<std::pair<int, int>> queue{anchor, {anchor.second, anchor.first}};
            std::set<std::pair<int, int>> visited;
            bool ok = true;
            while (ok && !queue.empty()) {
                auto [a, b] = queue.back();
                queue.pop_back();
                if (!visited.insert({a, b}).second) continue;
                auto it1 = lut1.find({a, b});
                if (it1 == lut1.end()) continue;  // boundary side in P1
                std::pair<int, int> img =
                    reversing ? std::pair<int, int>{phi[b], phi[a]}
                              : std::pair<int, int>{phi[a], phi[b]};
                auto it2 = lut2.find(img);
                if (it2 == lut2.end()) {
                    ok = false;
                    break;
                }
                int c = it1->second.second;
                if (!assign(c, it2->second.second)) {
                    ok = false;
                    break;
                }
                queue.push_back({b, c});
                queue.push_back({c, a});
                queue.push_back({b, a});
            }
            if (!ok) continue;
            bool total = true;
            for (int v : phi) total &= v >= 0;
            if (!total) continue;
            auto rep = check_isomorphism(p1, p2, phi, required_pairing);
            if (rep.isomorphic && rep.orientation_reversing == reversing)
                return std::make_pair(phi, reversing);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Doubling
// ---------------------------------------------------------------------------

struct DoubleResult {
    TriangulatedSurface surface;     // closed double
    CutSystem seam;                  // the original boundary cycles
    std::vector<int> mirror_map;     // involution on the doubled vertex set
};

/// Glues a mirror copy of the surface along its full boundary. Interior
/// vertices of the mirror get ids V + rank (in original order); boundary
/// vertices are shared. Cutting the double along the seam recovers two
/// pieces isomorphic under the mirror map (orientation-reversing).
inline DoubleResult double_surface(const TriangulatedSurface& s) {
    if (s.is_closed()) throw std::invalid_argument("double_surface: surface is already closed");
    // An interior edge with both endpoints on the boundary would coincide
    // with its mirror copy as a vertex pair, so the double would not be a
    // simplicial surface. One barycentric round always removes such edges.
    for (const auto& e : s.embedding().edges()) {
        bool boundary_edge = s.embedding().directed_edge_location(e.a, e.b).first >=
                                 s.triangle_count() ||
                             s.embedding().directed_edge_location(e.b, e.a).first >=
                                 s.triangle_count();
        if (!boundary_edge && s.embedding().on_boundary(e.a) && s.embedding().on_boundary(e.b))
            throw std::invalid_argument(
                "double_surface: interior edge " + std::to_string(e.a) + "-" +
                std::to_string(e.b) +
                " has both endpoints on the boundary; subdivide first (barycentric)");
    }
    int n = s.vertex_count();
    std::vector<int> mirror(n, -1);
    int next = n;
    for (int v = 0; v < n; ++v)
        mirror[v] = s.embedding().on_boundary(v) ? v : next++;
    std::vector<std::array<int, 3>> tris(s.triangles());
    for (const auto& t : s.triangles())
        tris.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});
    std::vector<int> involution(next);
    for (int v = 0; v < n; ++v) {
        involution[v] = mirror[v];
        involution[mirror[v]] = v;
    }
    CutSystem seam;
    for (const auto& b : s.boundary_components()) seam.cycles.push_back(b);
    return {TriangulatedSurface(next, std::move(tris)), std::move(seam), std::move(involution)};
}

}  // namespace rectflow
