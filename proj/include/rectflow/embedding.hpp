#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rectflow {

/// Undirected edge as a normalized vertex pair (a < b).
struct EdgeKey {
    int a = -1, b = -1;
    EdgeKey() = default;
    EdgeKey(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}
    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// An oriented 2-cell embedding of a graph: interior faces plus hole faces
/// (one per boundary component), each given as a closed vertex walk. Every
/// directed edge must appear exactly once over all walks, which makes the
/// rotation system at each vertex well defined.
///
/// Interior faces walk with the face on the left of each directed edge; a
/// hole walk therefore traverses its boundary component with the surface on
/// the right. Faces need not be triangles: the harmonic/tiling machinery
/// only uses walks and rotations, which admits quad-grid test fixtures.
class Embedding {
public:
    Embedding(int vertex_count,
              std::vector<std::vector<int>> faces,
              std::vector<std::vector<int>> holes)
        : n_(vertex_count), faces_(std::move(faces)), holes_(std::move(holes)) {
        build();
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int face_count() const { return static_cast<int>(faces_.size()); }
    int hole_count() const { return static_cast<int>(holes_.size()); }

    const std::vector<std::vector<int>>& faces() const { return faces_; }
    const std::vector<std::vector<int>>& holes() const { return holes_; }

    const std::vector<EdgeKey>& edges() const { return edges_; }

    int edge_index(int u, int v) const {
        auto it = edge_ids_.find(EdgeKey(u, v));
        return it == edge_ids_.end() ? -1 : it->second;
    }

    /// Neighbors of v with edge ids, in counterclockwise rotation order.
    const std::vector<std::pair<int, int>>& rotation(int v) const { return rotation_[v]; }

    /// Index of the hole whose walk contains v, or -1 for interior vertices.
    int hole_of_vertex(int v) const { return hole_of_vertex_[v]; }

    bool on_boundary(int v) const { return hole_of_vertex_[v] >= 0; }

    /// All walks, interior faces first, then holes; walk id f refers into
    /// this sequence. Used by the level-curve tracer.
    int walk_count() const { return face_count() + hole_count(); }
    const std::vector<int>& walk(int f) const {
        return f < face_count() ? faces_[f] : holes_[f - face_count()];
    }
    bool walk_is_hole(int f) const { return f >= face_count(); }

    /// Walk id and position of the directed edge u->v; throws if absent.
    std::pair<int, int> directed_edge_location(int u, int v) const {
        auto it = dir_loc_.find(dir_key(u, v));
        if (it == dir_loc_.end())
            throw std::invalid_argument("embedding: directed edge not present: " +
                                        std::to_string(u) + "->" + std::to_string(v));
        return it->second;
    }

private:
    int64_t dir_key(int u, int v) const { return static_cast<int64_t>(u) * n_ + v; }

    void build() {
        if (n_ <= 0) throw std::invalid_argument("embedding: vertex count must be positive");
        // Register directed edges; each must appear exactly once.
        for (int f = 0; f < walk_count(); ++f) {
            const auto& w = walk(f);
            if (w.size() < 2) throw std::invalid_argument("embedding: walk too short");
            for (size_t i = 0; i < w.size(); ++i) {
                int u = w[i], v = w[(i + 1) % w.size()];
                if (u < 0 || u >= n_ || v < 0 || v >= n_)
                    throw std::invalid_argument("embedding: vertex index out of range");
                if (u == v) throw std::invalid_argument("embedding: degenerate edge");
                auto [it, fresh] = dir_loc_.try_emplace(dir_key(u, v), f, static_cast<int>(i));
                if (!fresh)
                    throw std::invalid_argument("embedding: directed edge used twice: " +
                                                std::to_string(u) + "->" + std::to_string(v));
                edge_ids_.try_emplace(EdgeKey(u, v), 0);
            }
        }
        // Every undirected edge needs both directions (no free boundary: holes
        // are explicit walks).
        for (const auto& [k, unused] : edge_ids_) {
            if (!dir_loc_.count(dir_key(k.a, k.b)) || !dir_loc_.count(dir_key(k.b, k.a)))
                throw std::invalid_argument("embedding: edge " + std::to_string(k.a) + "-" +
                                            std::to_string(k.b) + " is missing one side");
        }
        edges_.reserve(edge_ids_.size());
        for (auto& [k, id] : edge_ids_) {
            id = static_cast<int>(edges_.size());
            edges_.push_back(k);
        }

        // Rotation at v: each walk corner (p -> v -> s) contributes sigma(s) = p,
        // i.e. going counterclockwise the edge (v,s) is followed by (v,p).
        std::vector<std::map<int, int>> sigma(n_);
        for (int f = 0; f < walk_count(); ++f) {
            const auto& w = walk(f);
            size_t m = w.size();
            for (size_t i = 0; i < m; ++i) {
                int p = w[(i + m - 1) % m], v = w[i], s = w[(i + 1) % m];
                auto [it, fresh] = sigma[v].try_emplace(s, p);
                if (!fresh)
                    throw std::invalid_argument("embedding: rotation conflict at vertex " +
                                                std::to_string(v));
            }
        }
        rotation_.assign(n_, {});
        for (int v = 0; v < n_; ++v) {
            if (sigma[v].empty())
                throw std::invalid_argument("embedding: isolated vertex " + std::to_string(v));
            int start = sigma[v].begin()->first;
            int cur = start;
            do {
                rotation_[v].push_back({cur, 0});
                auto it = sigma[v].find(cur);
                if (it == sigma[v].end())
                    throw std::invalid_argument("embedding: open rotation at vertex " +
                                                std::to_string(v));
                cur = it->second;
            } while (cur != start && rotation_[v].size() <= sigma[v].size());
            if (cur != start || rotation_[v].size() != sigma[v].size())
                throw std::invalid_argument(
                    "embedding: link of vertex " + std::to_string(v) +
                    " is not a single cycle (not a surface)");
            for (auto& [nb, eid] : rotation_[v]) eid = edge_index(v, nb);
        }

        // A vertex may sit on at most one hole, and only once (manifold
        // boundary, embedded boundary cycles).
        hole_of_vertex_.assign(n_, -1);
        for (int h = 0; h < hole_count(); ++h) {
            for (int v : holes_[h]) {
                if (hole_of_vertex_[v] >= 0)
                    throw std::invalid_argument("embedding: vertex " + std::to_string(v) +
                                                " lies on two boundary corners");
                hole_of_vertex_[v] = h;
            }
        }
    }

    int n_;
    std::vector<std::vector<int>> faces_;
    std::vector<std::vector<int>> holes_;
    std::vector<EdgeKey> edges_;
    std::map<EdgeKey, int> edge_ids_;
    std::map<int64_t, std::pair<int, int>> dir_loc_;
    std::vector<std::vector<std::pair<int, int>>> rotation_;
    std::vector<int> hole_of_vertex_;
};

}  // namespace rectflow
