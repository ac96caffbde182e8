#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rectflow/flat_complex.hpp"
#include "rectflow/network.hpp"
#include "rectflow/numeric.hpp"

namespace rectflow {

/// Edges oriented from higher to lower potential, carrying flux c|dg|.
struct FluxField {
    std::vector<int> high_end;          // higher-potential endpoint, -1 when degenerate
    std::vector<double> flux;           // per edge
    std::vector<int> degenerate_edges;  // zero potential difference
    double max_kirchhoff_residual = 0;  // max interior |in - out|
};

/// One component circle of a level band: active edges in cyclic order with
/// conjugate offsets (prefix sums of flux, anchored at the least edge id).
struct BandCircle {
    std::vector<int> edges;
    std::vector<double> start;
    double circumference = 0;
};

struct Band {
    double t_lo = 0, t_hi = 0;
    std::vector<BandCircle> circles;
};

struct LevelBands {
    std::vector<double> levels;  // sorted distinct potential values
    std::vector<Band> bands;
};

struct TilingResult {
    FlatComplex complex;
    std::vector<int> tile_of_edge;  // -1 for degenerate edges
    FluxField flux;
    LevelBands bands;
    int e1_cuff = -1;               // cuff index at level k
    std::vector<int> e2_cuffs;      // cuff index per E2 component
    std::vector<std::string> diagnostics;
};

inline FluxField flux_field(const HarmonicSolution& sol) {
    const auto& net = sol.network();
    const auto& emb = net.embedding();
    FluxField f;
    f.high_end.assign(emb.edge_count(), -1);
    f.flux.assign(emb.edge_count(), 0.0);
    for (int e = 0; e < emb.edge_count(); ++e) {
        int u = emb.edges()[e].a, v = emb.edges()[e].b;
        double d = sol.g(u) - sol.g(v);
        if (d == 0.0) {
            f.degenerate_edges.push_back(e);
            continue;
        }
        f.high_end[e] = d > 0 ? u : v;
        f.flux[e] = net.conductance(e) * std::abs(d);
    }
    for (int v : net.interior_vertices()) {
        double balance = 0;
        for (const auto& [u, e] : emb.rotation(v))
            if (f.high_end[e] == v)
                balance -= f.flux[e];
            else if (f.high_end[e] == u)
                balance += f.flux[e];
        f.max_kirchhoff_residual = std::max(f.max_kirchhoff_residual, std::abs(balance));
    }
    double bound = 1e-9 * sol.k() * net.conductance_sum();
    if (f.max_kirchhoff_residual > bound)
        throw std::runtime_error("flux field: Kirchhoff balance violated (residual " +
                                 format_number(f.max_kirchhoff_residual) + ")");
    return f;
}

/// Knobs for the tiling construction.
struct TilingOptions {
    /// Potential values closer than this (relative to k) are treated as one
    /// level. Exact ties stay exact; the tolerance only absorbs solver
    /// round-off, which otherwise produces micro-bands of height ~1e-16.
    double level_snap_rel = 1e-12;
};

namespace detail {

/// Shared machinery for the tiling construction. Works on the 1-skeleton
/// plus rotation system only, so quadrilateral grid fixtures are admitted;
/// level curves require faces to contribute at most two crossings per band,
/// which is automatic for triangulations.
class TilingBuilder {
public:
    TilingBuilder(const HarmonicSolution& sol, const TilingOptions& opt = {})
        : sol_(sol), net_(sol.network()), emb_(net_.embedding()), opt_(opt) {
        build_levels();
        build_flux();
    }

    const std::vector<double>& levels() const { return levels_; }

    LevelBands build_bands() {
        LevelBands out;
        out.levels = levels_;
        for (int j = 0; j + 1 < static_cast<int>(levels_.size()); ++j)
            out.bands.push_back(band(j));
        return out;
    }

    TilingResult build_tiling();

private:
    // --- levels ----------------------------------------------------------

    void build_levels() {
        double snap = opt_.level_snap_rel * sol_.k();
        std::vector<double> values = sol_.potentials();
        std::sort(values.begin(), values.end());
        for (double v : values)
            if (levels_.empty() || v - levels_.back() > snap) levels_.push_back(v);
        lvl_.resize(emb_.vertex_count());
        for (int v = 0; v < emb_.vertex_count(); ++v) {
            auto it = std::upper_bound(levels_.begin(), levels_.end(), sol_.g(v));
            lvl_[v] = static_cast<int>(it - levels_.begin()) - 1;
        }
        lo_.assign(emb_.edge_count(), 0);
        hi_.assign(emb_.edge_count(), 0);
        for (int e = 0; e < emb_.edge_count(); ++e) {
            lo_[e] = std::min(lvl_[emb_.edges()[e].a], lvl_[emb_.edges()[e].b]);
            hi_[e] = std::max(lvl_[emb_.edges()[e].a], lvl_[emb_.edges()[e].b]);
        }
    }

    /// Flux from the snapped levels, so widths and heights agree with the
    /// band geometry exactly; edges inside one level are degenerate.
    void build_flux() {
        flux_.high_end.assign(emb_.edge_count(), -1);
        flux_.flux.assign(emb_.edge_count(), 0.0);
        for (int e = 0; e < emb_.edge_count(); ++e) {
            int a = emb_.edges()[e].a, b = emb_.edges()[e].b;
            if (lvl_[a] == lvl_[b]) {
                flux_.degenerate_edges.push_back(e);
                continue;
            }
            flux_.high_end[e] = lvl_[a] > lvl_[b] ? a : b;
            flux_.flux[e] =
                net_.conductance(e) * (levels_[hi_[e]] - levels_[lo_[e]]);
        }
        for (int v : net_.interior_vertices()) {
            double balance = 0;
            for (const auto& [u, e] : emb_.rotation(v))
                if (flux_.high_end[e] == v)
                    balance -= flux_.flux[e];
                else if (flux_.high_end[e] == u)
                    balance += flux_.flux[e];
            flux_.max_kirchhoff_residual =
                std::max(flux_.max_kirchhoff_residual, std::abs(balance));
        }
        double bound = 1e-9 * sol_.k() * net_.conductance_sum();
        if (flux_.max_kirchhoff_residual > bound)
            throw std::runtime_error("tiling: Kirchhoff balance violated (residual " +
                                     format_number(flux_.max_kirchhoff_residual) + ")");
    }

    // --- band circles ------------------------------------------------------

    bool crossing(int e, int j) const { return lo_[e] <= j && hi_[e] >= j + 1; }

    /// The level curve leaves crossing edge e (entered at its high end u)
    /// through the face left of u->v and exits that face through its other
    /// crossing edge.
    std::pair<int, int> next_state(int u, int v, int j) const {
        auto [f, pos] = emb_.directed_edge_location(u, v);
        const auto& w = emb_.walk(f);
        int n = static_cast<int>(w.size());
        for (int step = 1; step < n; ++step) {
            int x = w[(pos + step) % n], y = w[(pos + step + 1) % n];
            int e = emb_.edge_index(x, y);
            if (!crossing(e, j)) continue;
            if (lvl_[x] > j || lvl_[y] <= j)
                throw std::runtime_error(
                    "level curve: ambiguous crossing order in a non-triangular face");
            return {y, x};
        }
        throw std::runtime_error("level curve: open face walk");
    }

    Band band(int j) {
        Band b;
        b.t_lo = levels_[j];
        b.t_hi = levels_[j + 1];
        std::set<int> todo;
        for (int e = 0; e < emb_.edge_count(); ++e)
            if (crossing(e, j)) todo.insert(e);
        while (!todo.empty()) {
            int e0 = *todo.begin();
            BandCircle c;
            int u = lvl_[emb_.edges()[e0].a] > j ? emb_.edges()[e0].a : emb_.edges()[e0].b;
            int v = emb_.edges()[e0].a == u ? emb_.edges()[e0].b : emb_.edges()[e0].a;
            do {
                int e = emb_.edge_index(u, v);
                c.edges.push_back(e);
                todo.erase(e);
                auto [nu, nv] = next_state(u, v, j);
                u = nu;
                v = nv;
            } while (emb_.edge_index(u, v) != e0);
            // anchor at the least edge id
            size_t a = std::min_element(c.edges.begin(), c.edges.end()) - c.edges.begin();
            std::rotate(c.edges.begin(), c.edges.begin() + a, c.edges.end());
            double pos = 0;
            for (int e : c.edges) {
                c.start.push_back(pos);
                pos += flux_.flux[e];
            }
            c.circumference = pos;
            b.circles.push_back(std::move(c));
        }
        // deterministic order: by least contained edge id (= first edge)
        std::sort(b.circles.begin(), b.circles.end(),
                  [](const BandCircle& x, const BandCircle& y) {
                      return x.edges[0] < y.edges[0];
                  });
        return b;
    }

    // --- conjugate frames at one level -------------------------------------

    struct Frame {
        std::map<int, double> x;  // face -> conjugate value
        double period = 0;        // 0 when acyclic
        std::vector<int> members;
    };

    /// Faces around vertex v in rotation order (one per corner, holes
    /// included for boundary vertices).
    std::vector<int> corner_faces(int v) const {
        std::vector<int> out;
        for (const auto& [u, e] : emb_.rotation(v))
            out.push_back(emb_.directed_edge_location(v, u).first);
        return out;
    }

    /// Crossing an edge from the left of its down-flow to the right raises
    /// the conjugate by the flux. Flat edges carry 0.
    double increment(int from_face, int to_face, int e) const {
        if (flux_.high_end[e] < 0) return 0.0;
        int u = flux_.high_end[e];
        int v = emb_.edges()[e].a == u ? emb_.edges()[e].b : emb_.edges()[e].a;
        int left = emb_.directed_edge_location(u, v).first;
        (void)from_face;
        return to_face == left ? -flux_.flux[e] : flux_.flux[e];
    }

    /// Builds the local conjugate frame on the corner faces of one flat
    /// cluster of level-j vertices. Boundary clusters come out cyclic with
    /// period equal to the cuff length.
    Frame cluster_frame(const std::vector<int>& members, double tol) {
        Frame fr;
        fr.members = members;
        std::set<int> member_set(members.begin(), members.end());
        // traversal steps: around each member, consecutive corner faces
        // joined by the shared incident edge (skipping hole faces)
        std::map<int, std::vector<std::pair<int, int>>> steps;  // face -> (face, edge)
        for (int v : members) {
            const auto& rot = emb_.rotation(v);
            auto faces = corner_faces(v);
            int d = static_cast<int>(rot.size());
            for (int i = 0; i < d; ++i) {
                int f_prev = faces[(i + d - 1) % d];  // corner ending at edge i
                int f_next = faces[i];                // corner starting at edge i
                int e = rot[i].second;
                if (emb_.walk_is_hole(f_prev) || emb_.walk_is_hole(f_next)) continue;
                steps[f_prev].push_back({f_next, e});
                steps[f_next].push_back({f_prev, e});
            }
        }
        if (steps.empty()) {
            // single corner face fan (e.g. a doubled-path endpoint)
            int f = corner_faces(members[0])[0];
            fr.x[f] = 0;
            return fr;
        }
        int root = steps.begin()->first;
        fr.x[root] = 0;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (const auto& [g, e] : steps.at(f)) {
                double val = fr.x.at(f) + increment(f, g, e);
                auto it = fr.x.find(g);
                if (it == fr.x.end()) {
                    fr.x[g] = val;
                    stack.push_back(g);
                } else {
                    double diff = std::abs(val - it->second);
                    if (diff > tol) {
                        if (fr.period == 0)
                            fr.period = diff;
                        else if (std::abs(diff - fr.period) > tol &&
                                 std::abs(wrap_symmetric(diff, fr.period)) > tol)
                            throw std::runtime_error(
                                "conjugate frame: inconsistent periods at a level cluster");
                    }
                }
            }
        }
        // guard against level curves through non-triangular faces that touch
        // two non-adjacent cluster vertices (ambiguous saddle resolution)
        std::map<int, std::vector<int>> face_members;
        for (int v : members)
            for (int f : corner_faces(v))
                if (!emb_.walk_is_hole(f)) face_members[f].push_back(v);
        for (auto& [f, vs] : face_members) {
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
            for (size_t i = 0; i < vs.size(); ++i)
                for (size_t k2 = i + 1; k2 < vs.size(); ++k2) {
                    int e = emb_.edge_index(vs[i], vs[k2]);
                    if (e < 0 || flux_.high_end[e] >= 0)
                        throw std::runtime_error(
                            "level curve: two separated level vertices share a face "
                            "(ambiguous in a non-triangular face)");
                }
        }
        return fr;
    }

    const HarmonicSolution& sol_;
    const ConductanceNetwork& net_;
    const Embedding& emb_;
    TilingOptions opt_;
    FluxField flux_;
    std::vector<double> levels_;
    std::vector<int> lvl_;
    std::vector<int> lo_, hi_;


public:
    // exposed pieces used by build_tiling (kept public for the free functions)
    const FluxField& flux() const { return flux_; }
    int level_of(int v) const { return lvl_[v]; }
    int edge_lo(int e) const { return lo_[e]; }
    int edge_hi(int e) const { return hi_[e]; }
    Band make_band(int j) { return band(j); }
    Frame make_cluster_frame(const std::vector<int>& m, double tol) {
        return cluster_frame(m, tol);
    }
};

}  // namespace detail

inline LevelBands level_bands(const HarmonicSolution& sol, const TilingOptions& opt = {}) {
    detail::TilingBuilder b(sol, opt);
    return b.build_bands();
}

namespace detail {

struct SweepItem {
    double x0 = 0;
    double width = 0;
    bool is_top = false;
    int tile = -1;
    double param0 = 0;  // side parameter at x0
};

/// Pairs top content against bottom content along one conjugate line,
/// following gluing sheets: partners persist until one side ends, and fresh
/// intervals pair with whatever frees up at the same position.
inline void sweep_level(std::vector<SweepItem> items, double tol,
                        const std::vector<Tile>& tiles,
                        std::vector<Identification>& out,
                        std::vector<std::string>& diagnostics) {
    if (items.empty()) return;
    struct Event {
        double x;
        int item;
        bool open;
    };
    std::vector<Event> events;
    for (size_t i = 0; i < items.size(); ++i) {
        events.push_back({items[i].x0, static_cast<int>(i), true});
        events.push_back({items[i].x0 + items[i].width, static_cast<int>(i), false});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.open != b.open) return !a.open;  // closings first
        return a.item < b.item;
    });
    struct OpenPair {
        int top = -1, bot = -1;
        double x_start = 0;
    };
    std::vector<OpenPair> open;
    std::vector<int> free_tops, free_bots;
    auto emit = [&](const OpenPair& p, double x_end) {
        if (x_end - p.x_start <= tol) return;
        const auto& t = items[p.top];
        const auto& b = items[p.bot];
        Identification id;
        id.tile_a = b.tile;
        id.side_a = Side::Bottom;
        id.a0 = b.param0 + (p.x_start - b.x0);
        id.a1 = b.param0 + (x_end - b.x0);
        id.tile_b = t.tile;
        id.side_b = Side::Top;
        id.b0 = t.param0 + (p.x_start - t.x0);
        id.b1 = t.param0 + (x_end - t.x0);
        id.reversed = false;
        out.push_back(id);
    };
    size_t i = 0;
    while (i < events.size()) {
        double x = events[i].x;
        size_t group_end = i;
        while (group_end < events.size() && events[group_end].x <= x + tol) ++group_end;
        // all closings of the group first, then all openings
        for (size_t g = i; g < group_end; ++g) {
            if (events[g].open) continue;
            int it = events[g].item;
            for (size_t p = 0; p < open.size(); ++p)
                if ((items[it].is_top ? open[p].top : open[p].bot) == it) {
                    emit(open[p], x);
                    int other = items[it].is_top ? open[p].bot : open[p].top;
                    (items[other].is_top ? free_tops : free_bots).push_back(other);
                    open.erase(open.begin() + p);
                    break;
                }
        }
        for (size_t g = i; g < group_end; ++g) {
            if (!events[g].open) continue;
            int it = events[g].item;
            (items[it].is_top ? free_tops : free_bots).push_back(it);
        }
        i = group_end;
        // drop freed items that actually ended here
        auto alive = [&](int it) {
            return items[it].x0 + items[it].width > x + tol;
        };
        std::erase_if(free_tops, [&](int it) { return !alive(it); });
        std::erase_if(free_bots, [&](int it) { return !alive(it); });
        if (free_tops.size() != free_bots.size())
            throw std::runtime_error("level sweep: top and bottom content do not balance");
        if (free_tops.size() > 1) {
            diagnostics.push_back(
                "level sweep: coincident branch points at conjugate position " +
                format_number(x) + "; pairing chosen by tile order");
            std::sort(free_tops.begin(), free_tops.end());
            std::sort(free_bots.begin(), free_bots.end());
        }
        for (size_t p = 0; p < free_tops.size(); ++p)
            open.push_back({free_tops[p], free_bots[p], x});
        free_tops.clear();
        free_bots.clear();
    }
    if (!open.empty()) throw std::runtime_error("level sweep: unterminated interval");
    (void)tiles;
}

inline TilingResult tile_piece_impl(const HarmonicSolution& sol,
                                    const TilingOptions& opt) {
    TilingBuilder builder(sol, opt);
    const auto& net = sol.network();
    const auto& emb = net.embedding();
    const auto& flux = builder.flux();
    const auto& levels = builder.levels();
    int M = static_cast<int>(levels.size()) - 1;
    if (M < 1) throw std::invalid_argument("tiling: potential is constant");

    // tiles, one per flux-carrying edge
    std::vector<Tile> tiles;
    std::vector<int> tile_of_edge(emb.edge_count(), -1);
    for (int e = 0; e < emb.edge_count(); ++e) {
        if (flux.high_end[e] < 0) continue;
        Tile t;
        t.width = flux.flux[e];
        t.level_lo = levels[builder.edge_lo(e)];
        t.level_hi = levels[builder.edge_hi(e)];
        t.height = t.level_hi - t.level_lo;
        t.src_u = emb.edges()[e].a;
        t.src_v = emb.edges()[e].b;
        tile_of_edge[e] = static_cast<int>(tiles.size());
        tiles.push_back(t);
    }

    double scale = std::max(1.0, net.conductance_sum() * sol.k());
    double tol = 1e-9 * scale;

    // vertical gluings from the band circles
    LevelBands bands;
    bands.levels = levels;
    std::vector<Identification> idents;
    for (int j = 0; j < M; ++j) {
        Band b = builder.make_band(j);
        for (const auto& c : b.circles) {
            int n = static_cast<int>(c.edges.size());
            for (int i = 0; i < n; ++i) {
                // the walk advances toward decreasing conjugate x, so the
                // successor tile sits on the left
                int e = c.edges[i], e2 = c.edges[(i + 1) % n];
                int ta = tile_of_edge[e], tb = tile_of_edge[e2];
                Identification id;
                id.tile_a = ta;
                id.side_a = Side::Left;
                id.a0 = b.t_lo - tiles[ta].level_lo;
                id.a1 = b.t_hi - tiles[ta].level_lo;
                id.tile_b = tb;
                id.side_b = Side::Right;
                id.b0 = b.t_lo - tiles[tb].level_lo;
                id.b1 = b.t_hi - tiles[tb].level_lo;
                id.reversed = false;
                idents.push_back(id);
            }
            // record the conjugate offset of each tile at its lowest band
            for (int i = 0; i < n; ++i) {
                int e = c.edges[i];
                if (builder.edge_lo(e) == j)
                    tiles[tile_of_edge[e]].horizontal_start = c.start[i];
            }
        }
        bands.bands.push_back(std::move(b));
    }

    // horizontal identifications and cuffs, level by level
    std::vector<std::string> diagnostics;
    std::vector<Cuff> cuffs;
    std::vector<int> e2_cuffs(net.e2_components().size(), -1);
    int e1_cuff = -1;

    for (int j = 0; j <= M; ++j) {
        // flat clusters among level-j vertices
        std::vector<int> members;
        for (int v = 0; v < emb.vertex_count(); ++v)
            if (builder.level_of(v) == j) members.push_back(v);
        if (members.empty()) continue;
        std::map<int, int> comp;
        for (int v : members) comp[v] = v;
        std::function<int(int)> find = [&](int v) {
            while (comp[v] != v) v = comp[v] = comp[comp[v]];
            return v;
        };
        for (int v : members)
            for (const auto& [u, e] : emb.rotation(v))
                if (builder.level_of(u) == j && flux.high_end[e] < 0)
                    comp[find(v)] = find(u);
        std::map<int, std::vector<int>> clusters;
        for (int v : members) clusters[find(v)].push_back(v);

        for (auto& [root, verts] : clusters) {
            auto frame = builder.make_cluster_frame(verts, tol);
            bool is_cuff_level = j == 0 || j == M;
            std::vector<SweepItem> items;
            struct ArcRec {
                double x0;
                int tile;
                double param0, width;
            };
            std::vector<ArcRec> arcs;
            double x_min = 1e300;
            for (int v : verts) {
                for (const auto& [u, e] : emb.rotation(v)) {
                    if (flux.high_end[e] < 0) continue;
                    bool is_top = builder.edge_hi(e) == j && flux.high_end[e] == v;
                    bool is_bot = builder.edge_lo(e) == j && flux.high_end[e] == u;
                    if (!is_top && !is_bot) continue;
                    // x of the tile's left side: the face left of the flow
                    int hu = flux.high_end[e];
                    int lv = emb.edges()[e].a == hu ? emb.edges()[e].b : emb.edges()[e].a;
                    int left_face = emb.directed_edge_location(hu, lv).first;
                    auto it = frame.x.find(left_face);
                    if (it == frame.x.end())
                        throw std::runtime_error("tiling: frame is missing a corner face");
                    double x0 = it->second;
                    double w = flux.flux[e];
                    if (frame.period > 0) x0 = wrap_positive(x0, frame.period);
                    int tile = tile_of_edge[e];
                    // split pieces straddling the period cut
                    auto push = [&](double px0, double pp0, double pw) {
                        if (pw <= tol) return;
                        if (is_cuff_level)
                            arcs.push_back({px0, tile, pp0, pw});
                        else
                            items.push_back({px0, pw, is_top, tile, pp0});
                        x_min = std::min(x_min, px0);
                    };
                    if (frame.period > 0 && x0 + w > frame.period + tol) {
                        push(x0, 0, frame.period - x0);
                        push(0, frame.period - x0, w - (frame.period - x0));
                    } else {
                        push(x0, 0, w);
                    }
                }
            }
            if (is_cuff_level) {
                std::sort(arcs.begin(), arcs.end(),
                          [](const ArcRec& a, const ArcRec& b) {
                              return a.x0 < b.x0 || (a.x0 == b.x0 && a.tile < b.tile);
                          });
                Cuff cuff;
                Side s = j == 0 ? Side::Bottom : Side::Top;
                for (const auto& a : arcs)
                    cuff.arcs.push_back({a.tile, s, a.param0, a.param0 + a.width, true});
                if (cuff.arcs.empty()) continue;
                int idx = static_cast<int>(cuffs.size());
                if (j == 0) {
                    int c2 = net.e2_component(verts[0]);
                    if (c2 >= 0) e2_cuffs[c2] = idx;
                } else {
                    e1_cuff = idx;
                }
                cuffs.push_back(std::move(cuff));
            } else {
                sweep_level(std::move(items), tol, tiles, idents, diagnostics);
            }
        }
    }

    FlatComplex complex(std::move(tiles), std::move(idents), std::move(cuffs));
    return {std::move(complex), std::move(tile_of_edge), flux, std::move(bands),
            e1_cuff, std::move(e2_cuffs), std::move(diagnostics)};
}

}  // namespace detail

/// Realizes the tiling map: one Euclidean rectangle per flux-carrying edge,
/// of height |dg| and width c|dg|, glued by the level-curve structure. The
/// piece must have at least two labeled boundary components (a disk has no
/// zero side and cannot be tiled).
inline TilingResult tile_piece(const HarmonicSolution& sol, const TilingOptions& opt = {}) {
    return detail::tile_piece_impl(sol, opt);
}

}  // namespace rectflow
