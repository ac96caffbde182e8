#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "rectflow/numeric.hpp"

namespace rectflow {

enum class Side { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline bool side_horizontal(Side s) { return s == Side::Bottom || s == Side::Top; }

inline const char* side_name(Side s) {
    switch (s) {
        case Side::Bottom: return "bottom";
        case Side::Right: return "right";
        case Side::Top: return "top";
        default: return "left";
    }
}

/// One Euclidean rectangle. Horizontal sides are parametrized left to right
/// by [0, width], vertical sides bottom to top by [0, height].
struct Tile {
    double width = 0, height = 0;
    int src_u = -1, src_v = -1;     // source edge when built from a network
    double level_lo = 0, level_hi = 0;  // vertical extent in potential units
    double horizontal_start = 0;        // conjugate coordinate of the left side
};

/// Isometric pairing of two side intervals. The gluing maps parameter x in
/// [a0,a1] on side A to b0 + (x - a0), or to b1 - (x - a0) when reversed.
struct Identification {
    int tile_a = -1;
    Side side_a = Side::Bottom;
    double a0 = 0, a1 = 0;
    int tile_b = -1;
    Side side_b = Side::Bottom;
    double b0 = 0, b1 = 0;
    bool reversed = false;
};

/// A maximal arc of a boundary cuff: an unglued side interval. `forward`
/// says whether the cuff coordinate increases with the side parameter.
struct CuffArc {
    int tile = -1;
    Side side = Side::Bottom;
    double a0 = 0, a1 = 0;
    bool forward = true;
};

struct Cuff {
    double length = 0;                // sum of arc lengths
    std::vector<CuffArc> arcs;        // in cyclic cuff order
};

struct ConePoint {
    double angle = 0;
    int tile = -1;          // a representative incident point
    Side side = Side::Bottom;
    double param = 0;
};

struct GaussBonnetReport {
    bool closed = false;
    double angle_defect_sum = 0;  // sum over interior points of (2 pi - angle)
    int chi = 0;
    double residual = 0;          // |defect sum - 2 pi chi|
    bool pass = false;
};

/// Singular flat surface presented as rectangles plus isometric interval
/// identifications. Every side must be exactly covered by identification
/// intervals and cuff arcs; validated at construction and immutable after.
class FlatComplex {
public:
    FlatComplex(std::vector<Tile> tiles, std::vector<Identification> idents,
                std::vector<Cuff> cuffs)
        : tiles_(std::move(tiles)), idents_(std::move(idents)), cuffs_(std::move(cuffs)) {
        validate();
        analyze();
    }

    const std::vector<Tile>& tiles() const { return tiles_; }
    const std::vector<Identification>& identifications() const { return idents_; }
    const std::vector<Cuff>& cuffs() const { return cuffs_; }

    bool closed() const { return cuffs_.empty(); }

    double area() const {
        double a = 0;
        for (const auto& t : tiles_) a += t.width * t.height;
        return a;
    }

    double scale() const { return scale_; }

    /// Interior points whose total angle is not 2 pi (within 1e-6 rad).
    const std::vector<ConePoint>& cone_points() const { return cone_points_; }

    /// Largest deviation of any interior singular angle from a multiple of
    /// pi, and of any boundary point angle from a multiple of pi/2.
    double max_angle_deviation() const { return max_angle_dev_; }
    bool cone_angles_are_pi_multiples(double tol = 1e-6) const {
        return max_angle_dev_ <= tol;
    }

    /// Euler characteristic of the identified cell complex (computed from
    /// the quotient, independent of any source triangulation).
    int chi() const { return chi_; }

    GaussBonnetReport gauss_bonnet(double tol = 1e-6) const {
        if (!closed())
            throw std::invalid_argument("gauss_bonnet: complex has boundary cuffs");
        GaussBonnetReport r;
        r.closed = true;
        r.chi = chi_;
        r.angle_defect_sum = angle_defect_sum_;
        r.residual = std::abs(r.angle_defect_sum - 2 * std::numbers::pi * chi_);
        r.pass = r.residual <= tol;
        return r;
    }

    /// Isometry-invariant summary quantized at 1e-9: area, sorted cuff
    /// lengths, sorted interior cone angles, chi.
    std::string fingerprint() const {
        auto q = [](double x) { return static_cast<long long>(std::llround(x * 1e9)); };
        std::string out = "area=" + std::to_string(q(area()));
        std::vector<long long> cl;
        for (const auto& c : cuffs_) cl.push_back(q(c.length));
        std::sort(cl.begin(), cl.end());
        out += ";cuffs=";
        for (auto v : cl) out += std::to_string(v) + ",";
        std::vector<long long> ca;
        for (const auto& p : cone_points_) ca.push_back(q(p.angle));
        std::sort(ca.begin(), ca.end());
        out += ";cones=";
        for (auto v : ca) out += std::to_string(v) + ",";
        out += ";chi=" + std::to_string(chi_);
        return out;
    }

private:
    double side_length(int t, Side s) const {
        return side_horizontal(s) ? tiles_[t].width : tiles_[t].height;
    }

    void validate() {
        scale_ = 1e-12;
        for (const auto& t : tiles_) scale_ = std::max({scale_, t.width, t.height});
        double tol = 1e-9 * scale_;

        struct Claim {
            double a0, a1;
            bool is_cuff;
            int ref;  // identification or (cuff, arc) packed index
        };
        std::map<std::pair<int, int>, std::vector<Claim>> claims;
        auto add_claim = [&](int tile, Side s, double a0, double a1, bool is_cuff, int ref) {
            if (tile < 0 || tile >= static_cast<int>(tiles_.size()))
                throw std::invalid_argument("flat complex: tile index out of range");
            double len = side_length(tile, s);
            if (a0 < -tol || a1 > len + tol || a1 < a0 - tol)
                throw std::invalid_argument("flat complex: side interval out of range");
            claims[{tile, static_cast<int>(s)}].push_back({a0, a1, is_cuff, ref});
        };
        for (size_t i = 0; i < idents_.size(); ++i) {
            const auto& id = idents_[i];
            if (std::abs((id.a1 - id.a0) - (id.b1 - id.b0)) > tol)
                throw std::invalid_argument(
                    "flat complex: identification pairs intervals of different length");
            add_claim(id.tile_a, id.side_a, id.a0, id.a1, false, static_cast<int>(i));
            add_claim(id.tile_b, id.side_b, id.b0, id.b1, false, static_cast<int>(i));
        }
        for (size_t c = 0; c < cuffs_.size(); ++c) {
            double len = 0;
            for (size_t a = 0; a < cuffs_[c].arcs.size(); ++a) {
                const auto& arc = cuffs_[c].arcs[a];
                add_claim(arc.tile, arc.side, arc.a0, arc.a1, true,
                          static_cast<int>(c * 4096 + a));
                len += arc.a1 - arc.a0;
            }
            cuffs_[c].length = len;
        }
        // Every side must be partitioned by its claims.
        for (size_t t = 0; t < tiles_.size(); ++t)
            for (Side s : {Side::Bottom, Side::Right, Side::Top, Side::Left}) {
                auto it = claims.find({static_cast<int>(t), static_cast<int>(s)});
                double len = side_length(static_cast<int>(t), s);
                if (it == claims.end()) {
                    if (len > tol)
                        throw std::invalid_argument(
                            "flat complex: side of tile " + std::to_string(t) + " (" +
                            side_name(s) + ") is matched to nothing");
                    continue;
                }
                auto& v = it->second;
                std::sort(v.begin(), v.end(),
                          [](const Claim& x, const Claim& y) { return x.a0 < y.a0; });
                double pos = 0;
                for (const auto& cl : v) {
                    if (std::abs(cl.a0 - pos) > tol)
                        throw std::invalid_argument(
                            "flat complex: side of tile " + std::to_string(t) + " (" +
                            side_name(s) + ") has a gap or overlap at " +
                            format_number(pos));
                    pos = cl.a1;
                }
                if (std::abs(pos - len) > tol)
                    throw std::invalid_argument("flat complex: side of tile " +
                                                std::to_string(t) + " (" + side_name(s) +
                                                ") is not fully matched");
            }
    }

    // --- quotient cell complex ------------------------------------------

    struct NodeKey {
        int tile;
        int side;
        int index;  // breakpoint index on that side
    };

    void analyze() {
        double tol = 1e-9 * scale_;
        int nt = static_cast<int>(tiles_.size());

        // Breakpoints per side: endpoints of every claim, plus side ends.
        std::vector<std::array<std::vector<double>, 4>> bps(nt);
        auto note = [&](int t, Side s, double x) {
            bps[t][static_cast<int>(s)].push_back(x);
        };
        for (int t = 0; t < nt; ++t)
            for (Side s : {Side::Bottom, Side::Right, Side::Top, Side::Left}) {
                note(t, s, 0.0);
                note(t, s, side_length(t, s));
            }
        for (const auto& id : idents_) {
            note(id.tile_a, id.side_a, id.a0);
            note(id.tile_a, id.side_a, id.a1);
            note(id.tile_b, id.side_b, id.b0);
            note(id.tile_b, id.side_b, id.b1);
        }
        for (const auto& c : cuffs_)
            for (const auto& a : c.arcs) {
                note(a.tile, a.side, a.a0);
                note(a.tile, a.side, a.a1);
            }
        std::vector<std::array<std::vector<double>, 4>> uniq(nt);
        std::vector<std::array<int, 4>> base(nt);
        int total = 0;
        for (int t = 0; t < nt; ++t)
            for (int s = 0; s < 4; ++s) {
                auto& v = bps[t][s];
                std::sort(v.begin(), v.end());
                auto& u = uniq[t][s];
                for (double x : v)
                    if (u.empty() || x - u.back() > tol) u.push_back(x);
                base[t][s] = total;
                total += static_cast<int>(u.size());
            }
        auto node_id = [&](int t, Side s, double x) {
            const auto& u = uniq[t][static_cast<int>(s)];
            auto it = std::lower_bound(u.begin(), u.end(), x - tol);
            int i = static_cast<int>(it - u.begin());
            if (i >= static_cast<int>(u.size()) || std::abs(u[i] - x) > 2 * tol)
                throw std::runtime_error("flat complex: breakpoint lookup failed");
            return base[t][static_cast<int>(s)] + i;
        };

        std::vector<int> parent(total);
        for (int i = 0; i < total; ++i) parent[i] = i;
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

        // Tile corners: the two side-end nodes at each corner are one point.
        for (int t = 0; t < nt; ++t) {
            double w = tiles_[t].width, h = tiles_[t].height;
            unite(node_id(t, Side::Bottom, 0), node_id(t, Side::Left, 0));
            unite(node_id(t, Side::Bottom, w), node_id(t, Side::Right, 0));
            unite(node_id(t, Side::Top, 0), node_id(t, Side::Left, h));
            unite(node_id(t, Side::Top, w), node_id(t, Side::Right, h));
        }
        // Identification endpoints meet, and so do interior breakpoints the
        // partner side happens to share (claims partition sides, so interior
        // subdivision points of one claim never occur; endpoints suffice).
        for (const auto& id : idents_) {
            unite(node_id(id.tile_a, id.side_a, id.a0),
                  node_id(id.tile_b, id.side_b, id.reversed ? id.b1 : id.b0));
            unite(node_id(id.tile_a, id.side_a, id.a1),
                  node_id(id.tile_b, id.side_b, id.reversed ? id.b0 : id.b1));
        }

        // Angle contribution per node; corners count once via horizontal
        // sides, their vertical twins contribute zero.
        std::vector<double> angle(total, 0.0);
        std::vector<char> on_cuff(total, 0);
        const double pi = std::numbers::pi;
        for (int t = 0; t < nt; ++t)
            for (int s = 0; s < 4; ++s) {
                const auto& u = uniq[t][s];
                double len = side_length(t, static_cast<Side>(s));
                for (size_t i = 0; i < u.size(); ++i) {
                    int id = base[t][s] + static_cast<int>(i);
                    bool at_end = u[i] <= tol || u[i] >= len - tol;
                    if (!at_end)
                        angle[id] = pi;
                    else if (s == static_cast<int>(Side::Bottom) ||
                             s == static_cast<int>(Side::Top))
                        angle[id] = pi / 2;
                }
            }
        for (const auto& c : cuffs_)
            for (const auto& a : c.arcs) {
                on_cuff[node_id(a.tile, a.side, a.a0)] = 1;
                on_cuff[node_id(a.tile, a.side, a.a1)] = 1;
                // interior nodes of a cuff arc cannot exist (arcs are claims)
            }

        std::map<int, double> total_angle;
        std::map<int, char> boundary;
        std::map<int, NodeKey> rep;
        for (int t = 0; t < nt; ++t)
            for (int s = 0; s < 4; ++s) {
                const auto& u = uniq[t][s];
                for (size_t i = 0; i < u.size(); ++i) {
                    int id = base[t][s] + static_cast<int>(i);
                    int root = find(id);
                    total_angle[root] += angle[id];
                    boundary[root] |= on_cuff[id];
                    if (!rep.count(root)) rep[root] = {t, s, static_cast<int>(i)};
                }
            }

        cone_points_.clear();
        angle_defect_sum_ = 0;
        max_angle_dev_ = 0;
        int vertex_count = 0;
        for (const auto& [root, theta] : total_angle) {
            ++vertex_count;
            if (boundary.at(root)) {
                // boundary points carry multiples of pi/2
                double dev = std::abs(theta / (pi / 2) - std::llround(theta / (pi / 2))) *
                             (pi / 2);
                max_angle_dev_ = std::max(max_angle_dev_, dev);
                continue;
            }
            angle_defect_sum_ += 2 * pi - theta;
            if (std::abs(theta - 2 * pi) > 1e-6) {
                const auto& k = rep.at(root);
                cone_points_.push_back({theta, k.tile, static_cast<Side>(k.side),
                                        uniq[k.tile][k.side][k.index]});
                double dev = std::abs(theta / pi - std::llround(theta / pi)) * pi;
                max_angle_dev_ = std::max(max_angle_dev_, dev);
            }
        }
        std::sort(cone_points_.begin(), cone_points_.end(),
                  [](const ConePoint& a, const ConePoint& b) {
                      return std::tie(a.tile, a.side, a.param) <
                             std::tie(b.tile, b.side, b.param);
                  });

        int edges = static_cast<int>(idents_.size());
        for (const auto& c : cuffs_) edges += static_cast<int>(c.arcs.size());
        chi_ = vertex_count - edges + nt;
    }

    std::vector<Tile> tiles_;
    std::vector<Identification> idents_;
    std::vector<Cuff> cuffs_;
    double scale_ = 1;
    std::vector<ConePoint> cone_points_;
    double angle_defect_sum_ = 0;
    double max_angle_dev_ = 0;
    int chi_ = 0;
};

inline double area(const FlatComplex& f) { return f.area(); }
inline std::string fingerprint(const FlatComplex& f) { return f.fingerprint(); }
inline std::vector<ConePoint> cone_angles(const FlatComplex& f) { return f.cone_points(); }
inline GaussBonnetReport gauss_bonnet_check(const FlatComplex& f) { return f.gauss_bonnet(); }

// ---------------------------------------------------------------------------
// Closing moves
// ---------------------------------------------------------------------------

namespace detail {

/// Cuff coordinate interval of an arc given the running start position.
struct PlacedArc {
    double c0, c1;  // cuff positions
    CuffArc arc;
};

inline std::vector<PlacedArc> place_arcs(const Cuff& cuff) {
    std::vector<PlacedArc> out;
    double pos = 0;
    for (const auto& a : cuff.arcs) {
        double len = a.a1 - a.a0;
        out.push_back({pos, pos + len, a});
        pos += len;
    }
    return out;
}

/// Side parameter of the point at cuff position c within a placed arc.
inline double arc_param(const PlacedArc& p, double c) {
    return p.arc.forward ? p.arc.a0 + (c - p.c0) : p.arc.a1 - (c - p.c0);
}

/// Glues two cuffs along an isometry of their circles. `opposed` selects the
/// seam convention (position x on cuff a meets offset - x on cuff b) used
/// when joining two pieces; otherwise x meets x + offset (torus closure).
inline void glue_cuffs(const Cuff& ca, const Cuff& cb, double offset, bool opposed,
                       int tile_shift_b, double tol, std::vector<Identification>& out) {
    double len = ca.length;
    auto pa = place_arcs(ca);
    auto pb = place_arcs(cb);
    for (const auto& a : pa) {
        for (const auto& b : pb) {
            // replicate arc b at period shifts and express it in cuff-a
            // coordinates: y = offset - x + s*len  or  y = x + offset - s*len
            for (int s = -2; s <= 2; ++s) {
                double b0a, b1a;
                if (opposed) {
                    b0a = offset - b.c1 + s * len;
                    b1a = offset - b.c0 + s * len;
                } else {
                    b0a = b.c0 - offset + s * len;
                    b1a = b.c1 - offset + s * len;
                }
                double lo = std::max(a.c0, b0a), hi = std::min(a.c1, b1a);
                if (hi - lo <= tol) continue;
                auto b_pos = [&](double x) {
                    return opposed ? offset - x + s * len : x + offset - s * len;
                };
                double pa0 = arc_param(a, lo), pa1 = arc_param(a, hi);
                double pb0 = arc_param(b, b_pos(lo)), pb1 = arc_param(b, b_pos(hi));
                Identification id;
                id.tile_a = a.arc.tile;
                id.side_a = a.arc.side;
                id.tile_b = b.arc.tile + tile_shift_b;
                id.side_b = b.arc.side;
                id.a0 = std::min(pa0, pa1);
                id.a1 = std::max(pa0, pa1);
                id.b0 = std::min(pb0, pb1);
                id.b1 = std::max(pb0, pb1);
                id.reversed = (pa1 > pa0) != (pb1 > pb0);
                out.push_back(id);
            }
        }
    }
}

}  // namespace detail

struct CuffPairing {
    int cuff_a = 0;
    int cuff_b = 0;
    double offset = 0;
    /// Seam convention: position x on cuff_a meets offset - x on cuff_b.
    /// With `opposed` false the map is x -> x + offset instead (used when
    /// the pieces are identified by an orientation-preserving isomorphism).
    bool opposed = true;
};

/// Reflects the horizontal coordinate: horizontal side intervals flip, left
/// and right sides swap, cuff arcs reverse their cyclic order.
inline FlatComplex mirror(const FlatComplex& f) {
    auto mirror_side = [](Side s) {
        if (s == Side::Left) return Side::Right;
        if (s == Side::Right) return Side::Left;
        return s;
    };
    std::vector<Tile> tiles = f.tiles();
    for (Tile& t : tiles) t.horizontal_start = -(t.horizontal_start + t.width);
    std::vector<Identification> idents;
    for (Identification id : f.identifications()) {
        double wa = side_horizontal(id.side_a) ? f.tiles()[id.tile_a].width : 0;
        double wb = side_horizontal(id.side_b) ? f.tiles()[id.tile_b].width : 0;
        bool flip_a = side_horizontal(id.side_a), flip_b = side_horizontal(id.side_b);
        Identification m;
        m.tile_a = id.tile_a;
        m.side_a = mirror_side(id.side_a);
        m.tile_b = id.tile_b;
        m.side_b = mirror_side(id.side_b);
        m.a0 = flip_a ? wa - id.a1 : id.a0;
        m.a1 = flip_a ? wa - id.a0 : id.a1;
        m.b0 = flip_b ? wb - id.b1 : id.b0;
        m.b1 = flip_b ? wb - id.b0 : id.b1;
        m.reversed = id.reversed != (flip_a != flip_b);
        idents.push_back(m);
    }
    std::vector<Cuff> cuffs;
    for (const auto& c : f.cuffs()) {
        Cuff mc;
        for (auto it = c.arcs.rbegin(); it != c.arcs.rend(); ++it) {
            CuffArc a = *it;
            a.side = mirror_side(a.side);
            if (side_horizontal(a.side)) {
                double w = f.tiles()[a.tile].width;
                double a0 = w - a.a1, a1 = w - a.a0;
                a.a0 = a0;
                a.a1 = a1;
            } else {
                a.forward = !a.forward;
            }
            mc.arcs.push_back(a);
        }
        cuffs.push_back(std::move(mc));
    }
    return FlatComplex(std::move(tiles), std::move(idents), std::move(cuffs));
}

/// Glues cuffs of two complexes along isometries. Unpaired cuffs carry over.
inline FlatComplex glue(const FlatComplex& f1, const FlatComplex& f2,
                        const std::vector<CuffPairing>& pairing) {
    double tol = 1e-9 * std::max(f1.scale(), f2.scale());
    std::vector<char> used_a(f1.cuffs().size(), 0), used_b(f2.cuffs().size(), 0);
    for (const auto& p : pairing) {
        if (p.cuff_a < 0 || p.cuff_a >= static_cast<int>(f1.cuffs().size()) ||
            p.cuff_b < 0 || p.cuff_b >= static_cast<int>(f2.cuffs().size()))
            throw std::invalid_argument("glue: cuff index out of range");
        if (used_a[p.cuff_a]++ || used_b[p.cuff_b]++)
            throw std::invalid_argument("glue: cuff paired twice");
        double la = f1.cuffs()[p.cuff_a].length, lb = f2.cuffs()[p.cuff_b].length;
        if (std::abs(la - lb) > 1e-9 * std::max(la, lb))
            throw std::invalid_argument(
                "glue: cuffs not isometric - pieces not matching (lengths " +
                format_number(la) + " vs " + format_number(lb) + ")");
    }
    int shift = static_cast<int>(f1.tiles().size());
    std::vector<Tile> tiles = f1.tiles();
    tiles.insert(tiles.end(), f2.tiles().begin(), f2.tiles().end());
    std::vector<Identification> idents = f1.identifications();
    for (Identification id : f2.identifications()) {
        id.tile_a += shift;
        id.tile_b += shift;
        idents.push_back(id);
    }
    for (const auto& p : pairing)
        detail::glue_cuffs(f1.cuffs()[p.cuff_a], f2.cuffs()[p.cuff_b], p.offset, p.opposed,
                           shift, tol, idents);
    std::vector<Cuff> cuffs;
    for (size_t c = 0; c < f1.cuffs().size(); ++c)
        if (!used_a[c]) cuffs.push_back(f1.cuffs()[c]);
    for (size_t c = 0; c < f2.cuffs().size(); ++c)
        if (!used_b[c]) {
            Cuff cuff = f2.cuffs()[c];
            for (auto& a : cuff.arcs) a.tile += shift;
            cuffs.push_back(cuff);
        }
    return FlatComplex(std::move(tiles), std::move(idents), std::move(cuffs));
}

struct DoubleFlatResult {
    FlatComplex complex;
    std::vector<double> seam_lengths;  // former cuff lengths, now closed geodesics
};

/// Glues a mirror copy along every cuff (zero offset at each base point).
/// The mirror reflects the horizontal coordinate: horizontal side intervals
/// flip, left and right sides swap.
inline DoubleFlatResult double_flat(const FlatComplex& f) {
    if (f.cuffs().empty())
        throw std::invalid_argument("double_flat: complex is already closed");
    int shift = static_cast<int>(f.tiles().size());
    std::vector<Tile> tiles = f.tiles();
    for (Tile t : f.tiles()) {
        t.horizontal_start = -(t.horizontal_start + t.width);
        tiles.push_back(t);
    }
    auto mirror_side = [](Side s) {
        if (s == Side::Left) return Side::Right;
        if (s == Side::Right) return Side::Left;
        return s;
    };
    std::vector<Identification> idents = f.identifications();
    for (Identification id : f.identifications()) {
        double wa = side_horizontal(id.side_a) ? f.tiles()[id.tile_a].width : 0;
        double wb = side_horizontal(id.side_b) ? f.tiles()[id.tile_b].width : 0;
        Identification m;
        m.tile_a = id.tile_a + shift;
        m.side_a = mirror_side(id.side_a);
        m.tile_b = id.tile_b + shift;
        m.side_b = mirror_side(id.side_b);
        bool flip_a = side_horizontal(id.side_a), flip_b = side_horizontal(id.side_b);
        m.a0 = flip_a ? wa - id.a1 : id.a0;
        m.a1 = flip_a ? wa - id.a0 : id.a1;
        m.b0 = flip_b ? wb - id.b1 : id.b0;
        m.b1 = flip_b ? wb - id.b0 : id.b1;
        m.reversed = id.reversed != (flip_a != flip_b);
        idents.push_back(m);
    }
    // Each cuff arc glues to its own mirror image pointwise.
    std::vector<double> seam_lengths;
    for (const auto& cuff : f.cuffs()) {
        seam_lengths.push_back(cuff.length);
        for (const auto& arc : cuff.arcs) {
            Identification id;
            id.tile_a = arc.tile;
            id.side_a = arc.side;
            id.a0 = arc.a0;
            id.a1 = arc.a1;
            id.tile_b = arc.tile + shift;
            id.side_b = mirror_side(arc.side);
            if (side_horizontal(arc.side)) {
                double w = f.tiles()[arc.tile].width;
                id.b0 = w - arc.a1;
                id.b1 = w - arc.a0;
                id.reversed = true;
            } else {
                id.b0 = arc.a0;
                id.b1 = arc.a1;
                id.reversed = false;
            }
            idents.push_back(id);
        }
    }
    return {FlatComplex(std::move(tiles), std::move(idents), {}), std::move(seam_lengths)};
}

/// Closes a flat cylinder into a torus: the two cuffs are glued by the
/// translation x -> x + twist (mod circumference).
inline FlatComplex close_torus(const FlatComplex& f, double twist = 0) {
    if (f.cuffs().size() != 2)
        throw std::invalid_argument("close_torus: complex must have exactly 2 cuffs, has " +
                                    std::to_string(f.cuffs().size()));
    double l0 = f.cuffs()[0].length, l1 = f.cuffs()[1].length;
    if (std::abs(l0 - l1) > 1e-9 * std::max(l0, l1))
        throw std::invalid_argument("close_torus: cuff lengths differ (" + format_number(l0) +
                                    " vs " + format_number(l1) + ")");
    double tol = 1e-9 * f.scale();
    std::vector<Identification> idents = f.identifications();
    detail::glue_cuffs(f.cuffs()[0], f.cuffs()[1], wrap_positive(twist, l0), false, 0, tol,
                       idents);
    return FlatComplex(f.tiles(), std::move(idents), {});
}

}  // namespace rectflow
