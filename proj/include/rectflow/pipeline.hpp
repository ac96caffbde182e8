#pragma once

#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rectflow/flat_complex.hpp"
#include "rectflow/network.hpp"
#include "rectflow/surface.hpp"
#include "rectflow/tiler.hpp"

namespace rectflow {

enum class PipelineMode { Cut, Double, Torus };

inline const char* mode_name(PipelineMode m) {
    switch (m) {
        case PipelineMode::Cut: return "cut";
        case PipelineMode::Double: return "double";
        default: return "torus";
    }
}

struct PipelineConfig {
    PipelineMode mode = PipelineMode::Double;
    double k = 1.0;
    ConductanceSpec conductance;
    CutSystem cut;                                   // cut cycles / the meridian
    std::vector<std::pair<int, int>> isomorphism;    // original-id pairs, piece 0 -> piece 1
    int e1_component = -1;                           // -1: component with the least vertex
    SubdivisionScheme subdivision_scheme = SubdivisionScheme::EdgeMidpoint;
    int subdivision_rounds = 0;
    double twist = 0.0;
    bool paranoid = false;
    SolverOptions solver;
    TilingOptions tiling;
    double tol = 1e-9;        // relative tolerance of the identity checks
    double angle_tol = 1e-6;  // radians
    // test hook: perturb one solved potential to exercise failure paths
    int corrupt_vertex = -1;
    double corrupt_delta = 0.0;
};

struct InvariantCheck {
    std::string name;
    bool pass = false;
    double measured = 0;
    double threshold = 0;
};

struct RunReport {
    std::string mode;
    double k = 0;
    std::string solver_method;
    double energy = 0;
    double residual = 0;
    double length_e1 = 0;
    std::vector<double> length_e2;
    int tile_count = 0;
    int degenerate_count = 0;
    double area = 0;
    std::string fingerprint;
    int chi = 0;
    int genus = 0;
    std::vector<double> cone_angles;
    double gauss_bonnet_residual = 0;
    double height = 0;         // torus mode
    double circumference = 0;  // torus mode
    std::vector<double> seam_lengths;
    std::vector<InvariantCheck> checks;
    std::vector<std::string> diagnostics;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "mode " << mode << "\n";
        os << "k " << format_number(k) << "\n";
        os << "solver " << solver_method << "\n";
        os << "energy " << format_number(energy) << "\n";
        os << "residual " << format_number(residual) << "\n";
        os << "length-e1 " << format_number(length_e1) << "\n";
        for (size_t i = 0; i < length_e2.size(); ++i)
            os << "length-e2." << i << " " << format_number(length_e2[i]) << "\n";
        os << "tiles " << tile_count << "\n";
        os << "degenerate-edges " << degenerate_count << "\n";
        os << "area " << format_number(area) << "\n";
        os << "chi " << chi << "\n";
        os << "genus " << genus << "\n";
        os << "cone-points " << cone_angles.size() << "\n";
        for (size_t i = 0; i < cone_angles.size(); ++i)
            os << "cone-angle." << i << " " << format_number(cone_angles[i]) << " ("
               << format_number(cone_angles[i] / std::numbers::pi) << " pi)\n";
        if (mode == "torus") {
            os << "height " << format_number(height) << "\n";
            os << "circumference " << format_number(circumference) << "\n";
        }
        for (size_t i = 0; i < seam_lengths.size(); ++i)
            os << "seam-length." << i << " " << format_number(seam_lengths[i]) << "\n";
        os << "fingerprint " << fingerprint << "\n";
        for (const auto& c : checks)
            os << "check " << c.name << " " << (c.pass ? "pass" : "FAIL") << " measured "
               << format_number(c.measured) << " threshold " << format_number(c.threshold)
               << "\n";
        for (const auto& d : diagnostics) os << "diagnostic " << d << "\n";
        os << "verdict " << (all_pass() ? "pass" : "FAIL") << "\n";
        return os.str();
    }
};

struct PipelineResult {
    FlatComplex complex;
    RunReport report;
    std::optional<TilingResult> piece_tiling;  // the solved piece's tiling
};

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

/// Evaluates the theorem's checkable conclusions for one run. Failures are
/// report entries, never exceptions.
inline std::vector<InvariantCheck> invariant_suite(const HarmonicSolution& sol,
                                                   const TilingResult& tiling,
                                                   const FlatComplex& final_complex,
                                                   double area_factor, double tol,
                                                   double angle_tol) {
    std::vector<InvariantCheck> checks;
    auto add = [&](const std::string& name, double measured, double threshold) {
        checks.push_back({name, measured <= threshold, measured, threshold});
    };
    const auto& net = sol.network();
    double k = sol.k();

    double worst = 0;
    for (int v = 0; v < net.embedding().vertex_count(); ++v)
        worst = std::max({worst, -sol.g(v), sol.g(v) - k});
    add("maximum-principle", worst, 1e-12 * k);

    add("solver-residual", sol.residual(), std::max(1e-12, tol) * k * net.conductance_sum());

    auto bf = boundary_flux(sol);
    add("green-identity", std::abs(bf.green_sum), tol * k * net.conductance_sum());

    double energy = dirichlet_energy(sol);
    add("energy-identity", std::abs(energy - k * bf.length_e1), tol * energy);

    add("kirchhoff", tiling.flux.max_kirchhoff_residual, tol * k * net.conductance_sum());

    add("area-identity", std::abs(final_complex.area() - area_factor * energy),
        tol * area_factor * energy);

    double cuff_err = 0;
    const auto& piece = tiling.complex;
    if (tiling.e1_cuff >= 0)
        cuff_err = std::abs(piece.cuffs()[tiling.e1_cuff].length - bf.length_e1) /
                   std::max(bf.length_e1, 1e-300);
    for (size_t i = 0; i < tiling.e2_cuffs.size(); ++i)
        if (tiling.e2_cuffs[i] >= 0)
            cuff_err = std::max(cuff_err,
                                std::abs(piece.cuffs()[tiling.e2_cuffs[i]].length -
                                         bf.length_e2[i]) /
                                    std::max(bf.length_e2[i], 1e-300));
    add("cuff-lengths", cuff_err, tol);

    // level-circle partition at 1000 sampled levels (fixed seed: the report
    // must be byte-identical across runs)
    {
        std::mt19937 rng(1234577);
        std::uniform_real_distribution<double> dist(0.0, k);
        double worst_gap = 0;
        const auto& lb = tiling.bands;
        for (int trial = 0; trial < 1000; ++trial) {
            double t = dist(rng);
            auto it = std::upper_bound(lb.levels.begin(), lb.levels.end(), t);
            if (it == lb.levels.begin() || it == lb.levels.end()) continue;
            int j = static_cast<int>(it - lb.levels.begin()) - 1;
            for (const auto& c : lb.bands[j].circles) {
                double pos = 0;
                for (size_t i = 0; i < c.edges.size(); ++i) {
                    worst_gap = std::max(worst_gap,
                                         std::abs(c.start[i] - pos) / c.circumference);
                    pos += tiling.flux.flux[c.edges[i]];
                }
                worst_gap = std::max(worst_gap,
                                     std::abs(pos - c.circumference) / c.circumference);
            }
        }
        add("level-partition", worst_gap, tol);
    }

    add("cone-angles-pi-multiples", final_complex.max_angle_deviation(), angle_tol);

    if (final_complex.closed())
        add("gauss-bonnet", final_complex.gauss_bonnet(angle_tol).residual, angle_tol);

    return checks;
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

namespace detail {

inline HarmonicSolution solve_piece(const TriangulatedSurface& piece,
                                    const PipelineConfig& cfg, int e1_component) {
    if (piece.boundary_components().size() < 2)
        throw std::invalid_argument(
            "pipeline: unsupported topology, the piece is a disk (needs >= 2 boundary "
            "components)");
    auto net = ConductanceNetwork::from_embedding(piece.embedding(), cfg.conductance,
                                                  e1_component);
    return solve_dirichlet(net, cfg.k, cfg.solver);
}

/// The corrupted-potential negative control: applied after tiling, so that
/// the run completes and the invariant suite reports the violation.
inline HarmonicSolution maybe_corrupt(const HarmonicSolution& sol, const PipelineConfig& cfg) {
    if (cfg.corrupt_vertex < 0) return sol;
    auto g = sol.potentials();
    if (cfg.corrupt_vertex >= static_cast<int>(g.size()))
        throw std::invalid_argument("pipeline: corrupt-g vertex out of range");
    g[cfg.corrupt_vertex] += cfg.corrupt_delta;
    return HarmonicSolution(sol.network(), sol.k(), std::move(g),
                            sol.method() + "+corrupted");
}

inline void fill_common_report(RunReport& rep, const HarmonicSolution& sol,
                               const TilingResult& tiling, const FlatComplex& final_complex) {
    rep.k = sol.k();
    rep.solver_method = sol.method();
    rep.energy = dirichlet_energy(sol);
    rep.residual = sol.residual();
    auto bf = boundary_flux(sol);
    rep.length_e1 = bf.length_e1;
    rep.length_e2 = bf.length_e2;
    rep.tile_count = static_cast<int>(final_complex.tiles().size());
    rep.degenerate_count = static_cast<int>(tiling.flux.degenerate_edges.size());
    rep.area = final_complex.area();
    rep.fingerprint = final_complex.fingerprint();
    rep.chi = final_complex.chi();
    if (final_complex.closed()) {
        rep.genus = (2 - rep.chi) / 2;
        rep.gauss_bonnet_residual = final_complex.gauss_bonnet().residual;
    }
    for (const auto& p : final_complex.cone_points()) rep.cone_angles.push_back(p.angle);
    for (const auto& d : tiling.diagnostics) rep.diagnostics.push_back(d);
}

/// Copies a complex while relabeling the source-edge tags of its tiles
/// through a vertex map (the transported solution of the second piece).
inline FlatComplex retag(const FlatComplex& f, const std::vector<int>& phi) {
    std::vector<Tile> tiles = f.tiles();
    for (Tile& t : tiles) {
        if (t.src_u >= 0) t.src_u = phi[t.src_u];
        if (t.src_v >= 0) t.src_v = phi[t.src_v];
    }
    return FlatComplex(std::move(tiles), f.identifications(), f.cuffs());
}

/// Extends a vertex isomorphism through one subdivision round: midpoints map
/// to midpoints of image edges, barycenters to barycenters of image faces.
inline std::vector<int> extend_through_subdivision(const TriangulatedSurface& p1,
                                                   const TriangulatedSurface& p2,
                                                   const std::vector<int>& phi,
                                                   SubdivisionScheme scheme) {
    const auto& e1 = p1.embedding();
    const auto& e2 = p2.embedding();
    int n1 = p1.vertex_count(), n2 = p2.vertex_count();
    std::vector<int> out(n1 + e1.edge_count() +
                             (scheme == SubdivisionScheme::Barycentric ? p1.triangle_count()
                                                                       : 0),
                         -1);
    for (int v = 0; v < n1; ++v) out[v] = phi[v];
    for (int e = 0; e < e1.edge_count(); ++e) {
        int img = e2.edge_index(phi[e1.edges()[e].a], phi[e1.edges()[e].b]);
        if (img < 0)
            throw std::invalid_argument("pipeline: isomorphism does not carry edges to edges");
        out[n1 + e] = n2 + img;
    }
    if (scheme == SubdivisionScheme::Barycentric) {
        auto canon = [](std::array<int, 3> t) {
            while (!(t[0] < t[1] && t[0] < t[2])) t = {t[1], t[2], t[0]};
            return t;
        };
        std::map<std::array<int, 3>, int> faces2;
        for (int f = 0; f < p2.triangle_count(); ++f) {
            faces2[canon(p2.triangles()[f])] = f;
            auto t = p2.triangles()[f];
            faces2[canon({t[0], t[2], t[1]})] = f;
        }
        for (int f = 0; f < p1.triangle_count(); ++f) {
            auto t = p1.triangles()[f];
            auto it = faces2.find(canon({phi[t[0]], phi[t[1]], phi[t[2]]}));
            if (it == faces2.end())
                throw std::invalid_argument(
                    "pipeline: isomorphism does not carry faces to faces");
            out[n1 + e1.edge_count() + f] = n2 + e2.edge_count() + it->second;
        }
    }
    return out;
}

inline int pick_e1(const TriangulatedSurface& piece, int requested) {
    if (requested >= 0) {
        if (requested >= static_cast<int>(piece.boundary_components().size()))
            throw std::invalid_argument("pipeline: E1 boundary component index out of range");
        return requested;
    }
    return 0;  // components are ordered by least contained vertex
}

}  // namespace detail

/// Corollary path: tile a bounded piece once and glue the mirror copy along
/// the full boundary.
inline PipelineResult run_double(const TriangulatedSurface& piece_in,
                                 const PipelineConfig& cfg) {
    if (piece_in.is_closed())
        throw std::invalid_argument("pipeline: double mode needs a surface with boundary");
    TriangulatedSurface piece =
        subdivide(piece_in, cfg.subdivision_scheme, cfg.subdivision_rounds);
    int m = static_cast<int>(piece.boundary_components().size());
    auto sol = detail::solve_piece(piece, cfg, detail::pick_e1(piece, cfg.e1_component));
    auto tiling = tile_piece(sol, cfg.tiling);
    auto dbl = double_flat(tiling.complex);
    auto rsol = detail::maybe_corrupt(sol, cfg);

    RunReport rep;
    rep.mode = "double";
    detail::fill_common_report(rep, rsol, tiling, dbl.complex);
    rep.seam_lengths = dbl.seam_lengths;
    rep.checks = invariant_suite(rsol, tiling, dbl.complex, 2.0, cfg.tol, cfg.angle_tol);
    rep.checks.push_back({"genus-is-m-minus-1",
                          rep.genus == m - 1,
                          static_cast<double>(rep.genus),
                          static_cast<double>(m - 1)});
    return {std::move(dbl.complex), std::move(rep), std::move(tiling)};
}

/// Closed-surface theorem. Torus mode cuts along the meridian and closes the
/// tiled cylinder with a twist; cut mode cuts along the m+1 cycles, solves
/// one piece, transports the tiling through the supplied (or searched)
/// isomorphism and glues along matching cuffs.
inline PipelineResult run_closed_surface(const TriangulatedSurface& x,
                                         const PipelineConfig& cfg) {
    if (!x.is_closed())
        throw std::invalid_argument("pipeline: closed-surface mode needs a closed surface");
    if (!x.is_connected())
        throw std::invalid_argument("pipeline: surface is not connected");

    if (cfg.mode == PipelineMode::Torus) {
        if (x.genus() != 1)
            throw std::invalid_argument("pipeline: torus mode needs genus 1, got " +
                                        std::to_string(x.genus()));
        if (cfg.cut.cycles.size() != 1)
            throw std::invalid_argument("pipeline: torus mode needs exactly one meridian");
        auto dec = cut_along(x, cfg.cut);
        if (dec.pieces.size() != 1 || dec.pieces[0].genus() != 0 ||
            dec.pieces[0].boundary_components().size() != 2)
            throw std::invalid_argument(
                "pipeline: the cycle is not a meridian (cutting must give one cylinder)");
        TriangulatedSurface piece = subdivide(dec.pieces[0], cfg.subdivision_scheme,
                                              cfg.subdivision_rounds);
        auto sol = detail::solve_piece(piece, cfg, detail::pick_e1(piece, cfg.e1_component));
        auto tiling = tile_piece(sol, cfg.tiling);
        auto torus = close_torus(tiling.complex, cfg.twist);
        auto rsol = detail::maybe_corrupt(sol, cfg);

        RunReport rep;
        rep.mode = "torus";
        detail::fill_common_report(rep, rsol, tiling, torus);
        rep.height = tiling.bands.levels.back() - tiling.bands.levels.front();
        rep.circumference = rep.length_e1;
        rep.checks = invariant_suite(rsol, tiling, torus, 1.0, cfg.tol, cfg.angle_tol);
        auto add = [&](const std::string& name, double measured, double threshold) {
            rep.checks.push_back({name, measured <= threshold, measured, threshold});
        };
        add("torus-height-equals-k", std::abs(rep.height - cfg.k), 0.0);
        add("torus-cuff-lengths-agree",
            std::abs(rep.length_e1 - rep.length_e2[0]) / rep.length_e1, cfg.tol);
        add("torus-no-cone-points", static_cast<double>(rep.cone_angles.size()), 0.0);
        return {std::move(torus), std::move(rep), std::move(tiling)};
    }
    if (cfg.mode != PipelineMode::Cut)
        throw std::invalid_argument("pipeline: double mode takes a bounded piece, not a "
                                    "closed surface");

    // genus >= 2: cut into two isomorphic pieces
    auto pants = validate_pants_cut(x, cfg.cut);
    if (!pants.ok)
        throw std::invalid_argument("pipeline: pants-cut validation failed at '" +
                                    pants.first_failure + "'");
    auto& dec = *pants.decomposition;
    TriangulatedSurface p0 = subdivide(dec.pieces[0], cfg.subdivision_scheme,
                                       cfg.subdivision_rounds);
    TriangulatedSurface p1 = subdivide(dec.pieces[1], cfg.subdivision_scheme,
                                       cfg.subdivision_rounds);

    // boundary components must pair along the seams
    std::vector<std::pair<int, int>> required;
    for (const auto& seam : dec.seams) {
        const SeamSide& a = seam.left.piece == 0 ? seam.left : seam.right;
        const SeamSide& b = seam.left.piece == 0 ? seam.right : seam.left;
        required.push_back({a.boundary_component, b.boundary_component});
    }

    // isomorphism on the unsubdivided pieces, in piece-local terms; pairs
    // may name endpoints in either order
    std::vector<int> phi;
    if (!cfg.isomorphism.empty()) {
        std::map<int, int> local0, local1;
        for (size_t i = 0; i < dec.piece_to_original[0].size(); ++i)
            local0[dec.piece_to_original[0][i]] = static_cast<int>(i);
        for (size_t i = 0; i < dec.piece_to_original[1].size(); ++i)
            local1[dec.piece_to_original[1][i]] = static_cast<int>(i);
        phi.assign(dec.pieces[0].vertex_count(), -1);
        for (auto [a, b] : cfg.isomorphism) {
            if (!local0.count(a) && local0.count(b)) std::swap(a, b);
            auto ia = local0.find(a), ib = local1.find(b);
            if (ia == local0.end() || ib == local1.end())
                throw std::invalid_argument("pipeline: isomorphism names vertex pair " +
                                            std::to_string(a) + "," + std::to_string(b) +
                                            " not present in the pieces");
            if (phi[ia->second] >= 0 && phi[ia->second] != ib->second)
                throw std::invalid_argument("pipeline: isomorphism maps vertex " +
                                            std::to_string(a) + " twice");
            phi[ia->second] = ib->second;
        }
        for (int v : phi)
            if (v < 0)
                throw std::invalid_argument("pipeline: isomorphism is not total on piece 0");
    } else {
        auto found = find_isomorphism(dec.pieces[0], dec.pieces[1], required);
        if (!found)
            throw std::invalid_argument(
                "pipeline: pieces are not combinatorially isomorphic (search failed)");
        phi = found->first;
    }
    for (int r = 0; r < cfg.subdivision_rounds; ++r) {
        TriangulatedSurface a = subdivide(dec.pieces[0], cfg.subdivision_scheme, r);
        TriangulatedSurface b = subdivide(dec.pieces[1], cfg.subdivision_scheme, r);
        phi = detail::extend_through_subdivision(a, b, phi, cfg.subdivision_scheme);
    }
    auto iso = check_isomorphism(p0, p1, phi, required);
    if (!iso.isomorphic)
        throw std::invalid_argument("pipeline: isomorphism check failed: " +
                                    iso.first_mismatch);

    int e1 = detail::pick_e1(p0, cfg.e1_component);
    auto sol = detail::solve_piece(p0, cfg, e1);
    auto tiling = tile_piece(sol, cfg.tiling);

    RunReport rep;
    rep.mode = "cut";

    if (cfg.paranoid) {
        // solve the second piece independently and compare under phi
        int e1_img = -1;
        for (const auto& [a, b] : iso.boundary_pairing)
            if (a == e1) e1_img = b;
        auto net1 = ConductanceNetwork::from_embedding(p1.embedding(), cfg.conductance,
                                                       e1_img);
        auto sol1 = solve_dirichlet(net1, cfg.k, cfg.solver);
        double worst = 0;
        for (int v = 0; v < p0.vertex_count(); ++v)
            worst = std::max(worst, std::abs(sol.g(v) - sol1.g(phi[v])));
        rep.checks.push_back(
            {"paranoid-solutions-agree-under-isomorphism", worst <= cfg.tol * cfg.k, worst,
             cfg.tol * cfg.k});
    }

    // the transported tiling of the second piece is the identical complex
    // (mirrored when the isomorphism reverses orientation)
    FlatComplex s1 = iso.orientation_reversing ? mirror(detail::retag(tiling.complex, phi))
                                               : detail::retag(tiling.complex, phi);
    // cuff j of the transported complex covers the image of piece 0's
    // component under phi, which the seam pairing matches back to cuff j
    std::vector<CuffPairing> pairing;
    for (size_t c = 0; c < tiling.complex.cuffs().size(); ++c)
        pairing.push_back({static_cast<int>(c), static_cast<int>(c), 0.0,
                           iso.orientation_reversing});
    auto closed = glue(tiling.complex, s1, pairing);

    auto rsol = detail::maybe_corrupt(sol, cfg);
    detail::fill_common_report(rep, rsol, tiling, closed);
    for (const auto& c : tiling.complex.cuffs()) rep.seam_lengths.push_back(c.length);
    auto checks = invariant_suite(rsol, tiling, closed, 2.0, cfg.tol, cfg.angle_tol);
    for (auto& c : checks) rep.checks.push_back(std::move(c));
    rep.checks.push_back({"genus-matches-surface", rep.genus == x.genus(),
                          static_cast<double>(rep.genus),
                          static_cast<double>(x.genus())});
    return {std::move(closed), std::move(rep), std::move(tiling)};
}

/// Solve-and-tile of one bounded piece without any closing move: the ladder
/// theorem on its own, used by the solve/tile commands.
inline PipelineResult run_tile(const TriangulatedSurface& piece_in,
                               const PipelineConfig& cfg) {
    TriangulatedSurface piece =
        subdivide(piece_in, cfg.subdivision_scheme, cfg.subdivision_rounds);
    auto sol = detail::solve_piece(piece, cfg, detail::pick_e1(piece, cfg.e1_component));
    auto tiling = tile_piece(sol, cfg.tiling);
    auto rsol = detail::maybe_corrupt(sol, cfg);
    RunReport rep;
    rep.mode = "tile";
    auto complex = tiling.complex;
    detail::fill_common_report(rep, rsol, tiling, complex);
    rep.checks = invariant_suite(rsol, tiling, complex, 1.0, cfg.tol, cfg.angle_tol);
    return {std::move(complex), std::move(rep), std::move(tiling)};
}

}  // namespace rectflow
