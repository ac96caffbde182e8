#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rectflow/network.hpp"

using namespace rectflow;

TEST_CASE("build_network validation") {
    SECTION("path network is valid") {
        auto net = fixtures::path_network();
        CHECK(net.e1_vertices() == std::vector<int>{0});
        CHECK(net.interior_vertices() == std::vector<int>{1});
    }
    SECTION("nonpositive conductance") {
        CHECK_THROWS_WITH(fixtures::path_network(-1.0, 1.0),
                          Catch::Matchers::ContainsSubstring("nonpositive conductance"));
        ConductanceSpec spec;
        spec.default_value = 0.0;
        CHECK_THROWS_WITH(
            ConductanceNetwork::from_embedding(fixtures::cylinder_tri(2, 4).embedding(), spec, 0),
            Catch::Matchers::ContainsSubstring("nonpositive conductance"));
    }
    SECTION("override on a missing edge") {
        ConductanceSpec spec;
        spec.overrides = {{0, 2, 1.0}};  // path has edges 0-1 and 1-2 only
        Embedding emb(3, {{0, 1, 2, 1}}, {});
        CHECK_THROWS_WITH(
            ConductanceNetwork::with_labels(emb, spec, {{0}, {{2}}}),
            Catch::Matchers::ContainsSubstring("missing edge"));
    }
    SECTION("duplicate override") {
        ConductanceSpec spec;
        spec.overrides = {{0, 1, 1.0}, {1, 0, 2.0}};
        Embedding emb(3, {{0, 1, 2, 1}}, {});
        CHECK_THROWS_WITH(ConductanceNetwork::with_labels(emb, spec, {{0}, {{2}}}),
                          Catch::Matchers::ContainsSubstring("duplicate"));
    }
    SECTION("override applies to one edge only") {
        auto s = fixtures::cylinder_tri(2, 4);
        ConductanceSpec spec;
        spec.overrides = {{0, 4, 2.0}};
        auto net = fixtures::surface_network(s, spec);
        int changed = 0;
        for (int e = 0; e < net.embedding().edge_count(); ++e)
            changed += net.conductance(e) == 2.0;
        CHECK(changed == 1);
    }
    SECTION("E1 component index out of range") {
        auto s = fixtures::cylinder_tri(2, 4);
        CHECK_THROWS_WITH(fixtures::surface_network(s, {}, 5),
                          Catch::Matchers::ContainsSubstring("out of range"));
    }
    SECTION("labels cover boundary components exactly") {
        auto s = fixtures::holed_rectangle();
        auto net = fixtures::surface_network(s);
        CHECK(net.e2_components().size() == 2);
        size_t labeled = net.e1_vertices().size();
        for (const auto& c : net.e2_components()) labeled += c.size();
        size_t boundary = 0;
        for (const auto& b : s.boundary_components()) boundary += b.size();
        CHECK(labeled == boundary);
    }
}

TEST_CASE("laplacian examples") {
    auto net = fixtures::path_network();
    SECTION("harmonic value is zero") {
        HarmonicSolution sol(net, 1.0, {1.0, 0.5, 0.0});
        CHECK(laplacian(sol, 1) == 0.0);
        CHECK(sol.residual() == 0.0);
    }
    SECTION("direct evaluation off harmonicity") {
        HarmonicSolution sol(net, 1.0, {1.0, 0.7, 0.0});
        CHECK_THAT(laplacian(sol, 1), Catch::Matchers::WithinAbs(0.4, 1e-15));
    }
    SECTION("boundary vertex is rejected") {
        HarmonicSolution sol(net, 1.0, {1.0, 0.5, 0.0});
        CHECK_THROWS_AS(laplacian(sol, 0), std::invalid_argument);
    }
    SECTION("star center at the mean of its leaves") {
        // 3-star doubled into a single walk around the star
        Embedding emb(4, {{1, 0, 2, 0, 3, 0}}, {});
        auto star = ConductanceNetwork::with_labels(emb, {}, {{1}, {{2}, {3}}});
        HarmonicSolution sol(star, 1.0, {(1.0 + 0.25 + 0.25) / 3, 1.0, 0.25, 0.25});
        CHECK_THAT(laplacian(sol, 0), Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("solve_dirichlet") {
    SECTION("path: single unknown") {
        auto sol = solve_dirichlet(fixtures::path_network(), 1.0);
        CHECK(sol.g(0) == 1.0);
        CHECK(sol.g(2) == 0.0);
        CHECK_THAT(sol.g(1), Catch::Matchers::WithinAbs(0.5, 1e-12));
    }
    SECTION("no interior vertices: boundary data verbatim") {
        // one-ring cylinder: every vertex is boundary
        auto s = fixtures::cylinder_tri(1, 4);
        auto sol = solve_dirichlet(fixtures::surface_network(s), 2.0);
        for (int v = 0; v < 4; ++v) CHECK(sol.g(v) == 2.0);
        for (int v = 4; v < 8; ++v) CHECK(sol.g(v) == 0.0);
        CHECK(sol.method() == "boundary-only");
    }
    SECTION("quad cylinder rings are exactly constant") {
        auto emb = fixtures::cylinder_quads(2, 4);
        auto net = ConductanceNetwork::from_embedding(emb, {}, 0);
        auto sol = solve_dirichlet(net, 1.0);
        for (int i = 0; i < 4; ++i) {
            CHECK(sol.g(fixtures::grid_vertex(0, i, 4)) == 1.0);
            CHECK(sol.g(fixtures::grid_vertex(1, i, 4)) == 0.5);  // exact: CG closes in one step
            CHECK(sol.g(fixtures::grid_vertex(2, i, 4)) == 0.0);
        }
    }
    SECTION("errors") {
        auto net = fixtures::path_network();
        CHECK_THROWS_AS(solve_dirichlet(net, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(solve_dirichlet(net, -1.0), std::invalid_argument);
        Embedding emb(3, {{0, 1, 2, 1}}, {});
        auto no_e2 = ConductanceNetwork::with_labels(emb, {}, {{0}, {}});
        CHECK_THROWS_WITH(solve_dirichlet(no_e2, 1.0),
                          Catch::Matchers::ContainsSubstring("empty E2"));
        auto no_e1 = ConductanceNetwork::with_labels(emb, {}, {{}, {{0}, {2}}});
        CHECK_THROWS_WITH(solve_dirichlet(no_e1, 1.0),
                          Catch::Matchers::ContainsSubstring("empty E1"));
    }
    SECTION("floating component rejected at construction") {
        // two stacked triangles sharing nothing, one fully unlabeled
        std::vector<std::vector<int>> faces = {{0, 1, 2}, {3, 4, 5}};
        std::vector<std::vector<int>> holes = {{0, 2, 1}, {3, 5, 4}};
        Embedding emb(6, faces, holes);
        CHECK_THROWS_WITH(
            ConductanceNetwork::with_labels(emb, {}, {{0}, {{1}}}),
            Catch::Matchers::ContainsSubstring("floating"));
    }
}

TEST_CASE("solver matches the dense oracle on random networks") {
    std::mt19937 rng(20240811);
    for (int trial = 0; trial < 25; ++trial) {
        auto s = fixtures::random_annulus(rng);
        auto spec = fixtures::random_conductances(s.embedding(), rng);
        auto net = fixtures::surface_network(s, spec);
        double k = trial % 2 ? 3.0 : 1.0;
        SolverOptions opt;
        opt.method = SolveMethod::ConjugateGradient;
        auto sol = solve_dirichlet(net, k, opt);
        auto ref = oracle::dense_dirichlet(net, k);
        for (int v = 0; v < s.vertex_count(); ++v)
            CHECK_THAT(sol.g(v), Catch::Matchers::WithinAbs(ref[v], 1e-9 * k));
    }
}

TEST_CASE("dense method agrees with cg") {
    std::mt19937 rng(7);
    auto s = fixtures::random_annulus(rng);
    auto spec = fixtures::random_conductances(s.embedding(), rng);
    auto net = fixtures::surface_network(s, spec);
    SolverOptions cg, dense;
    cg.method = SolveMethod::ConjugateGradient;
    dense.method = SolveMethod::DenseCholesky;
    auto a = solve_dirichlet(net, 1.0, cg);
    auto b = solve_dirichlet(net, 1.0, dense);
    for (int v = 0; v < s.vertex_count(); ++v)
        CHECK_THAT(a.g(v), Catch::Matchers::WithinAbs(b.g(v), 1e-10));
}

TEST_CASE("dirichlet energy") {
    SECTION("path energy by hand") {
        auto sol = solve_dirichlet(fixtures::path_network(), 1.0);
        CHECK_THAT(dirichlet_energy(sol), Catch::Matchers::WithinAbs(0.5, 1e-12));
    }
    SECTION("constant potential has zero energy") {
        auto emb = fixtures::cylinder_quads(2, 4);
        BoundaryLabels all;
        for (int v = 0; v < emb.vertex_count(); ++v) all.e1.push_back(v);
        auto net = ConductanceNetwork::with_labels(emb, {}, all);
        std::vector<double> g(emb.vertex_count(), 1.0);
        HarmonicSolution sol(net, 1.0, g);
        CHECK(dirichlet_energy(sol) == 0.0);
        for (int v : net.e1_vertices()) CHECK(normal_derivative(sol, v) == 0.0);
    }
    SECTION("doubling k quadruples the energy") {
        auto net = fixtures::surface_network(fixtures::cylinder_tri(3, 5));
        auto s1 = solve_dirichlet(net, 1.0);
        auto s2 = solve_dirichlet(net, 2.0);
        CHECK_THAT(dirichlet_energy(s2), Catch::Matchers::WithinRel(4 * dirichlet_energy(s1),
                                                                    1e-11));
    }
}

TEST_CASE("normal derivative and boundary flux") {
    auto sol = solve_dirichlet(fixtures::path_network(), 1.0);
    SECTION("path endpoint values") {
        CHECK_THAT(normal_derivative(sol, 0), Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK_THAT(normal_derivative(sol, 2), Catch::Matchers::WithinAbs(-0.5, 1e-12));
        CHECK_THROWS_AS(normal_derivative(sol, 1), std::invalid_argument);
    }
    SECTION("path flux and the energy identity") {
        auto f = boundary_flux(sol);
        CHECK_THAT(f.length_e1, Catch::Matchers::WithinAbs(0.5, 1e-12));
        REQUIRE(f.length_e2.size() == 1);
        CHECK_THAT(f.length_e2[0], Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK_THAT(sol.k() * f.length_e1,
                   Catch::Matchers::WithinAbs(dirichlet_energy(sol), 1e-12));
    }
    SECTION("quad cylinder: each ladder rung carries k/m") {
        auto emb = fixtures::cylinder_quads(2, 4);
        auto net = ConductanceNetwork::from_embedding(emb, {}, 0);
        auto sol2 = solve_dirichlet(net, 1.0);
        auto f = boundary_flux(sol2);
        CHECK_THAT(f.length_e1, Catch::Matchers::WithinAbs(2.0, 1e-12));
        CHECK_THAT(f.length_e2[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
    }
    SECTION("green identity on random fixtures") {
        std::mt19937 rng(99);
        for (int t = 0; t < 10; ++t) {
            auto s = fixtures::random_annulus(rng);
            auto net = fixtures::surface_network(
                s, fixtures::random_conductances(s.embedding(), rng));
            auto rs = solve_dirichlet(net, 1.0);
            auto f = boundary_flux(rs);
            CHECK(std::abs(f.green_sum) <= 1e-9 * rs.k() * net.conductance_sum());
            double e2_total = 0;
            for (double l : f.length_e2) e2_total += l;
            CHECK_THAT(f.length_e1, Catch::Matchers::WithinRel(e2_total, 1e-9));
        }
    }
}

TEST_CASE("network invariants") {
    std::mt19937 rng(4242);
    for (int t = 0; t < 10; ++t) {
        auto s = t % 2 ? fixtures::random_annulus(rng)
                       : fixtures::holed_rectangle(8 + t % 3, 5, {2, 5}, 2);
        auto net =
            fixtures::surface_network(s, fixtures::random_conductances(s.embedding(), rng));
        double k = 1.0 + t;
        auto sol = solve_dirichlet(net, k);
        SECTION("maximum principle, trial " + std::to_string(t)) {
            for (int v = 0; v < s.vertex_count(); ++v) {
                CHECK(sol.g(v) >= -1e-12 * k);
                CHECK(sol.g(v) <= k * (1 + 1e-12));
            }
        }
        SECTION("energy identity, trial " + std::to_string(t)) {
            auto f = boundary_flux(sol);
            double e = dirichlet_energy(sol);
            CHECK(std::abs(e - k * f.length_e1) <= 1e-9 * e);
        }
    }
    SECTION("uniqueness under relabeling") {
        auto s = fixtures::cylinder_tri(3, 4, std::vector<char>(12, 1));
        auto net = fixtures::surface_network(s);
        auto sol = solve_dirichlet(net, 1.0);
        // relabel vertices in reverse order and solve again
        int n = s.vertex_count();
        std::vector<int> perm(n);
        for (int v = 0; v < n; ++v) perm[v] = n - 1 - v;
        std::vector<std::array<int, 3>> tris;
        for (const auto& t : s.triangles()) tris.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
        TriangulatedSurface rs(n, tris);
        // E1 must stay the same geometric component (it holds vertex perm[0..3])
        int e1 = -1;
        for (size_t b = 0; b < rs.boundary_components().size(); ++b)
            for (int v : rs.boundary_components()[b])
                if (v == perm[0]) e1 = static_cast<int>(b);
        auto sol2 = solve_dirichlet(fixtures::surface_network(rs, {}, e1), 1.0);
        for (int v = 0; v < n; ++v)
            CHECK_THAT(sol.g(v), Catch::Matchers::WithinAbs(sol2.g(perm[v]), 1e-9));
    }
    SECTION("g scales linearly in k") {
        auto net = fixtures::surface_network(fixtures::holed_rectangle());
        auto s1 = solve_dirichlet(net, 1.0);
        auto s2 = solve_dirichlet(net, 2.0);
        for (int v = 0; v < net.embedding().vertex_count(); ++v)
            CHECK_THAT(s2.g(v), Catch::Matchers::WithinAbs(2 * s1.g(v), 1e-11));
        auto f1 = boundary_flux(s1), f2 = boundary_flux(s2);
        CHECK_THAT(f2.length_e1, Catch::Matchers::WithinRel(2 * f1.length_e1, 1e-10));
    }
    SECTION("g is invariant under uniform conductance scaling") {
        auto net = fixtures::surface_network(fixtures::holed_rectangle());
        auto a = solve_dirichlet(net, 1.0);
        auto b = solve_dirichlet(net.scaled(2.0), 1.0);
        for (int v = 0; v < net.embedding().vertex_count(); ++v)
            CHECK_THAT(a.g(v), Catch::Matchers::WithinAbs(b.g(v), 1e-12));
        CHECK_THAT(dirichlet_energy(b), Catch::Matchers::WithinRel(2 * dirichlet_energy(a),
                                                                   1e-10));
    }
}
