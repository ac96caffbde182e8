#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rectflow/pipeline.hpp"

using namespace rectflow;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<int> torus_meridian(int cols) {
    std::vector<int> m;
    for (int i = 0; i < cols; ++i) m.push_back(i);
    return m;
}

PipelineConfig cut_config_for_double(const DoubleResult& dbl) {
    PipelineConfig cfg;
    cfg.mode = PipelineMode::Cut;
    cfg.cut = dbl.seam;
    // the mirror involution, in original ids
    for (int v = 0; v < dbl.surface.vertex_count(); ++v)
        cfg.isomorphism.push_back({v, dbl.mirror_map[v]});
    return cfg;
}
}  // namespace

TEST_CASE("torus mode") {
    auto torus = fixtures::torus_tri(4, 5);
    PipelineConfig cfg;
    cfg.mode = PipelineMode::Torus;
    cfg.cut.cycles = {torus_meridian(5)};
    auto res = run_closed_surface(torus, cfg);

    SECTION("report certifies the theorem") {
        CHECK(res.report.all_pass());
        CHECK(res.complex.closed());
        CHECK(res.report.genus == 1);
        CHECK(res.report.cone_angles.empty());
        CHECK(res.report.height == 1.0);
        CHECK_THAT(res.report.area, WithinRel(res.report.energy, 1e-9));
    }
    SECTION("circumference equals the dense-oracle flux sum on both cuffs") {
        auto dec = cut_along(torus, cfg.cut);
        auto net = fixtures::surface_network(dec.pieces[0]);
        auto g = oracle::dense_dirichlet(net, 1.0);
        double sum = 0;
        for (int x : net.e1_vertices())
            for (const auto& [u, e] : net.embedding().rotation(x))
                sum += net.conductance(e) * (g[x] - g[u]);
        CHECK_THAT(res.report.circumference, WithinRel(sum, 1e-9));
        CHECK_THAT(res.report.length_e2[0], WithinRel(sum, 1e-9));
    }
    SECTION("twist periodicity") {
        auto base = cfg;
        base.twist = 0.4;
        auto a = run_closed_surface(torus, base);
        base.twist = 0.4 + a.report.circumference;
        auto b = run_closed_surface(torus, base);
        CHECK(a.report.fingerprint == b.report.fingerprint);
    }
    SECTION("report is byte-identical across runs") {
        auto again = run_closed_surface(torus, cfg);
        CHECK(res.report.to_text() == again.report.to_text());
    }
    SECTION("input validation") {
        PipelineConfig bad = cfg;
        bad.cut.cycles = {{0, 1, 6, 5}};  // contractible square: not a meridian
        CHECK_THROWS_WITH(run_closed_surface(torus, bad),
                          Catch::Matchers::ContainsSubstring("not a meridian"));
        auto genus2 = double_surface(fixtures::holed_rectangle()).surface;
        CHECK_THROWS_WITH(run_closed_surface(genus2, cfg),
                          Catch::Matchers::ContainsSubstring("genus 1"));
    }
}

TEST_CASE("double mode") {
    SECTION("annulus gives a flat torus of area 2E") {
        PipelineConfig cfg;
        cfg.mode = PipelineMode::Double;
        auto res = run_double(fixtures::cylinder_tri(2, 4), cfg);
        CHECK(res.report.all_pass());
        CHECK(res.report.genus == 1);
        CHECK_THAT(res.report.area, WithinRel(2 * res.report.energy, 1e-9));
    }
    SECTION("3-holed piece gives genus 2 with matching dividing curves") {
        PipelineConfig cfg;
        cfg.mode = PipelineMode::Double;
        auto res = run_double(fixtures::holed_rectangle(), cfg);
        CHECK(res.report.all_pass());
        CHECK(res.report.genus == 2);
        CHECK_THAT(res.report.area, WithinRel(2 * res.report.energy, 1e-9));
        REQUIRE(res.report.seam_lengths.size() == 3);
        // dividing curve lengths are the flux lengths
        std::vector<double> expected = res.report.length_e2;
        expected.push_back(res.report.length_e1);
        std::sort(expected.begin(), expected.end());
        auto seams = res.report.seam_lengths;
        std::sort(seams.begin(), seams.end());
        for (size_t i = 0; i < 3; ++i) CHECK_THAT(seams[i], WithinRel(expected[i], 1e-9));
        CHECK_THAT(res.report.energy, WithinRel(res.report.k * res.report.length_e1, 1e-9));
    }
    SECTION("disk input is rejected") {
        PipelineConfig cfg;
        cfg.mode = PipelineMode::Double;
        CHECK_THROWS_WITH(run_double(fixtures::disk(5), cfg),
                          Catch::Matchers::ContainsSubstring("disk"));
    }
}

TEST_CASE("cut mode on a doubled 3-holed piece") {
    auto dbl = double_surface(fixtures::holed_rectangle());
    auto cfg = cut_config_for_double(dbl);

    SECTION("reproduces the mirror result") {
        auto res = run_closed_surface(dbl.surface, cfg);
        CHECK(res.report.all_pass());
        CHECK(res.report.genus == 2);
        CHECK(res.complex.chi() == -2);
        CHECK_THAT(res.report.gauss_bonnet_residual, WithinAbs(0.0, 1e-6));
        CHECK_THAT(res.report.area, WithinRel(2 * res.report.energy, 1e-9));
        for (double a : res.report.cone_angles) {
            double dev = std::abs(a / pi - std::llround(a / pi)) * pi;
            CHECK(dev <= 1e-6);
        }
        // matches the double-mode construction on the base piece
        PipelineConfig dcfg;
        dcfg.mode = PipelineMode::Double;
        auto direct = run_double(fixtures::holed_rectangle(), dcfg);
        CHECK(res.report.fingerprint == direct.report.fingerprint);
    }
    SECTION("paranoid mode solves both pieces") {
        auto pcfg = cfg;
        pcfg.paranoid = true;
        auto res = run_closed_surface(dbl.surface, pcfg);
        CHECK(res.report.all_pass());
        bool found = false;
        for (const auto& c : res.report.checks)
            if (c.name == "paranoid-solutions-agree-under-isomorphism") {
                found = true;
                CHECK(c.pass);
                CHECK(c.measured <= 1e-9);
            }
        CHECK(found);
    }
    SECTION("searched isomorphism agrees with the supplied one") {
        auto scfg = cfg;
        scfg.isomorphism.clear();
        auto res = run_closed_surface(dbl.surface, scfg);
        CHECK(res.report.all_pass());
    }
    SECTION("mismatched isomorphism fails at the isomorphism stage") {
        auto bad = cfg;
        // swap the images of the first two non-fixed pairs
        std::vector<size_t> moved;
        for (size_t i = 0; i < bad.isomorphism.size() && moved.size() < 2; ++i)
            if (bad.isomorphism[i].first != bad.isomorphism[i].second) moved.push_back(i);
        REQUIRE(moved.size() == 2);
        std::swap(bad.isomorphism[moved[0]].second, bad.isomorphism[moved[1]].second);
        CHECK_THROWS_WITH(run_closed_surface(dbl.surface, bad),
                          Catch::Matchers::ContainsSubstring("isomorphism"));
    }
    SECTION("wrong cycle count fails pants validation") {
        auto bad = cfg;
        bad.cut.cycles.pop_back();
        CHECK_THROWS_WITH(run_closed_surface(dbl.surface, bad),
                          Catch::Matchers::ContainsSubstring("cycle count"));
    }
}

TEST_CASE("negative controls") {
    SECTION("corrupted potential fails the invariant suite") {
        PipelineConfig cfg;
        cfg.mode = PipelineMode::Double;
        cfg.corrupt_vertex = 33;  // an interior vertex of the default fixture
        cfg.corrupt_delta = 0.05;
        auto res = run_double(fixtures::holed_rectangle(), cfg);
        CHECK_FALSE(res.report.all_pass());
        bool residual_failed = false;
        for (const auto& c : res.report.checks)
            if (c.name == "solver-residual" && !c.pass) residual_failed = true;
        CHECK(residual_failed);
    }
    SECTION("corrupting beyond k breaks the maximum principle") {
        PipelineConfig cfg;
        cfg.mode = PipelineMode::Double;
        cfg.corrupt_vertex = 33;
        cfg.corrupt_delta = 2.0;
        auto res = run_double(fixtures::holed_rectangle(), cfg);
        bool max_failed = false;
        for (const auto& c : res.report.checks)
            if (c.name == "maximum-principle" && !c.pass) max_failed = true;
        CHECK(max_failed);
    }
}

TEST_CASE("scaling the conductances keeps every identity") {
    PipelineConfig cfg;
    cfg.mode = PipelineMode::Double;
    auto base = run_double(fixtures::holed_rectangle(), cfg);
    PipelineConfig scaled = cfg;
    scaled.conductance.default_value = 2.0;
    auto twice = run_double(fixtures::holed_rectangle(), scaled);
    CHECK(base.report.all_pass());
    CHECK(twice.report.all_pass());
    CHECK_THAT(twice.report.length_e1, WithinRel(2 * base.report.length_e1, 1e-9));
    CHECK_THAT(twice.report.area, WithinRel(2 * base.report.area, 1e-9));
    CHECK_THAT(twice.report.energy, WithinRel(2 * base.report.energy, 1e-9));
}

TEST_CASE("run_tile reports the ladder identities") {
    PipelineConfig cfg;
    auto res = run_tile(fixtures::holed_rectangle(), cfg);
    CHECK(res.report.all_pass());
    CHECK_FALSE(res.complex.closed());
    CHECK_THAT(res.report.area, WithinRel(res.report.energy, 1e-9));
    SECTION("subdivision is applied before solving") {
        PipelineConfig fine = cfg;
        fine.subdivision_rounds = 1;
        fine.subdivision_scheme = SubdivisionScheme::EdgeMidpoint;
        auto res2 = run_tile(fixtures::holed_rectangle(), fine);
        CHECK(res2.report.all_pass());
        CHECK(res2.report.tile_count > res.report.tile_count);
    }
}

TEST_CASE("cut mode with subdivision rounds") {
    auto dbl = double_surface(fixtures::holed_rectangle());
    auto cfg = cut_config_for_double(dbl);
    cfg.subdivision_rounds = 1;
    SECTION("edge midpoint") {
        cfg.subdivision_scheme = SubdivisionScheme::EdgeMidpoint;
        auto res = run_closed_surface(dbl.surface, cfg);
        CHECK(res.report.all_pass());
        CHECK(res.report.genus == 2);
    }
    SECTION("barycentric") {
        cfg.subdivision_scheme = SubdivisionScheme::Barycentric;
        auto res = run_closed_surface(dbl.surface, cfg);
        CHECK(res.report.all_pass());
        CHECK(res.report.genus == 2);
    }
}
