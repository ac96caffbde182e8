#pragma once

#include <sstream>
#include <string>

#include "rectflow/flat_complex.hpp"
#include "rectflow/numeric.hpp"

namespace rectflow {

/// Structured text description of a flat complex: tiles, identifications,
/// cuffs, cone points, fingerprint. Deterministic; 12 significant digits.
inline std::string emit_flat_surface(const FlatComplex& f) {
    std::ostringstream os;
    os << "flat-surface\n";
    os << "tiles " << f.tiles().size() << "\n";
    for (size_t t = 0; t < f.tiles().size(); ++t) {
        const auto& tile = f.tiles()[t];
        os << "tile " << t << " w " << format_number(tile.width) << " h "
           << format_number(tile.height);
        if (tile.src_u >= 0) os << " edge " << tile.src_u << " " << tile.src_v;
        os << "\n";
    }
    os << "identifications " << f.identifications().size() << "\n";
    for (const auto& id : f.identifications())
        os << "ident " << id.tile_a << " " << side_name(id.side_a) << " "
           << format_number(id.a0) << " " << format_number(id.a1) << " " << id.tile_b << " "
           << side_name(id.side_b) << " " << format_number(id.b0) << " "
           << format_number(id.b1) << " " << (id.reversed ? "-" : "+") << "\n";
    os << "cuffs " << f.cuffs().size() << "\n";
    for (size_t c = 0; c < f.cuffs().size(); ++c) {
        os << "cuff " << c << " length " << format_number(f.cuffs()[c].length) << " arcs "
           << f.cuffs()[c].arcs.size() << "\n";
        for (const auto& a : f.cuffs()[c].arcs)
            os << "arc " << a.tile << " " << side_name(a.side) << " " << format_number(a.a0)
               << " " << format_number(a.a1) << "\n";
    }
    os << "cone-points " << f.cone_points().size() << "\n";
    for (const auto& p : f.cone_points())
        os << "cone " << format_number(p.angle) << " ("
           << format_number(p.angle / std::numbers::pi) << " pi) at tile " << p.tile << "\n";
    os << "chi " << f.chi() << "\n";
    os << "area " << format_number(f.area()) << "\n";
    os << "fingerprint " << f.fingerprint() << "\n";
    return os.str();
}

}  // namespace rectflow
