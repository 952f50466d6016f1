#pragma once

// Deterministic SVG snapshots of curve sets and point markers: identical
// inputs produce identical bytes (coordinates go through format_double).

#include <string>
#include <vector>

#include "mcflab/geometry.hpp"

namespace mcflab {

// Renders curves as stroked paths (palette cycles per curve) and markers as
// filled dots. The viewBox is the joint bounding box padded by 5% (unit box
// when everything is empty); the caption is printed in the corner.
std::string render_svg_frame(const std::vector<Polyline>& curves,
                             const std::vector<Vec2>& markers,
                             const std::string& caption = {});

}  // namespace mcflab
