#pragma once

// Marching squares with linear subcell interpolation, plus the contour
// bookkeeping (chaining into polylines, lengths, Hausdorff distances, line
// crossings) shared by the graphical and level-set modules.

#include "mcflab/geometry.hpp"

namespace mcflab {

// Zero set of (field - level) as chained polylines. Grid values exactly equal
// to level are perturbed by +1e-12 so the sign test is unambiguous; saddle
// cells are resolved with the cell-center average.
std::vector<Polyline> extract_contours(const ScalarField2D& f, double level = 0.0);

double contours_length(const std::vector<Polyline>& curves);

// One-sided and symmetric Hausdorff distances between two polyline families
// (vertex-to-segment). Empty families give +inf unless both are empty (0).
double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b);

double dist_to_polylines(Vec2 p, const std::vector<Polyline>& curves);

// Crossing points of the curves with the horizontal line {y = c}.
std::vector<Vec2> horizontal_line_crossings(const std::vector<Polyline>& curves, double c);

}  // namespace mcflab
