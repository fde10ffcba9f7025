#pragma once

#include <string>
#include <vector>

#include "hnne/matrix.hpp"

namespace hnne {

struct PlotStyle {
  int width = 1000;
  int height = 1000;
  double point_radius = 1.5;
  double margin_fraction = 0.02;
  // Embeddings beyond this row count are decimated by a fixed stride.
  std::int64_t max_points = 200000;
};

// Deterministic SVG scatter of a 2-d embedding. Points are colored by label
// through a fixed 20-color palette (nullptr for single-color plots); the
// bounding box is fitted into the viewport with a uniform scale and margin.
std::string render_scatter_svg(const Matrix& embedding, const std::vector<int>* labels,
                               const PlotStyle& style = {});

void render_scatter(const Matrix& embedding, const std::vector<int>* labels,
                    const std::string& out_path, const PlotStyle& style = {});

}  // namespace hnne
