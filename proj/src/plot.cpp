#include "hnne/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace hnne {

namespace {

// tab20-style palette; label l gets color l mod 20.
constexpr const char* kPalette[20] = {
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728",
    "#ff9896", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2",
    "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};

void append_fixed(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  out += buf;
}

}  // namespace

std::string render_scatter_svg(const Matrix& embedding, const std::vector<int>* labels,
                               const PlotStyle& style) {
  if (embedding.cols() != 2)
    throw InvalidArgument("render_scatter: embedding must be 2-d, got " +
                          std::to_string(embedding.cols()) + " columns");
  if (embedding.rows() < 1) throw InvalidArgument("render_scatter: empty embedding");
  if (labels && static_cast<Eigen::Index>(labels->size()) != embedding.rows())
    throw InvalidArgument("render_scatter: labels size does not match embedding");
  require_finite(embedding, "render_scatter embedding");

  const std::int64_t n = embedding.rows();
  const std::int64_t stride = n > style.max_points ? (n + style.max_points - 1) / style.max_points : 1;

  double min_x = embedding(0, 0), max_x = min_x, min_y = embedding(0, 1), max_y = min_y;
  for (std::int64_t i = 0; i < n; i += stride) {
    min_x = std::min(min_x, embedding(i, 0));
    max_x = std::max(max_x, embedding(i, 0));
    min_y = std::min(min_y, embedding(i, 1));
    max_y = std::max(max_y, embedding(i, 1));
  }
  const double span_x = max_x - min_x;
  const double span_y = max_y - min_y;
  const double usable_w = style.width * (1.0 - 2.0 * style.margin_fraction);
  const double usable_h = style.height * (1.0 - 2.0 * style.margin_fraction);
  double scale = 0.0;  // degenerate bbox: everything plots at the center
  if (span_x > 0.0 || span_y > 0.0)
    scale = std::min(span_x > 0.0 ? usable_w / span_x : usable_h / span_y,
                     span_y > 0.0 ? usable_h / span_y : usable_w / span_x);
  const double cx = (min_x + max_x) / 2.0;
  const double cy = (min_y + max_y) / 2.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " +
         std::to_string(style.width) + " " + std::to_string(style.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::int64_t i = 0; i < n; i += stride) {
    // y grows downward in SVG, so the vertical axis is flipped.
    const double px = style.width / 2.0 + (embedding(i, 0) - cx) * scale;
    const double py = style.height / 2.0 - (embedding(i, 1) - cy) * scale;
    const char* color = kPalette[0];
    if (labels) {
      const int l = ((*labels)[i] % 20 + 20) % 20;
      color = kPalette[l];
    }
    svg += "<circle cx=\"";
    append_fixed(svg, px);
    svg += "\" cy=\"";
    append_fixed(svg, py);
    svg += "\" r=\"";
    append_fixed(svg, style.point_radius);
    svg += "\" fill=\"";
    svg += color;
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void render_scatter(const Matrix& embedding, const std::vector<int>* labels,
                    const std::string& out_path, const PlotStyle& style) {
  const std::string svg = render_scatter_svg(embedding, labels, style);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidData(out_path + ": cannot open for writing");
  out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!out) throw InvalidData(out_path + ": write failed");
}

}  // namespace hnne
