#include "hnne/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hnne/nnsearch.hpp"
#include "hnne/parallel.hpp"

namespace hnne {

namespace {

double resolve_shrink(const FitParams& p) {
  double s = p.shrink > 0.0 ? p.shrink : (p.dim <= 3 && !p.guarantee ? 1.0 : 3.0 / 5.0);
  if (p.shrink < 0.0) throw InvalidArgument("fit: shrink must be positive (or 0 for the default)");
  if (p.guarantee) {
    if (s > 3.0 / 5.0 + 1e-12)
      throw InvalidArgument("fit: guarantee mode requires shrink <= 3/5, got " + std::to_string(s));
    if (p.radius_fraction * s > 0.2 + 1e-12)
      throw InvalidArgument("fit: guarantee mode requires radius_fraction * shrink <= 1/5");
  }
  return s;
}

}  // namespace

FitResult fit(const Matrix& points, const FitParams& params) {
  if (params.dim < 1) throw InvalidArgument("fit: dim must be >= 1");
  if (points.rows() < 2) throw InvalidArgument("fit: need at least 2 points");
  if (!(params.radius_fraction > 0.0 && params.radius_fraction < 1.0))
    throw InvalidArgument("fit: radius_fraction must lie in (0, 1)");
  require_finite(points, "fit input");

  FitResult res;
  res.resolved_shrink = resolve_shrink(params);
  res.hierarchy = build_hierarchy(points, params.backend, params.seed);
  const Hierarchy& h = res.hierarchy;

  // Preliminary projection, fitted on a centroid level when one is both
  // available and large enough to be representative.
  const Matrix* sample = &points;
  res.pca_level = kPcaLevelData;
  if (params.init == InitMode::PcaCentroids && !h.levels.empty()) {
    const int level = select_pca_level(h, params.pca_threshold);
    if (level != kPcaLevelData && h.levels[level].centroids.rows() > params.dim) {
      sample = &h.levels[level].centroids;
      res.pca_level = level;
    }
  }
  ProjectionModel& model = res.model;
  model.linear = fit_linear(*sample, params.dim, params.init, params.seed);
  model.radius_fraction = params.radius_fraction;
  model.shrink = res.resolved_shrink;
  model.inflated = false;

  const Matrix prelim_points = apply_linear(model.linear, points);
  std::vector<Matrix> prelim_levels(h.levels.size());
  for (std::size_t k = 0; k < h.levels.size(); ++k)
    prelim_levels[k] = apply_linear(model.linear, h.levels[k].centroids);

  TranslateParams tp;
  tp.radius_fraction = params.radius_fraction;
  tp.shrink = res.resolved_shrink;
  tp.backend = params.backend;
  tp.seed = params.seed;
  res.translation = translate_down(h, prelim_levels, prelim_points, tp);

  if (h.levels.empty()) {
    // Degenerate data (fewer than 3 first-step groups): the embedding is the
    // preliminary projection and the model is purely linear.
    if (params.lookup_level > 0)
      throw InvalidArgument("fit: lookup level " + std::to_string(params.lookup_level) +
                            " does not exist (hierarchy has no centroid levels)");
    model.lookup_level = 0;
    model.lookup_centroids.resize(0, points.cols());
    res.embedding = std::move(res.translation.embedding);
    return res;
  }

  int lookup = params.lookup_level;
  if (lookup < 0) lookup = h.top() >= 1 ? 1 : 0;
  if (lookup > h.top())
    throw InvalidArgument("fit: lookup level " + std::to_string(lookup) + " out of range [0, " +
                          std::to_string(h.top()) + "]");
  model.lookup_level = lookup;
  model.lookup_centroids = h.levels[lookup].centroids;

  // One affine per lookup cluster. Its scale maps the cluster's preliminary
  // spread onto the containment radius the cluster received at placement, so
  // replaying it keeps projections inside the cluster's training footprint.
  const Partition part = partition_at_level(h, lookup);
  const Matrix& prelim_c = prelim_levels[lookup];
  const Matrix& pos = res.translation.placed_levels[lookup];
  const std::vector<double>& radii = res.translation.level_radii[lookup];
  const int g = part.groups;
  std::vector<double> spread(g, 0.0);
  for (int i = 0; i < static_cast<int>(part.labels.size()); ++i) {
    const int c = part.labels[i];
    spread[c] = std::max(spread[c], (prelim_points.row(i) - prelim_c.row(c)).norm());
  }
  model.affines.resize(g);
  for (int c = 0; c < g; ++c) {
    const double target = res.resolved_shrink * params.radius_fraction * radii[c];
    const double sigma = spread[c] > 0.0 ? target / spread[c] : 1.0;
    model.affines[c].scale = sigma;
    model.affines[c].aspect = 1.0;
    model.affines[c].rotation_angle = 0.0;
    model.affines[c].translation = (pos.row(c) - sigma * prelim_c.row(c)).transpose();
  }

  if (params.inflate) {
    inflate(res.translation.embedding, part, pos, &model.affines);
    model.inflated = params.dim == 2;
  }

  res.embedding = std::move(res.translation.embedding);
  return res;
}

Matrix transform(const ProjectionModel& model, const Matrix& points) {
  if (points.rows() == 0) throw InvalidArgument("transform: empty input");
  Matrix prelim = apply_linear(model.linear, points);
  if (model.affines.empty()) return prelim;
  const std::vector<int> owner = nearest_index(model.lookup_centroids, points);
  Matrix out(points.rows(), model.linear.output_dim);
  parallel_chunks(points.rows(), 256, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t q = b; q < e; ++q) out.row(q) = model.affines[owner[q]].apply(prelim.row(q));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Model file: little-endian binary, layout documented in docs/model-format.md.

namespace {

constexpr char kMagic[4] = {'H', 'N', 'N', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }
void put_matrix(std::string& buf, const Matrix& m) {
  put_u32(buf, static_cast<std::uint32_t>(m.rows()));
  put_u32(buf, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64(buf, m(i, j));
}

struct Reader {
  const unsigned char* p;
  const unsigned char* end;
  const std::string& path;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n) throw InvalidData(path + ": truncated model file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Matrix matrix(std::uint32_t max_dim) {
    const std::uint32_t rows = u32();
    const std::uint32_t cols = u32();
    if (rows > max_dim || cols > max_dim) throw InvalidData(path + ": implausible matrix size in model file");
    Matrix m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
      for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = f64();
    return m;
  }
};

}  // namespace

void save_model(const ProjectionModel& model, const std::string& path) {
  std::string buf;
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(model.linear.mode));
  put_u32(buf, static_cast<std::uint32_t>(model.linear.input_dim));
  put_u32(buf, static_cast<std::uint32_t>(model.linear.output_dim));
  put_u64(buf, model.linear.seed);
  put_u32(buf, static_cast<std::uint32_t>(model.linear.mean.size()));
  for (Eigen::Index i = 0; i < model.linear.mean.size(); ++i) put_f64(buf, model.linear.mean(i));
  put_matrix(buf, model.linear.basis);
  put_u32(buf, static_cast<std::uint32_t>(model.lookup_level));
  put_f64(buf, model.radius_fraction);
  put_f64(buf, model.shrink);
  put_u32(buf, model.inflated ? 1 : 0);
  put_matrix(buf, model.lookup_centroids);
  put_u32(buf, static_cast<std::uint32_t>(model.affines.size()));
  for (const auto& a : model.affines) {
    put_u32(buf, static_cast<std::uint32_t>(a.translation.size()));
    for (Eigen::Index i = 0; i < a.translation.size(); ++i) put_f64(buf, a.translation(i));
    put_f64(buf, a.scale);
    put_f64(buf, a.aspect);
    put_f64(buf, a.rotation_angle);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidData(path + ": cannot open for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InvalidData(path + ": write failed");
}

ProjectionModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidData(path + ": cannot open");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || buf.compare(0, 4, kMagic, 4) != 0)
    throw InvalidData(path + ": not a model file (bad magic)");
  Reader r{reinterpret_cast<const unsigned char*>(buf.data()) + 4,
           reinterpret_cast<const unsigned char*>(buf.data()) + buf.size(), path};
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw InvalidData(path + ": unsupported model version " + std::to_string(version));

  ProjectionModel model;
  const std::uint32_t mode = r.u32();
  if (mode > 3) throw InvalidData(path + ": bad projection mode");
  model.linear.mode = static_cast<InitMode>(mode);
  model.linear.input_dim = static_cast<int>(r.u32());
  model.linear.output_dim = static_cast<int>(r.u32());
  if (model.linear.input_dim < 1 || model.linear.input_dim > (1 << 24) || model.linear.output_dim < 1 ||
      model.linear.output_dim > (1 << 24))
    throw InvalidData(path + ": implausible dimensions in model file");
  model.linear.seed = r.u64();
  const std::uint32_t mean_size = r.u32();
  if (mean_size > (1u << 24)) throw InvalidData(path + ": implausible mean size");
  model.linear.mean.resize(mean_size);
  for (std::uint32_t i = 0; i < mean_size; ++i) model.linear.mean(i) = r.f64();
  model.linear.basis = r.matrix(1u << 24);
  model.lookup_level = static_cast<int>(r.u32());
  model.radius_fraction = r.f64();
  model.shrink = r.f64();
  model.inflated = r.u32() != 0;
  model.lookup_centroids = r.matrix(1u << 24);
  const std::uint32_t naff = r.u32();
  if (naff != static_cast<std::uint32_t>(model.lookup_centroids.rows()))
    throw InvalidData(path + ": affine count does not match centroid count");
  model.affines.resize(naff);
  for (auto& a : model.affines) {
    const std::uint32_t tdim = r.u32();
    if (tdim != static_cast<std::uint32_t>(model.linear.output_dim))
      throw InvalidData(path + ": affine dimension does not match output dimension");
    a.translation.resize(tdim);
    for (std::uint32_t i = 0; i < tdim; ++i) a.translation(i) = r.f64();
    a.scale = r.f64();
    a.aspect = r.f64();
    a.rotation_angle = r.f64();
  }
  if (r.p != r.end) throw InvalidData(path + ": trailing bytes in model file");
  if (model.lookup_centroids.rows() > 0 && model.lookup_centroids.cols() != model.linear.input_dim)
    throw InvalidData(path + ": centroid dimension does not match input dimension");
  return model;
}

}  // namespace hnne
