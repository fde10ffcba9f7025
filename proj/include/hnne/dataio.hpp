#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hnne/matrix.hpp"

namespace hnne {

enum class FileFormat { Auto, Csv, F32Raw };

// Where a dataset comes from: a file (csv or packed f32) or one of the
// built-in generators ("blobs", "uniform-square") with its parameters.
struct DatasetSpec {
  std::string source;
  FileFormat format = FileFormat::Auto;
  bool has_header = false;
  std::string labels_path;
  std::int64_t n = 1000;
  int dim = 16;
  int clusters = 5;
  double separation = 20.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

struct Dataset {
  Matrix points;
  std::vector<int> labels;
  bool has_labels = false;
};

Dataset load_dataset(const DatasetSpec& spec);

// Comma-separated, '.' decimal point, optional single header line, no
// quoting. Writing uses shortest round-trip formatting.
Matrix load_csv(const std::string& path, bool has_header = false);
void save_csv(const std::string& path, const Matrix& m);

// Packed f32 rows: magic "HNND", u32 rows, u32 cols (little-endian), then
// rows*cols little-endian f32, row-major. Loading streams through a small
// buffer, so peak memory stays at the double matrix plus a constant.
Matrix load_f32(const std::string& path);
void save_f32(const std::string& path, const Matrix& m);

// One integer per line.
std::vector<int> load_labels(const std::string& path);
void save_labels(const std::string& path, const std::vector<int>& labels);

// Gaussian blobs around lattice-separated centers; labels are contiguous
// blocks, cluster sizes balanced to within one.
std::pair<Matrix, std::vector<int>> gen_blobs(std::int64_t n, int dim, int clusters,
                                              double separation, double noise, std::uint64_t seed);

// Uniform samples from the unit square.
Matrix gen_uniform_square(std::int64_t n, std::uint64_t seed);

}  // namespace hnne
