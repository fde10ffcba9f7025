#include "hnne/dataio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <system_error>

#include "hnne/rng.hpp"

namespace hnne {

namespace {

constexpr char kRawMagic[4] = {'H', 'N', 'N', 'D'};

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_u32le(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

// Strips one trailing '\r' so CRLF files parse like LF files.
std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

Matrix load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidData(path + ": cannot open");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<std::vector<double>> rows;
  Eigen::Index cols = -1;
  std::size_t pos = 0;
  std::int64_t line_no = 0;
  bool header_pending = has_header;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    const std::string_view line = trim_cr(std::string_view(content).substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    if (cols > 0) row.reserve(cols);
    std::size_t field_start = 0;
    int field_no = 0;
    while (true) {
      std::size_t comma = line.find(',', field_start);
      const std::string_view field =
          line.substr(field_start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - field_start);
      ++field_no;
      double value = 0.0;
      const char* first = field.data();
      const char* last = field.data() + field.size();
      while (first < last && (*first == ' ' || *first == '\t')) ++first;
      while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last)
        throw InvalidData(path + ": line " + std::to_string(line_no) + ", field " +
                          std::to_string(field_no) + ": not a number");
      if (!std::isfinite(value))
        throw InvalidData(path + ": line " + std::to_string(line_no) + ", field " +
                          std::to_string(field_no) + ": non-finite value");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      field_start = comma + 1;
    }
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidData(path + ": line " + std::to_string(line_no) + ": expected " +
                        std::to_string(cols) + " fields, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidData(path + ": no data rows");

  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

void save_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidData(path + ": cannot open for writing");
  std::string line;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) line.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j));
      line.append(buf, res.ptr);
    }
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw InvalidData(path + ": write failed");
}

Matrix load_f32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidData(path + ": cannot open");
  unsigned char header[12];
  in.read(reinterpret_cast<char*>(header), 12);
  if (in.gcount() != 12 || std::memcmp(header, kRawMagic, 4) != 0)
    throw InvalidData(path + ": not an f32 matrix file (bad magic)");
  const std::uint32_t rows = read_u32le(header + 4);
  const std::uint32_t cols = read_u32le(header + 8);
  if (rows == 0 || cols == 0) throw InvalidData(path + ": empty matrix");
  in.seekg(0, std::ios::end);
  const std::int64_t payload = static_cast<std::int64_t>(in.tellg()) - 12;
  const std::int64_t expected = static_cast<std::int64_t>(rows) * cols * 4;
  if (payload != expected)
    throw InvalidData(path + ": payload is " + std::to_string(payload) + " bytes, header implies " +
                      std::to_string(expected));
  in.seekg(12, std::ios::beg);

  Matrix m(rows, cols);
  // Fixed-size staging buffer keeps peak memory at the matrix plus a constant.
  constexpr std::size_t kChunkFloats = 1 << 20;
  std::vector<unsigned char> buf(kChunkFloats * 4);
  std::int64_t done = 0;
  const std::int64_t total = static_cast<std::int64_t>(rows) * cols;
  double* dst = m.data();
  while (done < total) {
    const std::int64_t want = std::min<std::int64_t>(kChunkFloats, total - done);
    in.read(reinterpret_cast<char*>(buf.data()), want * 4);
    if (in.gcount() != want * 4) throw InvalidData(path + ": truncated read");
    for (std::int64_t t = 0; t < want; ++t) {
      const float f = std::bit_cast<float>(read_u32le(buf.data() + t * 4));
      if (!std::isfinite(f)) {
        const std::int64_t flat = done + t;
        throw InvalidData(path + ": non-finite value at row " + std::to_string(flat / cols) +
                          ", column " + std::to_string(flat % cols));
      }
      dst[done + t] = static_cast<double>(f);
    }
    done += want;
  }
  return m;
}

void save_f32(const std::string& path, const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw InvalidArgument("save_f32: empty matrix");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidData(path + ": cannot open for writing");
  out.write(kRawMagic, 4);
  write_u32le(out, static_cast<std::uint32_t>(m.rows()));
  write_u32le(out, static_cast<std::uint32_t>(m.cols()));
  constexpr std::size_t kChunkFloats = 1 << 20;
  std::vector<unsigned char> buf;
  buf.reserve(kChunkFloats * 4);
  const std::int64_t total = static_cast<std::int64_t>(m.rows()) * m.cols();
  const double* src = m.data();
  for (std::int64_t t = 0; t < total; ++t) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(src[t]));
    buf.push_back(static_cast<unsigned char>(bits & 0xff));
    buf.push_back(static_cast<unsigned char>((bits >> 8) & 0xff));
    buf.push_back(static_cast<unsigned char>((bits >> 16) & 0xff));
    buf.push_back(static_cast<unsigned char>((bits >> 24) & 0xff));
    if (buf.size() == kChunkFloats * 4) {
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  if (!buf.empty())
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InvalidData(path + ": write failed");
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidData(path + ": cannot open");
  std::vector<int> labels;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim_cr(line);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    if (v.empty()) continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw InvalidData(path + ": line " + std::to_string(line_no) + ": not an integer label");
    labels.push_back(value);
  }
  if (labels.empty()) throw InvalidData(path + ": no labels");
  return labels;
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidData(path + ": cannot open for writing");
  std::string text;
  for (int l : labels) {
    text += std::to_string(l);
    text.push_back('\n');
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InvalidData(path + ": write failed");
}

std::pair<Matrix, std::vector<int>> gen_blobs(std::int64_t n, int dim, int clusters,
                                              double separation, double noise, std::uint64_t seed) {
  if (clusters < 1) throw InvalidArgument("gen_blobs: clusters must be >= 1");
  if (n < clusters) throw InvalidArgument("gen_blobs: n must be >= clusters");
  if (dim < 1) throw InvalidArgument("gen_blobs: dim must be >= 1");
  if (!(separation >= 0.0) || !(noise >= 0.0))
    throw InvalidArgument("gen_blobs: separation and noise must be non-negative");

  // Centers are laid out at two scales inside a planar subspace: widely
  // separated groups of nearby centers. Grouped centers mirror the
  // multi-scale cluster structure of real data (classes that form families),
  // and the planar layout keeps the center geometry representable in typical
  // 2-d or 3-d targets. Any two centers stay at least `separation` apart.
  const int q = std::min(dim, 2);
  const int per_group = 5;
  const int groups = (clusters + per_group - 1) / per_group;
  Rng rng(mix64(seed ^ 0x243f6a8885a308d3ull));
  Matrix centers = Matrix::Zero(clusters, dim);
  {
    const double group_sep = 8.0 * separation;
    double box = group_sep * (std::ceil(std::sqrt(static_cast<double>(groups))) + 1.0);
    Matrix sites = Matrix::Zero(groups, q);
    int placed = 0, tries = 0;
    while (placed < groups) {
      Eigen::RowVectorXd cand(q);
      for (int j = 0; j < q; ++j) cand(j) = box * rng.next_double();
      bool ok = true;
      for (int g = 0; g < placed; ++g)
        if ((sites.row(g) - cand).norm() < group_sep) { ok = false; break; }
      if (ok) {
        sites.row(placed++) = cand;
        tries = 0;
      } else if (++tries > 200) {
        box *= 1.2;  // box too tight for the requested separation: widen
        tries = 0;
      }
    }
    double radius = 1.25 * separation;
    for (int c = 0; c < clusters; ++c) {
      const int g = c % groups;
      tries = 0;
      while (true) {
        Eigen::RowVectorXd cand = Eigen::RowVectorXd::Zero(dim);
        for (int j = 0; j < q; ++j)
          cand(j) = sites(g, j) + radius * (2.0 * rng.next_double() - 1.0);
        bool ok = true;
        for (int p = 0; p < c; ++p)
          if ((centers.row(p) - cand).norm() < separation) { ok = false; break; }
        if (ok) {
          centers.row(c) = cand;
          break;
        }
        if (++tries > 500) {
          radius *= 1.2;  // group too crowded (e.g. 1-d data): widen
          tries = 0;
        }
      }
    }
  }

  Matrix points(n, dim);
  std::vector<int> labels(n);
  std::int64_t row = 0;
  const std::int64_t base = n / clusters;
  const std::int64_t rem = n % clusters;
  for (int c = 0; c < clusters; ++c) {
    const std::int64_t count = base + (c < rem ? 1 : 0);
    for (std::int64_t i = 0; i < count; ++i, ++row) {
      labels[row] = c;
      for (int j = 0; j < dim; ++j) points(row, j) = centers(c, j) + noise * rng.next_gauss();
    }
  }
  return {std::move(points), std::move(labels)};
}

Matrix gen_uniform_square(std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("gen_uniform_square: n must be >= 2");
  Matrix points(n, 2);
  Rng rng(mix64(seed ^ 0x13198a2e03707344ull));
  for (std::int64_t i = 0; i < n; ++i) {
    points(i, 0) = rng.next_double();
    points(i, 1) = rng.next_double();
  }
  return points;
}

Dataset load_dataset(const DatasetSpec& spec) {
  Dataset ds;
  if (spec.source == "blobs") {
    auto [points, labels] = gen_blobs(spec.n, spec.dim, spec.clusters, spec.separation, spec.noise, spec.seed);
    ds.points = std::move(points);
    ds.labels = std::move(labels);
    ds.has_labels = true;
    return ds;
  }
  if (spec.source == "uniform-square" || spec.source == "uniform") {
    ds.points = gen_uniform_square(spec.n, spec.seed);
    return ds;
  }

  FileFormat fmt = spec.format;
  if (fmt == FileFormat::Auto) {
    std::ifstream probe(spec.source, std::ios::binary);
    if (!probe) throw InvalidData(spec.source + ": cannot open");
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    fmt = probe.gcount() == 4 && std::memcmp(magic, kRawMagic, 4) == 0 ? FileFormat::F32Raw
                                                                       : FileFormat::Csv;
  }
  ds.points = fmt == FileFormat::F32Raw ? load_f32(spec.source) : load_csv(spec.source, spec.has_header);
  if (!spec.labels_path.empty()) {
    ds.labels = load_labels(spec.labels_path);
    if (static_cast<std::int64_t>(ds.labels.size()) != ds.points.rows())
      throw InvalidData(spec.labels_path + ": " + std::to_string(ds.labels.size()) +
                        " labels for " + std::to_string(ds.points.rows()) + " points");
    ds.has_labels = true;
  }
  return ds;
}

}  // namespace hnne
