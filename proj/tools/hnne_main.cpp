// hnne command-line tool: fit embeddings, project new points, score results.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hnne/dataio.hpp"
#include "hnne/hierarchy.hpp"
#include "hnne/metrics.hpp"
#include "hnne/parallel.hpp"
#include "hnne/plot.hpp"
#include "hnne/transform.hpp"

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Options shared by every subcommand.
struct CommonOpts {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string backend = "auto";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Random seed");
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)")
      ->envname("HNNE_THREADS");
  cmd->add_option("--backend", opts.backend, "Nearest-neighbor backend")
      ->check(CLI::IsMember({"auto", "exact", "approx"}));
}

hnne::NNBackend backend_of(const CommonOpts& opts) {
  if (opts.backend == "exact") return hnne::NNBackend::Exact;
  if (opts.backend == "approx") return hnne::NNBackend::Approx;
  return hnne::NNBackend::Auto;
}

// "--synthetic blobs,n=5000,dim=64,clusters=10" and friends.
hnne::DatasetSpec parse_synthetic(const std::string& text, const CommonOpts& common) {
  hnne::DatasetSpec spec;
  spec.seed = common.seed;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    parts.push_back(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (parts.empty() || parts[0].empty())
    throw hnne::InvalidArgument("--synthetic: missing generator name");
  spec.source = parts[0];
  if (spec.source != "blobs" && spec.source != "uniform-square" && spec.source != "uniform")
    throw hnne::InvalidArgument("--synthetic: unknown generator '" + spec.source +
                                "' (expected blobs or uniform-square)");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& kv = parts[i];
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw hnne::InvalidArgument("--synthetic: expected key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    try {
      if (key == "n")
        spec.n = std::stoll(value);
      else if (key == "dim")
        spec.dim = std::stoi(value);
      else if (key == "clusters")
        spec.clusters = std::stoi(value);
      else if (key == "sep" || key == "separation")
        spec.separation = std::stod(value);
      else if (key == "noise")
        spec.noise = std::stod(value);
      else if (key == "seed")
        spec.seed = std::stoull(value);
      else
        throw hnne::InvalidArgument("--synthetic: unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw hnne::InvalidArgument("--synthetic: bad value for '" + key + "': '" + value + "'");
    }
  }
  return spec;
}

// Output format by explicit request, else by extension (.csv vs raw).
hnne::FileFormat format_for_output(const std::string& path, const std::string& requested) {
  if (requested == "csv") return hnne::FileFormat::Csv;
  if (requested == "raw") return hnne::FileFormat::F32Raw;
  const std::size_t dot = path.rfind('.');
  if (dot != std::string::npos) {
    const std::string ext = path.substr(dot + 1);
    if (ext == "raw" || ext == "f32" || ext == "hnnd" || ext == "bin") return hnne::FileFormat::F32Raw;
  }
  return hnne::FileFormat::Csv;
}

void save_matrix(const std::string& path, const hnne::Matrix& m, hnne::FileFormat fmt) {
  if (fmt == hnne::FileFormat::F32Raw)
    hnne::save_f32(path, m);
  else
    hnne::save_csv(path, m);
}

std::int64_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::int64_t kb = 0;
      for (char ch : line)
        if (ch >= '0' && ch <= '9') kb = kb * 10 + (ch - '0');
      return kb * 1024;
    }
  }
  return -1;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw hnne::InvalidData(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw hnne::InvalidData(path + ": write failed");
}

// ---------------------------------------------------------------------------

struct FitOpts {
  CommonOpts common;
  std::string input;
  std::string synthetic;
  std::string format = "auto";
  bool csv_header = false;
  std::string labels_in;
  int dim = 2;
  std::string init = "pca-centroids";
  double radius_fraction = 1.0 / 3.0;
  double shrink = 0.0;
  bool guarantee = false;
  bool inflate = false;
  int transform_level = -1;
  int pca_threshold = 1000;
  std::string out;
  std::string out_format = "auto";
  std::string model_path;
  std::string manifest;
};

hnne::DatasetSpec dataset_spec_of(const std::string& input, const std::string& synthetic,
                                  const std::string& format, bool csv_header,
                                  const std::string& labels, const CommonOpts& common) {
  if (input.empty() && synthetic.empty())
    throw hnne::InvalidArgument("either --input or --synthetic is required");
  if (!input.empty() && !synthetic.empty())
    throw hnne::InvalidArgument("--input and --synthetic are mutually exclusive");
  if (!synthetic.empty()) return parse_synthetic(synthetic, common);
  hnne::DatasetSpec spec;
  spec.source = input;
  spec.has_header = csv_header;
  spec.labels_path = labels;
  if (format == "csv")
    spec.format = hnne::FileFormat::Csv;
  else if (format == "raw")
    spec.format = hnne::FileFormat::F32Raw;
  return spec;
}

hnne::InitMode init_mode_of(const std::string& name) {
  if (name == "pca-centroids") return hnne::InitMode::PcaCentroids;
  if (name == "pca-full") return hnne::InitMode::PcaFull;
  if (name == "random-proj") return hnne::InitMode::RandomProjection;
  return hnne::InitMode::RandomPoints;
}

int run_fit(const FitOpts& o) {
  const auto spec =
      dataset_spec_of(o.input, o.synthetic, o.format, o.csv_header, o.labels_in, o.common);
  const auto t_load = Clock::now();
  const hnne::Dataset ds = hnne::load_dataset(spec);
  const double load_s = seconds_since(t_load);

  hnne::FitParams params;
  params.dim = o.dim;
  params.init = init_mode_of(o.init);
  params.pca_threshold = o.pca_threshold;
  params.radius_fraction = o.radius_fraction;
  params.shrink = o.shrink;
  params.guarantee = o.guarantee;
  params.inflate = o.inflate;
  params.lookup_level = o.transform_level;
  params.backend = backend_of(o.common);
  params.seed = o.common.seed;

  const auto t_fit = Clock::now();
  const hnne::FitResult res = hnne::fit(ds.points, params);
  const double fit_s = seconds_since(t_fit);

  save_matrix(o.out, res.embedding, format_for_output(o.out, o.out_format));
  if (!o.model_path.empty()) hnne::save_model(res.model, o.model_path);

  json manifest;
  manifest["command"] = "fit";
  manifest["source"] = spec.source;
  manifest["n"] = ds.points.rows();
  manifest["input_dim"] = ds.points.cols();
  manifest["output_dim"] = o.dim;
  manifest["params"] = {{"seed", o.common.seed},
                        {"init", o.init},
                        {"backend", o.common.backend},
                        {"radius_fraction", o.radius_fraction},
                        {"shrink", res.resolved_shrink},
                        {"guarantee", o.guarantee},
                        {"inflate", o.inflate},
                        {"pca_threshold", o.pca_threshold},
                        {"lookup_level", res.model.lookup_level},
                        {"threads", hnne::thread_count()}};
  manifest["hierarchy"] = {{"base_groups", res.hierarchy.base_partition.groups},
                           {"level_sizes", res.hierarchy.level_sizes()},
                           {"pca_level", res.pca_level}};
  manifest["load_seconds"] = load_s;
  manifest["fit_seconds"] = fit_s;
  manifest["outputs"] = {{"embedding", o.out}};
  if (!o.model_path.empty()) manifest["outputs"]["model"] = o.model_path;
  const std::string manifest_path = o.manifest.empty() ? o.out + ".manifest.json" : o.manifest;
  write_json_file(manifest_path, manifest);

  std::cout << "fit: n=" << ds.points.rows() << " dim=" << ds.points.cols() << "->" << o.dim
            << " levels=" << json(res.hierarchy.level_sizes()).dump() << " seconds=" << fit_s
            << "\n";
  return 0;
}

struct TransformOpts {
  CommonOpts common;
  std::string model_path;
  std::string input;
  std::string format = "auto";
  bool csv_header = false;
  std::string out;
  std::string out_format = "auto";
};

int run_transform(const TransformOpts& o) {
  const hnne::ProjectionModel model = hnne::load_model(o.model_path);
  const auto spec = dataset_spec_of(o.input, "", o.format, o.csv_header, "", o.common);
  const hnne::Dataset ds = hnne::load_dataset(spec);
  const auto t0 = Clock::now();
  const hnne::Matrix out = hnne::transform(model, ds.points);
  const double s = seconds_since(t0);
  save_matrix(o.out, out, format_for_output(o.out, o.out_format));
  std::cout << "transform: n=" << out.rows() << " dim=" << model.linear.input_dim << "->"
            << model.linear.output_dim << " seconds=" << s << "\n";
  return 0;
}

struct MetricsOpts {
  CommonOpts common;
  std::string high;
  std::string low;
  std::string labels;
  bool csv_header = false;
  std::vector<std::string> which{"trust"};
  int trust_k = 5;
  std::vector<int> knn_k{1, 5, 10, 15, 20};
  int folds = 10;
  std::string out;
};

int run_metrics(const MetricsOpts& o) {
  std::set<std::string> which(o.which.begin(), o.which.end());
  for (const auto& w : which)
    if (w != "trust" && w != "knn" && w != "cta")
      throw hnne::InvalidArgument("--metrics: unknown metric '" + w + "' (expected trust, knn, cta)");
  if (which.empty()) throw hnne::InvalidArgument("--metrics: empty metric list");

  const bool needs_high = which.count("trust") || which.count("cta");
  const bool needs_labels = which.count("knn") || which.count("cta");
  if (needs_high && o.high.empty())
    throw hnne::InvalidArgument("--high is required for trust and cta");
  if (needs_labels && o.labels.empty())
    throw hnne::InvalidArgument("--labels is required for knn and cta");

  hnne::DatasetSpec low_spec;
  low_spec.source = o.low;
  low_spec.has_header = o.csv_header;
  const hnne::Matrix low = hnne::load_dataset(low_spec).points;
  hnne::Matrix high;
  if (needs_high) {
    hnne::DatasetSpec high_spec;
    high_spec.source = o.high;
    high_spec.has_header = o.csv_header;
    high = hnne::load_dataset(high_spec).points;
  }
  std::vector<int> labels;
  if (needs_labels) {
    labels = hnne::load_labels(o.labels);
    if (static_cast<std::int64_t>(labels.size()) != low.rows())
      throw hnne::InvalidData(o.labels + ": " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(low.rows()) + " points");
  }

  const auto t0 = Clock::now();
  json report;
  if (which.count("trust")) {
    report["trustworthiness"] = hnne::trustworthiness(high, low, o.trust_k);
    report["trustworthiness_k"] = o.trust_k;
  }
  if (which.count("knn")) {
    json arr = json::array();
    for (int k : o.knn_k)
      arr.push_back({{"k", k},
                     {"accuracy", hnne::knn_accuracy_cv(low, labels, k, o.folds, o.common.seed)},
                     {"folds", o.folds}});
    report["knn_accuracy"] = arr;
  }
  if (which.count("cta")) report["cta"] = hnne::centroid_triplet_accuracy(high, low, labels);
  report["runtime_seconds"] = seconds_since(t0);

  const std::string line = report.dump();
  std::cout << line << "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw hnne::InvalidData(o.out + ": cannot open for writing");
    f << line << "\n";
  }
  return 0;
}

struct PlotOpts {
  std::string input;
  bool csv_header = false;
  std::string labels;
  std::string out;
  hnne::PlotStyle style;
};

int run_plot(const PlotOpts& o) {
  hnne::DatasetSpec spec;
  spec.source = o.input;
  spec.has_header = o.csv_header;
  const hnne::Matrix emb = hnne::load_dataset(spec).points;
  std::vector<int> labels;
  if (!o.labels.empty()) {
    labels = hnne::load_labels(o.labels);
    if (static_cast<std::int64_t>(labels.size()) != emb.rows())
      throw hnne::InvalidData(o.labels + ": " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(emb.rows()) + " points");
  }
  hnne::render_scatter(emb, labels.empty() ? nullptr : &labels, o.out, o.style);
  std::cout << "plot: " << o.out << " (" << emb.rows() << " points)\n";
  return 0;
}

struct SynthOpts {
  CommonOpts common;
  std::string synthetic;
  std::string out;
  std::string out_format = "auto";
  std::string labels_out;
};

int run_synth(const SynthOpts& o) {
  const auto spec = parse_synthetic(o.synthetic, o.common);
  const hnne::Dataset ds = hnne::load_dataset(spec);
  save_matrix(o.out, ds.points, format_for_output(o.out, o.out_format));
  if (!o.labels_out.empty()) {
    if (!ds.has_labels)
      throw hnne::InvalidArgument("--labels-out: generator '" + spec.source + "' produces no labels");
    hnne::save_labels(o.labels_out, ds.labels);
  }
  std::cout << "synth: " << o.out << " (" << ds.points.rows() << " x " << ds.points.cols() << ")\n";
  return 0;
}

struct BenchOpts {
  CommonOpts common;
  std::vector<std::string> synthetic;
  std::vector<std::string> inputs;
  int dim = 2;
  int repeats = 3;
  bool load_only = false;
  std::string manifest;
};

int run_bench(const BenchOpts& o) {
  json rows = json::array();
  if (o.repeats < 1) throw hnne::InvalidArgument("--repeats must be >= 1");

  std::vector<std::pair<std::string, hnne::DatasetSpec>> specs;
  for (const auto& s : o.synthetic) specs.emplace_back(s, parse_synthetic(s, o.common));
  for (const auto& path : o.inputs) {
    hnne::DatasetSpec spec;
    spec.source = path;
    specs.emplace_back(path, spec);
  }

  if (o.load_only) {
    std::cout << "dataset\tn\tdim\tload_s\tmatrix_bytes\tpeak_rss_bytes\n";
    for (const auto& [name, spec] : specs) {
      const auto t0 = Clock::now();
      const hnne::Dataset ds = hnne::load_dataset(spec);
      const double s = seconds_since(t0);
      const std::int64_t bytes = static_cast<std::int64_t>(ds.points.rows()) * ds.points.cols() * 8;
      const std::int64_t rss = peak_rss_bytes();
      std::cout << name << "\t" << ds.points.rows() << "\t" << ds.points.cols() << "\t" << s << "\t"
                << bytes << "\t" << rss << "\n";
      rows.push_back({{"dataset", name},
                      {"n", ds.points.rows()},
                      {"dim", ds.points.cols()},
                      {"load_seconds", s},
                      {"matrix_bytes", bytes},
                      {"peak_rss_bytes", rss}});
    }
  } else {
    std::cout << "dataset\tn\tdim\trepeats\tmean_s\tmin_s\tmax_s\tstd_s\n";
    for (const auto& [name, spec] : specs) {
      const hnne::Dataset ds = hnne::load_dataset(spec);
      hnne::FitParams params;
      params.dim = o.dim;
      params.backend = backend_of(o.common);
      params.seed = o.common.seed;
      std::vector<double> times;
      for (int r = 0; r < o.repeats; ++r) {
        const auto t0 = Clock::now();
        const hnne::FitResult res = hnne::fit(ds.points, params);
        times.push_back(seconds_since(t0));
        (void)res;
      }
      double mean = 0.0, lo = times[0], hi = times[0];
      for (double t : times) {
        mean += t;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      mean /= static_cast<double>(times.size());
      double var = 0.0;
      for (double t : times) var += (t - mean) * (t - mean);
      const double sd = times.size() > 1 ? std::sqrt(var / (static_cast<double>(times.size()) - 1)) : 0.0;
      std::cout << name << "\t" << ds.points.rows() << "\t" << ds.points.cols() << "\t"
                << times.size() << "\t" << mean << "\t" << lo << "\t" << hi << "\t" << sd << "\n";
      rows.push_back({{"dataset", name},
                      {"n", ds.points.rows()},
                      {"dim", ds.points.cols()},
                      {"repeats", times.size()},
                      {"mean_s", mean},
                      {"min_s", lo},
                      {"max_s", hi},
                      {"std_s", sd}});
    }
  }

  if (!o.manifest.empty()) {
    json manifest;
    manifest["command"] = "bench";
    manifest["load_only"] = o.load_only;
    manifest["threads"] = hnne::thread_count();
    manifest["results"] = rows;
    write_json_file(o.manifest, manifest);
  }
  return 0;
}

struct LabelsOpts {
  CommonOpts common;
  std::string input;
  std::string synthetic;
  std::string format = "auto";
  bool csv_header = false;
  int level = 0;
  std::string out;
};

int run_labels(const LabelsOpts& o) {
  const auto spec = dataset_spec_of(o.input, o.synthetic, o.format, o.csv_header, "", o.common);
  const hnne::Dataset ds = hnne::load_dataset(spec);
  const hnne::Hierarchy h = hnne::build_hierarchy(ds.points, backend_of(o.common), o.common.seed);
  const hnne::Partition part = hnne::partition_at_level(h, o.level);
  hnne::save_labels(o.out, part.labels);
  std::cout << "labels: level " << o.level << " has " << part.groups << " clusters -> " << o.out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"h-NNE: hierarchical 1-NN graph embedding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hnne 0.1.0");

  FitOpts fit_opts;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Embed a dataset");
  add_common(fit_cmd, fit_opts.common);
  fit_cmd->add_option("--input", fit_opts.input, "Input matrix file (csv or f32-raw)");
  fit_cmd->add_option("--synthetic", fit_opts.synthetic,
                      "Generator spec, e.g. blobs,n=5000,dim=64,clusters=10");
  fit_cmd->add_option("--format", fit_opts.format, "Input format")
      ->check(CLI::IsMember({"auto", "csv", "raw"}));
  fit_cmd->add_flag("--csv-header", fit_opts.csv_header, "Input csv has a header line");
  fit_cmd->add_option("--dim", fit_opts.dim, "Output dimension")->check(CLI::Range(1, 1 << 20));
  fit_cmd->add_option("--init", fit_opts.init, "Preliminary projection")
      ->check(CLI::IsMember({"pca-centroids", "pca-full", "random-proj", "random"}));
  fit_cmd->add_option("--radius-fraction", fit_opts.radius_fraction, "Containment ball fraction");
  fit_cmd->add_option("--shrink", fit_opts.shrink, "Shrink factor (0 = auto)");
  fit_cmd->add_flag("--guarantee", fit_opts.guarantee, "Enforce the containment guarantee regime");
  fit_cmd->add_flag("--inflate", fit_opts.inflate, "Inflate squeezed 2-d clusters");
  fit_cmd->add_option("--transform-level", fit_opts.transform_level,
                      "Centroid level for out-of-sample lookup (-1 = auto)");
  fit_cmd->add_option("--pca-threshold", fit_opts.pca_threshold, "Centroid level size threshold");
  fit_cmd->add_option("--out", fit_opts.out, "Embedding output path")->required();
  fit_cmd->add_option("--out-format", fit_opts.out_format, "Embedding format")
      ->check(CLI::IsMember({"auto", "csv", "raw"}));
  fit_cmd->add_option("--model", fit_opts.model_path, "Save the projection model here");
  fit_cmd->add_option("--manifest", fit_opts.manifest, "Manifest path (default <out>.manifest.json)");

  TransformOpts tr_opts;
  CLI::App* tr_cmd = app.add_subcommand("transform", "Project new points with a saved model");
  add_common(tr_cmd, tr_opts.common);
  tr_cmd->add_option("--model", tr_opts.model_path, "Model file from fit --model")->required();
  tr_cmd->add_option("--input", tr_opts.input, "Input matrix file")->required();
  tr_cmd->add_option("--format", tr_opts.format, "Input format")
      ->check(CLI::IsMember({"auto", "csv", "raw"}));
  tr_cmd->add_flag("--csv-header", tr_opts.csv_header, "Input csv has a header line");
  tr_cmd->add_option("--out", tr_opts.out, "Output path")->required();
  tr_cmd->add_option("--out-format", tr_opts.out_format, "Output format")
      ->check(CLI::IsMember({"auto", "csv", "raw"}));

  MetricsOpts m_opts;
  CLI::App* m_cmd = app.add_subcommand("metrics", "Score an embedding");
  add_common(m_cmd, m_opts.common);
  m_cmd->add_option("--high", m_opts.high, "Original-space matrix file");
  m_cmd->add_option("--low", m_opts.low, "Embedding matrix file")->required();
  m_cmd->add_option("--labels", m_opts.labels, "Labels file (one integer per line)");
  m_cmd->add_flag("--csv-header", m_opts.csv_header, "Input csv files have header lines");
  m_cmd->add_option("--metrics", m_opts.which, "Metrics to compute: trust,knn,cta")->delimiter(',');
  m_cmd->add_option("--trust-k", m_opts.trust_k, "Neighborhood size for trustworthiness");
  m_cmd->add_option("--knn-k", m_opts.knn_k, "k values for the k-NN accuracy sweep")->delimiter(',');
  m_cmd->add_option("--folds", m_opts.folds, "Cross-validation folds");
  m_cmd->add_option("--out", m_opts.out, "Also write the JSON report here");

  PlotOpts p_opts;
  CLI::App* p_cmd = app.add_subcommand("plot", "Render a 2-d embedding to SVG");
  p_cmd->add_option("--input", p_opts.input, "Embedding file")->required();
  p_cmd->add_flag("--csv-header", p_opts.csv_header, "Input csv has a header line");
  p_cmd->add_option("--labels", p_opts.labels, "Labels file for coloring");
  p_cmd->add_option("--out", p_opts.out, "SVG output path")->required();
  p_cmd->add_option("--max-points", p_opts.style.max_points, "Decimation limit");
  p_cmd->add_option("--width", p_opts.style.width, "Canvas width");
  p_cmd->add_option("--height", p_opts.style.height, "Canvas height");

  SynthOpts s_opts;
  CLI::App* s_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(s_cmd, s_opts.common);
  s_cmd->add_option("--synthetic", s_opts.synthetic, "Generator spec")->required();
  s_cmd->add_option("--out", s_opts.out, "Output matrix path")->required();
  s_cmd->add_option("--out-format", s_opts.out_format, "Output format")
      ->check(CLI::IsMember({"auto", "csv", "raw"}));
  s_cmd->add_option("--labels-out", s_opts.labels_out, "Write generated labels here");

  BenchOpts b_opts;
  CLI::App* b_cmd = app.add_subcommand("bench", "Time fits (or loads) over datasets");
  add_common(b_cmd, b_opts.common);
  b_cmd->add_option("--synthetic", b_opts.synthetic, "Generator spec (repeatable)");
  b_cmd->add_option("--input", b_opts.inputs, "Input file (repeatable)");
  b_cmd->add_option("--dim", b_opts.dim, "Output dimension")->check(CLI::Range(1, 1 << 20));
  b_cmd->add_option("--repeats", b_opts.repeats, "Fit repetitions per dataset");
  b_cmd->add_flag("--load-only", b_opts.load_only, "Only load, report memory use");
  b_cmd->add_option("--manifest", b_opts.manifest, "Write a JSON manifest here");

  LabelsOpts l_opts;
  CLI::App* l_cmd = app.add_subcommand("labels", "Emit hierarchy cluster labels");
  add_common(l_cmd, l_opts.common);
  l_cmd->add_option("--input", l_opts.input, "Input matrix file");
  l_cmd->add_option("--synthetic", l_opts.synthetic, "Generator spec");
  l_cmd->add_option("--format", l_opts.format, "Input format")
      ->check(CLI::IsMember({"auto", "csv", "raw"}));
  l_cmd->add_flag("--csv-header", l_opts.csv_header, "Input csv has a header line");
  l_cmd->add_option("--level", l_opts.level, "Hierarchy level");
  l_cmd->add_option("--out", l_opts.out, "Labels output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const CommonOpts* common = nullptr;
    if (fit_cmd->parsed()) common = &fit_opts.common;
    if (tr_cmd->parsed()) common = &tr_opts.common;
    if (m_cmd->parsed()) common = &m_opts.common;
    if (s_cmd->parsed()) common = &s_opts.common;
    if (b_cmd->parsed()) common = &b_opts.common;
    if (l_cmd->parsed()) common = &l_opts.common;
    if (common) hnne::set_thread_count(common->threads);

    if (fit_cmd->parsed()) return run_fit(fit_opts);
    if (tr_cmd->parsed()) return run_transform(tr_opts);
    if (m_cmd->parsed()) return run_metrics(m_opts);
    if (p_cmd->parsed()) return run_plot(p_opts);
    if (s_cmd->parsed()) return run_synth(s_opts);
    if (b_cmd->parsed()) return run_bench(b_opts);
    if (l_cmd->parsed()) return run_labels(l_opts);
  } catch (const hnne::InvalidArgument& e) {
    std::cerr << "hnne: " << e.what() << "\n";
    return 2;
  } catch (const hnne::InvalidData& e) {
    std::cerr << "hnne: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "hnne: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
