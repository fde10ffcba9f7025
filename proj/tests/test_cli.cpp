#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "hnne/dataio.hpp"
#include "json.hpp"
#include "util.hpp"

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Runs the installed binary with shell-quoted arguments, capturing both
// streams. Each call gets private capture files in `dir`.
CliResult run_cli(const std::filesystem::path& dir, const std::vector<std::string>& args) {
    static int counter = 0;
    auto out_path = dir / ("stdout_" + std::to_string(counter) + ".txt");
    auto err_path = dir / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    std::ostringstream cmd;
    cmd << '"' << HNNE_CLI_PATH << '"';
    for (const auto& a : args) cmd << " '" << a << "'";
    cmd << " > \"" << out_path.string() << "\" 2> \"" << err_path.string() << "\"";
    int rc = std::system(cmd.str().c_str());
    CliResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    return res;
}

}  // namespace

TEST_CASE("fit, metrics, plot, and transform chain together") {
    auto dir = testutil::scratch_dir("cli_chain");
    auto emb = (dir / "emb.csv").string();
    auto model = (dir / "model.hnne").string();
    auto manifest = (dir / "run.json").string();

    auto fit = run_cli(dir, {"fit", "--synthetic", "blobs,n=400,dim=16,clusters=4,seed=3",
                             "--out", emb, "--model", model, "--manifest", manifest, "--seed", "1"});
    CAPTURE(fit.err);
    REQUIRE(fit.exit_code == 0);
    CHECK(std::filesystem::exists(emb));
    CHECK(std::filesystem::exists(model));

    auto parsed = nlohmann::json::parse(slurp(manifest));
    CHECK(parsed["n"] == 400);
    CHECK(parsed["input_dim"] == 16);
    CHECK(parsed["output_dim"] == 2);
    CHECK(parsed["hierarchy"]["level_sizes"].is_array());
    CHECK(parsed["params"]["shrink"] == 1.0);

    auto em = hnne::load_csv(emb);
    CHECK(em.rows() == 400);
    CHECK(em.cols() == 2);

    // Labels for the synthetic blobs, then metrics on the embedding.
    auto data_csv = (dir / "data.csv").string();
    auto labels_txt = (dir / "labels.txt").string();
    auto synth = run_cli(dir, {"synth", "--synthetic", "blobs,n=400,dim=16,clusters=4,seed=3",
                               "--out", data_csv, "--labels-out", labels_txt});
    REQUIRE(synth.exit_code == 0);
    CHECK(hnne::load_csv(data_csv).rows() == 400);
    CHECK(hnne::load_labels(labels_txt).size() == 400);

    auto report = (dir / "metrics.json").string();
    auto metrics = run_cli(dir, {"metrics", "--low", emb, "--high", data_csv,
                                 "--labels", labels_txt, "--metrics", "trust,knn,cta",
                                 "--knn-k", "1", "--out", report});
    CAPTURE(metrics.err);
    REQUIRE(metrics.exit_code == 0);
    auto rep = nlohmann::json::parse(slurp(report));
    double trust = rep["trustworthiness"];
    CHECK(trust > 0.8);
    CHECK(trust <= 1.0);
    CHECK(double(rep["cta"]) >= 0.0);
    CHECK(rep["knn_accuracy"][0]["k"] == 1);
    CHECK(double(rep["knn_accuracy"][0]["accuracy"]) > 0.9);
    // The same report is printed to stdout as a single JSON line.
    auto stdout_rep = nlohmann::json::parse(metrics.out);
    CHECK(stdout_rep["trustworthiness"] == rep["trustworthiness"]);

    auto svg = (dir / "plot.svg").string();
    auto plot = run_cli(dir, {"plot", "--input", emb, "--labels", labels_txt, "--out", svg});
    REQUIRE(plot.exit_code == 0);
    CHECK(slurp(svg).rfind("<svg", 0) == 0);

    auto proj = (dir / "proj.csv").string();
    auto tr = run_cli(dir, {"transform", "--model", model, "--input", data_csv, "--out", proj});
    CAPTURE(tr.err);
    REQUIRE(tr.exit_code == 0);
    CHECK(hnne::load_csv(proj).rows() == 400);
}

TEST_CASE("fit embeddings are byte-identical across runs and thread counts") {
    auto dir = testutil::scratch_dir("cli_determinism");
    auto run = [&](const std::string& name, const std::string& threads) {
        auto out = (dir / name).string();
        auto r = run_cli(dir, {"fit", "--synthetic", "blobs,n=300,dim=8,clusters=3,seed=5",
                               "--out", out, "--seed", "7", "--threads", threads});
        REQUIRE(r.exit_code == 0);
        return slurp(out);
    };
    auto a = run("a.csv", "1");
    auto b = run("b.csv", "4");
    auto c = run("c.csv", "1");
    CHECK(a == b);
    CHECK(a == c);
    CHECK(!a.empty());
}

TEST_CASE("labels subcommand writes one label per row at the requested level") {
    auto dir = testutil::scratch_dir("cli_labels");
    auto out = (dir / "labels.txt").string();
    auto r = run_cli(dir, {"labels", "--synthetic", "blobs,n=200,dim=6,clusters=4,seed=2",
                           "--level", "0", "--out", out});
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(hnne::load_labels(out).size() == 200);

    auto bad = run_cli(dir, {"labels", "--synthetic", "blobs,n=200,dim=6,clusters=4,seed=2",
                             "--level", "99", "--out", out});
    CHECK(bad.exit_code == 2);
}

TEST_CASE("usage errors exit with 2") {
    auto dir = testutil::scratch_dir("cli_usage");
    auto out = (dir / "x.csv").string();

    auto no_input = run_cli(dir, {"fit", "--out", out});
    CHECK(no_input.exit_code == 2);

    auto both = run_cli(dir, {"fit", "--synthetic", "blobs", "--input", "x.csv", "--out", out});
    CHECK(both.exit_code == 2);

    auto bad_dim = run_cli(dir, {"fit", "--synthetic", "blobs", "--out", out, "--dim", "0"});
    CHECK(bad_dim.exit_code == 2);

    auto no_out = run_cli(dir, {"fit", "--synthetic", "blobs"});
    CHECK(no_out.exit_code == 2);

    auto bad_backend = run_cli(dir, {"fit", "--synthetic", "blobs", "--out", out,
                                     "--backend", "banana"});
    CHECK(bad_backend.exit_code == 2);

    auto bad_gen = run_cli(dir, {"fit", "--synthetic", "banana", "--out", out});
    CHECK(bad_gen.exit_code == 2);

    auto bad_metric = run_cli(dir, {"metrics", "--low", out, "--metrics", "banana"});
    CHECK(bad_metric.exit_code == 2);

    auto bad_shrink = run_cli(dir, {"fit", "--synthetic", "blobs", "--out", out,
                                    "--guarantee", "--shrink", "0.9"});
    CHECK(bad_shrink.exit_code == 2);

    auto unknown = run_cli(dir, {"frobnicate"});
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("metrics refuses requests missing their inputs") {
    auto dir = testutil::scratch_dir("cli_metrics_usage");
    auto emb = (dir / "emb.csv").string();
    hnne::save_csv(emb, testutil::random_gauss(30, 2, 1));

    auto no_high = run_cli(dir, {"metrics", "--low", emb, "--metrics", "trust"});
    CHECK(no_high.exit_code == 2);

    auto no_labels = run_cli(dir, {"metrics", "--low", emb, "--metrics", "knn"});
    CHECK(no_labels.exit_code == 2);

    // Two-class labels cannot support the triplet metric: data error.
    auto labels = (dir / "l.txt").string();
    std::vector<int> two(30);
    for (int i = 0; i < 30; ++i) two[i] = i % 2;
    hnne::save_labels(labels, two);
    auto high = (dir / "high.csv").string();
    hnne::save_csv(high, testutil::random_gauss(30, 5, 2));
    auto cta = run_cli(dir, {"metrics", "--low", emb, "--high", high,
                             "--labels", labels, "--metrics", "cta"});
    CHECK(cta.exit_code == 2);
}

TEST_CASE("data errors exit with 1") {
    auto dir = testutil::scratch_dir("cli_data_errors");
    auto out = (dir / "x.csv").string();

    auto missing = run_cli(dir, {"fit", "--input", (dir / "nope.csv").string(), "--out", out});
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("nope.csv") != std::string::npos);

    auto empty = (dir / "empty.csv").string();
    std::ofstream(empty).close();
    auto empty_run = run_cli(dir, {"fit", "--input", empty, "--out", out});
    CHECK(empty_run.exit_code == 1);

    auto bad = (dir / "bad.csv").string();
    std::ofstream(bad) << "1,2\n3,banana\n";
    auto bad_run = run_cli(dir, {"fit", "--input", bad, "--out", out});
    CHECK(bad_run.exit_code == 1);
    CHECK(bad_run.err.find("line 2") != std::string::npos);
}

TEST_CASE("synth validates label requests and writes raw output") {
    auto dir = testutil::scratch_dir("cli_synth");
    auto raw = (dir / "u.raw").string();
    auto r = run_cli(dir, {"synth", "--synthetic", "uniform-square,n=100,seed=4", "--out", raw});
    REQUIRE(r.exit_code == 0);
    auto m = hnne::load_f32(raw);
    CHECK(m.rows() == 100);
    CHECK(m.cols() == 2);

    auto labeled = run_cli(dir, {"synth", "--synthetic", "uniform-square,n=10", "--out", raw,
                                 "--labels-out", (dir / "l.txt").string()});
    CHECK(labeled.exit_code == 2);  // generator has no labels
}

TEST_CASE("bench prints one TSV row per dataset") {
    auto dir = testutil::scratch_dir("cli_bench");
    auto r = run_cli(dir, {"bench", "--synthetic", "blobs,n=200,dim=8,clusters=3,seed=1",
                           "--repeats", "2"});
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    REQUIRE(std::getline(lines, header));
    CHECK(header.find("dataset") == 0);
    CHECK(header.find("mean_s") != std::string::npos);
    REQUIRE(std::getline(lines, row));
    CHECK(row.find("blobs") == 0);

    // Load-only mode reports byte and peak-memory columns instead.
    auto raw = (dir / "d.raw").string();
    hnne::save_f32(raw, testutil::random_gauss(500, 4, 2));
    auto lo = run_cli(dir, {"bench", "--input", raw, "--load-only"});
    REQUIRE(lo.exit_code == 0);
    CHECK(lo.out.find("matrix_bytes") != std::string::npos);
    CHECK(lo.out.find("peak_rss_bytes") != std::string::npos);

    auto none = run_cli(dir, {"bench"});
    CHECK(none.exit_code == 0);
    CHECK(none.out.find("dataset") == 0);
}

TEST_CASE("fit writes raw embeddings when asked") {
    auto dir = testutil::scratch_dir("cli_raw_out");
    auto out = (dir / "emb.raw").string();
    auto r = run_cli(dir, {"fit", "--synthetic", "blobs,n=120,dim=6,clusters=3,seed=8",
                           "--out", out});
    REQUIRE(r.exit_code == 0);
    auto m = hnne::load_f32(out);  // extension selected the raw writer
    CHECK(m.rows() == 120);
    CHECK(m.cols() == 2);

    auto forced = (dir / "emb.data").string();
    auto r2 = run_cli(dir, {"fit", "--synthetic", "blobs,n=120,dim=6,clusters=3,seed=8",
                            "--out", forced, "--out-format", "raw"});
    REQUIRE(r2.exit_code == 0);
    CHECK(hnne::load_f32(forced).rows() == 120);
}

TEST_CASE("version and help exit cleanly") {
    auto dir = testutil::scratch_dir("cli_help");
    CHECK(run_cli(dir, {"--help"}).exit_code == 0);
    CHECK(run_cli(dir, {"--version"}).exit_code == 0);
    CHECK(run_cli(dir, {"fit", "--help"}).exit_code == 0);
}
