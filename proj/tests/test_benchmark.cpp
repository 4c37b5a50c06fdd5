#include "ciiq/benchmark.hpp"

#include <doctest.h>

#include <fstream>

#include "ciiq/correlation.hpp"
#include "ciiq/distort.hpp"
#include "ciiq/errors.hpp"
#include "testutil.hpp"

using namespace ciiq;
namespace fs = std::filesystem;

namespace {

struct LadderFixture {
  fs::path dir;
  std::string manifest_path;
};

// reference + 5-level noise ladder with MOS falling as severity rises
LadderFixture make_ladder_fixture(const std::string& tag, uint32_t seed) {
  LadderFixture fx;
  fx.dir = testutil::scratch_dir(tag);
  const RgbImage ref = testutil::natural_color_image(128, 128, seed);
  save_png((fx.dir / "ref.png").string(), ref);
  const auto ladder =
      generate_distortions(ref, DistortionKind::gaussian_noise, 5, 99);
  std::ofstream m(fx.dir / "manifest.csv");
  m << "ref,dist,mos,tag\n";
  for (size_t i = 0; i < ladder.size(); ++i) {
    const std::string name = "dist" + std::to_string(i + 1) + ".png";
    save_png((fx.dir / name).string(), ladder[i]);
    m << "ref.png," << name << ',' << 90.0 - 10.0 * i << ",noise\n";
  }
  m.close();
  fx.manifest_path = (fx.dir / "manifest.csv").string();
  return fx;
}

}  // namespace

TEST_CASE("manifest round trip resolves relative paths") {
  const auto fx = make_ladder_fixture("bench_manifest", 50);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  CHECK(m.rows.size() == 5);
  CHECK(m.name == "manifest");
  CHECK(fs::path(m.rows[0].ref_path).is_absolute());
  CHECK(fs::exists(m.rows[0].ref_path));
  CHECK(m.rows[0].mos == 90.0);
  CHECK(m.rows[0].tag == "noise");
}

TEST_CASE("manifest parse errors carry the row number") {
  const auto dir = testutil::scratch_dir("bench_badmanifest");

  {
    std::ofstream f(dir / "bad_mos.csv");
    f << "ref,dist,mos,tag\na.png,b.png,4.0,x\na.png,b.png,oops,x\n";
  }
  try {
    load_manifest((dir / "bad_mos.csv").string());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  {
    std::ofstream f(dir / "empty.csv");
  }
  CHECK_THROWS_AS(load_manifest((dir / "empty.csv").string()), IoError);

  {
    std::ofstream f(dir / "missing.csv");
    f << "ref,dist,mos,tag\nnope1.png,nope2.png,4.0,x\n";
  }
  try {
    load_manifest((dir / "missing.csv").string());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("nope1.png") != std::string::npos);
    CHECK(msg.find("nope2.png") != std::string::npos);
  }
}

TEST_CASE("noise ladder evaluates to perfect rank correlation") {
  const auto fx = make_ladder_fixture("bench_ladder", 51);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  const CorrelationReport r = evaluate_dataset(m, ScalingParams{});
  CHECK(r.n_pairs == 5);
  CHECK(r.n_failed == 0);
  CHECK(!r.degenerate);
  // e rises with severity while mos falls
  CHECK(r.srcc == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(r.krcc) == doctest::Approx(1.0).epsilon(1e-12));
  // the logistic map reorients scores toward mos, so plcc comes out positive
  CHECK(r.plcc > 0.99);
  CHECK(r.plcc <= 1.0);
  CHECK(r.rmse >= 0.0);
}

TEST_CASE("identical pairs give zero scores and a degenerate report") {
  const auto dir = testutil::scratch_dir("bench_identical");
  const RgbImage ref = testutil::natural_gray_image(128, 128, 5);
  save_png((dir / "ref.png").string(), ref);
  std::ofstream m(dir / "manifest.csv");
  m << "ref,dist,mos,tag\n";
  for (int i = 0; i < 4; ++i)
    m << "ref.png,ref.png," << 10 + i << ",same\n";
  m.close();

  const CorrelationReport r =
      evaluate_dataset(load_manifest((dir / "manifest.csv").string()),
                       ScalingParams{});
  CHECK(r.degenerate);
  for (double e : r.scores) CHECK(e == 0.0);
}

TEST_CASE("per-row failures are collected, not fatal") {
  const auto fx = make_ladder_fixture("bench_partial", 52);
  // append a row whose distorted image is undersized
  save_png((fx.dir / "tiny.png").string(),
           testutil::constant_image(64, 64, 9, 9, 9));
  std::ofstream m(fx.manifest_path, std::ios::app);
  m << "ref.png,tiny.png,5.0,broken\n";
  m.close();

  const CorrelationReport r =
      evaluate_dataset(load_manifest(fx.manifest_path), ScalingParams{});
  CHECK(r.n_pairs == 5);
  CHECK(r.n_failed == 1);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].find("row 6") != std::string::npos);
}

TEST_CASE("reports are identical across thread counts") {
  const auto fx = make_ladder_fixture("bench_jobs", 53);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  EvaluateOptions one, many;
  one.jobs = 1;
  many.jobs = 8;
  const std::string a = report_to_json(evaluate_dataset(m, ScalingParams{}, one));
  const std::string b = report_to_json(evaluate_dataset(m, ScalingParams{}, many));
  CHECK(a == b);
}

TEST_CASE("a 1x1 sweep reproduces the plain evaluation bit for bit") {
  const auto fx = make_ladder_fixture("bench_sweep1", 54);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  const ScalingParams defaults;
  const CorrelationReport direct = evaluate_dataset(m, defaults);
  const SweepGrid grid = sweep_parameters(m, {31.0}, {3.0}, defaults);
  REQUIRE(grid.cells.size() == 1);
  CHECK(grid.cells[0].report.srcc == direct.srcc);
  CHECK(grid.cells[0].report.krcc == direct.krcc);
  CHECK(grid.cells[0].report.plcc == direct.plcc);
  CHECK(grid.cells[0].report.rmse == direct.rmse);
}

TEST_CASE("sweep grids are always complete, even when degenerate") {
  const auto dir = testutil::scratch_dir("bench_sweepdegen");
  const RgbImage ref = testutil::natural_gray_image(128, 128, 6);
  save_png((dir / "ref.png").string(), ref);
  std::ofstream m(dir / "manifest.csv");
  m << "ref,dist,mos,tag\nref.png,ref.png,1.0,same\nref.png,ref.png,2.0,same\n";
  m.close();

  const SweepGrid grid =
      sweep_parameters(load_manifest((dir / "manifest.csv").string()),
                       {29, 31}, {1, 3, 5}, ScalingParams{});
  CHECK(grid.cells.size() == 6);
  for (const SweepCell& c : grid.cells) CHECK(c.report.degenerate);

  const std::string csv = sweep_to_csv(grid);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 6 rows
}

TEST_CASE("sweep rejects empty axes") {
  const auto fx = make_ladder_fixture("bench_sweepempty", 55);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  CHECK_THROWS_AS(sweep_parameters(m, {}, {3.0}, ScalingParams{}), ConfigError);
}

TEST_CASE("window ablation runs every mode") {
  const auto fx = make_ladder_fixture("bench_ablate", 56);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  const auto reports = ablate_window(m, {3, 5, 7}, ScalingParams{});
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].params.mode_label() == "cs");
  CHECK(reports[1].params.mode_label() == "win3");
  CHECK(reports[2].params.mode_label() == "win5");
  CHECK(reports[3].params.mode_label() == "win7");
  for (const CorrelationReport& r : reports) {
    CHECK(r.n_pairs == 5);
    CHECK(std::abs(r.srcc) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("report json carries the fields and the raw-plcc flag") {
  const auto fx = make_ladder_fixture("bench_json", 57);
  const DatasetManifest m = load_manifest(fx.manifest_path);
  EvaluateOptions opts;
  opts.plcc_raw = true;
  const CorrelationReport r = evaluate_dataset(m, ScalingParams{}, opts);
  REQUIRE(r.plcc_raw.has_value());
  const std::string json = report_to_json(r);
  for (const char* key : {"\"dataset\"", "\"n_pairs\"", "\"n_failed\"",
                          "\"srcc\"", "\"srcc_abs\"", "\"krcc\"", "\"plcc\"", "\"rmse\"",
                          "\"plcc_raw\"", "\"logistic\"", "\"b1\"",
                          "\"converged\"", "\"residual\"", "\"params\"",
                          "\"mode\""})
    CHECK(json.find(key) != std::string::npos);
}

TEST_CASE("per-tag sub-reports match subset statistics") {
  const auto dir = testutil::scratch_dir("bench_tags");
  const RgbImage ref = testutil::natural_color_image(128, 128, 58);
  save_png((dir / "ref.png").string(), ref);
  const auto noise =
      generate_distortions(ref, DistortionKind::gaussian_noise, 3, 1);
  const auto blur =
      generate_distortions(ref, DistortionKind::gaussian_blur, 3, 1);
  std::ofstream m(dir / "manifest.csv");
  m << "ref,dist,mos,tag\n";
  for (size_t i = 0; i < 3; ++i) {
    save_png((dir / ("n" + std::to_string(i) + ".png")).string(), noise[i]);
    save_png((dir / ("b" + std::to_string(i) + ".png")).string(), blur[i]);
    m << "ref.png,n" << i << ".png," << 80 - 10.0 * i << ",noise\n";
    m << "ref.png,b" << i << ".png," << 75 - 10.0 * i << ",blur\n";
  }
  m.close();

  EvaluateOptions opts;
  opts.per_tag = true;
  const CorrelationReport r = evaluate_dataset(
      load_manifest((dir / "manifest.csv").string()), ScalingParams{}, opts);
  REQUIRE(r.tags.size() == 2);
  CHECK(r.tags[0].tag == "noise");
  CHECK(r.tags[1].tag == "blur");
  for (const TagReport& t : r.tags) {
    CHECK(t.n_pairs == 3);
    CHECK(!t.degenerate);
    CHECK(t.srcc == doctest::Approx(-1.0).epsilon(1e-12));
  }

  // subset check: per-tag rank statistics equal a direct computation over
  // the rows with that tag (rows interleave noise/blur in manifest order)
  std::vector<double> ns, nm;
  for (size_t i = 0; i < r.scores.size(); i += 2) {
    ns.push_back(r.scores[i]);
    nm.push_back(r.mos[i]);
  }
  CHECK(r.tags[0].srcc == spearman(ns, nm));
  CHECK(r.tags[0].krcc == kendall(ns, nm));

  const std::string json = report_to_json(r);
  CHECK(json.find("\"tags\"") != std::string::npos);
  CHECK(json.find("\"blur\"") != std::string::npos);
}

TEST_CASE("round6 keeps six significant digits") {
  CHECK(round6(0.12345649) == 0.123456);
  CHECK(round6(123456789.0) == 123457000.0);
  CHECK(round6(-3.14159265) == -3.14159);
  CHECK(round6(0.0) == 0.0);
}
