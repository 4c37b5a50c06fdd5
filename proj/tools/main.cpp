#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ciiq/benchmark.hpp"
#include "ciiq/correlation.hpp"
#include "ciiq/distort.hpp"
#include "ciiq/errors.hpp"
#include "ciiq/features.hpp"
#include "ciiq/image.hpp"
#include "ciiq/normalize.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitDimension = 3;
constexpr int kExitConfig = 4;

struct Options {
  ciiq::ScalingParams params;
  std::string mode = "cs";
  int jobs = 1;
  std::string out;
  std::string format = "json";
  bool no_approx = false;
};

void apply_mode(Options& opt) {
  if (opt.mode == "cs") {
    opt.params.mode = ciiq::NormMode::center_surround;
  } else if (opt.mode == "win3" || opt.mode == "win5" || opt.mode == "win7") {
    opt.params.mode = ciiq::NormMode::single_window;
    opt.params.window_k = opt.mode[3] - '0';
  } else {
    throw ciiq::ConfigError("unknown mode: " + opt.mode);
  }
  opt.params.include_approx = !opt.no_approx;
  opt.params.validate();
}

void emit(const Options& opt, const std::string& payload) {
  if (opt.out.empty()) {
    std::fputs(payload.c_str(), stdout);
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw ciiq::IoError("cannot write file: " + opt.out);
  f << payload;
}

ordered_json params_json(const ciiq::ScalingParams& p) {
  ordered_json j;
  j["k1"] = ciiq::round6(p.k1);
  j["k2"] = ciiq::round6(p.k2);
  j["cr_threshold"] = ciiq::round6(p.cr_threshold);
  j["mode"] = p.mode_label();
  return j;
}

// Axis syntax: "lo:hi:step" (inclusive), "a,b,c", or a single value.
std::vector<double> parse_axis(const std::string& text) {
  std::vector<double> values;
  const auto to_num = [&](const std::string& s) {
    try {
      size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("trail");
      return v;
    } catch (const std::exception&) {
      throw ciiq::ConfigError("bad axis value '" + s + "' in: " + text);
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3)
      throw ciiq::ConfigError("axis range needs lo:hi:step, got: " + text);
    const double lo = to_num(parts[0]), hi = to_num(parts[1]),
                 step = to_num(parts[2]);
    if (step <= 0) throw ciiq::ConfigError("axis step must be positive");
    for (double v = lo; v <= hi + 1e-9; v += step) values.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) values.push_back(to_num(part));
  }
  if (values.empty()) throw ciiq::ConfigError("empty axis: " + text);
  return values;
}

void write_diag_csv(const std::string& path, const ciiq::FeatureBuildResult& fr,
                    const ciiq::ScalingParams& p) {
  std::ofstream f(path);
  if (!f) throw ciiq::IoError("cannot write file: " + path);
  f << "channel,s,o,sigma,delta,cr,branch\n";
  char buf[64];
  const auto f6 = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6g", ciiq::round6(v));
    return std::string(buf);
  };
  for (const ciiq::DiagRow& row :
       ciiq::scaling_diagnostics(fr.stats, fr.branch, p)) {
    f << ciiq::channel_code(row.channel) << ',' << row.level << ','
      << ciiq::orientation_code(row.orient) << ',' << f6(row.sigma) << ','
      << f6(row.delta) << ',' << f6(fr.color_ratio) << ','
      << ciiq::branch_name(fr.branch) << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"ciiq - low-level-feature full-reference image quality metric"};
  app.require_subcommand(1);
  app.set_config("--config");

  Options opt;
  app.add_option("--k1", opt.params.k1, "Additive scale constant")
      ->capture_default_str();
  app.add_option("--k2", opt.params.k2, "Inverse-sigma scale gain")
      ->capture_default_str();
  app.add_option("--cr-threshold", opt.params.cr_threshold,
                 "Color ratio threshold for the color-adapted branch")
      ->capture_default_str();
  app.add_option("--sigma-floor", opt.params.sigma_floor,
                 "Lower clamp for deviation denominators")
      ->capture_default_str();
  app.add_option("--mode", opt.mode,
                 "Normalization mode: cs, win3, win5 or win7")
      ->capture_default_str();
  app.add_flag("--no-approx", opt.no_approx,
               "Exclude the approximation band from the feature vector");
  app.add_option("--jobs", opt.jobs, "Worker threads for dataset runs")
      ->capture_default_str();
  app.add_option("--out", opt.out, "Write output here instead of stdout");
  app.add_option("--format", opt.format, "Output format: json or csv")
      ->capture_default_str();

  // score
  auto* score = app.add_subcommand("score", "Score a distorted image against its reference");
  std::string ref_path, dist_path, diag_path;
  score->add_option("ref", ref_path, "Reference image (PNG/BMP)")->required();
  score->add_option("dist", dist_path, "Distorted image")->required();
  score->add_option("--diag", diag_path, "Write per-band scaling diagnostics CSV");

  // features
  auto* features = app.add_subcommand("features", "Compute and dump a feature vector");
  std::string img_path, maps_dir;
  features->add_option("image", img_path, "Input image")->required();
  features->add_option("--maps-dir", maps_dir,
                       "Also dump every normalized feature map here");
  features->add_option("--diag", diag_path, "Write per-band scaling diagnostics CSV");

  // bench
  auto* bench = app.add_subcommand("bench", "Evaluate a manifest and report correlations");
  std::string manifest_path;
  bool plcc_raw = false, per_tag = false;
  bench->add_option("manifest", manifest_path, "Manifest CSV")->required();
  bench->add_flag("--plcc-raw", plcc_raw, "Also report PLCC on unmapped scores");
  bench->add_flag("--per-tag", per_tag, "Add per-distortion-tag sub-reports");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid sweep over K1/K2");
  std::string k1_axis = "31", k2_axis = "3";
  sweep->add_option("manifest", manifest_path, "Manifest CSV")->required();
  sweep->add_option("--k1", k1_axis, "K1 axis (lo:hi:step or list)")
      ->capture_default_str();
  sweep->add_option("--k2", k2_axis, "K2 axis (lo:hi:step or list)")
      ->capture_default_str();

  // ablate
  auto* ablate = app.add_subcommand(
      "ablate", "Compare center-surround against single-window normalization");
  ablate->add_option("manifest", manifest_path, "Manifest CSV")->required();

  // distort
  auto* distort = app.add_subcommand("distort", "Generate a severity ladder of distortions");
  std::string kind_name;
  int levels = 5;
  uint64_t seed = 0;
  distort->add_option("ref", ref_path, "Base image")->required();
  distort->add_option("kind", kind_name,
                      "gaussian_noise, gaussian_blur, jpeg_like_blocking or "
                      "contrast_shift")
      ->required();
  distort->add_option("levels", levels, "Number of severity levels")
      ->capture_default_str();
  distort->add_option("--seed", seed, "Noise seed")->capture_default_str();

  // global options may appear before or after the subcommand
  for (CLI::App* sub : {score, features, bench, sweep, ablate, distort})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  apply_mode(opt);
  if (opt.jobs < 1) throw ciiq::ConfigError("--jobs must be >= 1");
  if (opt.format != "json" && opt.format != "csv")
    throw ciiq::ConfigError("--format must be json or csv");

  if (*score) {
    const ciiq::RgbImage ref = ciiq::load_image(ref_path);
    const ciiq::RgbImage dist = ciiq::load_image(dist_path);
    if (ref.width() != dist.width() || ref.height() != dist.height())
      throw ciiq::DimensionError("image dimensions differ");
    const ciiq::FeatureBuildResult fr =
        ciiq::build_feature(ciiq::srgb_to_lab(ref), opt.params);
    const ciiq::FeatureBuildResult fd =
        ciiq::build_feature(ciiq::srgb_to_lab(dist), opt.params, fr.branch);
    if (!diag_path.empty()) write_diag_csv(diag_path, fr, opt.params);

    ordered_json j;
    j["e"] = ciiq::round6(ciiq::l1_distance(fr.feature, fd.feature));
    j["branch"] = ciiq::branch_name(fr.branch);
    j["color_ratio"] = ciiq::round6(fr.color_ratio);
    j["degenerate_luminance"] = fr.degenerate_luminance;
    j["params"] = params_json(opt.params);
    emit(opt, j.dump(2) + "\n");
  } else if (*features) {
    if (opt.out.empty())
      throw ciiq::ConfigError("features needs --out for the binary dump");
    const ciiq::LabImage lab = ciiq::srgb_to_lab(ciiq::load_image(img_path));
    const ciiq::FeatureBuildResult fr = ciiq::build_feature(lab, opt.params);
    ciiq::dump_features(opt.out, fr.feature);
    if (!diag_path.empty()) write_diag_csv(diag_path, fr, opt.params);
    if (!maps_dir.empty()) {
      fs::create_directories(maps_dir);
      const auto sets = ciiq::normalized_decomposition(lab, opt.params);
      const ciiq::Orientation os[3] = {ciiq::Orientation::H,
                                       ciiq::Orientation::V,
                                       ciiq::Orientation::D};
      for (int c = 0; c < 3; ++c) {
        const ciiq::Channel chan = static_cast<ciiq::Channel>(c);
        ciiq::FeatureMap fm{1, ciiq::Orientation::A, chan, sets[c].approx};
        const auto name = [&](const ciiq::FeatureMap& m) {
          return (fs::path(maps_dir) /
                  (std::string(1, ciiq::channel_code(m.channel)) + "_s" +
                   std::to_string(m.level) + "_" +
                   std::string(1, ciiq::orientation_code(m.orient)) + ".fmap"))
              .string();
        };
        ciiq::dump_feature_map(name(fm), fm);
        for (int s = 1; s <= ciiq::kLevels; ++s)
          for (int o = 0; o < 3; ++o) {
            ciiq::FeatureMap m{s, os[o], chan,
                               sets[c].band(s, os[o])};
            ciiq::dump_feature_map(name(m), m);
          }
      }
    }
  } else if (*bench) {
    const ciiq::DatasetManifest manifest = ciiq::load_manifest(manifest_path);
    ciiq::EvaluateOptions eopts;
    eopts.jobs = opt.jobs;
    eopts.plcc_raw = plcc_raw;
    eopts.per_tag = per_tag;
    const ciiq::CorrelationReport report =
        ciiq::evaluate_dataset(manifest, opt.params, eopts);
    emit(opt, ciiq::report_to_json(report));
  } else if (*sweep) {
    const ciiq::DatasetManifest manifest = ciiq::load_manifest(manifest_path);
    ciiq::EvaluateOptions eopts;
    eopts.jobs = opt.jobs;
    const ciiq::SweepGrid grid = ciiq::sweep_parameters(
        manifest, parse_axis(k1_axis), parse_axis(k2_axis), opt.params, eopts);
    emit(opt, ciiq::sweep_to_csv(grid));
  } else if (*ablate) {
    const ciiq::DatasetManifest manifest = ciiq::load_manifest(manifest_path);
    ciiq::EvaluateOptions eopts;
    eopts.jobs = opt.jobs;
    const std::vector<ciiq::CorrelationReport> reports =
        ciiq::ablate_window(manifest, {3, 5, 7}, opt.params, eopts);
    if (opt.format == "csv") {
      std::ostringstream out;
      out << "mode,srcc,krcc,plcc,rmse\n";
      char buf[64];
      const auto f6 = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6g", ciiq::round6(v));
        return std::string(buf);
      };
      for (const ciiq::CorrelationReport& r : reports) {
        out << r.params.mode_label() << ',';
        if (r.degenerate)
          out << ",,,";
        else
          out << f6(r.srcc) << ',' << f6(r.krcc) << ',' << f6(r.plcc) << ','
              << f6(r.rmse);
        out << '\n';
      }
      emit(opt, out.str());
    } else {
      ordered_json arr = ordered_json::array();
      for (const ciiq::CorrelationReport& r : reports)
        arr.push_back(ordered_json::parse(ciiq::report_to_json(r)));
      emit(opt, arr.dump(2) + "\n");
    }
  } else if (*distort) {
    const ciiq::RgbImage ref = ciiq::load_image(ref_path);
    const ciiq::DistortionKind kind = ciiq::parse_distortion_kind(kind_name);
    const std::vector<ciiq::RgbImage> ladder =
        ciiq::generate_distortions(ref, kind, levels, seed);
    const fs::path dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
    fs::create_directories(dir);
    const std::string stem = fs::path(ref_path).stem().string();
    for (size_t i = 0; i < ladder.size(); ++i) {
      const fs::path out_path =
          dir / (stem + "_" + kind_name + "_" + std::to_string(i + 1) + ".png");
      ciiq::save_png(out_path.string(), ladder[i]);
      std::cout << out_path.string() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ciiq::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return kExitDimension;
  } catch (const ciiq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ciiq::DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ciiq::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
