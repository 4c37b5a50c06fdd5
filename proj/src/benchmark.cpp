#include "ciiq/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ciiq/correlation.hpp"
#include "ciiq/errors.hpp"
#include "ciiq/image.hpp"

namespace fs = std::filesystem;

namespace ciiq {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);

  DatasetManifest manifest;
  manifest.name = fs::path(path).stem().string();
  const fs::path base = fs::path(path).parent_path();

  std::string line;
  if (!std::getline(in, line))
    throw IoError("manifest parse error: empty file, expected header "
                  "ref,dist,mos,tag: " + path);
  {
    const auto header = split_csv_line(line);
    if (header.size() < 4 || trim(header[0]) != "ref" ||
        trim(header[1]) != "dist" || trim(header[2]) != "mos" ||
        trim(header[3]) != "tag")
      throw IoError("manifest parse error: bad header, expected "
                    "ref,dist,mos,tag: " + path);
  }

  size_t line_no = 1;
  std::vector<std::string> missing;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 4)
      throw IoError("manifest parse error at row " + std::to_string(line_no) +
                    ": expected 4 columns");
    ManifestRow row;
    const auto resolve = [&](const std::string& p) {
      const fs::path fp(trim(p));
      return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    row.ref_path = resolve(fields[0]);
    row.dist_path = resolve(fields[1]);
    try {
      size_t used = 0;
      row.mos = std::stod(trim(fields[2]), &used);
      if (used != trim(fields[2]).size()) throw std::invalid_argument("trail");
    } catch (const std::exception&) {
      throw IoError("manifest parse error at row " + std::to_string(line_no) +
                    ": non-numeric mos '" + trim(fields[2]) + "'");
    }
    if (!std::isfinite(row.mos))
      throw IoError("manifest parse error at row " + std::to_string(line_no) +
                    ": non-finite mos");
    row.tag = trim(fields[3]);
    for (const std::string& p : {row.ref_path, row.dist_path})
      if (!fs::exists(p)) missing.push_back(p);
    manifest.rows.push_back(std::move(row));
  }

  if (!missing.empty()) {
    std::string msg = "manifest references missing files:";
    for (const std::string& m : missing) msg += "\n  " + m;
    throw IoError(msg);
  }
  return manifest;
}

CorrelationReport evaluate_dataset(const DatasetManifest& manifest,
                                   const ScalingParams& params,
                                   const EvaluateOptions& opts) {
  params.validate();
  if (opts.jobs < 1) throw ConfigError("jobs must be >= 1");

  const size_t n = manifest.rows.size();
  std::vector<std::optional<double>> scores(n);
  std::vector<std::string> failures(n);

  std::atomic<size_t> next{0};
  const auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      const ManifestRow& row = manifest.rows[i];
      try {
        const RgbImage ref = load_image(row.ref_path);
        const RgbImage dist = load_image(row.dist_path);
        scores[i] = score_pair(ref, dist, params).e;
      } catch (const std::exception& ex) {
        failures[i] = "row " + std::to_string(i + 1) + " (" + row.dist_path +
                      "): " + ex.what();
      }
    }
  };

  const int jobs = std::min<size_t>(opts.jobs, std::max<size_t>(n, 1));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  CorrelationReport report;
  report.dataset = manifest.name;
  report.params = params;
  std::vector<std::string> row_tags;
  for (size_t i = 0; i < n; ++i) {
    if (scores[i]) {
      report.scores.push_back(*scores[i]);
      report.mos.push_back(manifest.rows[i].mos);
      row_tags.push_back(manifest.rows[i].tag);
    } else {
      report.failures.push_back(failures[i]);
    }
  }
  report.n_pairs = report.scores.size();
  report.n_failed = report.failures.size();

  try {
    report.srcc = spearman(report.scores, report.mos);
    report.krcc = kendall(report.scores, report.mos);
    report.logistic = fit_logistic(report.scores, report.mos);
    const std::vector<double> mapped = report.logistic.map(report.scores);
    report.plcc = pearson(mapped, report.mos);
    report.rmse = ciiq::rmse(mapped, report.mos);
    if (opts.plcc_raw) report.plcc_raw = pearson(report.scores, report.mos);
  } catch (const DegenerateInput&) {
    report.degenerate = true;
    report.srcc = report.krcc = report.plcc = report.rmse = 0.0;
  }

  if (opts.per_tag) {
    std::vector<std::string> order;  // manifest order, first occurrence
    for (const std::string& t : row_tags)
      if (std::find(order.begin(), order.end(), t) == order.end())
        order.push_back(t);
    for (const std::string& t : order) {
      TagReport tr;
      tr.tag = t;
      std::vector<double> ts, tm;
      for (size_t i = 0; i < row_tags.size(); ++i) {
        if (row_tags[i] != t) continue;
        ts.push_back(report.scores[i]);
        tm.push_back(report.mos[i]);
      }
      tr.n_pairs = ts.size();
      try {
        tr.srcc = spearman(ts, tm);
        tr.krcc = kendall(ts, tm);
        if (report.degenerate) throw DegenerateInput("no dataset-level fit");
        const std::vector<double> tmapped = report.logistic.map(ts);
        tr.plcc = pearson(tmapped, tm);
        tr.rmse = ciiq::rmse(tmapped, tm);
      } catch (const DegenerateInput&) {
        tr.degenerate = true;
        tr.srcc = tr.krcc = tr.plcc = tr.rmse = 0.0;
      }
      report.tags.push_back(std::move(tr));
    }
  }
  return report;
}

SweepGrid sweep_parameters(const DatasetManifest& manifest,
                           const std::vector<double>& k1_values,
                           const std::vector<double>& k2_values,
                           const ScalingParams& base,
                           const EvaluateOptions& opts) {
  if (k1_values.empty() || k2_values.empty())
    throw ConfigError("sweep axes must be non-empty");

  SweepGrid grid;
  grid.k1_values = k1_values;
  grid.k2_values = k2_values;
  for (double k1 : k1_values) {
    for (double k2 : k2_values) {
      ScalingParams p = base;
      p.k1 = k1;
      p.k2 = k2;
      grid.cells.push_back({k1, k2, evaluate_dataset(manifest, p, opts)});
    }
  }
  return grid;
}

std::vector<CorrelationReport> ablate_window(const DatasetManifest& manifest,
                                             const std::vector<int>& windows,
                                             const ScalingParams& base,
                                             const EvaluateOptions& opts) {
  std::vector<CorrelationReport> reports;
  ScalingParams cs = base;
  cs.mode = NormMode::center_surround;
  reports.push_back(evaluate_dataset(manifest, cs, opts));
  for (int k : windows) {
    ScalingParams p = base;
    p.mode = NormMode::single_window;
    p.window_k = k;
    reports.push_back(evaluate_dataset(manifest, p, opts));
  }
  return reports;
}

double round6(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::strtod(buf, nullptr);
}

std::string report_to_json(const CorrelationReport& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["n_pairs"] = r.n_pairs;
  j["n_failed"] = r.n_failed;
  if (r.degenerate) {
    j["degenerate"] = true;
    j["srcc"] = nullptr;
    j["krcc"] = nullptr;
    j["plcc"] = nullptr;
    j["rmse"] = nullptr;
  } else {
    j["srcc"] = round6(r.srcc);
    j["srcc_abs"] = round6(std::abs(r.srcc));
    j["krcc"] = round6(r.krcc);
    j["plcc"] = round6(r.plcc);
    j["rmse"] = round6(r.rmse);
    if (r.plcc_raw) j["plcc_raw"] = round6(*r.plcc_raw);
    nlohmann::ordered_json lj;
    lj["b1"] = round6(r.logistic.beta[0]);
    lj["b2"] = round6(r.logistic.beta[1]);
    lj["b3"] = round6(r.logistic.beta[2]);
    lj["b4"] = round6(r.logistic.beta[3]);
    lj["b5"] = round6(r.logistic.beta[4]);
    lj["converged"] = r.logistic.converged;
    lj["residual"] = round6(r.logistic.residual);
    j["logistic"] = lj;
  }
  if (!r.tags.empty()) {
    nlohmann::ordered_json tags = nlohmann::ordered_json::array();
    for (const TagReport& t : r.tags) {
      nlohmann::ordered_json tj;
      tj["tag"] = t.tag;
      tj["n_pairs"] = t.n_pairs;
      if (t.degenerate) {
        tj["degenerate"] = true;
      } else {
        tj["srcc"] = round6(t.srcc);
        tj["krcc"] = round6(t.krcc);
        tj["plcc"] = round6(t.plcc);
        tj["rmse"] = round6(t.rmse);
      }
      tags.push_back(tj);
    }
    j["tags"] = tags;
  }
  nlohmann::ordered_json pj;
  pj["k1"] = round6(r.params.k1);
  pj["k2"] = round6(r.params.k2);
  pj["cr_threshold"] = round6(r.params.cr_threshold);
  pj["mode"] = r.params.mode_label();
  j["params"] = pj;
  if (!r.failures.empty()) j["failures"] = r.failures;
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepGrid& grid) {
  std::ostringstream out;
  out << "k1,k2,srcc,krcc,plcc\n";
  char buf[64];
  const auto f6 = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };
  for (const SweepCell& c : grid.cells) {
    out << f6(c.k1) << ',' << f6(c.k2) << ',';
    if (c.report.degenerate)
      out << ",,";
    else
      out << f6(c.report.srcc) << ',' << f6(c.report.krcc) << ','
          << f6(c.report.plcc);
    out << '\n';
  }
  return out.str();
}

}  // namespace ciiq
