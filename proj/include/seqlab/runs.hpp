#pragma once

// Multi-seed bookkeeping: metrics across runs as mean ± standard error of
// the mean, and best-run selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqlab/error.hpp"

namespace seqlab {

inline constexpr std::string_view kDefaultSelectionMetric = "val.strict.micro.entity.f1";

struct RunRecord {
  std::string run_name;
  std::int64_t seed = 0;
  nlohmann::json reports = nlohmann::json::object();  // e.g. {"val": ..., "test": ...}
  std::string artifacts_path;
};

struct MetricSummary {
  double mean = 0.0;
  double uncertainty = 0.0;  // standard error of the mean
  std::size_t n = 0;
  std::vector<double> per_run;
};

struct AggregateResult {
  std::map<std::string, MetricSummary> metrics;  // dotted metric path → summary
  std::string best_run;
  std::string selection_metric;
  std::vector<std::string> run_names;  // order of per_run entries
};

/// Mean and s/√n with the n−1 sample deviation; uncertainty is 0 for n = 1.
inline MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.n = values.size();
  s.per_run.assign(values.begin(), values.end());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const auto n = static_cast<double>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.mean = std::clamp(sum / n, *lo, *hi);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.uncertainty = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

/// Looks up "a.b.c"; a leading '/' selects JSON-pointer syntax instead.
inline std::optional<double> metric_value(const nlohmann::json& reports,
                                          std::string_view path) {
  const nlohmann::json* node = &reports;
  if (!path.empty() && path.front() == '/') {
    const nlohmann::json::json_pointer ptr{std::string(path)};
    if (!reports.contains(ptr)) return std::nullopt;
    node = &reports.at(ptr);
  } else {
    std::size_t pos = 0;
    while (pos <= path.size()) {
      const auto dot = path.find('.', pos);
      const auto key = path.substr(pos, dot == std::string_view::npos ? path.npos : dot - pos);
      if (!node->is_object()) return std::nullopt;
      const auto it = node->find(std::string(key));
      if (it == node->end()) return std::nullopt;
      node = &*it;
      if (dot == std::string_view::npos) break;
      pos = dot + 1;
    }
  }
  if (!node->is_number()) return std::nullopt;
  return node->get<double>();
}

namespace detail {

inline void collect_numeric(const nlohmann::json& j, const std::string& prefix,
                            std::map<std::string, double>& out) {
  if (j.is_number()) {
    out[prefix] = j.get<double>();
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      collect_numeric(v, prefix.empty() ? k : prefix + "." + k, out);
  }
}

inline void check_runs(std::span<const RunRecord> records, std::string_view metric) {
  if (records.empty()) throw Error(ErrorCode::EmptyRunSet, "no runs");
  for (const auto& r : records)
    if (!metric_value(r.reports, metric))
      throw Error(ErrorCode::MissingMetric,
                  "run '" + r.run_name + "' lacks '" + std::string(metric) + "'");
}

}  // namespace detail

/// Argmax of the selection metric; ties go to the lowest seed, then the
/// lexicographically smallest run name.
inline const RunRecord& best_model(std::span<const RunRecord> records,
                                   std::string_view selection_metric = kDefaultSelectionMetric) {
  detail::check_runs(records, selection_metric);
  const RunRecord* best = &records.front();
  double best_value = *metric_value(best->reports, selection_metric);
  for (const auto& r : records.subspan(1)) {
    const double v = *metric_value(r.reports, selection_metric);
    const bool better =
        v > best_value ||
        (v == best_value &&
         (r.seed < best->seed || (r.seed == best->seed && r.run_name < best->run_name)));
    if (better) {
      best = &r;
      best_value = v;
    }
  }
  return *best;
}

/// Summaries for every numeric leaf present in all runs. Runs are ordered by
/// name so the result does not depend on input order.
inline AggregateResult aggregate(std::span<const RunRecord> records,
                                 std::string_view selection_metric = kDefaultSelectionMetric) {
  detail::check_runs(records, selection_metric);
  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const RunRecord* a, const RunRecord* b) { return a->run_name < b->run_name; });

  std::vector<std::map<std::string, double>> leaves(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    detail::collect_numeric(sorted[i]->reports, "", leaves[i]);

  AggregateResult out;
  out.selection_metric = std::string(selection_metric);
  out.best_run = best_model(records, selection_metric).run_name;
  for (const auto* r : sorted) out.run_names.push_back(r->run_name);
  for (const auto& [path, first] : leaves.front()) {
    std::vector<double> values;
    for (const auto& l : leaves) {
      const auto it = l.find(path);
      if (it == l.end()) break;
      values.push_back(it->second);
    }
    if (values.size() == leaves.size()) out.metrics[path] = summarize(values);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence: runs/<training>/<run>.json and runs/<training>/aggregate.json

inline nlohmann::json to_json(const RunRecord& r) {
  return {{"run_name", r.run_name},
          {"seed", r.seed},
          {"reports", r.reports},
          {"artifacts_path", r.artifacts_path}};
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  try {
    RunRecord r;
    r.run_name = j.at("run_name").get<std::string>();
    r.seed = j.at("seed").get<std::int64_t>();
    r.reports = j.value("reports", nlohmann::json::object());
    r.artifacts_path = j.value("artifacts_path", std::string());
    if (r.run_name.empty()) throw Error(ErrorCode::MalformedJson, "empty run_name");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

inline nlohmann::json to_json(const AggregateResult& a) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [path, s] : a.metrics)
    metrics[path] = {{"mean", s.mean}, {"uncertainty", s.uncertainty}, {"n", s.n},
                     {"per_run", s.per_run}};
  return {{"metrics", metrics},
          {"best_run", a.best_run},
          {"selection_metric", a.selection_metric},
          {"runs", a.run_names},
          {"uncertainty", "standard error of the mean (sample std / sqrt(n))"}};
}

inline void save_run_record(const std::filesystem::path& training_dir, const RunRecord& r) {
  std::filesystem::create_directories(training_dir);
  std::ofstream out(training_dir / (r.run_name + ".json"));
  if (!out) throw Error(ErrorCode::Io, "cannot write run record " + r.run_name);
  out << to_json(r).dump(2) << '\n';
}

inline std::vector<RunRecord> load_run_records(const std::filesystem::path& training_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(training_dir))
    throw Error(ErrorCode::UnresolvableSource, "no run directory " + training_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(training_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().filename() != "aggregate.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> runs;
  std::map<std::string, fs::path> seen;
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedJson, f.string() + ": " + e.what());
    }
    auto r = run_record_from_json(j);
    if (!seen.emplace(r.run_name, f).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate run_name '" + r.run_name + "'");
    runs.push_back(std::move(r));
  }
  return runs;
}

}  // namespace seqlab
