#pragma once

// The seqlab command line: dataset set-up → convert → evaluate → predict,
// plus schedule simulation and multi-run aggregation.
//
// Exit codes: 0 success, 1 data/processing error, 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqlab/eval.hpp"
#include "seqlab/infer.hpp"
#include "seqlab/ingest.hpp"
#include "seqlab/runs.hpp"
#include "seqlab/schedule.hpp"
#include "seqlab/schemes.hpp"
#include "seqlab/tagger.hpp"

namespace seqlab::cli {

inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

inline constexpr const char* kDataDirEnv = "SEQLAB_DATA_DIR";

struct CliConfig {
  std::filesystem::path data_dir;
  int verbosity = 0;
  std::uint64_t seed = 42;
};

/// Configuration problems that map to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path resolve_data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
  return "seqlab-data";
}

/// Tagger URIs: "lexicon:<path.json>", "all-o", "echo-gold". The gold echo
/// needs the documents being evaluated.
inline std::unique_ptr<Tagger> load_tagger(const std::string& uri,
                                           std::span<const Document> gold = {}) {
  if (uri == "all-o") return std::make_unique<AllOutsideTagger>();
  if (uri == "echo-gold") {
    if (gold.empty())
      throw Error(ErrorCode::InvalidConfig, "echo-gold tagger needs an evaluation dataset");
    return std::make_unique<GoldEchoTagger>(gold);
  }
  constexpr std::string_view kLexicon = "lexicon:";
  if (uri.rfind(kLexicon, 0) == 0) {
    const auto path = uri.substr(kLexicon.size());
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read lexicon " + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedJson, path + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::MalformedJson, path + ": expected an object");
    std::map<std::string, std::string> lexicon;
    for (const auto& [phrase, cls] : j.items()) {
      if (!cls.is_string())
        throw Error(ErrorCode::MalformedJson, path + ": class for '" + phrase + "' is not a string");
      lexicon[phrase] = cls.get<std::string>();
    }
    return std::make_unique<LexiconTagger>(std::move(lexicon));
  }
  throw Error(ErrorCode::InvalidConfig, "unknown tagger '" + uri + "'");
}

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

inline std::filesystem::path dataset_dir(const CliConfig& cfg, const std::string& dataset) {
  const std::filesystem::path as_path(dataset);
  if (std::filesystem::is_directory(as_path) && dataset.find('/') != std::string::npos)
    return as_path;
  return cfg.data_dir / "datasets" / dataset;
}

/// 1-based line numbers of the non-blank lines of a JSONL file.
inline std::vector<std::size_t> record_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::size_t> lines;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n)
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(n);
  return lines;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

struct SetUpArgs {
  std::string source;
  std::string name;
  std::string path;
  std::vector<double> split_ratio{0.8, 0.1, 0.1};
  double fraction = 1.0;
  double val_fraction = 1.0;
  double test_fraction = 1.0;
  std::string scheme;
};

inline int cmd_dataset_setup(const CliConfig& cfg, const SetUpArgs& args, std::ostream& out,
                             std::ostream& err) {
  SetUpParams p;
  p.source = *source_from_string(args.source);
  p.name = args.name;
  p.path = args.path;
  if (args.split_ratio.size() != 3) throw UsageError("--split-ratio needs three values");
  p.split_ratio = {args.split_ratio[0], args.split_ratio[1], args.split_ratio[2]};
  p.seed = cfg.seed;
  p.fractions = {args.fraction, args.val_fraction, args.test_fraction};
  if (!args.scheme.empty()) p.scheme = scheme_from_string(args.scheme);
  p.output_dir = cfg.data_dir / "datasets" / args.name;
  const auto result = set_up(p);
  out << to_json(result.analysis).dump(2) << '\n';
  if (cfg.verbosity > 0) err << "wrote " << p.output_dir->string() << '\n';
  return kOk;
}

struct ConvertArgs {
  std::string from;
  std::string to;
  std::string input;
  std::string output;
};

inline int cmd_convert(const CliConfig& cfg, const ConvertArgs& args, std::ostream& out,
                       std::ostream& err) {
  const auto from = *scheme_from_string(args.from);
  const auto to = *scheme_from_string(args.to);
  std::ifstream in(args.input, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + args.input);
  auto docs = parse_canonical_jsonl(in, from);
  const auto lines = detail::record_lines(args.input);

  std::size_t bad = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!docs[d].word_labels) continue;
    for (const auto& v : validate_sequence(*docs[d].word_labels)) {
      err << args.input << ":" << (d < lines.size() ? lines[d] : d + 1) << ": position "
          << v.position << ": " << to_string(v.kind) << '\n';
      ++bad;
    }
  }
  if (bad) {
    err << bad << " violation(s); nothing written\n";
    return kDataError;
  }
  std::size_t merges = 0;
  for (auto& doc : docs) {
    if (!doc.word_labels) continue;
    merges += count_io_merges(extract_entities(*doc.word_labels, ExtractionMode::Strict));
    doc.word_labels = convert_scheme(*doc.word_labels, to);
  }
  if (to == Scheme::IO)
    err << "warning: IO cannot separate adjacent chunks of one class; " << merges
        << " adjacent same-class pair(s) merged\n";
  std::ostringstream body;
  write_canonical_jsonl(body, docs);
  detail::write_text_file(args.output, body.str());
  if (cfg.verbosity > 0) err << "converted " << docs.size() << " document(s)\n";
  out << nlohmann::json{{"documents", docs.size()}, {"from", args.from}, {"to", args.to},
                        {"io_merges", to == Scheme::IO ? merges : 0}}
             .dump()
      << '\n';
  return kOk;
}

struct EvaluateArgs {
  std::string tagger;
  std::string dataset;
  std::string phase = "test";
  std::string scheme;
  std::string output;
  std::string training;
  std::string run;
  unsigned workers = 1;
};

inline int cmd_evaluate(const CliConfig& cfg, const EvaluateArgs& args, std::ostream& out,
                        std::ostream& err) {
  const auto dir = detail::dataset_dir(cfg, args.dataset);
  const auto split = *split_from_string(args.phase);
  std::optional<Scheme> scheme;
  if (!args.scheme.empty()) scheme = scheme_from_string(args.scheme);
  const auto docs = load_split(dir, split, scheme);
  if (!scheme) {
    scheme = Scheme::BIO;
    for (const auto& d : docs)
      if (d.word_labels) {
        scheme = d.word_labels->scheme();
        break;
      }
  }
  const auto tagger = load_tagger(args.tagger, docs);
  const auto results = to_json(evaluate_on_dataset(*tagger, docs, *scheme, args.workers));

  const auto report_path =
      args.output.empty()
          ? cfg.data_dir / "evaluations" /
                (std::filesystem::path(args.dataset).filename().string() + "-" + args.phase + ".json")
          : std::filesystem::path(args.output);
  detail::write_text_file(report_path, results.dump(2) + "\n");

  if (!args.training.empty() || !args.run.empty()) {
    if (args.training.empty() || args.run.empty())
      throw UsageError("--training and --run go together");
    const auto tdir = cfg.data_dir / "runs" / args.training;
    RunRecord record;
    const auto file = tdir / (args.run + ".json");
    if (std::filesystem::exists(file)) record = run_record_from_json(detail::read_json_file(file));
    record.run_name = args.run;
    record.seed = static_cast<std::int64_t>(cfg.seed);
    record.reports[args.phase] = results;
    save_run_record(tdir, record);
  }
  out << results.dump(2) << '\n';
  if (cfg.verbosity > 0)
    err << "strict micro entity f1 = " << results["strict"]["micro"]["entity"]["f1"] << '\n';
  return kOk;
}

struct PredictArgs {
  std::string tagger;
  std::string text;
  std::string input;
  std::string output;
  std::string level = "entity";
  bool probabilities = false;
  std::string scheme = "BIO";
  std::size_t batch_size = 64;
  unsigned workers = 1;
};

inline int cmd_predict(const CliConfig&, const PredictArgs& args, std::ostream& out,
                       std::ostream&) {
  if (args.text.empty() == args.input.empty())
    throw UsageError("give either --text or --input/--output");
  if (!args.input.empty() && args.output.empty()) throw UsageError("--input needs --output");
  const auto tagger = load_tagger(args.tagger);
  PredictOptions opts;
  opts.level = args.level == "word" ? PredictionLevel::Word : PredictionLevel::Entity;
  opts.with_probabilities = args.probabilities;
  opts.scheme = *scheme_from_string(args.scheme);
  if (!args.text.empty()) {
    out << to_json(predict(*tagger, args.text, opts)).dump() << '\n';
    return kOk;
  }
  FileOptions fopts;
  fopts.predict = opts;
  fopts.batch_size = args.batch_size;
  fopts.workers = args.workers;
  const auto summary = predict_file(*tagger, args.input, args.output, fopts);
  out << nlohmann::json{{"processed", summary.processed}, {"failed", summary.failed}}.dump()
      << '\n';
  return kOk;
}

struct ScheduleArgs {
  std::string config;
  std::string losses;
  std::string output;
};

inline int cmd_schedule(const CliConfig&, const ScheduleArgs& args, std::ostream& out,
                        std::ostream&) {
  const auto cj = detail::read_json_file(args.config);
  ScheduleConfig cfg;
  try {
    cfg = schedule_config_from_json(cj);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  nlohmann::json lj;
  if (!args.losses.empty()) lj = detail::read_json_file(args.losses);
  else if (cj.contains("val_losses")) lj = cj["val_losses"];
  else throw UsageError("no losses: pass --losses or set val_losses in the config");
  std::vector<double> losses;
  try {
    losses = lj.get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("losses must be a number array: ") + e.what());
  }
  const auto rows = simulate(cfg, losses);
  std::ostringstream csv;
  write_csv(csv, rows);
  if (args.output.empty()) out << csv.str();
  else detail::write_text_file(args.output, csv.str());
  return kOk;
}

struct AggregateArgs {
  std::string training;
  std::string metric{kDefaultSelectionMetric};
};

inline int cmd_aggregate(const CliConfig& cfg, const AggregateArgs& args, std::ostream& out,
                         std::ostream&) {
  const auto dir = cfg.data_dir / "runs" / args.training;
  const auto records = load_run_records(dir);
  const auto result = to_json(aggregate(records, args.metric));
  detail::write_text_file(dir / "aggregate.json", result.dump(2) + "\n");
  out << result.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"seqlab: sequence-labeling datasets, evaluation and inference", "seqlab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string data_dir_flag;
  CliConfig cfg;
  bool verbose = false;
  app.add_option("--data-dir", data_dir_flag,
                 std::string("data directory (default $") + kDataDirEnv + " or ./seqlab-data)");
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "extra diagnostics on stderr");

  const std::vector<std::string> schemes{"IO", "BIO", "BILOU"};

  auto* dataset = app.add_subcommand("dataset", "dataset management");
  dataset->require_subcommand(1);
  SetUpArgs setup;
  auto* setup_cmd = dataset->add_subcommand("set-up", "parse, split and analyze a dataset");
  setup_cmd->add_option("--source", setup.source, "LF | HF | AT | BI")
      ->required()
      ->check(CLI::IsMember({"LF", "HF", "AT", "BI"}));
  setup_cmd->add_option("--name", setup.name, "dataset name")->required();
  setup_cmd->add_option("--path", setup.path, "file or directory for LF/HF/AT sources");
  setup_cmd->add_option("--split-ratio", setup.split_ratio, "train,val,test ratios")
      ->delimiter(',')
      ->expected(3);
  setup_cmd->add_option("--fraction", setup.fraction, "fraction of train to keep")
      ->check(CLI::Range(0.0, 1.0));
  setup_cmd->add_option("--val-fraction", setup.val_fraction)->check(CLI::Range(0.0, 1.0));
  setup_cmd->add_option("--test-fraction", setup.test_fraction)->check(CLI::Range(0.0, 1.0));
  setup_cmd->add_option("--scheme", setup.scheme, "annotation scheme of the labels")
      ->check(CLI::IsMember(schemes));

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "translate annotation schemes");
  convert_cmd->add_option("--from", convert.from)->required()->check(CLI::IsMember(schemes));
  convert_cmd->add_option("--to", convert.to)->required()->check(CLI::IsMember(schemes));
  convert_cmd->add_option("--input", convert.input)->required();
  convert_cmd->add_option("--output", convert.output)->required();

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a tagger on a dataset split");
  evaluate_cmd->add_option("--tagger", evaluate.tagger, "lexicon:<path> | all-o | echo-gold")
      ->required();
  evaluate_cmd->add_option("--dataset", evaluate.dataset, "dataset name or directory")
      ->required();
  evaluate_cmd->add_option("--phase", evaluate.phase)
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--scheme", evaluate.scheme)->check(CLI::IsMember(schemes));
  evaluate_cmd->add_option("--output", evaluate.output, "report path");
  evaluate_cmd->add_option("--training", evaluate.training, "record into runs/<training>/");
  evaluate_cmd->add_option("--run", evaluate.run, "run name for the record");
  evaluate_cmd->add_option("--workers", evaluate.workers)->check(CLI::PositiveNumber);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "run a tagger on raw text");
  predict_cmd->add_option("--tagger", predict.tagger)->required();
  predict_cmd->add_option("--text", predict.text);
  predict_cmd->add_option("--input", predict.input, "JSONL with {\"text\": ...} per line");
  predict_cmd->add_option("--output", predict.output);
  predict_cmd->add_option("--level", predict.level)
      ->check(CLI::IsMember({"entity", "word"}))
      ->capture_default_str();
  predict_cmd->add_flag("--probabilities", predict.probabilities);
  predict_cmd->add_option("--scheme", predict.scheme)->check(CLI::IsMember(schemes));
  predict_cmd->add_option("--batch-size", predict.batch_size)->check(CLI::PositiveNumber);
  predict_cmd->add_option("--workers", predict.workers)->check(CLI::PositiveNumber);

  auto* schedule = app.add_subcommand("schedule", "learning-rate schedules");
  schedule->require_subcommand(1);
  ScheduleArgs sched;
  auto* simulate_cmd = schedule->add_subcommand("simulate", "trajectory of a schedule as CSV");
  simulate_cmd->add_option("--config", sched.config, "JSON config")->required();
  simulate_cmd->add_option("--losses", sched.losses, "JSON array of validation losses");
  simulate_cmd->add_option("--output", sched.output, "CSV path (default stdout)");

  AggregateArgs agg;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "mean ± standard error across runs");
  aggregate_cmd->add_option("--training", agg.training)->required();
  aggregate_cmd->add_option("--metric", agg.metric)->capture_default_str();

  std::vector<char*> raw;
  raw.reserve(argv.size() + 1);
  std::string prog = "seqlab";
  raw.push_back(prog.data());
  for (auto& a : argv) raw.push_back(a.data());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  cfg.data_dir = resolve_data_dir(data_dir_flag);
  cfg.verbosity = verbose ? 1 : 0;

  try {
    if (*setup_cmd) return cmd_dataset_setup(cfg, setup, out, err);
    if (*convert_cmd) return cmd_convert(cfg, convert, out, err);
    if (*evaluate_cmd) return cmd_evaluate(cfg, evaluate, out, err);
    if (*predict_cmd) return cmd_predict(cfg, predict, out, err);
    if (*simulate_cmd) return cmd_schedule(cfg, sched, out, err);
    if (*aggregate_cmd) return cmd_aggregate(cfg, agg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  err << app.help();
  return kUsageError;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace seqlab::cli
