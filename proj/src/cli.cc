// Copyright 2026 The evsent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evsent/cli.h"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "evsent/corpus.h"
#include "evsent/dataset.h"
#include "evsent/evaluation.h"
#include "evsent/pipeline.h"
#include "evsent/synthetic.h"
#include "evsent/training.h"
#include "json.hpp"

namespace evsent {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A failure the user can fix by changing input data or checkpoints.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<uint64_t> seed;
  // Subcommand flags mapped to config keys, applied before --set.
  std::vector<std::pair<std::string, std::string>> flags;
};

void AddCommon(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", common.sets, "override, key=value (repeatable)");
  cmd->add_option("--seed", common.seed, "random seed");
}

Config BuildConfig(const CommonOptions& common) {
  Config config = Config::Defaults();
  if (!common.config_path.empty()) config.LoadFile(common.config_path);
  config.ApplyEnvironment();
  for (const auto& [key, value] : common.flags) config.Set(key, value);
  for (const std::string& kv : common.sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    key.erase(key.find_last_not_of(' ') + 1);
    value.erase(0, value.find_first_not_of(' '));
    config.Set(key, value);
  }
  if (common.seed) config.Set("seed", std::to_string(*common.seed));
  return config;
}

void EchoConfig(const Config& config, const std::string& command,
                std::ostream& err) {
  err << "# evsent " << command << " effective config\n"
      << config.ToText() << std::flush;
}

void WriteEffectiveConfig(const Config& config, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "effective_config.txt") << config.ToText();
}

Corpus LoadCorpusOrFail(const std::string& path, std::ostream& err) {
  LoadResult loaded = ReadJsonl(path);
  if (!loaded.errors.empty()) {
    for (const LoadError& e : loaded.errors) {
      err << path << ":" << e.line
          << (e.doc_id.empty() ? "" : " [" + e.doc_id + "]") << ": "
          << e.message << "\n";
    }
    throw ValidationError(path + ": " + std::to_string(loaded.errors.size()) +
                          " invalid line(s)");
  }
  return std::move(loaded.documents);
}

// A training output directory resolves to its best/ checkpoint.
std::string ResolveModelDir(const std::string& dir) {
  const fs::path best = fs::path(dir) / "best";
  if (fs::exists(fs::path(dir) / "summary.json") && fs::is_directory(best)) {
    return best.string();
  }
  return dir;
}

void CheckAblation(EventExtractor& extractor, const std::string& preset) {
  Config expected = Config::Defaults();
  ApplyAblation(preset, expected);
  const bool pipeline = dynamic_cast<PipelineModel*>(&extractor) != nullptr;
  std::vector<std::string> problems;
  if (pipeline != expected.GetBool("train.pipeline_mode")) {
    problems.push_back(pipeline ? "checkpoint is a pipeline"
                                : "checkpoint is not a pipeline");
  }
  if (auto* joint = dynamic_cast<JointModel*>(&extractor)) {
    const ModelConfig& m = joint->config();
    auto flag = [&](const char* key, bool actual) {
      if (actual != expected.GetBool(key)) {
        problems.push_back(std::string(key) + " is " +
                           (actual ? "true" : "false"));
      }
    };
    flag("train.use_features", m.use_features);
    flag("train.use_trigger_info", m.use_trigger_info);
    flag("train.use_argument_info", m.use_argument_info);
  }
  if (!problems.empty()) {
    std::string msg = "checkpoint does not match ablation '" + preset + "':";
    for (const std::string& p : problems) msg += " " + p + ";";
    throw ValidationError(msg);
  }
}

// Train/dev sets from explicit files, or a seeded split of data.corpus.
std::pair<Corpus, Corpus> LoadTrainDev(const Config& config,
                                       std::ostream& err) {
  const std::string train = config.Get("data.train");
  const std::string dev = config.Get("data.dev");
  if (!train.empty() && !dev.empty()) {
    return {LoadCorpusOrFail(train, err), LoadCorpusOrFail(dev, err)};
  }
  const std::string corpus = config.Get("data.corpus");
  if (corpus.empty()) {
    throw ConfigError(
        "training data missing: give --train and --dev, or --corpus");
  }
  CorpusSplits splits = Split(LoadCorpusOrFail(corpus, err),
                              SplitRatiosFrom(config), config.GetUint64("seed"));
  return {std::move(splits.train), std::move(splits.dev)};
}

int RunSynth(const Config& config, const std::string& out,
             const std::string& split_dir, std::ostream& os) {
  const Corpus corpus =
      GenerateSynthetic(SynthConfigFrom(config), config.GetUint64("seed"));
  json summary = {{"documents", corpus.size()}};
  if (!out.empty()) {
    WriteJsonl(out, corpus);
    summary["out"] = out;
  }
  if (!split_dir.empty()) {
    fs::create_directories(split_dir);
    CorpusSplits splits =
        Split(corpus, SplitRatiosFrom(config), config.GetUint64("seed"));
    WriteJsonl((fs::path(split_dir) / "train.jsonl").string(), splits.train);
    WriteJsonl((fs::path(split_dir) / "dev.jsonl").string(), splits.dev);
    WriteJsonl((fs::path(split_dir) / "test.jsonl").string(), splits.test);
    WriteEffectiveConfig(config, split_dir);
    summary["splits"] = {{"train", splits.train.size()},
                         {"dev", splits.dev.size()},
                         {"test", splits.test.size()}};
  }
  summary["events"] = CorpusStats(corpus).events;
  os << summary.dump() << "\n";
  return kExitOk;
}

std::string StatsTable(const StatsReport& s) {
  std::ostringstream t;
  auto row = [&](const char* name, const std::string& value) {
    t << std::left << std::setw(28) << name << value << "\n";
  };
  auto fixed = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };
  row("documents", std::to_string(s.documents));
  row("average_length", fixed(s.average_length));
  row("events", std::to_string(s.events));
  row("multi_event_documents", std::to_string(s.multi_event_documents));
  row("positive_events", std::to_string(s.positive_events));
  row("negative_events", std::to_string(s.negative_events));
  row("neutral_events", std::to_string(s.neutral_events));
  row("average_sentences", fixed(s.average_sentences));
  row("multi_polarity_documents", std::to_string(s.multi_polarity_documents));
  row("cross_sentence_events", std::to_string(s.cross_sentence_events));
  return t.str();
}

int RunStats(const std::string& input, const std::string& mapping_path,
             bool check_published, const std::string& format,
             const std::string& import_out, std::ostream& os,
             std::ostream& err) {
  Corpus corpus;
  std::vector<LoadError> errors;
  if (!mapping_path.empty() || !import_out.empty()) {
    ImportMapping mapping;
    if (!mapping_path.empty()) {
      std::ifstream in(mapping_path);
      if (!in) throw ValidationError("cannot open mapping: " + mapping_path);
      mapping = ImportMapping::FromJson(json::parse(in));
    }
    ImportResult imported = ImportDataset(input, mapping);
    for (const std::string& w : imported.warnings) err << "warning: " << w << "\n";
    corpus = std::move(imported.documents);
    errors = std::move(imported.errors);
    if (!import_out.empty()) WriteJsonl(import_out, corpus);
  } else {
    LoadResult loaded = ReadJsonl(input);
    corpus = std::move(loaded.documents);
    errors = std::move(loaded.errors);
  }
  for (const LoadError& e : errors) {
    err << input << ":" << e.line
        << (e.doc_id.empty() ? "" : " [" + e.doc_id + "]") << ": " << e.message
        << "\n";
  }
  const StatsReport stats = CorpusStats(corpus);
  std::vector<std::string> mismatches;
  if (check_published) mismatches = CompareWithPublished(stats);
  if (format == "table") {
    os << StatsTable(stats);
    for (const std::string& m : mismatches) os << "MISMATCH " << m << "\n";
  } else {
    json j = stats.ToJson();
    if (check_published) j["published_mismatches"] = mismatches;
    if (!errors.empty()) j["invalid_lines"] = errors.size();
    os << j.dump(2) << "\n";
  }
  return errors.empty() && mismatches.empty() ? kExitOk : kExitValidation;
}

int RunTrain(const Config& config, const std::string& out, std::ostream& os,
             std::ostream& err) {
  auto [train, dev] = LoadTrainDev(config, err);
  TrainConfig tc = TrainConfigFrom(config);
  tc.output_dir = out;
  tc.progress = [&err](const std::string& msg) { err << msg << "\n" << std::flush; };
  WriteEffectiveConfig(config, out);
  CheckpointSet result = Train(tc, train, dev);
  os << result.Summary().dump(2) << "\n";
  return kExitOk;
}

void PrintReport(const MetricReport& report, const std::string& format,
                 std::ostream& os) {
  if (format == "table") {
    os << report.ToTable();
  } else {
    os << report.ToJson().dump(2) << "\n";
  }
}

int RunEval(const Config& config, std::string model_dir,
            const std::string& input, const std::string& mode,
            const std::string& format, const std::string& ablation,
            const std::string& out, std::ostream& os, std::ostream& err) {
  const std::string test_path = input.empty() ? config.Get("data.test") : input;
  if (test_path.empty()) throw ConfigError("eval needs --input or data.test");
  const Corpus gold = LoadCorpusOrFail(test_path, err);

  std::unique_ptr<EventExtractor> owned;
  CheckpointSet trained;
  EventExtractor* extractor = nullptr;
  if (model_dir.empty()) {
    // No checkpoint: train the configured (ablation) model, then evaluate.
    auto [train, dev] = LoadTrainDev(config, err);
    TrainConfig tc = TrainConfigFrom(config);
    tc.output_dir = out;
    tc.progress = [&err](const std::string& msg) { err << msg << "\n" << std::flush; };
    if (!out.empty()) WriteEffectiveConfig(config, out);
    trained = Train(tc, train, dev);
    extractor = trained.seeds.at(trained.best).model.get();
  } else {
    if (!ablation.empty() && fs::is_directory(fs::path(model_dir) / ablation)) {
      model_dir = (fs::path(model_dir) / ablation).string();
    }
    owned = LoadExtractor(ResolveModelDir(model_dir));
    extractor = owned.get();
    if (!ablation.empty()) CheckAblation(*extractor, ablation);
  }
  const EvalOptions options = EvalOptionsFrom(config);
  const MetricReport report = mode == "gold-args"
                                  ? EvaluateGoldArguments(*extractor, gold, options)
                                  : EvaluateEndToEnd(*extractor, gold, options);
  PrintReport(report, format, os);
  if (!out.empty()) {
    fs::create_directories(out);
    WriteEffectiveConfig(config, out);
    std::ofstream(fs::path(out) / ("eval-" + mode + ".json"))
        << report.ToJson().dump(2) << "\n";
  }
  return kExitOk;
}

int RunPredict(const Config& config, const std::string& model_dir,
               const std::string& input, const std::string& out,
               std::ostream& os) {
  std::unique_ptr<EventExtractor> extractor =
      LoadExtractor(ResolveModelDir(model_dir));
  const PredictSummary summary = PredictFile(*extractor, input, out);
  std::ofstream(out + ".config.txt") << config.ToText();
  os << summary.ToJson().dump(2) << "\n";
  return summary.errors.empty() ? kExitOk : kExitValidation;
}

// Units as rows: a JSON array of arrays, or one JSON array per line. null
// marks a missing rating; non-string labels are compared by their JSON text.
std::vector<std::vector<std::optional<std::string>>> ReadRatings(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open ratings file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  std::vector<json> units;
  try {
    const size_t first = content.find_first_not_of(" \t\r\n");
    const size_t second =
        first == std::string::npos ? first : content.find_first_not_of(" \t\r\n", first + 1);
    if (second != std::string::npos && content[first] == '[' &&
        content[second] == '[') {
      for (json& u : json::parse(content)) units.push_back(std::move(u));
    } else {
      std::istringstream lines(content);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        units.push_back(json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  std::vector<std::vector<std::optional<std::string>>> ratings;
  for (const json& u : units) {
    if (!u.is_array()) throw ValidationError(path + ": each unit must be an array");
    std::vector<std::optional<std::string>> row;
    for (const json& r : u) {
      if (r.is_null()) {
        row.push_back(std::nullopt);
      } else {
        row.push_back(r.is_string() ? r.get<std::string>() : r.dump());
      }
    }
    ratings.push_back(std::move(row));
  }
  return ratings;
}

int RunAgreement(const std::string& input, std::ostream& os) {
  const auto ratings = ReadRatings(input);
  double alpha = 0.0;
  try {
    alpha = KrippendorffAlpha(ratings);
  } catch (const AlphaError& e) {
    throw ValidationError(e.what());
  }
  size_t annotators = 0;
  for (const auto& u : ratings) annotators = std::max(annotators, u.size());
  os << json{{"alpha", alpha}, {"units", ratings.size()}, {"annotators", annotators}}
            .dump(2)
     << "\n";
  return kExitOk;
}

int RunGradcheck(const Config& config, const std::string& module,
                 const std::string& format, std::ostream& os) {
  std::vector<std::string> modules;
  if (module == "all") {
    modules = GradCheckModules();
  } else {
    modules = {module};
  }
  const double tolerance = config.GetDouble("gradcheck.tolerance");
  bool passed = true;
  json reports = json::array();
  for (const std::string& m : modules) {
    const GradCheckReport report =
        GradientCheck(m, tolerance, config.GetUint64("seed"));
    passed = passed && report.passed;
    if (format == "table") {
      os << std::left << std::setw(12) << report.module << std::setw(6)
         << (report.passed ? "ok" : "FAIL") << " max deviation "
         << std::scientific << std::setprecision(3) << report.max_deviation
         << std::defaultfloat << "\n";
    } else {
      reports.push_back(report.ToJson());
    }
  }
  if (format != "table") {
    os << json{{"passed", passed}, {"reports", reports}}.dump(2) << "\n";
  }
  return passed ? kExitOk : kExitValidation;
}

}  // namespace

const std::vector<std::string>& AblationPresets() {
  static const std::vector<std::string> presets = {
      "full", "pipeline", "no-features", "no-trigger", "no-argument",
      "no-trigger-argument"};
  return presets;
}

void ApplyAblation(const std::string& preset, Config& config) {
  static const std::map<std::string,
                        std::vector<std::pair<std::string, std::string>>>
      overrides = {
          {"full", {}},
          {"pipeline", {{"train.pipeline_mode", "true"}}},
          {"no-features", {{"train.use_features", "false"}}},
          {"no-trigger", {{"train.use_trigger_info", "false"}}},
          {"no-argument", {{"train.use_argument_info", "false"}}},
          {"no-trigger-argument",
           {{"train.use_trigger_info", "false"},
            {"train.use_argument_info", "false"}}},
      };
  auto it = overrides.find(preset);
  if (it == overrides.end()) {
    throw ConfigError("unknown ablation preset '" + preset + "'");
  }
  for (const auto& [key, value] : it->second) config.Set(key, value);
}

int RunCli(const std::vector<std::string>& args, std::ostream& os,
           std::ostream& err) {
  CLI::App app{"Structured event-level sentiment analysis", "evsent"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  CommonOptions common;
  std::string out, split_dir, input, model_dir, mode = "end2end",
                                    format = "json", ablation, mapping,
                                    import_out, module = "all";
  std::optional<int> docs, epochs;
  std::string train_path, dev_path, corpus_path, grammar, seeds;
  std::optional<double> tolerance;
  bool check_published = false;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  AddCommon(synth, common);
  synth->add_option("--docs", docs, "number of documents");
  synth->add_option("--out", out, "output JSONL");
  synth->add_option("--split-dir", split_dir,
                    "also write train/dev/test.jsonl here");
  synth->add_option("--grammar", grammar, "grammar JSON")->check(CLI::ExistingFile);

  CLI::App* stats = app.add_subcommand("stats", "corpus statistics");
  AddCommon(stats, common);
  stats->add_option("--input", input, "corpus file")->required()->check(CLI::ExistingFile);
  stats->add_option("--import-mapping", mapping,
                    "field mapping JSON for external data")
      ->check(CLI::ExistingFile);
  stats->add_option("--import-out", import_out,
                    "write the imported corpus as canonical JSONL");
  stats->add_flag("--check-published", check_published,
                  "compare totals with the published dataset");
  stats->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));

  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--train", train_path, "training JSONL")->check(CLI::ExistingFile);
    cmd->add_option("--dev", dev_path, "development JSONL")->check(CLI::ExistingFile);
    cmd->add_option("--corpus", corpus_path, "corpus to split (data.split)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--seeds", seeds, "comma-separated training seeds");
  };
  auto add_ablation = [&](CLI::App* cmd) {
    cmd->add_option("--ablation", ablation)->check(CLI::IsMember(AblationPresets()));
  };

  CLI::App* train = app.add_subcommand("train", "train and select checkpoints");
  AddCommon(train, common);
  add_data(train);
  add_ablation(train);
  train->add_option("--out", out, "output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  AddCommon(eval, common);
  eval->add_option("--model", model_dir, "checkpoint or training directory");
  eval->add_option("--input", input, "gold JSONL (default data.test)")
      ->check(CLI::ExistingFile);
  eval->add_option("--mode", mode)->check(CLI::IsMember({"end2end", "gold-args"}));
  eval->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  eval->add_option("--out", out, "directory for the report and config");
  add_ablation(eval);
  add_data(eval);

  CLI::App* predict = app.add_subcommand("predict", "annotate documents");
  AddCommon(predict, common);
  predict->add_option("--model", model_dir)->required();
  predict->add_option("--input", input)->required()->check(CLI::ExistingFile);
  predict->add_option("--out", out)->required();

  CLI::App* agreement =
      app.add_subcommand("agreement", "Krippendorff's alpha (nominal)");
  AddCommon(agreement, common);
  agreement->add_option("--input", input, "units x annotators ratings")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference check");
  AddCommon(gradcheck, common);
  std::vector<std::string> module_choices = GradCheckModules();
  module_choices.push_back("all");
  gradcheck->add_option("--module", module)->check(CLI::IsMember(module_choices));
  gradcheck->add_option("--tolerance", tolerance);
  gradcheck->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, os, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, os, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* culprit = &app;
    for (CLI::App* sub : app.get_subcommands()) culprit = sub;
    err << culprit->help();
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    auto flag = [&](const std::string& key, const std::string& value) {
      if (!value.empty()) common.flags.emplace_back(key, value);
    };
    if (docs) flag("synth.num_documents", std::to_string(*docs));
    flag("synth.grammar", grammar);
    flag("data.train", train_path);
    flag("data.dev", dev_path);
    flag("data.corpus", corpus_path);
    if (epochs) flag("train.epochs", std::to_string(*epochs));
    flag("train.seeds", seeds);
    if (tolerance) {
      std::ostringstream t;
      t << *tolerance;
      flag("gradcheck.tolerance", t.str());
    }
    Config config = BuildConfig(common);
    if (!ablation.empty()) ApplyAblation(ablation, config);
    // An explicit --seed on train/eval means a single-seed run.
    if (common.seed && seeds.empty() && (name == "train" || name == "eval")) {
      config.Set("train.seeds", std::to_string(*common.seed));
    }
    EchoConfig(config, name, err);

    if (name == "synth") {
      if (out.empty() && split_dir.empty()) {
        throw CLI::RequiredError("--out or --split-dir");
      }
      return RunSynth(config, out, split_dir, os);
    }
    if (name == "stats") {
      return RunStats(input, mapping, check_published, format, import_out, os, err);
    }
    if (name == "train") return RunTrain(config, out, os, err);
    if (name == "eval") {
      return RunEval(config, model_dir, input, mode, format, ablation, out, os, err);
    }
    if (name == "predict") return RunPredict(config, model_dir, input, out, os);
    if (name == "agreement") return RunAgreement(input, os);
    if (name == "gradcheck") return RunGradcheck(config, module, format, os);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n\n" << cmd->help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

int RunCli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args, std::cout, std::cerr);
}

}  // namespace evsent
