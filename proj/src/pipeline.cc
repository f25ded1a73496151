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

#include "evsent/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace evsent {

using nlohmann::json;
namespace fs = std::filesystem;

PipelineModel::PipelineModel(std::unique_ptr<JointModel> trigger,
                             std::unique_ptr<JointModel> argument,
                             std::unique_ptr<JointModel> sentiment)
    : trigger_(std::move(trigger)),
      argument_(std::move(argument)),
      sentiment_(std::move(sentiment)) {}

void PipelineModel::Save(const std::string& dir) const {
  fs::create_directories(dir);
  json meta = {{"version", kModelCheckpointVersion},
               {"kind", "pipeline"},
               {"stages", {"trigger", "argument", "sentiment"}}};
  std::ofstream(fs::path(dir) / "pipeline.json") << meta.dump(2) << "\n";
  trigger_->Save((fs::path(dir) / "trigger").string());
  argument_->Save((fs::path(dir) / "argument").string());
  sentiment_->Save((fs::path(dir) / "sentiment").string());
}

std::unique_ptr<PipelineModel> PipelineModel::Load(const std::string& dir) {
  const fs::path root(dir);
  return std::make_unique<PipelineModel>(
      JointModel::Load((root / "trigger").string()),
      JointModel::Load((root / "argument").string()),
      JointModel::Load((root / "sentiment").string()));
}

Document PipelineModel::Truncated(const Document& doc) const {
  return trigger_->Truncated(doc);
}

Document PipelineModel::Predict(const Document& doc) {
  const PreparedDocument pt = trigger_->Prepare(doc);
  Document out = pt.doc;
  out.events.clear();
  if (out.tokens.empty()) return out;
  const PreparedDocument pa = argument_->Prepare(out);
  const PreparedDocument ps = sentiment_->Prepare(out);
  JointModel::Session trigger_session(*trigger_, pt);
  JointModel::Session argument_session(*argument_, pa);
  JointModel::Session sentiment_session(*sentiment_, ps);
  std::vector<SpanBounds> triggers = DecodeTriggerSpans(
      trigger_session.Triggers(), trigger_->config().trigger_decode);
  std::sort(triggers.begin(), triggers.end());
  triggers.erase(std::unique(triggers.begin(), triggers.end()), triggers.end());
  for (SpanBounds t : triggers) {
    Event event;
    event.trigger = SpanFromSequence(out, t);
    const RoleSpans roles = DecodeArguments(
        argument_session.Roles(t), argument_->config().argument_decode);
    for (int r = 0; r < kNumRoles; ++r) {
      if (const auto& b = roles[static_cast<size_t>(r)]) {
        event.arguments[static_cast<size_t>(r)] = SpanFromSequence(out, *b);
      }
    }
    event.polarity = ArgmaxPolarity(sentiment_session.Sentiment(event));
    out.events.push_back(std::move(event));
  }
  return out;
}

std::vector<Polarity> PipelineModel::ClassifyGold(const Document& truncated) {
  return sentiment_->ClassifyGold(truncated);
}

std::unique_ptr<EventExtractor> LoadExtractor(const std::string& dir) {
  const fs::path root(dir);
  if (fs::exists(root / "pipeline.json")) return PipelineModel::Load(dir);
  if (fs::exists(root / "model.json")) return JointModel::Load(dir);
  throw ModelError("no model.json or pipeline.json in " + dir);
}

std::vector<Event> ExtractEvents(EventExtractor& extractor,
                                 const Document& doc) {
  return extractor.Predict(doc).events;
}

json PredictSummary::ToJson() const {
  json errs = json::array();
  for (const LineError& e : errors) {
    errs.push_back({{"line", e.line}, {"doc_id", e.doc_id}, {"error", e.message}});
  }
  return json{{"documents", documents},
              {"events", events},
              {"truncated", truncated},
              {"errors", errs}};
}

PredictSummary PredictFile(EventExtractor& extractor,
                           const std::string& input_path,
                           const std::string& output_path) {
  std::ifstream in(input_path);
  if (!in) throw CorpusError("cannot open input file: " + input_path);
  std::ofstream out(output_path, std::ios::trunc);
  if (!out) throw CorpusError("cannot open output file: " + output_path);
  PredictSummary summary;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::string doc_id;
    try {
      if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
        throw CorpusError("UTF-8 byte order mark is not allowed");
      }
      json j = json::parse(line);
      if (j.is_object()) {
        if (j.contains("doc_id") && j.at("doc_id").is_string()) {
          doc_id = j.at("doc_id").get<std::string>();
        }
        j.erase("events");
      }
      Document doc = DocumentFromJson(j);
      const std::vector<std::string> problems = ValidateDocument(doc);
      if (!problems.empty()) throw CorpusError(problems.front());
      Document predicted = extractor.Predict(doc);
      json record = DocumentToJson(predicted);
      record["truncated"] = predicted.truncated;
      out << record.dump() << "\n";
      ++summary.documents;
      summary.events += static_cast<long>(predicted.events.size());
      if (predicted.truncated) ++summary.truncated;
    } catch (const std::exception& ex) {
      summary.errors.push_back({line_no, doc_id, ex.what()});
      out << json{{"line", line_no}, {"doc_id", doc_id}, {"error", ex.what()}}
                 .dump()
          << "\n";
    }
  }
  return summary;
}

}  // namespace evsent
