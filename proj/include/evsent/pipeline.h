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

// End-to-end inference: triggers, then arguments per trigger, then polarity
// per event. Also the three-model chain used by the pipeline ablation and
// file-level prediction.

#ifndef EVSENT_PIPELINE_H_
#define EVSENT_PIPELINE_H_

#include <memory>
#include <string>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/model.h"
#include "json.hpp"

namespace evsent {

// Three separately trained models chained at inference. A pipeline
// checkpoint directory holds pipeline.json and trigger/, argument/,
// sentiment/ joint checkpoints.
class PipelineModel : public EventExtractor {
 public:
  PipelineModel(std::unique_ptr<JointModel> trigger,
                std::unique_ptr<JointModel> argument,
                std::unique_ptr<JointModel> sentiment);

  static std::unique_ptr<PipelineModel> Load(const std::string& dir);
  void Save(const std::string& dir) const override;

  Document Truncated(const Document& doc) const override;
  Document Predict(const Document& doc) override;
  std::vector<Polarity> ClassifyGold(const Document& truncated) override;

  JointModel& trigger_model() { return *trigger_; }
  JointModel& argument_model() { return *argument_; }
  JointModel& sentiment_model() { return *sentiment_; }

 private:
  std::unique_ptr<JointModel> trigger_;
  std::unique_ptr<JointModel> argument_;
  std::unique_ptr<JointModel> sentiment_;
};

// Loads a joint or pipeline checkpoint directory.
std::unique_ptr<EventExtractor> LoadExtractor(const std::string& dir);

// extractor.Predict(doc).events.
std::vector<Event> ExtractEvents(EventExtractor& extractor, const Document& doc);

struct LineError {
  int line = 0;
  std::string doc_id;
  std::string message;
};

struct PredictSummary {
  long documents = 0;  // successfully predicted
  long events = 0;
  long truncated = 0;
  std::vector<LineError> errors;

  nlohmann::json ToJson() const;
};

// Reads documents (any `events` field is ignored) and writes one output line
// per non-blank input line: the document with predicted `events` and a
// `truncated` flag, or {"line", "doc_id", "error"} for an invalid line.
PredictSummary PredictFile(EventExtractor& extractor,
                           const std::string& input_path,
                           const std::string& output_path);

}  // namespace evsent

#endif  // EVSENT_PIPELINE_H_
