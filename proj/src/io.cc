#include "uaeval/io.h"

#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "uaeval/errors.h"

namespace uaeval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Location {
  std::string source;
  int line = 0;

  std::string Prefix() const {
    return source + ":" + std::to_string(line) + ": ";
  }
};

[[noreturn]] void Fail(ErrorCode code, const Location& at,
                       const std::string& what) {
  throw Error(code, at.Prefix() + what);
}

// Calls `visit(json, location)` for every non-blank line.
template <typename Visit>
void ForEachRecord(std::istream& in, const std::string& source, Visit visit) {
  std::string text;
  Location at{source, 0};
  while (std::getline(in, text)) {
    ++at.line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      Fail(ErrorCode::kParseError, at, e.what());
    }
    if (!record.is_object()) {
      Fail(ErrorCode::kParseError, at, "expected a JSON object");
    }
    visit(record, at);
  }
}

std::string RequireString(const json& record, const char* key,
                          const Location& at) {
  const auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    Fail(ErrorCode::kParseError, at,
         std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::ifstream OpenOrThrow(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  }
  return in;
}

ClassId ResolveClass(const json& ref, int num_classes,
                     const ClassSpace* classes, const Location& at) {
  if (ref.is_number_integer()) {
    const auto id = ref.get<int64_t>();
    if (id < 0 || id >= num_classes) {
      Fail(ErrorCode::kClassIdOutOfRange, at,
           "class id " + std::to_string(id) + " outside [0, " +
               std::to_string(num_classes) + ")");
    }
    return static_cast<ClassId>(id);
  }
  if (ref.is_string()) {
    const auto name = ref.get<std::string>();
    if (classes != nullptr) {
      if (auto id = classes->FindByName(name)) return *id;
    }
    Fail(ErrorCode::kUnknownClassName, at, "unknown class '" + name + "'");
  }
  Fail(ErrorCode::kParseError, at, "class must be an integer id or a name");
}

std::vector<ClassId> ResolveList(const json& list, int num_classes,
                                 const ClassSpace* classes,
                                 const Location& at) {
  if (!list.is_array()) Fail(ErrorCode::kParseError, at, "expected a list");
  std::vector<ClassId> out;
  for (const auto& ref : list) {
    out.push_back(ResolveClass(ref, num_classes, classes, at));
  }
  return out;
}

int ParseRisk(const json& value, const Location& at) {
  if (value.is_number_integer()) {
    const int level = value.get<int>();
    if (level >= kRiskLow && level <= kRiskHigh) return level;
  } else if (value.is_string()) {
    const auto text = value.get<std::string>();
    if (text == "low") return kRiskLow;
    if (text == "medium") return kRiskMedium;
    if (text == "high") return kRiskHigh;
  }
  Fail(ErrorCode::kParseError, at, "risk must be 0-2 or low/medium/high");
}

}  // namespace

ClassSpace ParseClassSpace(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, source + ": " + e.what());
  }
  const Location at{source, 0};
  if (!doc.is_object() || !doc.contains("classes") ||
      !doc["classes"].is_array() || doc["classes"].empty()) {
    Fail(ErrorCode::kParseError, at, "expected a non-empty 'classes' list");
  }
  const auto& list = doc["classes"];
  ClassSpace space(static_cast<int>(list.size()));
  for (size_t i = 0; i < list.size(); ++i) {
    const auto& entry = list[i];
    const auto id = static_cast<ClassId>(i);
    auto set_name = [&](const json& name) {
      if (!name.is_string()) {
        Fail(ErrorCode::kParseError, at, "class name must be a string");
      }
      const auto text = name.get<std::string>();
      if (space.FindByName(text)) {
        Fail(ErrorCode::kParseError, at, "duplicate class name '" + text + "'");
      }
      space.SetName(id, text);
    };
    if (entry.is_string()) {
      set_name(entry);
      continue;
    }
    if (!entry.is_object()) {
      Fail(ErrorCode::kParseError, at, "class entries must be objects");
    }
    if (entry.contains("name")) set_name(entry["name"]);
    if (entry.contains("risk")) space.SetRisk(id, ParseRisk(entry["risk"], at));
  }
  return space;
}

ClassSpace LoadClassSpace(const fs::path& path) {
  auto in = OpenOrThrow(path);
  return ParseClassSpace(in, path.filename().string());
}

std::vector<CaseRecord> IngestStreams(std::istream& cases,
                                      std::istream& annotations,
                                      std::istream* predictions,
                                      const ClassSpace* classes) {
  std::vector<CaseRecord> records;
  std::map<std::string, size_t> index;

  ForEachRecord(cases, "cases", [&](const json& record, const Location& at) {
    CaseRecord out;
    out.case_id = RequireString(record, "case_id", at);
    if (index.count(out.case_id)) {
      Fail(ErrorCode::kParseError, at, "duplicate case_id '" + out.case_id + "'");
    }
    if (record.contains("num_classes")) {
      if (!record["num_classes"].is_number_integer() ||
          record["num_classes"].get<int64_t>() < 1) {
        Fail(ErrorCode::kParseError, at, "num_classes must be a positive integer");
      }
      out.num_classes = record["num_classes"].get<int>();
      if (classes != nullptr && out.num_classes != classes->size()) {
        Fail(ErrorCode::kParseError, at,
             "num_classes disagrees with the class list");
      }
    } else if (classes != nullptr) {
      out.num_classes = classes->size();
    } else {
      Fail(ErrorCode::kParseError, at,
           "num_classes is required without a class list");
    }
    if (record.contains("metadata")) out.metadata = record["metadata"].dump();
    index.emplace(out.case_id, records.size());
    records.push_back(std::move(out));
  });

  auto find_case = [&](const json& record, const Location& at) -> CaseRecord& {
    const auto id = RequireString(record, "case_id", at);
    const auto it = index.find(id);
    if (it == index.end()) {
      Fail(ErrorCode::kDanglingCaseId, at, "unknown case_id '" + id + "'");
    }
    return records[it->second];
  };

  ForEachRecord(annotations, "annotations",
                [&](const json& record, const Location& at) {
    CaseRecord& target = find_case(record, at);
    std::string annotator = std::to_string(target.annotations.size());
    if (record.contains("annotator_id")) {
      const auto& id = record["annotator_id"];
      annotator = id.is_string() ? id.get<std::string>() : id.dump();
    }
    const auto it = record.find("blocks");
    if (it == record.end() || !it->is_array()) {
      Fail(ErrorCode::kParseError, at, "missing list field 'blocks'");
    }
    std::vector<std::vector<ClassId>> blocks;
    for (const auto& block : *it) {
      blocks.push_back(ResolveList(block, target.num_classes, classes, at));
    }
    std::optional<double> score;
    if (record.contains("score") && !record["score"].is_null()) {
      if (!record["score"].is_number()) {
        Fail(ErrorCode::kParseError, at, "score must be a number");
      }
      score = record["score"].get<double>();
    }
    try {
      target.annotations.push_back(
          PartialRanking::Create(target.num_classes, std::move(blocks)));
    } catch (const Error& e) {
      Fail(e.code(), at, e.what());
    }
    target.annotator_ids.push_back(std::move(annotator));
    target.scores.push_back(score);
  });

  if (predictions != nullptr) {
    ForEachRecord(*predictions, "predictions",
                  [&](const json& record, const Location& at) {
      CaseRecord& target = find_case(record, at);
      if (target.prediction) {
        Fail(ErrorCode::kParseError, at,
             "second prediction for case '" + target.case_id + "'");
      }
      const auto it = record.find("ranked");
      if (it == record.end()) {
        Fail(ErrorCode::kParseError, at, "missing list field 'ranked'");
      }
      PredictionSet prediction{target.case_id,
                               ResolveList(*it, target.num_classes, classes, at)};
      try {
        prediction.Validate(target.num_classes);
      } catch (const Error& e) {
        Fail(e.code(), at, e.what());
      }
      target.prediction = std::move(prediction);
    });
  }
  return records;
}

std::vector<CaseRecord> Ingest(const fs::path& cases,
                               const fs::path& annotations,
                               const std::optional<fs::path>& predictions,
                               const ClassSpace* classes) {
  auto cases_in = OpenOrThrow(cases);
  auto annotations_in = OpenOrThrow(annotations);
  std::optional<std::ifstream> predictions_in;
  if (predictions) predictions_in.emplace(OpenOrThrow(*predictions));
  return IngestStreams(cases_in, annotations_in,
                       predictions_in ? &*predictions_in : nullptr, classes);
}

void WriteCaseFiles(const fs::path& dir,
                    const std::vector<CaseRecord>& records) {
  fs::create_directories(dir);
  std::ofstream cases(dir / "cases.jsonl");
  std::ofstream annotations(dir / "annotations.jsonl");
  bool any_prediction = false;
  for (const auto& r : records) {
    json c = {{"case_id", r.case_id}, {"num_classes", r.num_classes}};
    c["metadata"] = json::parse(r.metadata);
    cases << c.dump() << '\n';
    for (size_t a = 0; a < r.annotations.size(); ++a) {
      json blocks = json::array();
      for (const auto& block : r.annotations[a].RankedBlocks()) {
        blocks.push_back(block);
      }
      json line = {{"case_id", r.case_id},
                   {"annotator_id", r.annotator_ids.at(a)},
                   {"blocks", blocks}};
      if (a < r.scores.size() && r.scores[a]) line["score"] = *r.scores[a];
      annotations << line.dump() << '\n';
    }
    any_prediction = any_prediction || r.prediction.has_value();
  }
  if (!any_prediction) return;
  std::ofstream predictions(dir / "predictions.jsonl");
  for (const auto& r : records) {
    if (!r.prediction) continue;
    predictions << json{{"case_id", r.case_id},
                        {"ranked", r.prediction->ranked}}.dump()
                << '\n';
  }
}

std::string FormatReportRow(const ReportRow& row) {
  // ordered_json keeps a fixed key order, so identical rows give identical
  // bytes.
  nlohmann::ordered_json out;
  out["schema_version"] = kReportSchemaVersion;
  out["kind"] = row.kind;
  out["model"] = row.model;
  out["reliability"] = row.reliability;
  out["num_samples"] = row.num_samples;
  out["seed"] = row.seed;
  if (!row.case_id.empty()) out["case_id"] = row.case_id;
  out["metric"] = row.metric;
  out["k"] = row.k;
  out["value"] = row.value;
  if (row.sd) out["sd"] = *row.sd;
  if (row.min) out["min"] = *row.min;
  if (row.max) out["max"] = *row.max;
  if (row.num_cases) out["num_cases"] = *row.num_cases;
  if (row.histogram_low) out["histogram_low"] = *row.histogram_low;
  if (row.histogram_high) out["histogram_high"] = *row.histogram_high;
  if (!row.histogram.empty()) out["histogram"] = row.histogram;
  return out.dump();
}

ReportRow ParseReportRow(const std::string& line) {
  json in;
  try {
    in = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  try {
    if (in.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::kParseError, "unsupported report schema version");
    }
    ReportRow row;
    row.kind = in.at("kind").get<std::string>();
    row.model = in.at("model").get<std::string>();
    row.reliability = in.at("reliability").get<double>();
    row.num_samples = in.at("num_samples").get<int>();
    row.seed = in.at("seed").get<uint64_t>();
    row.case_id = in.value("case_id", std::string());
    row.metric = in.at("metric").get<std::string>();
    row.k = in.at("k").get<int>();
    row.value = in.at("value").get<double>();
    auto optional_double = [&](const char* key, std::optional<double>& slot) {
      if (in.contains(key)) slot = in[key].get<double>();
    };
    optional_double("sd", row.sd);
    optional_double("min", row.min);
    optional_double("max", row.max);
    optional_double("histogram_low", row.histogram_low);
    optional_double("histogram_high", row.histogram_high);
    if (in.contains("num_cases")) row.num_cases = in["num_cases"].get<int>();
    if (in.contains("histogram")) {
      row.histogram = in["histogram"].get<std::vector<int>>();
    }
    return row;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::vector<ReportRow> ReadReport(const fs::path& path) {
  auto in = OpenOrThrow(path);
  std::vector<ReportRow> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      rows.push_back(ParseReportRow(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, path.filename().string() + ":" +
                                              std::to_string(number) + ": " +
                                              e.what());
    }
  }
  return rows;
}

}  // namespace uaeval
