#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "traitlens/analysis.hpp"
#include "traitlens/views.hpp"

namespace traitlens {

using json = nlohmann::json;

json to_json(const Span& s);
Span span_from_json(const json& j);
json to_json(const std::vector<Span>& spans);

json to_json(const Finding& f);
json to_json(const ClusterRow& row);
json to_json(const MergeSuggestion& s);
json to_json(const Character& c);

json to_json(const Quote& q);
json to_json(const ActionRecord& a);
json to_json(const DefinitionRecord& d);
json to_json(const SentimentScore& s);
json to_json(const EmotionLabel& e);
json to_json(const ActionChangeCell& c);
json to_json(const AnalysisResults& r);
AnalysisResults results_from_json(const json& j);

json to_json(const EmbeddingTable& t);
EmbeddingTable embeddings_from_json(const json& j);

json to_json(const IndicatorMatrix& m);
json to_json(const WordZone& z);
json to_json(const ContextLayout& l);

// RFC 4180 with CRLF line ends. Header `character,<column indices>`; an
// empty cell is an empty field, emotion cells hold the label.
std::string to_csv(const IndicatorMatrix& m);
std::string csv_field(std::string_view s);

// Shortest text that reads back to the same double.
std::string format_number(double v);

}  // namespace traitlens
