#include "traitlens/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

// Defined in the generated builtin_lexicons.cpp.
extern const char* const kBuiltinSentimentTsv;
extern const char* const kBuiltinEmotionTsv;

std::optional<double> SentimentLexicon::lookup(std::string_view word) const {
  auto it = scores.find(to_lower_ascii(word));
  if (it == scores.end()) return std::nullopt;
  return it->second;
}

std::optional<Emotion> EmotionLexicon::lookup(std::string_view word) const {
  auto it = categories.find(to_lower_ascii(word));
  if (it == categories.end()) return std::nullopt;
  return it->second;
}

namespace {

template <typename F>
void for_each_row(std::string_view tsv, F&& row) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    auto nl = tsv.find('\n', pos);
    std::string_view line = tsv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty() && line.front() != '#') {
      auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected two tab-separated fields",
                    "line " + std::to_string(line_no));
      std::string_view key = trim(line.substr(0, tab));
      std::string_view value = line.substr(tab + 1);
      if (auto tab2 = value.find('\t'); tab2 != std::string_view::npos) value = value.substr(0, tab2);
      value = trim(value);
      if (key.empty())
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key",
                    "line " + std::to_string(line_no));
      row(line_no, key, value);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

SentimentLexicon parse_sentiment_lexicon(std::string_view tsv, std::string source) {
  SentimentLexicon lex;
  lex.source = std::move(source);
  for_each_row(tsv, [&](std::size_t line_no, std::string_view key, std::string_view value) {
    double score = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": invalid score '" + std::string(value) + "'",
                  "line " + std::to_string(line_no));
    if (!std::isfinite(score) || std::fabs(score) > kLexiconScoreLimit)
      throw Error(ErrorCode::RangeError,
                  "line " + std::to_string(line_no) + ": score outside [-4, +4]",
                  "line " + std::to_string(line_no));
    lex.scores.emplace(to_lower_ascii(key), score);
  });
  return lex;
}

EmotionLexicon parse_emotion_lexicon(std::string_view tsv, std::string source) {
  EmotionLexicon lex;
  lex.source = std::move(source);
  for_each_row(tsv, [&](std::size_t line_no, std::string_view key, std::string_view value) {
    auto e = parse_emotion(to_lower_ascii(value));
    if (!e)
      throw Error(ErrorCode::RangeError,
                  "line " + std::to_string(line_no) + ": unknown emotion '" + std::string(value) + "'",
                  "line " + std::to_string(line_no));
    lex.categories.emplace(to_lower_ascii(key), *e);
  });
  return lex;
}

const SentimentLexicon& builtin_sentiment_lexicon() {
  static const SentimentLexicon lex = parse_sentiment_lexicon(kBuiltinSentimentTsv, "builtin");
  return lex;
}

const EmotionLexicon& builtin_emotion_lexicon() {
  static const EmotionLexicon lex = parse_emotion_lexicon(kBuiltinEmotionTsv, "builtin");
  return lex;
}

std::string to_tsv(const SentimentLexicon& lexicon) {
  std::map<std::string, double> sorted(lexicon.scores.begin(), lexicon.scores.end());
  std::string out;
  char buf[64];
  for (const auto& [k, v] : sorted) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out += k;
    out += '\t';
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

std::string to_tsv(const EmotionLexicon& lexicon) {
  std::map<std::string, Emotion> sorted(lexicon.categories.begin(), lexicon.categories.end());
  std::string out;
  for (const auto& [k, v] : sorted) {
    out += k;
    out += '\t';
    out += emotion_name(v);
    out += '\n';
  }
  return out;
}

}  // namespace traitlens
