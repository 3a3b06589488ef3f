#include "traitlens/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

bool EmbeddingTable::add(std::string word, std::vector<double> vector) {
  if (vector.size() != dimension_)
    throw Error(ErrorCode::DimensionMismatch, "vector for '" + word + "' has " +
                                                  std::to_string(vector.size()) + " components, expected " +
                                                  std::to_string(dimension_));
  if (vectors_.count(word)) return false;
  vectors_.emplace(word, std::move(vector));
  words_.push_back(std::move(word));
  return true;
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  if (it == vectors_.end()) {
    it = vectors_.find(to_lower_ascii(word));
    if (it == vectors_.end()) return nullptr;
  }
  return &it->second;
}

EmbeddingLoad load_embeddings(std::string_view text) {
  EmbeddingLoad out;
  std::optional<std::size_t> dim;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    if (fields.size() < 2) throw Error(ErrorCode::ParseError, where + ": expected a token and a vector", where);
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(fields[f].data(), fields[f].data() + fields[f].size(), v);
      if (ec != std::errc() || ptr != fields[f].data() + fields[f].size() || !std::isfinite(v))
        throw Error(ErrorCode::ParseError, where + ": invalid number '" + std::string(fields[f]) + "'", where);
      vec.push_back(v);
    }
    if (!dim) {
      dim = vec.size();
      out.table = EmbeddingTable(*dim);
    } else if (vec.size() != *dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  where + ": " + std::to_string(vec.size()) + " components, expected " + std::to_string(*dim),
                  where);
    }
    if (std::all_of(vec.begin(), vec.end(), [](double v) { return v == 0.0; })) {
      out.warnings.push_back(where + ": zero vector for '" + std::string(fields[0]) + "' skipped");
      continue;
    }
    if (!out.table.add(std::string(fields[0]), std::move(vec)))
      out.warnings.push_back(where + ": duplicate token '" + std::string(fields[0]) + "' ignored");
  }
  return out;
}

MeanVector mean_vector(std::span<const std::string> words, const EmbeddingTable& table) {
  MeanVector out;
  out.total = words.size();
  out.vector.assign(table.dimension(), 0.0);
  for (const auto& w : words) {
    const auto* v = table.find(w);
    if (v == nullptr) continue;
    ++out.in_vocabulary;
    for (std::size_t i = 0; i < v->size(); ++i) out.vector[i] += (*v)[i];
  }
  if (out.in_vocabulary == 0)
    throw Error(ErrorCode::AllOutOfVocabulary, "no word of the set is in the embedding table");
  for (double& x : out.vector) x /= static_cast<double>(out.in_vocabulary);
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

ActionChangeCell action_change(std::span<const std::string> previous, std::span<const std::string> current,
                               const EmbeddingTable& table) {
  ActionChangeCell cell;
  if (previous.empty() || current.empty() || table.empty()) return cell;
  MeanVector mp, mc;
  try {
    mp = mean_vector(previous, table);
    mc = mean_vector(current, table);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AllOutOfVocabulary) return cell;
    throw;
  }
  // A mean of non-zero vectors can still cancel to zero; no direction, no value.
  if (std::all_of(mp.vector.begin(), mp.vector.end(), [](double x) { return x == 0.0; }) ||
      std::all_of(mc.vector.begin(), mc.vector.end(), [](double x) { return x == 0.0; }))
    return cell;
  const double cos = cosine_similarity(mp.vector, mc.vector);
  double distance = 1.0 - cos;
  if (distance > 1.0) {
    distance = 1.0;
    cell.clamped = true;
  }
  cell.value = std::max(0.0, distance);
  cell.covered = true;
  return cell;
}

std::vector<DissimilarPair> rank_dissimilar_pairs(std::span<const std::string> previous,
                                                  std::span<const std::string> current,
                                                  const EmbeddingTable& table, std::size_t limit) {
  std::vector<DissimilarPair> out;
  if (limit == 0) return out;
  for (const auto& cur : current) {
    const auto* cv = table.find(cur);
    if (cv == nullptr) continue;
    const std::string* best = nullptr;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (const auto& prev : previous) {
      const auto* pv = table.find(prev);
      if (pv == nullptr) continue;
      const double sim = cosine_similarity(*cv, *pv);
      if (sim > best_sim) {
        best_sim = sim;
        best = &prev;
      }
    }
    if (best != nullptr) out.push_back({cur, *best, best_sim});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DissimilarPair& a, const DissimilarPair& b) { return a.similarity < b.similarity; });
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::vector<double> smooth_sentiment(std::span<const double> series, SmoothingConfig config) {
  if (config.window == 0 || config.window % 2 == 0)
    throw Error(ErrorCode::InvalidArgument,
                "smoothing window must be a positive odd integer, got " + std::to_string(config.window));
  const std::size_t n = series.size();
  const std::size_t radius = (config.window - 1) / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= radius ? i - radius : 0;
    const std::size_t hi = std::min(n - 1, i + radius);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::size_t count_words(const Document& doc) {
  std::size_t words = 0;
  bool in_word = false;
  for (char32_t c : doc.text()) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

std::size_t choose_window(const Document& doc, std::optional<std::size_t> override_window) {
  if (override_window) return *override_window;
  if (doc.chapters().size() < kShortStoryChapters || count_words(doc) < kShortStoryWords) return 3;
  return 5;
}

double word_weight(std::size_t tf, std::size_t df) {
  if (df == 0 || tf == 0 || tf > df)
    throw Error(ErrorCode::ZeroDocumentFrequency,
                "inconsistent counts tf=" + std::to_string(tf) + " df=" + std::to_string(df));
  return static_cast<double>(tf) / static_cast<double>(df);
}

std::size_t default_cluster_count(std::size_t words) {
  const std::size_t by_size = (words + 7) / 8;
  return std::min<std::size_t>(6, std::max<std::size_t>(1, by_size));
}

namespace {

// Portable uniform draw in [0, 1) from a 64-bit engine.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - b[i];
    d += x * x;
  }
  return d;
}

}  // namespace

std::vector<int> cluster_words(std::span<const std::string> words, const EmbeddingTable& table,
                               const ClusterConfig& config) {
  std::vector<int> out(words.size(), kUnclustered);
  std::vector<std::size_t> index;  // word position of each point
  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto* v = table.find(words[i]);
    if (v == nullptr) continue;
    double norm = 0.0;
    for (double x : *v) norm += x * x;
    norm = std::sqrt(norm);
    std::vector<double> p(*v);
    for (double& x : p) x /= norm;
    points.push_back(std::move(p));
    index.push_back(i);
  }
  if (points.empty()) return out;

  std::size_t k = config.k ? *config.k : default_cluster_count(points.size());
  k = std::clamp<std::size_t>(k, 1, points.size());

  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<double>> centers;
  centers.push_back(points[static_cast<std::size_t>(uniform01(rng) * points.size())]);
  std::vector<double> d2(points.size());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, squared_distance(points[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) break;  // fewer distinct points than k
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t pick = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(points[pick]);
  }

  std::vector<std::size_t> assign(points.size(), 0);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_distance(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      objective += best_d;
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      std::vector<double> sum(table.dimension(), 0.0);
      std::size_t n = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (assign[i] != c) continue;
        ++n;
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += points[i][d];
      }
      if (n == 0) continue;  // empty cluster keeps its center
      for (double& x : sum) x /= static_cast<double>(n);
      centers[c] = std::move(sum);
    }
    if (std::isfinite(previous) &&
        (previous - objective) <= config.tolerance * std::max(previous, std::numeric_limits<double>::min()))
      break;
    previous = objective;
  }

  std::vector<int> renumber(centers.size(), kUnclustered);
  int next = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (renumber[assign[i]] == kUnclustered) renumber[assign[i]] = next++;
    out[index[i]] = renumber[assign[i]];
  }
  return out;
}

}  // namespace traitlens
