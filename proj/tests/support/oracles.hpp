// Independent reference computations shared by unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "traitlens/dynamics.hpp"
#include "traitlens/views.hpp"

namespace oracle {

inline std::vector<double> mean_of(const std::vector<std::vector<double>>& vs) {
  std::vector<double> m(vs.front().size(), 0.0);
  for (const auto& v : vs)
    for (std::size_t i = 0; i < v.size(); ++i) m[i] += v[i];
  for (double& x : m) x /= static_cast<double>(vs.size());
  return m;
}

inline double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += (long double)a[i] * b[i];
    na += (long double)a[i] * a[i];
    nb += (long double)b[i] * b[i];
  }
  const double d = 1.0 - static_cast<double>(dot / std::sqrt(na * nb));
  return std::clamp(d, 0.0, 1.0);
}

inline std::vector<double> moving_average(const std::vector<double>& xs, std::size_t n) {
  const long half = static_cast<long>(n / 2);
  std::vector<double> out;
  for (long i = 0; i < static_cast<long>(xs.size()); ++i) {
    double sum = 0;
    int count = 0;
    for (long j = i - half; j <= i + half; ++j)
      if (j >= 0 && j < static_cast<long>(xs.size())) {
        sum += xs[j];
        ++count;
      }
    out.push_back(sum / count);
  }
  return out;
}

struct LayoutOptimum {
  std::size_t placed = 0;
  std::size_t row_sum = 0;
};

// Exhaustive search over every row-or-drop assignment.
inline LayoutOptimum best_layout(const std::vector<traitlens::ContextLabel>& labels, std::size_t rows,
                                 std::size_t chapter_count) {
  LayoutOptimum best;
  std::vector<int> pick(labels.size(), -1);
  std::function<void(std::size_t, std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t placed,
                                                                      std::size_t row_sum) {
    if (i == labels.size()) {
      if (placed > best.placed || (placed == best.placed && row_sum < best.row_sum)) best = {placed, row_sum};
      return;
    }
    pick[i] = -1;
    go(i + 1, placed, row_sum);
    if (labels[i].chapter >= chapter_count) return;
    const double a0 = static_cast<double>(labels[i].chapter), a1 = a0 + labels[i].width;
    for (std::size_t r = 0; r < rows; ++r) {
      bool clash = false;
      for (std::size_t j = 0; j < i && !clash; ++j) {
        if (pick[j] != static_cast<int>(r)) continue;
        const double b0 = static_cast<double>(labels[j].chapter), b1 = b0 + labels[j].width;
        clash = a0 < b1 && b0 < a1;
      }
      if (clash) continue;
      pick[i] = static_cast<int>(r);
      go(i + 1, placed + 1, row_sum + r);
      pick[i] = -1;
    }
  };
  go(0, 0, 0);
  return best;
}

// Places each label (in processing order) on the first free row.
inline std::size_t greedy_layout(std::vector<traitlens::ContextLabel> labels, std::size_t rows,
                                 std::size_t chapter_count) {
  std::stable_sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.chapter, -a.priority) < std::make_pair(b.chapter, -b.priority);
  });
  std::vector<double> ends(rows, -1.0);
  std::size_t placed = 0;
  for (const auto& l : labels) {
    if (l.chapter >= chapter_count) continue;
    for (double& e : ends)
      if (e <= static_cast<double>(l.chapter)) {
        e = static_cast<double>(l.chapter) + l.width;
        ++placed;
        break;
      }
  }
  return placed;
}

inline std::vector<traitlens::ContextLabel> random_labels(std::mt19937_64& rng, std::size_t max_labels,
                                                          std::size_t chapters) {
  std::uniform_int_distribution<std::size_t> count(1, max_labels), chapter(0, chapters);
  std::uniform_int_distribution<int> priority(0, 3);
  std::uniform_real_distribution<double> width(0.2, 3.5);
  std::vector<traitlens::ContextLabel> out(count(rng));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {"l" + std::to_string(i), chapter(rng), width(rng), priority(rng)};
  return out;
}

}  // namespace oracle
