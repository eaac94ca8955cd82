#include "hisva/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace hisva {

double npmi(double p_joint, double p_first, double p_second, double eps) {
  const double joint = p_joint + eps;
  const double denom = -std::log(joint);
  if (denom == 0.0) return 0.0;
  return std::log(joint / ((p_first + eps) * (p_second + eps))) / denom;
}

namespace {

constexpr std::size_t kMaxTopWords = 16;

struct Slot {
  std::size_t topic;
  std::uint32_t bit;
};

// Number of windows in which each subset of a topic's words is present.
struct WindowHistogram {
  std::vector<std::vector<std::uint64_t>> per_topic;
  std::size_t windows = 0;
};

WindowHistogram count_windows(const std::vector<std::vector<int>>& topic_ids, const Corpus& corpus,
                              std::size_t window) {
  const std::size_t K = topic_ids.size();
  WindowHistogram h;
  h.per_topic.resize(K);
  std::unordered_map<int, std::vector<Slot>> slots;
  for (std::size_t t = 0; t < K; ++t) {
    h.per_topic[t].assign(std::size_t{1} << topic_ids[t].size(), 0);
    for (std::size_t b = 0; b < topic_ids[t].size(); ++b) {
      if (topic_ids[t][b] >= 0) slots[topic_ids[t][b]].push_back({t, 1u << b});
    }
  }

  std::vector<std::uint32_t> mask(K, 0);
  std::vector<std::size_t> since(K, 0);
  std::unordered_map<int, int> in_window;

  for (const auto& doc : corpus.docs) {
    if (doc.empty()) continue;
    std::fill(mask.begin(), mask.end(), 0u);
    std::fill(since.begin(), since.end(), std::size_t{0});
    in_window.clear();
    const std::size_t n = doc.size();
    const std::size_t width = std::min(window, n);
    const std::size_t count = n - width + 1;

    auto flush = [&](std::size_t t, std::size_t s) {
      h.per_topic[t][mask[t]] += s - since[t];
      since[t] = s;
    };
    auto add = [&](int w, std::size_t s) {
      auto it = slots.find(w);
      if (it == slots.end() || in_window[w]++ != 0) return;
      for (const auto& sl : it->second) {
        flush(sl.topic, s);
        mask[sl.topic] |= sl.bit;
      }
    };
    auto remove = [&](int w, std::size_t s) {
      auto it = slots.find(w);
      if (it == slots.end() || --in_window[w] != 0) return;
      for (const auto& sl : it->second) {
        flush(sl.topic, s);
        mask[sl.topic] &= ~sl.bit;
      }
    };

    for (std::size_t i = 0; i < width; ++i) add(doc[i], 0);
    for (std::size_t s = 1; s < count; ++s) {
      remove(doc[s - 1], s);
      add(doc[s + width - 1], s);
    }
    for (std::size_t t = 0; t < K; ++t) flush(t, count);
    h.windows += count;
  }
  return h;
}

double topic_score(const std::vector<std::uint64_t>& hist, std::size_t n, std::size_t windows) {
  if (n == 0 || windows == 0) return 0.0;
  std::vector<double> single(n, 0.0);
  std::vector<double> joint(n * n, 0.0);
  for (std::size_t m = 0; m < hist.size(); ++m) {
    if (hist[m] == 0) continue;
    const double c = static_cast<double>(hist[m]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m >> i & 1u)) continue;
      single[i] += c;
      for (std::size_t j = 0; j < n; ++j) {
        if (m >> j & 1u) joint[i * n + j] += c;
      }
    }
  }
  const double N = static_cast<double>(windows);
  std::vector<double> ctx(n * n);
  std::vector<double> total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ctx[i * n + j] = npmi(joint[i * n + j] / N, single[i] / N, single[j] / N);
      total[j] += ctx[i * n + j];
    }
  }
  double total_norm = 0.0;
  for (double v : total) total_norm += v * v;
  total_norm = std::sqrt(total_norm);

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dot += ctx[i * n + j] * total[j];
      norm += ctx[i * n + j] * ctx[i * n + j];
    }
    norm = std::sqrt(norm);
    double cos = (norm > 0.0 && total_norm > 0.0) ? dot / (norm * total_norm) : 0.0;
    sum += std::clamp(cos, -1.0, 1.0);
  }
  return sum / static_cast<double>(n);
}

}  // namespace

CoherenceReport coherence_cv(const std::vector<std::vector<std::string>>& topic_words,
                             const Corpus& corpus, std::size_t window) {
  if (window < 1) throw std::invalid_argument("coherence window must be >= 1");
  std::vector<std::vector<int>> ids;
  ids.reserve(topic_words.size());
  for (const auto& words : topic_words) {
    if (words.size() > kMaxTopWords) throw std::invalid_argument("too many top words per topic");
    std::vector<int> row;
    for (const auto& w : words) {
      auto id = corpus.vocab.index(w);
      row.push_back(id ? *id : -1);
    }
    ids.push_back(std::move(row));
  }
  auto hist = count_windows(ids, corpus, window);

  CoherenceReport r;
  r.windows = hist.windows;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    r.per_topic.push_back(topic_score(hist.per_topic[t], ids[t].size(), hist.windows));
  }
  double sum = 0.0;
  for (double v : r.per_topic) sum += v;
  r.value = r.per_topic.empty() ? 0.0 : std::clamp(sum / static_cast<double>(r.per_topic.size()), -1.0, 1.0);
  return r;
}

double coherence_cv(const TopicModel& model, const Corpus& corpus, std::size_t window,
                    std::size_t top_n) {
  std::vector<std::vector<std::string>> words;
  for (int k = 0; k < model.num_topics; ++k) words.push_back(top_keywords(model, k, top_n));
  return coherence_cv(words, corpus, window).value;
}

}  // namespace hisva
