#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hisva/lda.hpp"
#include "hisva/text.hpp"

namespace hisva {

inline constexpr double kCoherenceEpsilon = 1e-12;
inline constexpr std::size_t kDefaultCoherenceWindow = 110;

/// Normalized PMI with epsilon-smoothed joint and marginal probabilities.
/// Equals 1 when the two words only ever occur together.
double npmi(double p_joint, double p_first, double p_second, double eps = kCoherenceEpsilon);

struct CoherenceReport {
  double value = 0.0;
  std::vector<double> per_topic;
  std::size_t windows = 0;
};

/// C_V topic coherence. Every document is cut into boolean sliding windows of
/// `window` tokens (a shorter document is one window). For each topic, each
/// top word gets an NPMI context vector against all of the topic's top words;
/// the topic scores the mean cosine between each word's vector and the sum of
/// all vectors, and the model scores the mean over topics. Words missing from
/// the corpus take part through the smoothing. Always within [-1, 1].
CoherenceReport coherence_cv(const std::vector<std::vector<std::string>>& topic_words,
                             const Corpus& corpus, std::size_t window = kDefaultCoherenceWindow);

/// Scores the model's top-`top_n` words per topic against `corpus`.
double coherence_cv(const TopicModel& model, const Corpus& corpus,
                    std::size_t window = kDefaultCoherenceWindow, std::size_t top_n = 10);

}  // namespace hisva
