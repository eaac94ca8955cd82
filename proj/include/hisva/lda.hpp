#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hisva/text.hpp"

namespace hisva {

struct LdaParams {
  int num_topics = 20;
  /// Symmetric document-topic prior; 50/K when unset.
  std::optional<double> alpha;
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha ? *alpha : 50.0 / num_topics; }
};

struct TopicModel {
  int num_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;

  std::vector<std::string> terms;            // V, lexicographic
  std::vector<std::string> doc_ids;          // D
  std::vector<std::vector<double>> phi;      // K x V
  std::vector<std::vector<double>> theta;    // D x K
  std::vector<std::vector<std::string>> keywords;  // K x up to 10
  std::optional<double> coherence;
  std::size_t coherence_window = 0;

  std::size_t num_terms() const { return terms.size(); }
  std::size_t num_docs() const { return doc_ids.size(); }
  /// Row index of a document id, if the model saw it.
  std::optional<std::size_t> doc_index(const std::string& id) const;
};

/// Collapsed Gibbs sampling. Deterministic for a fixed seed. Throws
/// std::invalid_argument when K < 1, K > V, K > D, or iterations < 1.
TopicModel fit_lda(const Corpus& corpus, const LdaParams& params);

/// Term ids of the n most probable terms of a topic, descending; ties go to
/// the lexicographically smaller term. n is clamped to V.
std::vector<int> top_term_ids(const TopicModel& model, int topic, std::size_t n = 10);
std::vector<std::string> top_keywords(const TopicModel& model, int topic, std::size_t n = 10);

/// Largest topic weight of a document and the topic holding it (smallest
/// index on ties).
struct DominantTopic {
  int topic = 0;
  double weight = 0.0;
};
DominantTopic dominant_topic(const std::vector<double>& theta_row);

inline constexpr int kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_model(const TopicModel& model, const std::filesystem::path& path);
TopicModel load_model(const std::filesystem::path& path);

struct CandidateResult {
  int num_topics = 0;
  std::uint64_t seed = 0;
  std::optional<double> coherence;
  std::string error;
};

struct ModelSelection {
  TopicModel best;
  std::vector<CandidateResult> candidates;
};

struct SelectionParams {
  LdaParams base;  // num_topics and seed are overridden per candidate
  std::size_t coherence_window = 110;
  unsigned threads = 1;
};

/// Fits LDA for every (K, seed) pair, scores each by C_V coherence and keeps
/// the best one; ties go to the smaller K, then the earlier seed. Candidates
/// that fail to fit are reported; throws std::runtime_error if all fail.
ModelSelection select_model(const Corpus& corpus, const std::vector<int>& topic_counts,
                            const std::vector<std::uint64_t>& seeds,
                            const SelectionParams& params);

}  // namespace hisva
