#include "hisva/lda.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "hisva/coherence.hpp"
#include "json.hpp"

namespace hisva {

using nlohmann::json;

std::optional<std::size_t> TopicModel::doc_index(const std::string& id) const {
  auto it = std::find(doc_ids.begin(), doc_ids.end(), id);
  if (it == doc_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids.begin());
}

namespace {

// Uniform draw in [0, 1) from the top 53 bits; unlike
// std::uniform_real_distribution this is identical across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

TopicModel fit_lda(const Corpus& corpus, const LdaParams& params) {
  const int K = params.num_topics;
  const std::size_t V = corpus.vocab.size();
  const std::size_t D = corpus.num_docs();
  if (K < 1) throw std::invalid_argument("topic count must be >= 1");
  if (params.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (static_cast<std::size_t>(K) > V) throw std::invalid_argument("topic count exceeds vocabulary size");
  if (static_cast<std::size_t>(K) > D) throw std::invalid_argument("topic count exceeds document count");
  for (const auto& doc : corpus.docs) {
    if (doc.empty()) throw std::invalid_argument("corpus holds an empty document");
  }

  const double alpha = params.effective_alpha();
  const double beta = params.beta;
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("priors must be positive");
  const double vbeta = static_cast<double>(V) * beta;

  std::mt19937_64 rng(params.seed);
  std::vector<std::vector<int>> z(D);
  std::vector<int> n_dk(D * K, 0);
  std::vector<int> n_kw(static_cast<std::size_t>(K) * V, 0);
  std::vector<int> n_k(K, 0);

  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(corpus.docs[d].size());
    for (std::size_t i = 0; i < corpus.docs[d].size(); ++i) {
      int k = std::min(K - 1, static_cast<int>(unit(rng) * K));
      int w = corpus.docs[d][i];
      z[d][i] = k;
      ++n_dk[d * K + k];
      ++n_kw[static_cast<std::size_t>(k) * V + w];
      ++n_k[k];
    }
  }

  std::vector<double> cumulative(K);
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      const auto& doc = corpus.docs[d];
      int* doc_topics = &n_dk[d * K];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const int w = doc[i];
        int k = z[d][i];
        --doc_topics[k];
        --n_kw[static_cast<std::size_t>(k) * V + w];
        --n_k[k];

        double total = 0.0;
        for (int t = 0; t < K; ++t) {
          total += (doc_topics[t] + alpha) * (n_kw[static_cast<std::size_t>(t) * V + w] + beta) /
                   (n_k[t] + vbeta);
          cumulative[t] = total;
        }
        const double u = unit(rng) * total;
        k = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (k >= K) k = K - 1;

        z[d][i] = k;
        ++doc_topics[k];
        ++n_kw[static_cast<std::size_t>(k) * V + w];
        ++n_k[k];
      }
#ifndef NDEBUG
      assert(std::accumulate(doc_topics, doc_topics + K, 0) == static_cast<int>(doc.size()));
#endif
    }
  }

  TopicModel m;
  m.num_topics = K;
  m.alpha = alpha;
  m.beta = beta;
  m.iterations = params.iterations;
  m.seed = params.seed;
  m.terms = corpus.vocab.terms();
  m.doc_ids = corpus.doc_ids;
  m.phi.assign(K, std::vector<double>(V));
  for (int k = 0; k < K; ++k) {
    const double denom = n_k[k] + vbeta;
    for (std::size_t w = 0; w < V; ++w) m.phi[k][w] = (n_kw[static_cast<std::size_t>(k) * V + w] + beta) / denom;
  }
  m.theta.assign(D, std::vector<double>(K));
  for (std::size_t d = 0; d < D; ++d) {
    const double denom = static_cast<double>(corpus.docs[d].size()) + K * alpha;
    for (int k = 0; k < K; ++k) m.theta[d][k] = (n_dk[d * K + k] + alpha) / denom;
  }
  m.keywords.resize(K);
  for (int k = 0; k < K; ++k) m.keywords[k] = top_keywords(m, k, 10);
  return m;
}

std::vector<int> top_term_ids(const TopicModel& model, int topic, std::size_t n) {
  if (topic < 0 || topic >= model.num_topics) throw std::out_of_range("topic index out of range");
  const auto& row = model.phi[topic];
  std::vector<int> ids(row.size());
  std::iota(ids.begin(), ids.end(), 0);
  n = std::min(n, ids.size());
  // term ids follow lexicographic term order, so the id is the tie-break
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](int a, int b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
  ids.resize(n);
  return ids;
}

std::vector<std::string> top_keywords(const TopicModel& model, int topic, std::size_t n) {
  std::vector<std::string> out;
  for (int id : top_term_ids(model, topic, n)) out.push_back(model.terms[id]);
  return out;
}

DominantTopic dominant_topic(const std::vector<double>& theta_row) {
  DominantTopic best;
  for (std::size_t k = 0; k < theta_row.size(); ++k) {
    if (k == 0 || theta_row[k] > best.weight) best = {static_cast<int>(k), theta_row[k]};
  }
  return best;
}

void save_model(const TopicModel& m, const std::filesystem::path& path) {
  json j;
  j["format"] = "hisva-topic-model";
  j["version"] = kModelFormatVersion;
  j["num_topics"] = m.num_topics;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["iterations"] = m.iterations;
  j["seed"] = m.seed;
  j["vocabulary"] = m.terms;
  j["doc_ids"] = m.doc_ids;
  j["phi"] = m.phi;
  j["theta"] = m.theta;
  j["keywords"] = m.keywords;
  j["coherence"] = m.coherence ? json(*m.coherence) : json(nullptr);
  j["coherence_window"] = m.coherence_window;
  std::ofstream out(path);
  if (!out) throw ModelFormatError("cannot write model file: " + path.string());
  out << j.dump() << '\n';
  if (!out) throw ModelFormatError("failed writing model file: " + path.string());
}

TopicModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open model file: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ModelFormatError("model file is not valid JSON");
  if (j.value("format", "") != "hisva-topic-model") throw ModelFormatError("not a topic model file");
  if (j.value("version", 0) != kModelFormatVersion) {
    throw ModelFormatError("unsupported model version " + std::to_string(j.value("version", 0)));
  }
  TopicModel m;
  try {
    m.num_topics = j.at("num_topics").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.iterations = j.at("iterations").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.terms = j.at("vocabulary").get<std::vector<std::string>>();
    m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    m.phi = j.at("phi").get<std::vector<std::vector<double>>>();
    m.theta = j.at("theta").get<std::vector<std::vector<double>>>();
    m.keywords = j.at("keywords").get<std::vector<std::vector<std::string>>>();
    if (!j.at("coherence").is_null()) m.coherence = j.at("coherence").get<double>();
    m.coherence_window = j.value("coherence_window", std::size_t{0});
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
  if (m.phi.size() != static_cast<std::size_t>(m.num_topics) || m.theta.size() != m.doc_ids.size()) {
    throw ModelFormatError("model dimensions do not match");
  }
  for (const auto& row : m.phi) {
    if (row.size() != m.terms.size()) throw ModelFormatError("phi row length mismatch");
  }
  for (const auto& row : m.theta) {
    if (row.size() != static_cast<std::size_t>(m.num_topics)) throw ModelFormatError("theta row length mismatch");
  }
  return m;
}

ModelSelection select_model(const Corpus& corpus, const std::vector<int>& topic_counts,
                            const std::vector<std::uint64_t>& seeds,
                            const SelectionParams& params) {
  if (topic_counts.empty()) throw std::invalid_argument("no candidate topic counts");
  std::vector<std::uint64_t> seed_list = seeds.empty() ? std::vector<std::uint64_t>{params.base.seed} : seeds;

  struct Slot {
    CandidateResult result;
    std::optional<TopicModel> model;
  };
  std::vector<Slot> slots;
  for (int k : topic_counts) {
    for (auto s : seed_list) slots.push_back({CandidateResult{k, s, std::nullopt, {}}, std::nullopt});
  }

  auto run = [&](Slot& slot) {
    LdaParams p = params.base;
    p.num_topics = slot.result.num_topics;
    p.seed = slot.result.seed;
    try {
      TopicModel m = fit_lda(corpus, p);
      m.coherence = coherence_cv(m, corpus, params.coherence_window);
      m.coherence_window = params.coherence_window;
      slot.result.coherence = m.coherence;
      slot.model = std::move(m);
    } catch (const std::exception& e) {
      slot.result.error = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(slots.size())));
  if (workers == 1) {
    for (auto& slot : slots) run(slot);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < slots.size(); i = next++) run(slots[i]);
      });
    }
    pool.clear();
  }

  ModelSelection out;
  Slot* best = nullptr;
  for (auto& slot : slots) {
    out.candidates.push_back(slot.result);
    if (!slot.model) continue;
    if (!best) {
      best = &slot;
      continue;
    }
    const auto& a = slot.result;
    const auto& b = best->result;
    if (*a.coherence > *b.coherence ||
        (*a.coherence == *b.coherence && a.num_topics < b.num_topics)) {
      best = &slot;
    }
  }
  if (!best) {
    std::string why = out.candidates.front().error;
    throw std::runtime_error("every topic-model candidate failed; first error: " + why);
  }
  out.best = std::move(*best->model);
  return out;
}

}  // namespace hisva
