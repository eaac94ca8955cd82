#include "hisva/text.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace hisva {

namespace {

// English function words plus generic encyclopedia boilerplate.
constexpr std::array<std::string_view, 148> kStopWords = {
    "about",   "above",   "after",   "again",   "against", "all",     "also",    "although",
    "among",   "and",     "another", "any",     "are",     "around",  "because", "been",
    "before",  "being",   "below",   "between", "both",    "but",     "can",     "could",
    "did",     "does",    "doing",   "down",    "during",  "each",    "either",  "even",
    "ever",    "few",     "first",   "for",     "from",    "further", "had",     "has",
    "have",    "having",  "her",     "here",    "hers",    "herself", "him",     "himself",
    "his",     "how",     "however", "into",    "its",     "itself",  "just",    "last",
    "later",   "less",    "many",    "may",     "more",    "most",    "much",    "must",
    "near",    "neither", "never",   "new",     "nor",     "not",     "now",     "off",
    "often",   "once",    "one",     "only",    "other",   "others",  "our",     "ours",
    "out",     "over",    "own",     "same",    "second",  "several", "she",     "should",
    "since",   "some",    "such",    "than",    "that",    "the",     "their",   "theirs",
    "them",    "themselves", "then", "there",   "these",   "they",    "third",   "this",
    "those",   "three",   "through", "thus",    "too",     "two",     "under",   "until",
    "upon",    "very",    "was",     "were",    "what",    "when",    "where",   "whether",
    "which",   "while",   "who",     "whom",    "whose",   "why",     "will",    "with",
    "within",  "without", "would",   "yet",     "you",     "your",    "became",  "become",
    "made",    "make",    "part",    "per",     "use",     "used",    "using",   "like",
    "well",    "still",   "took",    "known",
};

}  // namespace

bool is_stop_word(std::string_view token) {
  return std::find(kStopWords.begin(), kStopWords.end(), token) != kStopWords.end();
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 3 && !is_stop_word(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || c >= 0x80) {
      cur.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> sorted_terms) : terms_(std::move(sorted_terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<int>(i));
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& docs) {
  std::set<std::string> terms;
  for (const auto& d : docs) terms.insert(d.begin(), d.end());
  return Vocabulary(std::vector<std::string>(terms.begin(), terms.end()));
}

std::optional<int> Vocabulary::index(std::string_view term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.size();
  return n;
}

CorpusBuild build_corpus_from_tokens(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& documents,
    bool keep_empty) {
  CorpusBuild out;
  std::vector<std::vector<std::string>> kept;
  for (const auto& [id, tokens] : documents) {
    if (tokens.empty() && !keep_empty) {
      out.dropped.push_back(id);
      continue;
    }
    out.corpus.doc_ids.push_back(id);
    kept.push_back(tokens);
  }
  out.corpus.vocab = Vocabulary::build(kept);
  out.corpus.docs.reserve(kept.size());
  for (const auto& tokens : kept) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(*out.corpus.vocab.index(t));
    out.corpus.docs.push_back(std::move(ids));
  }
  return out;
}

CorpusBuild build_corpus(const std::vector<std::pair<std::string, std::string>>& documents,
                         bool keep_empty) {
  std::vector<std::pair<std::string, std::vector<std::string>>> tokenized;
  tokenized.reserve(documents.size());
  for (const auto& [id, text] : documents) tokenized.emplace_back(id, tokenize(text));
  return build_corpus_from_tokens(tokenized, keep_empty);
}

}  // namespace hisva
