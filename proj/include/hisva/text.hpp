#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hisva {

/// Lowercases ASCII, splits on non-letters (bytes >= 0x80 count as letters so
/// UTF-8 words stay whole), drops tokens shorter than 3 bytes and stop words.
std::vector<std::string> tokenize(std::string_view text);
bool is_stop_word(std::string_view token);

/// Dense term index; terms are stored in lexicographic order so the mapping
/// does not depend on document order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> sorted_terms);

  static Vocabulary build(const std::vector<std::vector<std::string>>& docs);

  std::optional<int> index(std::string_view term) const;
  const std::string& term(int index) const { return terms_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<std::string> terms_;
  std::map<std::string, int, std::less<>> index_;
};

/// Token-id sequences of a document collection.
struct Corpus {
  Vocabulary vocab;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<int>> docs;

  std::size_t num_docs() const { return docs.size(); }
  std::size_t num_tokens() const;
};

struct CorpusBuild {
  Corpus corpus;
  std::vector<std::string> dropped;  // ids of documents empty after preprocessing
};

/// `documents` are (id, text) pairs. Empty documents are dropped unless
/// `keep_empty` is set.
CorpusBuild build_corpus(const std::vector<std::pair<std::string, std::string>>& documents,
                         bool keep_empty = false);
/// Same, from already tokenized documents.
CorpusBuild build_corpus_from_tokens(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& documents,
    bool keep_empty = false);

}  // namespace hisva
