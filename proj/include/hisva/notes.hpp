#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hisva {

struct Note {
  std::uint64_t id = 0;
  std::string article_id;
  std::string title;
  std::vector<std::string> keywords;
  std::string body;
  std::int64_t created_at_ms = 0;  // Unix epoch milliseconds, UTC

  std::string created_at_iso() const;
  bool operator==(const Note&) const = default;
};

struct NoteDraft {
  std::string article_id;
  std::string title;
  std::vector<std::string> keywords;
  std::string body;
};

class NoteRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoteStorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only note log, one JSON object per line. Each note is written with a
/// single append and fsync; a failed write is rolled back so the file never
/// holds a partial note. Writers are serialized; readers see a consistent
/// prefix.
class NoteStore {
 public:
  using ArticleCheck = std::function<bool(const std::string&)>;
  using Clock = std::function<std::int64_t()>;

  /// Loads existing notes; an unparsable trailing line (torn write) is
  /// ignored. Throws NoteStorageError if the file exists but cannot be read.
  NoteStore(std::filesystem::path path, ArticleCheck article_exists, Clock clock = system_clock_ms);

  /// Throws NoteRejected for an unknown article or empty title, and
  /// NoteStorageError when the append fails.
  Note create(const NoteDraft& draft);
  /// Newest first; equal timestamps order by id, newest first.
  std::vector<Note> list() const;
  std::optional<Note> get(std::uint64_t id) const;
  std::size_t size() const;

  static std::int64_t system_clock_ms();

 private:
  std::filesystem::path path_;
  ArticleCheck article_exists_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::vector<Note> notes_;
  std::uint64_t next_id_ = 1;
};

}  // namespace hisva
