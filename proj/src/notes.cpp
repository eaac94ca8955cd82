#include "hisva/notes.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <mutex>

#include "json.hpp"

namespace hisva {

using nlohmann::json;

std::string Note::created_at_iso() const {
  std::time_t secs = static_cast<std::time_t>(created_at_ms / 1000);
  int ms = static_cast<int>(created_at_ms % 1000);
  if (ms < 0) {
    ms += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%03dZ", ms);
  return buf;
}

namespace {

json to_json(const Note& n) {
  return json{{"id", n.id},
              {"article_id", n.article_id},
              {"title", n.title},
              {"keywords", n.keywords},
              {"body", n.body},
              {"created_at_ms", n.created_at_ms}};
}

std::optional<Note> from_json(const json& j) {
  try {
    Note n;
    n.id = j.at("id").get<std::uint64_t>();
    n.article_id = j.at("article_id").get<std::string>();
    n.title = j.at("title").get<std::string>();
    n.keywords = j.at("keywords").get<std::vector<std::string>>();
    n.body = j.at("body").get<std::string>();
    n.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    return n;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::int64_t NoteStore::system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

NoteStore::NoteStore(std::filesystem::path path, ArticleCheck article_exists, Clock clock)
    : path_(std::move(path)), article_exists_(std::move(article_exists)), clock_(std::move(clock)) {
  if (!std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  if (!in) throw NoteStorageError("cannot read notes file: " + path_.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    if (auto n = from_json(j)) {
      next_id_ = std::max(next_id_, n->id + 1);
      notes_.push_back(std::move(*n));
    }
  }
}

Note NoteStore::create(const NoteDraft& draft) {
  if (!article_exists_ || !article_exists_(draft.article_id)) {
    throw NoteRejected("note refers to an unknown article: " + draft.article_id);
  }
  if (draft.title.empty()) throw NoteRejected("note title is empty");

  std::unique_lock lock(mu_);
  Note n;
  n.id = next_id_;
  n.article_id = draft.article_id;
  n.title = draft.title;
  n.keywords = draft.keywords;
  n.body = draft.body;
  n.created_at_ms = clock_();
  const std::string line = to_json(n).dump() + "\n";

  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw NoteStorageError("cannot open notes file: " + std::string(std::strerror(errno)));
  struct stat st{};
  const off_t before = ::fstat(fd, &st) == 0 ? st.st_size : -1;
  ssize_t written = ::write(fd, line.data(), line.size());
  bool ok = written == static_cast<ssize_t>(line.size()) && ::fsync(fd) == 0;
  if (!ok) {
    const int err = errno;
    if (before >= 0 && ::ftruncate(fd, before) != 0) {
      // the torn line is skipped on the next load
    }
    ::close(fd);
    throw NoteStorageError("failed to append note: " + std::string(std::strerror(err)));
  }
  ::close(fd);
  notes_.push_back(n);
  ++next_id_;
  return n;
}

std::vector<Note> NoteStore::list() const {
  std::shared_lock lock(mu_);
  std::vector<Note> out = notes_;
  std::sort(out.begin(), out.end(), [](const Note& a, const Note& b) {
    return a.created_at_ms != b.created_at_ms ? a.created_at_ms > b.created_at_ms : a.id > b.id;
  });
  return out;
}

std::optional<Note> NoteStore::get(std::uint64_t id) const {
  std::shared_lock lock(mu_);
  for (const auto& n : notes_) {
    if (n.id == id) return n;
  }
  return std::nullopt;
}

std::size_t NoteStore::size() const {
  std::shared_lock lock(mu_);
  return notes_.size();
}

}  // namespace hisva
