#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "hisva/index.hpp"
#include "hisva/listing.hpp"
#include "hisva/notes.hpp"
#include "hisva/pipeline.hpp"
#include "hisva/relevance.hpp"
#include "json.hpp"

namespace hisva {

inline constexpr int kApiVersion = 1;

/// Immutable query state built from a loaded index. Safe for concurrent reads.
class Engine {
 public:
  explicit Engine(IndexData data);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const IndexData& data() const { return data_; }
  EventSpan events() const { return data_.events; }
  const IndexedEvent* find(const std::string& id) const;
  const ImportanceScores& scores() const { return data_.scores; }
  const Recommender& recommender() const { return *recommender_; }
  const SearchIndex& search_index() const { return *search_; }
  double merge_window(const FilterState& filter) const;

 private:
  IndexData data_;
  std::map<std::string, std::size_t> by_id_;
  std::unique_ptr<Recommender> recommender_;
  std::unique_ptr<SearchIndex> search_;
};

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class BadRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Query-string encoding of the filter state:
///   from, to            year range (inclusive)
///   bbox                south,west,north,east
///   countries           comma-separated ISO codes
///   topics              comma-separated visible topic indices
///   mode                freq | all
///   normalized          true | false
///   rec                 topic | popular
///   threshold           [0, 1]
///   important           true | false
///   q                   search text
/// Throws BadRequest on malformed values.
FilterState parse_filter(const std::map<std::string, std::string>& params);

nlohmann::json to_json(const ListEntry& e);
nlohmann::json to_json(const Note& n);

/// Transport-independent request handling; every read endpoint is a pure
/// function of (index, parameters).
class Api {
 public:
  Api(const Engine& engine, NoteStore& notes) : engine_(engine), notes_(notes) {}

  ApiResponse handle(const ApiRequest& req) const;

 private:
  ApiResponse topics() const;
  ApiResponse timeline(const ApiRequest& req) const;
  ApiResponse dots(const ApiRequest& req) const;
  ApiResponse clusters(const ApiRequest& req) const;
  ApiResponse events(const ApiRequest& req) const;
  ApiResponse article(const std::string& id) const;
  ApiResponse related(const std::string& id, const ApiRequest& req) const;
  ApiResponse search(const ApiRequest& req) const;
  ApiResponse region_span(const ApiRequest& req) const;
  ApiResponse create_note(const ApiRequest& req) const;
  ApiResponse list_notes() const;
  ApiResponse get_note(const std::string& id) const;

  const Engine& engine_;
  NoteStore& notes_;
};

/// HTTP front end on a background thread.
class Server {
 public:
  explicit Server(const Api& api);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts listening; port 0 picks a free port. Returns the bound
  /// port. Throws std::runtime_error if binding fails.
  int start(const std::string& host, int port);
  /// Blocks until stop() is called from another thread.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hisva
