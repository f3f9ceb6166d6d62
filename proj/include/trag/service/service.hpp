#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trag/corpus/table.hpp"
#include "trag/engine.hpp"

namespace httplib {
class Server;
}

namespace trag::service {

inline constexpr std::size_t kDefaultK = 4;
inline constexpr std::size_t kMaxK = 50;

/// Request rejected by validation; served as HTTP 400.
class BadRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AskRequest {
  std::string question;
  std::size_t k = kDefaultK;
};

/// Throws BadRequest: question must be a non-blank string, k an integer in [1, 50].
AskRequest parse_ask_request(const nlohmann::json& body);

struct CellHighlight {
  std::size_t row = 0;
  std::size_t col = 0;
  double weight = 0.0;
  bool operator==(const CellHighlight&) const = default;
};

/// Cells whose token F1 with the answer (after answer normalization) is at
/// least `threshold`, by descending weight then (row, col). An answer that
/// normalizes to nothing highlights nothing.
std::vector<CellHighlight> locate_cells(std::string_view answer, const corpus::TableDoc& table,
                                        double threshold = 0.5);

struct AnswerView {
  std::string text;
  double score = 0.0;  ///< in (0, 1], renormalized over the returned answers
  std::string table_id;
  std::vector<CellHighlight> cells;
};

struct AskResponse {
  std::vector<AnswerView> answers;
  std::vector<corpus::TableDoc> tables;  ///< every table referenced by answers, first-use order

  nlohmann::ordered_json to_json() const;
};

struct ServiceConfig {
  std::size_t n_docs = 5;
  std::size_t max_len = 32;
  double temperature = 1.0;
  double heat_threshold = 0.5;
  std::string cors_origin = "*";
};

/// k maps to the beam width; retrieval depth stays at config.n_docs.
AskResponse handle_ask(const Engine& engine, const AskRequest& request, const ServiceConfig& config);

/// HTTP front end: GET /health, POST /ask (plus CORS preflight). Answers 503
/// until an engine is installed.
class Server {
 public:
  explicit Server(ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void set_engine(std::shared_ptr<const Engine> engine);

  /// Binds and serves until stop(); port 0 picks a free port. Returns false if binding failed.
  bool listen(const std::string& host, int port);
  /// Binds without serving yet; returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves on a socket from bind(); blocks until stop().
  bool serve();
  void stop();
  bool running() const;

 private:
  std::shared_ptr<const Engine> engine() const;
  void install_routes();

  ServiceConfig config_;
  std::unique_ptr<httplib::Server> http_;
  mutable std::mutex mu_;
  std::shared_ptr<const Engine> engine_;
  std::atomic<std::uint64_t> error_seq_{0};
};

}  // namespace trag::service
