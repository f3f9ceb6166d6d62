#include "trag/service/service.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "trag/errors.hpp"
#include "trag/eval/metrics.hpp"
#include "trag/eval/normalize.hpp"

namespace trag::service {

using nlohmann::json;
using nlohmann::ordered_json;

AskRequest parse_ask_request(const json& body) {
  if (!body.is_object()) throw BadRequest("request body must be a JSON object");
  AskRequest req;
  auto q = body.find("question");
  if (q == body.end() || !q->is_string()) throw BadRequest("\"question\" must be a string");
  req.question = q->get<std::string>();
  if (req.question.find_first_not_of(" \t\r\n") == std::string::npos) throw BadRequest("\"question\" is empty");
  if (auto k = body.find("k"); k != body.end() && !k->is_null()) {
    if (!k->is_number_integer()) throw BadRequest("\"k\" must be an integer");
    const auto v = k->get<long long>();
    if (v < 1 || v > static_cast<long long>(kMaxK)) throw BadRequest(fmt::format("\"k\" must be in [1, {}]", kMaxK));
    req.k = static_cast<std::size_t>(v);
  }
  return req;
}

std::vector<CellHighlight> locate_cells(std::string_view answer, const corpus::TableDoc& table, double threshold) {
  std::vector<CellHighlight> out;
  if (eval::normalized_tokens(answer).empty()) return out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      const double w = eval::token_f1(answer, table.rows[r][c]);
      if (w >= threshold && w > 0.0) out.push_back({r, c, w});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.weight > b.weight; });
  return out;
}

ordered_json AskResponse::to_json() const {
  ordered_json j;
  ordered_json list = ordered_json::array();
  for (const auto& a : answers) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : a.cells) cells.push_back(ordered_json::array({c.row, c.col, c.weight}));
    ordered_json item;
    item["text"] = a.text;
    item["score"] = a.score;
    item["table_id"] = a.table_id;
    item["cells"] = cells;
    list.push_back(item);
  }
  j["answers"] = list;
  ordered_json tabs = ordered_json::array();
  for (const auto& t : tables) {
    ordered_json item;
    item["id"] = t.id;
    item["title"] = t.title ? ordered_json(*t.title) : ordered_json(nullptr);
    item["header"] = t.header;
    item["rows"] = t.rows;
    tabs.push_back(std::move(item));
  }
  j["tables"] = tabs;
  return j;
}

AskResponse handle_ask(const Engine& engine, const AskRequest& request, const ServiceConfig& config) {
  rag::AnswerOptions opts;
  opts.n_docs = config.n_docs;
  opts.temperature = config.temperature;
  opts.decode.beam_width = request.k;
  opts.decode.max_len = config.max_len;

  AskResponse resp;
  rag::AnswerOutput out;
  try {
    out = engine.ask(request.question, opts);
  } catch (const EmptyQuery&) {
    throw BadRequest("question has no searchable term");
  } catch (const NoCandidates&) {
    return resp;
  }
  if (out.answers.empty()) return resp;

  double hi = out.answers.front().log_prob;
  for (const auto& a : out.answers) hi = std::max(hi, a.log_prob);
  std::vector<double> weights;
  double total = 0.0;
  for (const auto& a : out.answers) {
    weights.push_back(std::exp(a.log_prob - hi));
    total += weights.back();
  }
  std::unordered_set<std::string> listed;
  for (std::size_t i = 0; i < out.answers.size(); ++i) {
    const double score = weights[i] / total;
    if (!(score > 0.0)) continue;
    const auto& a = out.answers[i];
    const auto* table = engine.corpus().find(a.provenance_table_id);
    AnswerView view{a.text, std::min(score, 1.0), a.provenance_table_id, {}};
    if (table) {
      view.cells = locate_cells(a.text, *table, config.heat_threshold);
      if (listed.insert(table->id).second) resp.tables.push_back(*table);
    }
    resp.answers.push_back(std::move(view));
  }
  return resp;
}

Server::Server(ServiceConfig config) : config_(std::move(config)), http_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Server::~Server() { stop(); }

void Server::set_engine(std::shared_ptr<const Engine> engine) {
  std::lock_guard lock(mu_);
  engine_ = std::move(engine);
}

std::shared_ptr<const Engine> Server::engine() const {
  std::lock_guard lock(mu_);
  return engine_;
}

void Server::install_routes() {
  auto send_json = [](httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };

  http_->set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });

  http_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http_->Get("/health", [this, send_json](const httplib::Request&, httplib::Response& res) {
    if (engine()) {
      send_json(res, 200, {{"status", "ok"}});
    } else {
      send_json(res, 503, {{"status", "loading"}});
    }
  });

  http_->Post("/ask", [this, send_json](const httplib::Request& req, httplib::Response& res) {
    const auto eng = engine();
    if (!eng) {
      send_json(res, 503, {{"error", "index not loaded"}});
      return;
    }
    try {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error&) {
        throw BadRequest("request body is not valid JSON");
      }
      const auto ask = parse_ask_request(body);
      send_json(res, 200, handle_ask(*eng, ask, config_).to_json());
    } catch (const BadRequest& e) {
      send_json(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      const auto id = fmt::format("err-{:08x}", ++error_seq_);
      spdlog::error("/ask failed [{}]: {}", id, e.what());
      send_json(res, 500, {{"error", "internal error"}, {"id", id}});
    }
  });
}

bool Server::listen(const std::string& host, int port) {
  if (port == 0) {
    return bind(host, 0) >= 0 && serve();
  }
  return http_->listen(host, port);
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

bool Server::serve() { return http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

bool Server::running() const { return http_->is_running(); }

}  // namespace trag::service
