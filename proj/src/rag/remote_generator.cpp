#include "trag/rag/remote_generator.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "trag/errors.hpp"

namespace trag::rag {

RemoteGenerator::RemoteGenerator(RemoteGeneratorConfig config, Vocabulary vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  if (config_.base_url.empty()) throw std::invalid_argument("remote generator needs a URL");
}

std::vector<double> RemoteGenerator::next_token_dist(std::string_view prompt, std::span<const TokenId> prefix) const {
  httplib::Client client(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  std::vector<std::string> prefix_tokens;
  prefix_tokens.reserve(prefix.size());
  for (const auto id : prefix) prefix_tokens.push_back(vocab_.token(id));
  nlohmann::json body{{"prompt", prompt}, {"prefix_tokens", prefix_tokens}};
  auto res = client.Post("/next_token", body.dump(), "application/json");
  if (!res) throw std::runtime_error("generator service unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("generator service returned HTTP " + std::to_string(res->status));

  std::vector<double> probs;
  try {
    probs = nlohmann::json::parse(res->body).at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("generator service sent a bad reply: ") + e.what());
  }
  check_distribution(probs, vocab_.size(), 1e-6);
  double sum = 0.0;
  for (double p : probs) sum += p;
  for (double& p : probs) p /= sum;
  return probs;
}

Vocabulary load_vocab_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

}  // namespace trag::rag
