#include "trag/dense/remote_provider.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "trag/errors.hpp"

namespace trag::dense {

RemoteProvider::RemoteProvider(RemoteProviderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw std::invalid_argument("remote embedding provider needs a URL");
  if (config_.dim == 0 || config_.batch_size == 0 || config_.max_in_flight == 0) {
    throw std::invalid_argument("remote embedding provider: dim, batch size and in-flight cap must be positive");
  }
}

std::vector<Vector> RemoteProvider::request(std::span<const std::string> texts, std::string_view mode) const {
  httplib::Client client(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  nlohmann::json body{{"texts", std::vector<std::string>(texts.begin(), texts.end())}, {"mode", mode}};
  auto res = client.Post("/embed", body.dump(), "application/json");
  if (!res) throw std::runtime_error("embedding service unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("embedding service returned HTTP " + std::to_string(res->status));

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("embedding service sent invalid JSON: ") + e.what());
  }
  const auto it = reply.find("vectors");
  if (it == reply.end() || !it->is_array() || it->size() != texts.size()) {
    throw std::runtime_error("embedding service reply must hold one vector per text");
  }
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& v : *it) {
    if (!v.is_array()) throw std::runtime_error("embedding service reply: vector is not an array");
    if (v.size() != config_.dim) throw DimensionMismatch(config_.dim, v.size());
    Vector vec;
    vec.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) throw std::runtime_error("embedding service reply: non-numeric component");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw std::runtime_error("embedding service reply: non-finite component");
      vec.push_back(d);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

Vector RemoteProvider::embed_query(std::string_view text) const {
  const std::string t(text);
  return std::move(request(std::span(&t, 1), "query").front());
}

Vector RemoteProvider::embed_passage(std::string_view text) const {
  const std::string t(text);
  return std::move(request(std::span(&t, 1), "passage").front());
}

std::vector<Vector> RemoteProvider::embed_passages(std::span<const std::string> texts) const {
  const std::size_t batches = (texts.size() + config_.batch_size - 1) / config_.batch_size;
  std::vector<std::vector<Vector>> results(batches);
  std::vector<std::exception_ptr> errors(batches);
  // Waves of at most max_in_flight concurrent batches.
  for (std::size_t first = 0; first < batches; first += config_.max_in_flight) {
    const std::size_t last = std::min(batches, first + config_.max_in_flight);
    std::vector<std::jthread> wave;
    for (std::size_t b = first; b < last; ++b) {
      wave.emplace_back([&, b] {
        const std::size_t lo = b * config_.batch_size;
        const std::size_t n = std::min(config_.batch_size, texts.size() - lo);
        try {
          results[b] = request(texts.subspan(lo, n), "passage");
        } catch (...) {
          errors[b] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (auto& batch : results) {
    for (auto& v : batch) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace trag::dense
