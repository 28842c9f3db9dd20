#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "brd/embeddings.hpp"
#include "brd/error.hpp"

namespace brd {

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("embedding endpoint '" + url + "' must look like http://host:port/path", -1, false);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpProvider::HttpProvider(std::string provider_name, std::string model_id, std::uint32_t dimension,
                           std::string endpoint, std::string token)
    : spec_{std::move(provider_name), dimension, "mean"},
      model_id_(std::move(model_id)),
      endpoint_(std::move(endpoint)),
      token_(std::move(token)) {}

std::vector<EmbeddingVector> HttpProvider::embed_chunk(std::span<const std::string> texts) const {
  if (endpoint_.empty()) {
    throw ProviderError(spec_.provider_name +
                            " needs an embedding service; set BRD_EMBED_ENDPOINT (e.g. "
                            "http://127.0.0.1:8765/embed)",
                        -1, false);
  }
  const Endpoint ep = split_endpoint(endpoint_);
  if (ep.base.rfind("http://", 0) != 0) {
    throw ProviderError("only plain http:// embedding endpoints are supported", -1, false);
  }

  nlohmann::json request = {{"model", model_id_}, {"texts", nlohmann::json::array()}};
  for (const auto& t : texts) request["texts"].push_back(t);

  httplib::Client client(ep.base);
  client.set_connection_timeout(10);
  client.set_read_timeout(600);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  auto res = client.Post(ep.path, headers, request.dump(), "application/json");
  if (!res) {
    throw ProviderError(spec_.provider_name + ": cannot reach " + endpoint_ + " (" +
                        httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    const bool retryable = res->status >= 500 || res->status == 429;
    throw ProviderError(spec_.provider_name + ": HTTP " + std::to_string(res->status) + " from " +
                            endpoint_,
                        -1, retryable);
  }

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(spec_.provider_name + ": response is not JSON: " + e.what(), -1, false);
  }
  if (!body.contains("embeddings") || !body["embeddings"].is_array() ||
      body["embeddings"].size() != texts.size()) {
    throw ProviderError(spec_.provider_name + ": response must carry one embedding per text", -1, false);
  }
  if (body.contains("pooling") && body["pooling"] != "mean") {
    throw ProviderError(spec_.provider_name + ": provider pools with '" +
                            body["pooling"].get<std::string>() + "', expected mean pooling",
                        -1, false);
  }

  std::vector<EmbeddingVector> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& row = body["embeddings"][i];
    if (!row.is_array() || row.size() != spec_.dimension) {
      throw ProviderError(spec_.provider_name + ": embedding " + std::to_string(i) + " has wrong length",
                          static_cast<long>(i), false);
    }
    out[i].values.reserve(spec_.dimension);
    for (const auto& x : row) {
      const double v = x.get<double>();
      if (!std::isfinite(v)) {
        throw ProviderError(spec_.provider_name + ": non-finite value in embedding " + std::to_string(i),
                            static_cast<long>(i), false);
      }
      out[i].values.push_back(static_cast<float>(v));
    }
    out[i].source_hash = fnv1a64(texts[i]);
  }
  return out;
}

}  // namespace brd
