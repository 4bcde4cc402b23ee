// Copyright 2026 The Runahead Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "runahead/http_executor.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "runahead/error.hpp"

namespace runahead {

using json = nlohmann::json;

HttpExecutor::HttpExecutor(HttpEndpoint endpoint, std::string provider)
    : endpoint_(std::move(endpoint)), provider_(std::move(provider)) {
  if (endpoint_.api_key.empty()) {
    if (const char* key = std::getenv(kApiKeyEnv)) endpoint_.api_key = key;
  }
  const std::string& url = endpoint_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "base_url needs a scheme: " + url);
  }
  auto path_begin = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/v1/chat/completions";
}

ExecResult HttpExecutor::execute(const ExecRequest& req) {
  validate(req);
  json body = {{"model", endpoint_.model},
               {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
               {"temperature", req.sampling.temperature},
               {"top_p", req.sampling.top_p}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  std::string last_error;
  double backoff = endpoint_.initial_backoff_seconds;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(endpoint_.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      json reply = json::parse(res->body);
      ExecResult r;
      r.output = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (reply.contains("usage")) {
        const auto& usage = reply["usage"];
        r.prompt_tokens = usage.value("prompt_tokens", std::int64_t{0});
        r.output_tokens = usage.value("completion_tokens", std::int64_t{0});
      }
      r.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      r.provider = provider_;
      return r;
    } catch (const json::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
    }
  }
  throw Error(ErrorCode::kProviderError,
              provider_ + " failed after " + std::to_string(endpoint_.max_retries) +
                  " retries: " + last_error);
}

}  // namespace runahead
