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

#pragma once

#include <string>

#include "runahead/executor.hpp"

namespace runahead {

inline constexpr const char* kApiKeyEnv = "RUNAHEAD_API_KEY";

struct HttpEndpoint {
  // Requests go to <base_url>/v1/chat/completions.
  std::string base_url;
  std::string model;
  // Empty means: read kApiKeyEnv at construction time.
  std::string api_key;
  double timeout_seconds = 120.0;
  int max_retries = 2;
  double initial_backoff_seconds = 0.5;
};

// OpenAI-compatible chat-completions client. Each prompt is sent as a
// single user message; latency is measured wall time including retries.
class HttpExecutor : public Executor {
 public:
  HttpExecutor(HttpEndpoint endpoint, std::string provider);

  ExecResult execute(const ExecRequest& req) override;

  const HttpEndpoint& endpoint() const { return endpoint_; }

 private:
  HttpEndpoint endpoint_;
  std::string provider_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace runahead
