// Copyright 2026 The ttscale Authors.
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

#ifndef TTSCALE_REMOTE_GENERATOR_H_
#define TTSCALE_REMOTE_GENERATOR_H_

#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>

#include "ttscale/generator.h"
#include "ttscale/serialization.h"

namespace ttscale {

// Carries one request line and returns one response line (no trailing
// newline on either side).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string RoundTrip(const std::string& request) = 0;
};

// Connects to a server listening on a Unix-domain stream socket.
std::unique_ptr<Transport> ConnectUnixSocket(const std::string& path);
// Spawns `command` through /bin/sh and talks to its stdin/stdout.
std::unique_ptr<Transport> SpawnProcess(const std::string& command);
// Endpoint syntax: "unix:<path>" or "exec:<shell command>".
std::unique_ptr<Transport> OpenEndpoint(const std::string& endpoint);

// Generator backed by a newline-delimited JSON peer.
//
// Requests: {"op": "info"|"step"|"step_hidden"|"resume", "prompt",
// "image_b64"?, "prefix", "layer"?, "hidden"?}. Responses carry "probs",
// "hidden", "info" or "error". Calls are serialized per connection; remote
// models are never trainable through this client.
class RemoteGenerator final : public Generator {
 public:
  // Issues an "info" request; REMOTE_UNAVAILABLE if the peer does not answer.
  explicit RemoteGenerator(std::unique_ptr<Transport> transport);

  const Vocabulary& vocabulary() const override { return vocab_; }
  int num_layers() const override { return num_layers_; }
  int hidden_dim() const override { return hidden_dim_; }
  Capabilities capabilities() const override { return {hidden_states_, false}; }
  std::size_t context_limit() const override { return context_limit_; }

  TokenDistribution Step(const AugmentedInput& input,
                         std::span<const TokenId> prefix) override;
  std::vector<double> StepHidden(const AugmentedInput& input,
                                 std::span<const TokenId> prefix,
                                 int layer) override;
  TokenDistribution ResumeFromHidden(std::span<const double> hidden,
                                     int layer) override;

 private:
  Json Call(const Json& request);

  std::mutex mu_;
  std::unique_ptr<Transport> transport_;
  Vocabulary vocab_;
  int num_layers_ = 1;
  int hidden_dim_ = 0;
  bool hidden_states_ = false;
  std::size_t context_limit_ = 4096;
};

// Server side of the protocol: answers one request line using `g`. Never
// throws; failures come back as {"error": "..."}.
std::string HandleRequestLine(Generator& g, const std::string& line);

// Answers requests line by line until `in` is exhausted.
void ServeStream(Generator& g, std::istream& in, std::ostream& out);

// Listens on a Unix-domain socket and serves connections one at a time.
// Returns after `max_connections` connections (0 = forever).
void ServeUnixSocket(Generator& g, const std::string& path,
                     int max_connections = 0);

}  // namespace ttscale

#endif  // TTSCALE_REMOTE_GENERATOR_H_
