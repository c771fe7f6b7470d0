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

#include "ttscale/remote_generator.h"

#include <csignal>
#include <cstring>
#include <istream>
#include <ostream>

#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

namespace ttscale {
namespace {

[[noreturn]] void Unavailable(const std::string& what) {
  throw Error(ErrorCode::kRemoteUnavailable, what);
}

// Buffered line I/O over a pair of file descriptors.
class FdLineChannel {
 public:
  FdLineChannel(int read_fd, int write_fd)
      : read_fd_(read_fd), write_fd_(write_fd) {}

  void WriteLine(const std::string& line) {
    std::string data = line + '\n';
    size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        Unavailable(std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<size_t>(n);
    }
  }

  // Returns false on clean end of stream before any byte of a new line.
  bool ReadLine(std::string& line) {
    line.clear();
    for (;;) {
      const size_t nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return true;
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        Unavailable(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) {
        if (buffer_.empty()) return false;
        line.swap(buffer_);
        buffer_.clear();
        return true;
      }
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

class UnixSocketTransport final : public Transport {
 public:
  explicit UnixSocketTransport(int fd) : fd_(fd), channel_(fd, fd) {}
  ~UnixSocketTransport() override { ::close(fd_); }

  std::string RoundTrip(const std::string& request) override {
    channel_.WriteLine(request);
    std::string line;
    if (!channel_.ReadLine(line)) Unavailable("server closed the connection");
    return line;
  }

 private:
  int fd_;
  FdLineChannel channel_;
};

class ProcessTransport final : public Transport {
 public:
  ProcessTransport(pid_t pid, int to_child, int from_child)
      : pid_(pid),
        to_child_(to_child),
        from_child_(from_child),
        channel_(from_child, to_child) {}
  ~ProcessTransport() override {
    ::close(to_child_);
    ::close(from_child_);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }

  std::string RoundTrip(const std::string& request) override {
    channel_.WriteLine(request);
    std::string line;
    if (!channel_.ReadLine(line)) Unavailable("child process exited");
    return line;
  }

 private:
  pid_t pid_;
  int to_child_;
  int from_child_;
  FdLineChannel channel_;
};

sockaddr_un SocketAddress(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    throw Error(ErrorCode::kInvalidArgument, "socket path too long: " + path);
  }
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

void IgnoreSigpipe() { std::signal(SIGPIPE, SIG_IGN); }

ErrorCode CodeFromName(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kIo); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (ErrorCodeName(code) == name) return code;
  }
  return ErrorCode::kRemoteUnavailable;
}

Json InputToJson(const AugmentedInput& input, std::span<const TokenId> prefix) {
  Json j{{"prompt", input.prompt},
         {"prefix", std::vector<TokenId>(prefix.begin(), prefix.end())}};
  if (input.image) j["image_b64"] = EncodeBase64(EncodePng(*input.image));
  return j;
}

AugmentedInput InputFromJson(const Json& j) {
  AugmentedInput input;
  input.prompt = j.value("prompt", std::string());
  if (j.contains("image_b64")) {
    input.image = DecodeImage(DecodeBase64(j.at("image_b64").get<std::string>()));
  }
  return input;
}

}  // namespace

std::unique_ptr<Transport> ConnectUnixSocket(const std::string& path) {
  IgnoreSigpipe();
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) Unavailable("socket() failed");
  const sockaddr_un addr = SocketAddress(path);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    Unavailable("cannot connect to " + path + ": " + std::strerror(errno));
  }
  return std::make_unique<UnixSocketTransport>(fd);
}

std::unique_ptr<Transport> SpawnProcess(const std::string& command) {
  IgnoreSigpipe();
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) Unavailable("pipe() failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    Unavailable("pipe() failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) Unavailable("fork() failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<ProcessTransport>(pid, to_child[1], from_child[0]);
}

std::unique_ptr<Transport> OpenEndpoint(const std::string& endpoint) {
  if (endpoint.rfind("unix:", 0) == 0) return ConnectUnixSocket(endpoint.substr(5));
  if (endpoint.rfind("exec:", 0) == 0) return SpawnProcess(endpoint.substr(5));
  throw Error(ErrorCode::kModelUnavailable,
              "endpoint must start with unix: or exec:, got '" + endpoint + "'");
}

RemoteGenerator::RemoteGenerator(std::unique_ptr<Transport> transport)
    : transport_(std::move(transport)) {
  const Json info = Call(Json{{"op", "info"}}).at("info");
  vocab_ = Vocabulary(info.at("vocab").get<std::vector<std::string>>(),
                      info.value("eos", 0));
  num_layers_ = info.value("num_layers", 1);
  hidden_dim_ = info.value("hidden_dim", 0);
  hidden_states_ = info.value("hidden_states", false);
  context_limit_ = info.value("context_limit", std::size_t{4096});
}

Json RemoteGenerator::Call(const Json& request) {
  std::string line;
  {
    std::lock_guard<std::mutex> lock(mu_);
    line = transport_->RoundTrip(request.dump());
  }
  Json response;
  try {
    response = Json::parse(line);
  } catch (const Json::exception& e) {
    Unavailable(std::string("malformed response: ") + e.what());
  }
  if (response.contains("error")) {
    const ErrorCode code =
        CodeFromName(response.value("code", std::string("REMOTE_UNAVAILABLE")));
    throw Error(code, "remote: " + response.at("error").get<std::string>());
  }
  return response;
}

TokenDistribution RemoteGenerator::Step(const AugmentedInput& input,
                                        std::span<const TokenId> prefix) {
  CheckPrefix(prefix);
  Json req = InputToJson(input, prefix);
  req["op"] = "step";
  auto probs = Call(req).at("probs").get<std::vector<double>>();
  if (static_cast<int>(probs.size()) != vocab_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "remote returned wrong vocab size");
  }
  return TokenDistribution::Validate(std::move(probs));
}

std::vector<double> RemoteGenerator::StepHidden(const AugmentedInput& input,
                                                std::span<const TokenId> prefix,
                                                int layer) {
  RequireHiddenStates();
  CheckPrefix(prefix);
  Json req = InputToJson(input, prefix);
  req["op"] = "step_hidden";
  req["layer"] = layer;
  return Call(req).at("hidden").get<std::vector<double>>();
}

TokenDistribution RemoteGenerator::ResumeFromHidden(
    std::span<const double> hidden, int layer) {
  RequireHiddenStates();
  Json req{{"op", "resume"},
           {"layer", layer},
           {"hidden", std::vector<double>(hidden.begin(), hidden.end())}};
  return TokenDistribution::Validate(
      Call(req).at("probs").get<std::vector<double>>());
}

std::string HandleRequestLine(Generator& g, const std::string& line) {
  try {
    const Json req = Json::parse(line);
    const std::string op = req.at("op").get<std::string>();
    if (op == "info") {
      return Json{{"info",
                   {{"vocab", g.vocabulary().tokens()},
                    {"eos", g.vocabulary().eos()},
                    {"num_layers", g.num_layers()},
                    {"hidden_dim", g.hidden_dim()},
                    {"hidden_states", g.capabilities().hidden_states},
                    {"context_limit", g.context_limit()}}}}
          .dump();
    }
    if (op == "step") {
      const auto prefix = req.value("prefix", TokenSequence{});
      return Json{{"probs", g.Step(InputFromJson(req), prefix).vector()}}.dump();
    }
    if (op == "step_hidden") {
      const auto prefix = req.value("prefix", TokenSequence{});
      return Json{{"hidden", g.StepHidden(InputFromJson(req), prefix,
                                          req.at("layer").get<int>())}}
          .dump();
    }
    if (op == "resume") {
      const auto hidden = req.at("hidden").get<std::vector<double>>();
      return Json{{"probs", g.ResumeFromHidden(hidden, req.at("layer").get<int>())
                                .vector()}}
          .dump();
    }
    return Json{{"error", "unknown op '" + op + "'"},
                {"code", ErrorCodeName(ErrorCode::kInvalidArgument)}}
        .dump();
  } catch (const Error& e) {
    return Json{{"error", e.what()}, {"code", ErrorCodeName(e.code())}}.dump();
  } catch (const std::exception& e) {
    return Json{{"error", e.what()},
                {"code", ErrorCodeName(ErrorCode::kInvalidArgument)}}
        .dump();
  }
}

void ServeStream(Generator& g, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << HandleRequestLine(g, line) << '\n' << std::flush;
  }
}

void ServeUnixSocket(Generator& g, const std::string& path,
                     int max_connections) {
  IgnoreSigpipe();
  const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listener < 0) Unavailable("socket() failed");
  ::unlink(path.c_str());
  const sockaddr_un addr = SocketAddress(path);
  if (::bind(listener, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listener, 4) != 0) {
    ::close(listener);
    Unavailable("cannot listen on " + path + ": " + std::strerror(errno));
  }
  for (int served = 0; max_connections == 0 || served < max_connections; ++served) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    FdLineChannel channel(fd, fd);
    std::string line;
    try {
      while (channel.ReadLine(line)) {
        if (line.empty()) continue;
        channel.WriteLine(HandleRequestLine(g, line));
      }
    } catch (const Error&) {
      // Peer went away mid-line; move on to the next connection.
    }
    ::close(fd);
  }
  ::close(listener);
  ::unlink(path.c_str());
}

}  // namespace ttscale
