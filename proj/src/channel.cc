// Copyright 2026 The closedie Authors.
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

#include "closedie/channel.h"

#include <csignal>
#include <cerrno>
#include <cstring>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "closedie/errors.h"

namespace closedie {

namespace {

void WriteAll(int fd, const std::string &data) {
  size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(std::string("scorer write failed: ") + std::strerror(errno));
    }
    done += static_cast<size_t>(n);
  }
}

// A closed pipe must surface as an error, not kill the process.
void IgnoreSigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

}  // namespace

std::string LineChannel::Roundtrip(const std::string &request) {
  std::lock_guard<std::mutex> lock(mu_);
  WriteLine(request);
  return ReadLine();
}

bool FdLineReader::ReadLine(std::string *line) {
  while (true) {
    size_t pos = buffer_.find('\n');
    if (pos != std::string::npos) {
      line->assign(buffer_, 0, pos);
      buffer_.erase(0, pos + 1);
      if (!line->empty() && line->back() == '\r') line->pop_back();
      return true;
    }
    char chunk[4096];
    ssize_t n = ::read(fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(std::string("scorer read failed: ") + std::strerror(errno));
    }
    if (n == 0) return false;
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

ProcessChannel::ProcessChannel(const std::string &command) {
  IgnoreSigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw ScorerError("pipe() failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ScorerError("pipe() failed");
  }
  pid_t pid = ::fork();
  if (pid < 0) throw ScorerError("fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  pid_ = pid;
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  reader_ = std::make_unique<FdLineReader>(from_child_);
}

ProcessChannel::~ProcessChannel() {
  // Closing stdin asks a well-behaved scorer to exit.
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

void ProcessChannel::WriteLine(const std::string &line) {
  WriteAll(to_child_, line + "\n");
}

std::string ProcessChannel::ReadLine() {
  std::string line;
  if (!reader_->ReadLine(&line)) throw ScorerError("scorer process closed its output");
  return line;
}

TcpChannel::TcpChannel(const std::string &address) {
  IgnoreSigpipe();
  size_t colon = address.rfind(':');
  if (colon == std::string::npos) {
    throw ScorerError("tcp address must be host:port, got \"" + address + "\"");
  }
  std::string host = address.substr(0, colon);
  std::string port = address.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo *res = nullptr;
  int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) {
    throw ScorerError("cannot resolve " + address + ": " + ::gai_strerror(rc));
  }
  for (addrinfo *ai = res; ai != nullptr; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw ScorerError("cannot connect to " + address);
  reader_ = std::make_unique<FdLineReader>(fd_);
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::WriteLine(const std::string &line) { WriteAll(fd_, line + "\n"); }

std::string TcpChannel::ReadLine() {
  std::string line;
  if (!reader_->ReadLine(&line)) throw ScorerError("scorer connection closed");
  return line;
}

std::unique_ptr<LineChannel> OpenChannel(const std::string &address) {
  if (address.rfind("exec:", 0) == 0) {
    return std::make_unique<ProcessChannel>(address.substr(5));
  }
  if (address.rfind("tcp:", 0) == 0) {
    return std::make_unique<TcpChannel>(address.substr(4));
  }
  return nullptr;
}

}  // namespace closedie
