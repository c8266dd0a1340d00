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

#ifndef CLOSEDIE_CHANNEL_H_
#define CLOSEDIE_CHANNEL_H_

#include <memory>
#include <mutex>
#include <string>

namespace closedie {

// Newline-delimited request/response transport. One request line is
// answered by exactly one response line, in order. Implementations are not
// thread-safe; Roundtrip() serializes callers.
class LineChannel {
 public:
  virtual ~LineChannel() = default;

  // Sends `request` (without newline) and returns the response line.
  // Throws ScorerError on I/O failure or end of stream.
  std::string Roundtrip(const std::string &request);

 protected:
  virtual void WriteLine(const std::string &line) = 0;
  virtual std::string ReadLine() = 0;

 private:
  std::mutex mu_;
};

// Buffered line reader over a file descriptor.
class FdLineReader {
 public:
  explicit FdLineReader(int fd) : fd_(fd) {}
  // Returns false at end of stream.
  bool ReadLine(std::string *line);

 private:
  int fd_;
  std::string buffer_;
};

// Child process started with "/bin/sh -c <command>", talking over its
// standard input and output. The child is reaped on destruction.
class ProcessChannel : public LineChannel {
 public:
  explicit ProcessChannel(const std::string &command);
  ~ProcessChannel() override;

  ProcessChannel(const ProcessChannel &) = delete;
  ProcessChannel &operator=(const ProcessChannel &) = delete;

 protected:
  void WriteLine(const std::string &line) override;
  std::string ReadLine() override;

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::unique_ptr<FdLineReader> reader_;
};

// TCP client connection to "host:port".
class TcpChannel : public LineChannel {
 public:
  explicit TcpChannel(const std::string &address);
  ~TcpChannel() override;

  TcpChannel(const TcpChannel &) = delete;
  TcpChannel &operator=(const TcpChannel &) = delete;

 protected:
  void WriteLine(const std::string &line) override;
  std::string ReadLine() override;

 private:
  int fd_ = -1;
  std::unique_ptr<FdLineReader> reader_;
};

// Parses a scorer address of the form "exec:<command>" or "tcp:<host:port>".
// Returns null for any other prefix.
std::unique_ptr<LineChannel> OpenChannel(const std::string &address);

}  // namespace closedie

#endif  // CLOSEDIE_CHANNEL_H_
