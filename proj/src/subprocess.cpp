// Copyright 2026 The podcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "podcurate/subprocess.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

#include "podcurate/error.hpp"

extern char** environ;

namespace podcurate {

namespace {

// A child that exits before reading all input must not kill us.
void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input) {
  if (argv.empty()) throw Error("empty command");
  ignore_sigpipe();

  int in_fds[2], out_fds[2];
  if (::pipe2(in_fds, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  Fd in_read(in_fds[0]), in_write(in_fds[1]);
  if (::pipe2(out_fds, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  Fd out_read(out_fds[0]), out_write(out_fds[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_read.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_write.get(), STDOUT_FILENO);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw Error("cannot start '" + argv[0] + "': " + std::strerror(rc));
  in_read.reset();
  out_write.reset();

  // Write on a separate thread so a chatty child cannot deadlock us.
  std::thread writer([&] {
    const char* p = input.data();
    std::size_t left = input.size();
    while (left > 0) {
      const ssize_t n = ::write(in_write.get(), p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        break;  // child closed its stdin
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    in_write.reset();
  });

  ProcessResult result;
  char buf[65536];
  for (;;) {
    const ssize_t n = ::read(out_read.get(), buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    result.output.append(buf, static_cast<std::size_t>(n));
  }
  writer.join();

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw Error(std::string("waitpid: ") + std::strerror(errno));
  }
  if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.exit_code = WTERMSIG(status);
  } else {
    result.exit_code = WEXITSTATUS(status);
  }
  return result;
}

SubprocessAnnotator::SubprocessAnnotator(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw Error("subprocess adapter needs a command");
}

AnnotationBatchResult SubprocessAnnotator::annotate(std::span<const SegmentInput> batch) {
  std::string input;
  for (const auto& in : batch) {
    Json line = {{"segment_id", in.record->segment_id},
                 {"audio_path", in.source ? in.source->uri : std::string()},
                 {"start_s", in.record->start_s},
                 {"end_s", in.record->end_s}};
    input += line.dump();
    input += '\n';
  }
  const ProcessResult proc = run_process(argv_, input);
  if (proc.signaled) {
    throw Error("adapter '" + argv_[0] + "' killed by signal " + std::to_string(proc.exit_code));
  }
  if (proc.exit_code != 0) {
    throw Error("adapter '" + argv_[0] + "' exited with status " + std::to_string(proc.exit_code));
  }

  AnnotationBatchResult out;
  std::istringstream lines(proc.output);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
      SegmentResult r;
      r.segment_id = j.at("segment_id").get<std::string>();
      const std::string status = j.value("status", std::string("done"));
      if (status == "done") {
        const Json fields = j.value("fields", Json::object());
        for (const auto& [k, v] : fields.items()) r.fields[k] = v;
      } else if (status == "failed") {
        r.ok = false;
        r.reason = j.value("reason", std::string("adapter reported failure"));
      } else {
        throw Error("unknown status '" + status + "'");
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error("adapter output line " + std::to_string(lineno) + " is malformed: " + e.what());
    }
  }
  return out;
}

}  // namespace podcurate
