#include "ww/agents/line_process.h"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <pthread.h>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "ww/core/errors.h"

namespace ww::agents {

LineProcess::LineProcess(const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& env) {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  int err_pipe[2];  // exec-failure report, CLOEXEC
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw AgentProtocolError("pipe() failed: " + std::string(std::strerror(errno)));
  }
  fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

  const pid_t pid = fork();
  if (pid < 0) {
    throw AgentProtocolError("fork() failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    setpgid(0, 0);  // own process group, so teardown reaches grandchildren
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    for (const auto& [k, v] : env) setenv(k.c_str(), v.c_str(), 1);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    const int err = errno;
    ssize_t ignored = write(err_pipe[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }

  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  int exec_errno = 0;
  const ssize_t n = read(err_pipe[0], &exec_errno, sizeof exec_errno);
  close(err_pipe[0]);
  if (n > 0) {
    shutdown();
    throw AgentProtocolError("cannot start agent command '" + command +
                             "': " + std::strerror(exec_errno));
  }
}

LineProcess::~LineProcess() {
  shutdown();
}

void LineProcess::shutdown() {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);  // whole process group
    kill(pid_, SIGKILL);
    if (!reaped_) {
      int status = 0;
      waitpid(pid_, &status, 0);
      reaped_ = true;
    }
    pid_ = -1;
  }
}

std::optional<int> LineProcess::poll_exit_status() {
  if (reaped_) return exit_status_;
  if (pid_ <= 0) return std::nullopt;
  int status = 0;
  const pid_t r = waitpid(pid_, &status, WNOHANG);
  if (r == pid_) {
    reaped_ = true;
    exit_status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return exit_status_;
  }
  return std::nullopt;
}

bool LineProcess::write_line(const std::string& line) {
  if (to_child_ < 0) return false;

  // A child may exit between our poll and this write; keep the resulting
  // SIGPIPE on this thread and swallow it so it surfaces as EPIPE.
  sigset_t pipe_set;
  sigset_t old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);

  std::string payload = line;
  payload.push_back('\n');
  std::size_t written = 0;
  bool ok = true;
  while (written < payload.size()) {
    const ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
    if (n <= 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    written += static_cast<std::size_t>(n);
  }

  if (!ok) {
    timespec zero{0, 0};
    sigtimedwait(&pipe_set, nullptr, &zero);  // consume a pending SIGPIPE, if any
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  return ok;
}

std::optional<std::string> LineProcess::read_line(double timeout_seconds) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_seconds));
  while (true) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (from_child_ < 0) return std::nullopt;

    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return std::nullopt;
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();

    pollfd pfd{from_child_, POLLIN, 0};
    const int pr = poll(&pfd, 1, static_cast<int>(std::max<long long>(1, left)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      return std::nullopt;
    }
    if (pr == 0) return std::nullopt;  // timeout

    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      return std::nullopt;
    }
    if (n == 0) {  // EOF; return a final unterminated line if present
      if (!buffer_.empty()) {
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace ww::agents
