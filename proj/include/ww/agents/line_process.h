#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ww::agents {

// Child process speaking newline-delimited messages over stdin/stdout.
// Construction throws AgentProtocolError when the process cannot be started.
class LineProcess {
 public:
  LineProcess(const std::string& command,
              const std::vector<std::pair<std::string, std::string>>& env);
  ~LineProcess();

  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // False when the child's stdin is gone.
  bool write_line(const std::string& line);

  // One line without the trailing newline; nullopt on timeout or EOF.
  std::optional<std::string> read_line(double timeout_seconds);

  // Exit status when the child has already terminated (nonblocking).
  std::optional<int> poll_exit_status();

 private:
  void shutdown();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool reaped_ = false;
  int exit_status_ = -1;
  std::string buffer_;
};

}  // namespace ww::agents
