#pragma once

#include <stdexcept>
#include <string>

namespace ww {

// Configuration problems (bad run config, bad ladder, bad flags). CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Infeasible or failed instance generation. CLI exit code 3.
struct GenerationError : std::runtime_error {
  explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// External agent process could not be started or the wire protocol broke down
// at a level that is not a per-episode failure. CLI exit code 4.
struct AgentProtocolError : std::runtime_error {
  explicit AgentProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// An Action referencing unknown ids, used outside the simulator's
// halt-the-episode path (e.g. action_cost on an unknown recipe).
struct InvalidActionError : std::runtime_error {
  explicit InvalidActionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ww
