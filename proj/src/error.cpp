#include "brd/error.hpp"

namespace brd {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Provider: return "provider error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Stale: return "stale cache";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Input: return "input error";
    case ErrorKind::Checkpoint: return "checkpoint error";
    case ErrorKind::Refused: return "refused";
  }
  return "error";
}

}  // namespace brd
