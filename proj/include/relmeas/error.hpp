#pragma once

#include <stdexcept>
#include <string>

namespace relmeas {

// All operation failures carry a stable kind tag (e.g. "UnknownRelation",
// "NotInvariant") plus a human-readable witness in the message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

}  // namespace relmeas
