#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace phasent {

using WarningHandler = std::function<void(std::string_view)>;

/// Emit a non-fatal diagnostic. Default handler prints to stderr.
void warn(std::string_view message);

/// Replace the process-wide warning handler; returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

/// Collects warnings for the lifetime of the object (tests, report files).
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(std::string_view needle) const;

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace phasent
