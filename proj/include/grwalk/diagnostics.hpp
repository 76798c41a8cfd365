#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace grwalk {

// Non-fatal conditions (no spectral gap, clamped eigenvalues, ...) are routed
// through a process-wide sink. The default sink prints to stderr.
using WarningSink = std::function<void(std::string_view)>;

void warn(std::string_view message);
WarningSink set_warning_sink(WarningSink sink);

/// Collects warnings for the lifetime of the object, restoring the previous sink afterwards.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(std::string_view fragment) const;

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

}  // namespace grwalk
