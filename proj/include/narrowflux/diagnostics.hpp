#pragma once

#include <functional>
#include <string>

namespace narrowflux::diagnostics {

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal conditions (expansion outside its validity range, slow tail
// decay, MC timeouts) are reported here. The default handler prints to stderr.
void warn(const std::string& message);

// Returns the previous handler. Passing an empty handler silences warnings.
WarningHandler set_warning_handler(WarningHandler handler);

// RAII capture of warnings, mostly for tests.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  int count() const { return count_; }
  const std::string& last() const { return last_; }

 private:
  WarningHandler previous_;
  int count_ = 0;
  std::string last_;
};

}  // namespace narrowflux::diagnostics
