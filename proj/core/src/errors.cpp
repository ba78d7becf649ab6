#include "torusgas/errors.hpp"

#include <spdlog/spdlog.h>

namespace torusgas {

namespace {
thread_local WarningCapture* active_capture = nullptr;
}

void warn(const std::string& code, const std::string& message) {
  spdlog::warn("[{}] {}", code, message);
  if (active_capture) active_capture->record({code, message});
}

WarningCapture::WarningCapture() : previous_(active_capture) { active_capture = this; }

WarningCapture::~WarningCapture() { active_capture = previous_; }

bool WarningCapture::contains(const std::string& code) const {
  for (const auto& w : warnings_)
    if (w.code == code) return true;
  return false;
}

}  // namespace torusgas
