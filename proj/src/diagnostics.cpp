#include "grwalk/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace grwalk {
namespace {

std::mutex sink_mutex;

WarningSink& current_sink() {
  static WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return sink;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (current_sink()) current_sink()(message);
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex);
  auto previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

WarningCapture::WarningCapture()
    : previous_(set_warning_sink([this](std::string_view m) { messages_.emplace_back(m); })) {}

WarningCapture::~WarningCapture() { set_warning_sink(std::move(previous_)); }

bool WarningCapture::contains(std::string_view fragment) const {
  for (const auto& m : messages_)
    if (m.find(fragment) != std::string::npos) return true;
  return false;
}

}  // namespace grwalk
