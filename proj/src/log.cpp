#include "perifix/log.hpp"

#include <iostream>
#include <mutex>

namespace perifix {

namespace {

WarningSink& sink() {
    static WarningSink s = [](std::string_view m) { std::cerr << "warning: " << m << '\n'; };
    return s;
}

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void set_warning_sink(WarningSink s) { sink() = std::move(s); }

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) sink()(message);
}

}  // namespace perifix
