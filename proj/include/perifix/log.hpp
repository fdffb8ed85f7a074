#pragma once

#include <functional>
#include <string_view>

namespace perifix {

using WarningSink = std::function<void(std::string_view)>;

// Default sink writes "warning: ..." lines to stderr. Not synchronized; set once at startup.
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace perifix
