#pragma once

#include <sstream>
#include <string>

namespace scuc::log {

enum class Level { none = 0, error = 1, warn = 2, info = 3, debug = 4 };

/// Active level, initialized once from the SCUC_LOG environment variable
/// (none|error|warn|info|debug; default info).
Level level();
void set_level(Level lv);

bool enabled(Level lv);
void write(Level lv, const std::string& message);

namespace detail {
template <typename... Args>
std::string concat(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}
}  // namespace detail

template <typename... Args>
void error(Args&&... args) {
    if (enabled(Level::error)) write(Level::error, detail::concat(std::forward<Args>(args)...));
}
template <typename... Args>
void warn(Args&&... args) {
    if (enabled(Level::warn)) write(Level::warn, detail::concat(std::forward<Args>(args)...));
}
template <typename... Args>
void info(Args&&... args) {
    if (enabled(Level::info)) write(Level::info, detail::concat(std::forward<Args>(args)...));
}
template <typename... Args>
void debug(Args&&... args) {
    if (enabled(Level::debug)) write(Level::debug, detail::concat(std::forward<Args>(args)...));
}

}  // namespace scuc::log
