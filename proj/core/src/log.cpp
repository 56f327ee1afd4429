#include "scuc/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace scuc::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("SCUC_LOG");
    if (!env) return Level::info;
    if (std::strcmp(env, "none") == 0 || std::strcmp(env, "off") == 0) return Level::none;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::info;
}

std::atomic<int> g_level{-1};
std::mutex g_write_mutex;

const char* tag(Level lv) {
    switch (lv) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
        default: return "?";
    }
}

}  // namespace

Level level() {
    int lv = g_level.load(std::memory_order_relaxed);
    if (lv < 0) {
        lv = static_cast<int>(parse_env());
        g_level.store(lv, std::memory_order_relaxed);
    }
    return static_cast<Level>(lv);
}

void set_level(Level lv) { g_level.store(static_cast<int>(lv), std::memory_order_relaxed); }

bool enabled(Level lv) { return static_cast<int>(lv) <= static_cast<int>(level()); }

void write(Level lv, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_write_mutex);
    std::fprintf(stderr, "[scuc:%s] %s\n", tag(lv), message.c_str());
}

}  // namespace scuc::log
