#pragma once

#include <atomic>
#include <csignal>

namespace capshare::tools {

inline std::atomic<bool> g_stop{false};

inline void install_stop_handlers() {
    auto on_signal = [](int) { g_stop = true; };
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::signal(SIGPIPE, SIG_IGN);
}

} // namespace capshare::tools
