#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "capshare/pm/report.hpp"

namespace capshare::pm {

struct FileReadyNotification {
    std::string file_location;
    std::uint64_t file_size = 0;
    TimePoint ready_time{};

    bool operator==(const FileReadyNotification &) const = default;
};

/// {"file_location": ..., "file_size": ..., "ready_time": "<ISO 8601>"}
std::string to_json(const FileReadyNotification &n);
/// Throws PmFormatError on a malformed body.
FileReadyNotification parse_notification(std::string_view body);

} // namespace capshare::pm
