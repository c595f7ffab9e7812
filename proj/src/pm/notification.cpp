#include "capshare/pm/notification.hpp"

#include <nlohmann/json.hpp>

namespace capshare::pm {

std::string to_json(const FileReadyNotification &n) {
    return nlohmann::json{{"file_location", n.file_location},
                          {"file_size", n.file_size},
                          {"ready_time", format_iso8601(n.ready_time)}}
        .dump();
}

FileReadyNotification parse_notification(std::string_view body) {
    try {
        const auto j = nlohmann::json::parse(body);
        FileReadyNotification n;
        n.file_location = j.at("file_location").get<std::string>();
        n.file_size = j.at("file_size").get<std::uint64_t>();
        n.ready_time = parse_iso8601(j.at("ready_time").get<std::string>());
        if (n.file_location.empty()) throw PmFormatError("empty file_location");
        return n;
    } catch (const nlohmann::json::exception &e) {
        throw PmFormatError(std::string("malformed file-ready notification: ") + e.what());
    }
}

} // namespace capshare::pm
