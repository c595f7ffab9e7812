#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace capshare::netconf {

class FramingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kEndOfMessage = "]]>]]>";
inline constexpr std::size_t kMaxChunkSize = 4294967295u;

enum class Framing { end_of_message, chunked };

/// Chunked framing. `max_chunk` splits long messages into several chunks;
/// 0 puts the whole message in one. Throws std::invalid_argument on an empty
/// message, which chunked framing cannot express.
std::string encode_chunked(std::string_view message, std::size_t max_chunk = 0);

/// Incremental chunked-frame decoder. Bytes of an incomplete frame are kept
/// for the next feed(). After a FramingError the decoder stays failed.
class ChunkedDecoder {
public:
    std::vector<std::string> feed(std::string_view bytes);
    bool idle() const { return state_ == State::frame_start && pending_.empty() && message_.empty(); }

private:
    enum class State { frame_start, header, data, failed };
    [[noreturn]] void fail(const std::string &why);

    State state_ = State::frame_start;
    std::string pending_;
    std::string message_;
    std::size_t remaining_ = 0;
};

/// Decodes a complete byte string; throws FramingError on malformed input or
/// an unterminated trailing frame.
std::vector<std::string> decode_chunked(std::string_view stream);

std::string encode_end_of_message(std::string_view message);

class EndOfMessageDecoder {
public:
    std::vector<std::string> feed(std::string_view bytes);
    bool idle() const { return buffer_.empty(); }
    // Bytes received after the last delimiter.
    std::string take_remainder();

private:
    std::string buffer_;
};

} // namespace capshare::netconf
