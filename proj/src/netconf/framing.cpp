#include "capshare/netconf/framing.hpp"

#include <charconv>
#include <utility>

namespace capshare::netconf {

std::string encode_chunked(std::string_view message, std::size_t max_chunk) {
    if (message.empty()) throw std::invalid_argument("chunked framing needs a non-empty message");
    if (max_chunk == 0 || max_chunk > kMaxChunkSize) max_chunk = kMaxChunkSize;
    std::string out;
    out.reserve(message.size() + 32);
    for (std::size_t off = 0; off < message.size(); off += max_chunk) {
        const auto piece = message.substr(off, max_chunk);
        out += "\n#";
        out += std::to_string(piece.size());
        out += '\n';
        out += piece;
    }
    out += "\n##\n";
    return out;
}

void ChunkedDecoder::fail(const std::string &why) {
    state_ = State::failed;
    pending_.clear();
    message_.clear();
    throw FramingError(why);
}

std::vector<std::string> ChunkedDecoder::feed(std::string_view bytes) {
    if (state_ == State::failed) throw FramingError("decoder already failed");
    pending_.append(bytes);
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        if (state_ == State::data) {
            const std::size_t take = std::min(remaining_, pending_.size() - pos);
            message_.append(pending_, pos, take);
            pos += take;
            remaining_ -= take;
            if (remaining_ > 0) break;
            state_ = State::header;
            continue;
        }
        // A header is "\n#" followed by "#\n" (end of frame) or a size and "\n".
        const std::string_view rest(pending_.data() + pos, pending_.size() - pos);
        if (rest.empty()) break;
        if (rest[0] != '\n') fail("expected LF at chunk header");
        if (rest.size() < 2) break;
        if (rest[1] != '#') fail("expected '#' at chunk header");
        if (rest.size() < 3) break;
        if (rest[2] == '#') {
            if (rest.size() < 4) break;
            if (rest[3] != '\n') fail("malformed end-of-chunks marker");
            if (state_ == State::frame_start) fail("frame without chunks");
            out.push_back(std::move(message_));
            message_.clear();
            state_ = State::frame_start;
            pos += 4;
            continue;
        }
        const std::size_t lf = rest.find('\n', 2);
        // chunk-size is at most 10 digits.
        if (lf == std::string_view::npos) {
            if (rest.size() > 2 + 10) fail("chunk size too long");
            for (std::size_t i = 2; i < rest.size(); ++i)
                if (rest[i] < '0' || rest[i] > '9') fail("malformed chunk size");
            break;
        }
        const std::string_view digits = rest.substr(2, lf - 2);
        if (digits.empty() || digits.size() > 10 || digits[0] == '0')
            fail("malformed chunk size");
        std::uint64_t size = 0;
        const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
        if (ec != std::errc{} || end != digits.data() + digits.size() || size > kMaxChunkSize)
            fail("malformed chunk size");
        remaining_ = std::size_t(size);
        state_ = State::data;
        pos += lf + 1;
    }
    pending_.erase(0, pos);
    return out;
}

std::vector<std::string> decode_chunked(std::string_view stream) {
    ChunkedDecoder d;
    auto out = d.feed(stream);
    if (!d.idle()) throw FramingError("truncated chunked frame");
    return out;
}

std::string encode_end_of_message(std::string_view message) {
    std::string out(message);
    out += kEndOfMessage;
    return out;
}

std::vector<std::string> EndOfMessageDecoder::feed(std::string_view bytes) {
    buffer_.append(bytes);
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto at = buffer_.find(kEndOfMessage, start);
        if (at == std::string::npos) break;
        out.push_back(buffer_.substr(start, at - start));
        start = at + kEndOfMessage.size();
    }
    buffer_.erase(0, start);
    return out;
}

std::string EndOfMessageDecoder::take_remainder() { return std::exchange(buffer_, {}); }

} // namespace capshare::netconf
