#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarm/behavior.hpp"
#include "swarm/capture.hpp"

namespace swarm {

// Embedding wire protocol v1, little-endian.
//   handshake  client: "SWEM" u16 version u8 channels u16 height u16 width
//              server: "SWEM" u16 version u32 dim
//   request    u64 id, channels*height*width bytes
//   response   u64 id, dim x f32
inline constexpr std::array<char, 4> kEmbedMagic = {'S', 'W', 'E', 'M'};
inline constexpr std::uint16_t kEmbedVersion = 1;

// Where the encoder lives. Accepted forms:
//   tcp://host:port          TCP connection
//   exec:<shell command>     child process speaking on stdin/stdout
//   <shell command>          same as exec:
struct EmbeddingEndpoint {
    enum class Transport { subprocess, tcp };
    Transport transport = Transport::subprocess;
    std::string command;  // subprocess
    std::string host;     // tcp
    std::uint16_t port = 0;

    // Throws ConfigError for an empty command or a malformed tcp address.
    static EmbeddingEndpoint parse(const std::string& spec);
    std::string describe() const;
};

struct StackShape {
    int channels = FrameStack::kChannels;
    int height = kFrameSize;
    int width = kFrameSize;
    std::size_t bytes() const noexcept {
        return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    friend bool operator==(const StackShape&, const StackShape&) = default;
};

// One sequential request/response channel. The handshake runs in the
// constructor; the embedding dimension is fixed for the life of the session.
// Failures: TransportError (spawn/connect/IO), HandshakeError, ResponseIdError,
// TimeoutError, and EmbeddingError for non-finite values. After any failure
// the session is closed and further calls throw TransportError.
class EmbeddingSession {
public:
    EmbeddingSession(const EmbeddingEndpoint& endpoint, StackShape shape,
                     std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~EmbeddingSession();
    EmbeddingSession(const EmbeddingSession&) = delete;
    EmbeddingSession& operator=(const EmbeddingSession&) = delete;

    std::uint32_t dim() const noexcept { return dim_; }
    std::uint16_t server_version() const noexcept { return server_version_; }
    const StackShape& shape() const noexcept { return shape_; }
    bool is_open() const noexcept { return write_fd_ >= 0; }

    // Raw stack bytes, channel-major. Throws ValidationError if the size does
    // not match the handshake shape (nothing is sent).
    std::vector<float> embed_bytes(std::span<const std::uint8_t> stack);
    void close() noexcept;

private:
    void send_all(std::span<const std::uint8_t> data);
    void recv_all(std::span<std::uint8_t> data);
    [[noreturn]] void fail_transport(const std::string& what);

    StackShape shape_;
    std::chrono::milliseconds timeout_;
    int read_fd_ = -1;
    int write_fd_ = -1;
    int child_pid_ = -1;
    std::uint32_t dim_ = 0;
    std::uint16_t server_version_ = 0;
    std::uint64_t next_id_ = 1;
    std::string peer_;
};

// Throws ValidationError when the stack shape differs from the session's.
BehaviorVector learned_embed(const FrameStack& stack, EmbeddingSession& session);

}  // namespace swarm
