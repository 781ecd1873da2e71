#include "swarm/embedding_client.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "swarm/byte_io.hpp"
#include "swarm/error.hpp"
#include "swarm/text.hpp"

extern char** environ;

namespace swarm {

namespace {

// A dead peer must surface as EPIPE, not kill the process.
void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string errno_text() { return std::strerror(errno); }

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

}  // namespace

EmbeddingEndpoint EmbeddingEndpoint::parse(const std::string& spec) {
    EmbeddingEndpoint ep;
    const std::string_view s = text::trim(spec);
    constexpr std::string_view tcp = "tcp://";
    constexpr std::string_view exec = "exec:";
    if (s.starts_with(tcp)) {
        const std::string_view addr = s.substr(tcp.size());
        const auto colon = addr.rfind(':');
        long long port = 0;
        if (colon == std::string_view::npos || colon == 0 || !text::parse_int(addr.substr(colon + 1), port) ||
            port <= 0 || port > 65535) {
            throw ConfigError("invalid tcp endpoint '" + spec + "': expected tcp://host:port");
        }
        ep.transport = Transport::tcp;
        ep.host = std::string(addr.substr(0, colon));
        ep.port = static_cast<std::uint16_t>(port);
        return ep;
    }
    const std::string_view cmd = s.starts_with(exec) ? text::trim(s.substr(exec.size())) : s;
    if (cmd.empty()) throw ConfigError("empty embedding endpoint command");
    ep.transport = Transport::subprocess;
    ep.command = std::string(cmd);
    return ep;
}

std::string EmbeddingEndpoint::describe() const {
    if (transport == Transport::tcp) return "tcp://" + host + ":" + std::to_string(port);
    return "exec:" + command;
}

EmbeddingSession::EmbeddingSession(const EmbeddingEndpoint& endpoint, StackShape shape,
                                   std::chrono::milliseconds timeout)
    : shape_(shape), timeout_(timeout), peer_(endpoint.describe()) {
    if (shape.channels <= 0 || shape.channels > 255 || shape.height <= 0 || shape.height > 65535 ||
        shape.width <= 0 || shape.width > 65535) {
        throw ValidationError("stack shape does not fit the handshake fields");
    }
    ignore_sigpipe();
    if (endpoint.transport == EmbeddingEndpoint::Transport::tcp) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* found = nullptr;
        const int rc = ::getaddrinfo(endpoint.host.c_str(), std::to_string(endpoint.port).c_str(), &hints, &found);
        if (rc != 0) throw TransportError(peer_ + ": cannot resolve host: " + ::gai_strerror(rc));
        int fd = -1;
        for (addrinfo* ai = found; ai; ai = ai->ai_next) {
            fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
            ::close(fd);
            fd = -1;
        }
        ::freeaddrinfo(found);
        if (fd < 0) throw TransportError(peer_ + ": connect failed: " + errno_text());
        read_fd_ = fd;
        write_fd_ = fd;
    } else {
        int to_child[2];
        int from_child[2];
        if (::pipe2(to_child, O_CLOEXEC) != 0) throw TransportError(peer_ + ": pipe: " + errno_text());
        if (::pipe2(from_child, O_CLOEXEC) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw TransportError(peer_ + ": pipe: " + errno_text());
        }
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
        const std::string script = "exec " + endpoint.command;
        const char* argv[] = {"/bin/sh", "-c", script.c_str(), nullptr};
        pid_t pid = -1;
        const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(to_child[0]);
        ::close(from_child[1]);
        if (rc != 0) {
            ::close(to_child[1]);
            ::close(from_child[0]);
            throw TransportError(peer_ + ": spawn failed: " + std::strerror(rc));
        }
        child_pid_ = pid;
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
    }

    ByteWriter hello;
    hello.chars({kEmbedMagic.data(), kEmbedMagic.size()});
    hello.u16(kEmbedVersion);
    hello.u8(static_cast<std::uint8_t>(shape.channels));
    hello.u16(static_cast<std::uint16_t>(shape.height));
    hello.u16(static_cast<std::uint16_t>(shape.width));
    send_all(hello.data());

    std::array<std::uint8_t, 10> reply{};
    recv_all(reply);
    ByteReader r(reply);
    if (r.chars(4) != std::string(kEmbedMagic.data(), kEmbedMagic.size())) {
        close();
        throw HandshakeError(peer_ + ": bad handshake magic");
    }
    server_version_ = r.u16();
    dim_ = r.u32();
    if (server_version_ != kEmbedVersion) {
        close();
        throw HandshakeError(peer_ + ": unsupported protocol version " + std::to_string(server_version_));
    }
    if (dim_ == 0 || dim_ > (1u << 20)) {
        close();
        throw HandshakeError(peer_ + ": implausible embedding dimension " + std::to_string(dim_));
    }
}

EmbeddingSession::~EmbeddingSession() { close(); }

void EmbeddingSession::close() noexcept {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0 && read_fd_ != write_fd_) ::close(read_fd_);
    read_fd_ = write_fd_ = -1;
    if (child_pid_ > 0) {
        // Closing stdin asks a well-behaved server to exit; give it a moment.
        int status = 0;
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(child_pid_, &status, WNOHANG) != 0) {
                child_pid_ = -1;
                return;
            }
            ::usleep(2000);
        }
        ::kill(child_pid_, SIGKILL);
        ::waitpid(child_pid_, &status, 0);
        child_pid_ = -1;
    }
}

void EmbeddingSession::fail_transport(const std::string& what) {
    close();
    throw TransportError(peer_ + ": " + what);
}

void EmbeddingSession::send_all(std::span<const std::uint8_t> data) {
    if (write_fd_ < 0) throw TransportError(peer_ + ": session is closed");
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::size_t sent = 0;
    while (sent < data.size()) {
        pollfd p{write_fd_, POLLOUT, 0};
        const int ready = ::poll(&p, 1, remaining_ms(deadline));
        if (ready < 0 && errno == EINTR) continue;
        if (ready < 0) fail_transport("poll: " + errno_text());
        if (ready == 0) {
            close();
            throw TimeoutError(peer_ + ": timed out sending request");
        }
        const ssize_t n = ::write(write_fd_, data.data() + sent, data.size() - sent);
        if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
        if (n <= 0) fail_transport("write failed: " + errno_text());
        sent += static_cast<std::size_t>(n);
    }
}

void EmbeddingSession::recv_all(std::span<std::uint8_t> data) {
    if (read_fd_ < 0) throw TransportError(peer_ + ": session is closed");
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::size_t got = 0;
    while (got < data.size()) {
        pollfd p{read_fd_, POLLIN, 0};
        const int ready = ::poll(&p, 1, remaining_ms(deadline));
        if (ready < 0 && errno == EINTR) continue;
        if (ready < 0) fail_transport("poll: " + errno_text());
        if (ready == 0) {
            close();
            throw TimeoutError(peer_ + ": timed out waiting for the server");
        }
        const ssize_t n = ::read(read_fd_, data.data() + got, data.size() - got);
        if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
        if (n < 0) fail_transport("read failed: " + errno_text());
        if (n == 0) fail_transport("server closed the connection");
        got += static_cast<std::size_t>(n);
    }
}

std::vector<float> EmbeddingSession::embed_bytes(std::span<const std::uint8_t> stack) {
    if (stack.size() != shape_.bytes()) {
        throw ValidationError("stack has " + std::to_string(stack.size()) + " bytes, session expects " +
                              std::to_string(shape_.bytes()));
    }
    const std::uint64_t id = next_id_++;
    ByteWriter req;
    req.u64(id);
    req.bytes(stack);
    send_all(req.data());

    std::vector<std::uint8_t> reply(8 + 4 * static_cast<std::size_t>(dim_));
    recv_all(reply);
    ByteReader r(reply);
    const std::uint64_t got = r.u64();
    if (got != id) {
        close();
        throw ResponseIdError(id, got);
    }
    std::vector<float> out(dim_);
    for (auto& v : out) {
        v = r.f32();
        if (!std::isfinite(v)) {
            close();
            throw EmbeddingError(peer_ + ": non-finite value in embedding for request " + std::to_string(id));
        }
    }
    return out;
}

BehaviorVector learned_embed(const FrameStack& stack, EmbeddingSession& session) {
    const StackShape shape{FrameStack::kChannels, stack.height(), stack.width()};
    if (!(shape == session.shape())) {
        throw ValidationError("frame stack is " + std::to_string(shape.height) + "x" + std::to_string(shape.width) +
                              ", session expects " + std::to_string(session.shape().height) + "x" +
                              std::to_string(session.shape().width));
    }
    const auto values = session.embed_bytes(stack.bytes());
    return {Backend::learned, std::vector<double>(values.begin(), values.end())};
}

}  // namespace swarm
