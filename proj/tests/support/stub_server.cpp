#include "stub_server.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace stub {

namespace {

bool read_exact(int fd, void* buf, std::size_t n) {
    auto* p = static_cast<std::uint8_t*>(buf);
    while (n > 0) {
        const ssize_t got = ::read(fd, p, n);
        if (got <= 0) return false;
        p += got;
        n -= static_cast<std::size_t>(got);
    }
    return true;
}

bool write_exact(int fd, const void* buf, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(buf);
    while (n > 0) {
        const ssize_t put = ::write(fd, p, n);
        if (put <= 0) return false;
        p += put;
        n -= static_cast<std::size_t>(put);
    }
    return true;
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
}

template <class T>
T get_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return static_cast<T>(v);
}

}  // namespace

Fault parse_fault(const std::string& name) {
    if (name == "none") return Fault::none;
    if (name == "bad-magic") return Fault::bad_magic;
    if (name == "bad-version") return Fault::bad_version;
    if (name == "bad-id") return Fault::bad_id;
    if (name == "hang") return Fault::hang;
    if (name == "close") return Fault::close;
    if (name == "nan") return Fault::nan;
    throw std::invalid_argument("unknown fault " + name);
}

int serve(int in_fd, int out_fd, const Options& o) {
    std::array<std::uint8_t, 11> hello{};
    if (!read_exact(in_fd, hello.data(), hello.size())) return 1;
    if (std::memcmp(hello.data(), "SWEM", 4) != 0 || get_le<std::uint16_t>(hello.data() + 4) != 1) return 2;
    const std::size_t channels = hello[6];
    const std::size_t height = get_le<std::uint16_t>(hello.data() + 7);
    const std::size_t width = get_le<std::uint16_t>(hello.data() + 9);
    const std::size_t stack = channels * height * width;

    std::vector<std::uint8_t> reply;
    reply.insert(reply.end(), {'S', 'W', 'E', 'M'});
    if (o.fault == Fault::bad_magic) reply[0] = 'X';
    put_le<std::uint16_t>(reply, o.fault == Fault::bad_version ? 2 : 1);
    put_le<std::uint32_t>(reply, o.dim);
    if (!write_exact(out_fd, reply.data(), reply.size())) return 1;

    std::vector<std::uint8_t> request(8 + stack);
    for (int index = 0;; ++index) {
        if (!read_exact(in_fd, request.data(), request.size())) return 0;
        const bool faulty = index == o.fault_at;
        if (faulty && o.fault == Fault::close) return 3;
        if (faulty && o.fault == Fault::hang) {
            std::this_thread::sleep_for(std::chrono::hours(1));
            return 4;
        }
        std::uint64_t id = get_le<std::uint64_t>(request.data());
        if (faulty && o.fault == Fault::bad_id) ++id;
        reply.clear();
        put_le<std::uint64_t>(reply, id);
        const std::uint8_t* pixels = request.data() + 8;
        for (std::uint32_t j = 0; j < o.dim; ++j) {
            const std::size_t lo = stack * j / o.dim;
            const std::size_t hi = std::max(lo + 1, stack * (j + 1) / o.dim);
            double sum = 0.0;
            for (std::size_t b = lo; b < hi && b < stack; ++b) sum += pixels[b];
            float v = static_cast<float>(sum / (255.0 * static_cast<double>(hi - lo)));
            if (faulty && o.fault == Fault::nan && j == 0) v = std::numeric_limits<float>::quiet_NaN();
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            put_le<std::uint32_t>(reply, bits);
        }
        if (!write_exact(out_fd, reply.data(), reply.size())) return 1;
    }
}

int serve_tcp_once(const Options& options) {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw std::runtime_error("socket failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 1) != 0) {
        ::close(listener);
        throw std::runtime_error("bind/listen failed");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
    std::thread([listener, options] {
        const int fd = ::accept(listener, nullptr, nullptr);
        ::close(listener);
        if (fd < 0) return;
        serve(fd, fd, options);
        ::close(fd);
    }).detach();
    return ntohs(addr.sin_port);
}

}  // namespace stub
