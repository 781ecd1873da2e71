#pragma once

#include <cstdint>
#include <string>

namespace stub {

enum class Fault { none, bad_magic, bad_version, bad_id, hang, close, nan };

struct Options {
    std::uint32_t dim = 512;
    Fault fault = Fault::none;
    int fault_at = 0;  // zero-based request index that misbehaves
};

Fault parse_fault(const std::string& name);

// Speaks the embedding protocol on a pair of file descriptors until EOF.
// Embedding j is the mean byte value of the j-th of `dim` equal chunks of the
// stack, scaled to [0, 1]: a pooled thumbnail, so it is deterministic and
// still separates different frames. Returns 0 on clean EOF.
int serve(int in_fd, int out_fd, const Options& options);

// Listens on 127.0.0.1 (ephemeral port) and serves one connection on a
// background thread. Returns the port.
int serve_tcp_once(const Options& options);

}  // namespace stub
