// Stand-in encoder for tests: speaks the embedding protocol on stdin/stdout.
//   embed_stub [--dim N] [--fault NAME] [--fault-at I]

#include <cstdio>
#include <cstdlib>
#include <string>

#include <unistd.h>

#include "stub_server.hpp"

int main(int argc, char** argv) {
    stub::Options o;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--dim") {
            o.dim = static_cast<std::uint32_t>(std::strtoul(argv[i + 1], nullptr, 10));
        } else if (flag == "--fault") {
            o.fault = stub::parse_fault(argv[i + 1]);
        } else if (flag == "--fault-at") {
            o.fault_at = std::atoi(argv[i + 1]);
        } else {
            std::fprintf(stderr, "embed_stub: unknown flag %s\n", flag.c_str());
            return 64;
        }
    }
    return stub::serve(STDIN_FILENO, STDOUT_FILENO, o);
}
