// Loopback simulator speaking the line protocol, used by tests and as a
// reference for wiring real external models. Each channel c of the reply is
// the request's a[c] value tiled over all time steps.
//
// Failure-injection flags for protocol tests:
//   --short-channel   emit one value fewer than declared
//   --die             exit without replying to the first request
//   --err             reply "ERR injected failure" to every request
//   --hang            never reply (for timeout tests)

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

int main(int argc, char** argv) {
    bool short_channel = false, die = false, err = false, hang = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--short-channel") short_channel = true;
        else if (arg == "--die") die = true;
        else if (arg == "--err") err = true;
        else if (arg == "--hang") hang = true;
    }

    std::string line;
    while (std::getline(std::cin, line)) {
        if (die) return 3;
        if (hang) {
            std::this_thread::sleep_for(std::chrono::seconds(3600));
        }
        if (err) {
            std::cout << "ERR injected failure\n" << std::flush;
            continue;
        }
        std::istringstream in(line);
        std::string tag;
        long steps = 0;
        double dt = 0.0;
        std::size_t dim_a = 0;
        if (!(in >> tag >> steps >> dt >> dim_a) || tag != "SIM") {
            std::cout << "ERR bad request\n" << std::flush;
            continue;
        }
        std::vector<double> a(dim_a);
        for (auto& v : a) {
            if (!(in >> v)) {
                std::cout << "ERR truncated request\n" << std::flush;
                a.clear();
                break;
            }
        }
        if (a.size() != dim_a) continue;

        const long len = steps + 1;
        std::printf("OK %zu %ld\n", dim_a, len);
        for (std::size_t c = 0; c < dim_a; ++c) {
            const long emit = short_channel ? len - 1 : len;
            for (long t = 0; t < emit; ++t) {
                std::printf(t == 0 ? "%.17g" : " %.17g", a[c]);
            }
            std::printf("\n");
        }
        std::fflush(stdout);
    }
    return 0;
}
