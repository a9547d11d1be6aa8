#include "drocal/errors.hpp"

#include <atomic>
#include <cstdio>

namespace drocal {

namespace {
std::atomic<bool> warnings_enabled{true};
}

void warn(const std::string& message) {
    if (warnings_enabled.load()) {
        std::fprintf(stderr, "warning: %s\n", message.c_str());
    }
}

void set_warnings_enabled(bool enabled) { warnings_enabled.store(enabled); }

} // namespace drocal
