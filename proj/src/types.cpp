#include "drocal/types.hpp"

#include <cmath>

#include "drocal/errors.hpp"

namespace drocal {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) {
        throw DomainError("box bounds have mismatched dimensions");
    }
    if (lower.empty()) {
        throw DomainError("box must have at least one dimension");
    }
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!std::isfinite(lower[d]) || !std::isfinite(upper[d])) {
            throw DomainError("box bounds must be finite");
        }
        if (!(lower[d] < upper[d])) {
            throw DomainError("box has empty or degenerate width in dimension " +
                              std::to_string(d));
        }
    }
}

bool Box::contains(const Vector& point) const {
    if (point.size() != lower.size()) return false;
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!(point[d] >= lower[d] && point[d] <= upper[d])) return false;
    }
    return true;
}

void Trajectory::validate() const {
    if (channels.empty()) throw DomainError("trajectory has no channels");
    const std::size_t len = channels.front().size();
    if (len < 2) throw DomainError("trajectory must contain at least 2 samples");
    for (const auto& ch : channels) {
        if (ch.size() != len) throw DomainError("trajectory channels differ in length");
        for (double v : ch) {
            if (!std::isfinite(v)) throw DomainError("trajectory contains non-finite value");
        }
    }
    if (!(dt > 0.0)) throw DomainError("trajectory sampling interval must be positive");
}

} // namespace drocal
