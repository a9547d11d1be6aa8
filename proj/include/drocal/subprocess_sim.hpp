#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "drocal/model.hpp"

namespace drocal {

struct SubprocessSpec {
    std::vector<std::string> argv;
    double timeout_s = 30.0;
    int channels = 1; // channel count the child is expected to produce
};

// Drives a child simulator over stdin/stdout, one request per line:
//   SIM <T> <dt> <dim_a> a... <dim_e> e... [<dim_theta> theta...]
// and expects either
//   OK <channels> <len>       followed by one whitespace-separated line
//                             of <len> values per channel, or
//   ERR <message>
// Malformed replies raise ProtocolError; a dead or silent child raises
// TransportError. Requests are serialized: one in flight per child.
class SubprocessSimulator final : public Simulator {
  public:
    explicit SubprocessSimulator(SubprocessSpec spec);
    ~SubprocessSimulator() override;

    SubprocessSimulator(const SubprocessSimulator&) = delete;
    SubprocessSimulator& operator=(const SubprocessSimulator&) = delete;

    Trajectory run(const AleatoryPoint& a, const EpistemicPoint& e,
                   const std::optional<Design>& design, int steps,
                   double dt) const override;
    int channel_count() const override { return spec_.channels; }

  private:
    struct Child;
    SubprocessSpec spec_;
    mutable std::mutex mutex_;
    mutable std::unique_ptr<Child> child_;

    void ensure_child() const;
    std::string read_line_with_timeout() const;
};

} // namespace drocal
