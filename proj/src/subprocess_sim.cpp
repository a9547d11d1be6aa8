#include "drocal/subprocess_sim.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "drocal/errors.hpp"
#include "drocal/io.hpp"

namespace drocal {

struct SubprocessSimulator::Child {
    pid_t pid = -1;
    int to_child = -1;   // write end
    int from_child = -1; // read end
    std::string buffer;  // bytes read but not yet consumed as lines

    ~Child() {
        if (to_child >= 0) ::close(to_child);
        if (from_child >= 0) ::close(from_child);
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            int status = 0;
            ::waitpid(pid, &status, 0);
        }
    }
};

SubprocessSimulator::SubprocessSimulator(SubprocessSpec spec) : spec_(std::move(spec)) {
    if (spec_.argv.empty()) throw DomainError("subprocess simulator needs a command");
    if (spec_.channels < 1) throw DomainError("subprocess simulator needs >= 1 channel");
    // a dying child must surface as EPIPE on write, not kill the process
    static const bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;
}

SubprocessSimulator::~SubprocessSimulator() = default;

void SubprocessSimulator::ensure_child() const {
    if (child_) return;
    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
        throw TransportError("pipe() failed: " + std::string(std::strerror(errno)));
    }
    const pid_t pid = ::fork();
    if (pid < 0) throw TransportError("fork() failed");
    if (pid == 0) {
        // child: in_pipe is our stdin, out_pipe our stdout
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        std::vector<char*> argv;
        argv.reserve(spec_.argv.size() + 1);
        for (const auto& s : spec_.argv) argv.push_back(const_cast<char*>(s.c_str()));
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    auto child = std::make_unique<Child>();
    child->pid = pid;
    child->to_child = in_pipe[1];
    child->from_child = out_pipe[0];
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    child_ = std::move(child);
}

std::string SubprocessSimulator::read_line_with_timeout() const {
    auto& buf = child_->buffer;
    for (;;) {
        const auto nl = buf.find('\n');
        if (nl != std::string::npos) {
            std::string line = buf.substr(0, nl);
            buf.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        struct pollfd pfd{child_->from_child, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(spec_.timeout_s * 1000.0));
        if (rc == 0) {
            child_.reset();
            throw TransportError("simulator timed out after " +
                                 format_double(spec_.timeout_s, 6) + "s");
        }
        if (rc < 0) {
            child_.reset();
            throw TransportError("poll() failed: " + std::string(std::strerror(errno)));
        }
        char chunk[4096];
        const ssize_t n = ::read(child_->from_child, chunk, sizeof(chunk));
        if (n <= 0) {
            int status = 0;
            ::waitpid(child_->pid, &status, WNOHANG);
            child_.reset();
            throw TransportError("simulator closed its output mid-request");
        }
        buf.append(chunk, static_cast<std::size_t>(n));
    }
}

Trajectory SubprocessSimulator::run(const AleatoryPoint& a, const EpistemicPoint& e,
                                    const std::optional<Design>& design, int steps,
                                    double dt) const {
    std::lock_guard<std::mutex> lock(mutex_);
    ensure_child();

    std::string req = "SIM " + std::to_string(steps) + " " + format_double(dt);
    req += " " + std::to_string(a.a.size());
    for (double v : a.a) req += " " + format_double(v);
    req += " " + std::to_string(e.e.size());
    for (double v : e.e) req += " " + format_double(v);
    if (design.has_value()) {
        req += " " + std::to_string(design->theta.size());
        for (double v : design->theta) req += " " + format_double(v);
    }
    req += "\n";

    const char* data = req.data();
    std::size_t remaining = req.size();
    while (remaining > 0) {
        const ssize_t n = ::write(child_->to_child, data, remaining);
        if (n <= 0) {
            child_.reset();
            throw TransportError("simulator closed its input");
        }
        data += n;
        remaining -= static_cast<std::size_t>(n);
    }

    const std::string head = read_line_with_timeout();
    std::istringstream hs(head);
    std::string tag;
    hs >> tag;
    if (tag == "ERR") {
        std::string msg;
        std::getline(hs, msg);
        throw ProtocolError("simulator reported: " + msg);
    }
    if (tag != "OK") throw ProtocolError("unexpected simulator reply: " + head);
    int channels = 0;
    long len = 0;
    if (!(hs >> channels >> len) || channels < 1 || len < 2) {
        throw ProtocolError("bad OK header: " + head);
    }
    if (len != static_cast<long>(steps) + 1) {
        throw ProtocolError("simulator returned length " + std::to_string(len) +
                            ", expected " + std::to_string(steps + 1));
    }
    if (channels != spec_.channels) {
        throw ProtocolError("simulator returned " + std::to_string(channels) +
                            " channel(s), expected " + std::to_string(spec_.channels));
    }

    Trajectory traj;
    traj.dt = dt;
    traj.channels.resize(static_cast<std::size_t>(channels));
    for (int c = 0; c < channels; ++c) {
        const std::string line = read_line_with_timeout();
        std::istringstream ls(line);
        auto& ch = traj.channels[static_cast<std::size_t>(c)];
        ch.reserve(static_cast<std::size_t>(len));
        double v = 0.0;
        while (ls >> v) ch.push_back(v);
        if (ch.size() != static_cast<std::size_t>(len)) {
            throw ProtocolError("channel " + std::to_string(c) + " has " +
                                std::to_string(ch.size()) + " values, expected " +
                                std::to_string(len));
        }
    }
    try {
        traj.validate();
    } catch (const DomainError& ex) {
        throw ProtocolError(std::string("simulator returned a malformed trajectory: ") +
                            ex.what());
    }
    return traj;
}

} // namespace drocal
