// Protocol v1 over a spawned process, a TCP stream or HTTP.

#include "oracleforge/parallel.hpp"
#include "oracleforge/ranking.hpp"

#include "httplib.h"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <map>
#include <set>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace oracleforge::ranking {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

class ExternalScorer::Transport {
public:
    virtual ~Transport() = default;

    // Sends every frame and returns the scores in frame order.
    virtual std::vector<double> exchange(const std::vector<json>& frames, const ExternalOptions& opts) = 0;
};

namespace {

int remaining_ms(Clock::time_point deadline)
{
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left > 0 ? static_cast<int>(left) : 0;
}

void set_nonblocking(int fd)
{
    int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

// Newline-delimited frames over a pair of file descriptors (the same socket
// for TCP). Responses may come back in any order.
class StreamTransport : public ExternalScorer::Transport {
public:
    StreamTransport(int read_fd, int write_fd, bool is_socket, pid_t child)
        : read_fd_(read_fd), write_fd_(write_fd), is_socket_(is_socket), child_(child)
    {
        set_nonblocking(read_fd_);
        if (write_fd_ != read_fd_) {
            set_nonblocking(write_fd_);
        }
    }

    ~StreamTransport() override
    {
        if (write_fd_ != read_fd_) {
            close(write_fd_);
        }
        close(read_fd_);
        if (child_ > 0) {
            for (int i = 0; i < 50; ++i) {
                if (waitpid(child_, nullptr, WNOHANG) != 0) {
                    return;
                }
                usleep(10000);
            }
            kill(child_, SIGKILL);
            waitpid(child_, nullptr, 0);
        }
    }

    std::vector<double> exchange(const std::vector<json>& frames, const ExternalOptions& opts) override
    {
        std::map<std::uint64_t, std::size_t> slot;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            slot.emplace(frames[i]["id"].get<std::uint64_t>(), i);
        }
        std::vector<std::optional<double>> scores(frames.size());
        const unsigned window = std::max(1u, opts.max_in_flight);
        std::size_t sent = 0;
        std::size_t received = 0;
        std::optional<std::string> first_error;

        while (received < frames.size()) {
            while (sent < frames.size() && sent - received < window) {
                send_line(frames[sent].dump() + "\n", opts.timeout_ms);
                ++sent;
            }
            auto frame = parse_response_frame(read_line(opts.timeout_ms));
            auto it = slot.find(frame.id);
            if (it == slot.end()) {
                throw ProtocolError("scorer answered unknown id " + std::to_string(frame.id));
            }
            if (scores[it->second] || answered_error_.count(frame.id)) {
                throw ProtocolError("scorer answered id " + std::to_string(frame.id) + " twice");
            }
            ++received;
            if (frame.error) {
                answered_error_.insert(frame.id);
                if (!first_error) {
                    first_error = "scorer error for request " + std::to_string(frame.id) + ": " + *frame.error;
                }
                // Keep reading so the stream stays in sync for the next batch.
                continue;
            }
            scores[it->second] = *frame.score;
        }
        answered_error_.clear();
        if (first_error) {
            throw ScorerError(*first_error);
        }
        std::vector<double> out;
        out.reserve(scores.size());
        for (const auto& s : scores) {
            out.push_back(*s);
        }
        return out;
    }

private:
    void send_line(const std::string& line, int timeout_ms)
    {
        auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
        std::size_t off = 0;
        while (off < line.size()) {
            ssize_t n = is_socket_ ? ::send(write_fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL)
                                   : ::write(write_fd_, line.data() + off, line.size() - off);
            if (n > 0) {
                off += static_cast<std::size_t>(n);
                continue;
            }
            if (n < 0 && errno == EINTR) {
                continue;
            }
            if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
                pollfd p{write_fd_, POLLOUT, 0};
                int left = remaining_ms(deadline);
                if (left == 0 || ::poll(&p, 1, left) == 0) {
                    throw ScorerUnavailable("timed out writing to scorer after " + std::to_string(timeout_ms) +
                                            " ms");
                }
                continue;
            }
            throw ScorerUnavailable(std::string("scorer connection lost: ") + std::strerror(errno));
        }
    }

    std::string read_line(int timeout_ms)
    {
        auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
        while (true) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                if (line.find_first_not_of(" \t") == std::string::npos) {
                    continue;
                }
                return line;
            }
            char chunk[8192];
            ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
            if (n > 0) {
                buffer_.append(chunk, static_cast<std::size_t>(n));
                continue;
            }
            if (n == 0) {
                throw ScorerUnavailable("scorer closed the connection");
            }
            if (errno == EINTR) {
                continue;
            }
            if (errno != EAGAIN && errno != EWOULDBLOCK) {
                throw ScorerUnavailable(std::string("reading from scorer failed: ") + std::strerror(errno));
            }
            pollfd p{read_fd_, POLLIN, 0};
            int left = remaining_ms(deadline);
            if (left == 0 || ::poll(&p, 1, left) == 0) {
                throw ScorerUnavailable("scorer did not answer within " + std::to_string(timeout_ms) + " ms");
            }
        }
    }

    int read_fd_;
    int write_fd_;
    bool is_socket_;
    pid_t child_;
    std::string buffer_;
    std::set<std::uint64_t> answered_error_;
};

std::unique_ptr<ExternalScorer::Transport> spawn_process(const std::string& command)
{
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (pipe2(to_child, O_CLOEXEC) != 0) {
        throw ScorerUnavailable(std::string("pipe failed: ") + std::strerror(errno));
    }
    if (pipe2(from_child, O_CLOEXEC) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        throw ScorerUnavailable(std::string("pipe failed: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    std::string sh = "/bin/sh";
    std::string dash_c = "-c";
    std::string cmd = command;
    char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
    pid_t pid = 0;
    int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    close(to_child[0]);
    close(from_child[1]);
    if (rc != 0) {
        close(to_child[1]);
        close(from_child[0]);
        throw ScorerUnavailable("cannot start scorer '" + command + "': " + std::strerror(rc));
    }
    return std::make_unique<StreamTransport>(from_child[0], to_child[1], false, pid);
}

std::unique_ptr<ExternalScorer::Transport> connect_tcp(const std::string& host_port, int timeout_ms)
{
    auto colon = host_port.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == host_port.size()) {
        throw ScorerUnavailable("tcp endpoint must be tcp:<host>:<port>, got tcp:" + host_port);
    }
    std::string host = host_port.substr(0, colon);
    std::string port = host_port.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        throw ScorerUnavailable("cannot resolve " + host + ": " + gai_strerror(rc));
    }
    std::string last_error = "no address";
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        int fd = socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = std::strerror(errno);
            continue;
        }
        set_nonblocking(fd);
        int rc = connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd p{fd, POLLOUT, 0};
            if (::poll(&p, 1, timeout_ms) == 1) {
                int err = 0;
                socklen_t len = sizeof err;
                getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                rc = err == 0 ? 0 : -1;
                errno = err;
            } else {
                errno = ETIMEDOUT;
            }
        }
        if (rc == 0) {
            freeaddrinfo(res);
            return std::make_unique<StreamTransport>(fd, fd, true, -1);
        }
        last_error = std::strerror(errno);
        close(fd);
    }
    freeaddrinfo(res);
    throw ScorerUnavailable("cannot connect to " + host_port + ": " + last_error);
}

// One POST per frame; up to max_in_flight requests run at once.
class HttpTransport : public ExternalScorer::Transport {
public:
    explicit HttpTransport(const std::string& url)
    {
        auto scheme_end = url.find("://");
        auto path_start = url.find('/', scheme_end + 3);
        base_ = url.substr(0, path_start);
        path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    }

    std::vector<double> exchange(const std::vector<json>& frames, const ExternalOptions& opts) override
    {
        return parallel_map(frames, opts.max_in_flight, [&](const json& frame, std::size_t) {
            httplib::Client cli(base_);
            cli.set_connection_timeout(opts.timeout_ms / 1000, (opts.timeout_ms % 1000) * 1000);
            cli.set_read_timeout(opts.timeout_ms / 1000, (opts.timeout_ms % 1000) * 1000);
            cli.set_write_timeout(opts.timeout_ms / 1000, (opts.timeout_ms % 1000) * 1000);
            auto res = cli.Post(path_, frame.dump() + "\n", "application/x-ndjson");
            if (!res) {
                throw ScorerUnavailable("http scorer at " + base_ + " failed: " + httplib::to_string(res.error()));
            }
            if (res->status != 200) {
                throw ScorerUnavailable("http scorer returned status " + std::to_string(res->status));
            }
            std::string body = res->body;
            auto start = body.find_first_not_of(" \t\r\n");
            auto end = body.find('\n', start == std::string::npos ? 0 : start);
            auto line = start == std::string::npos ? std::string() : body.substr(start, end - start);
            auto r = parse_response_frame(line);
            auto id = frame["id"].get<std::uint64_t>();
            if (r.id != id) {
                throw ProtocolError("http scorer answered id " + std::to_string(r.id) + " to request " +
                                    std::to_string(id));
            }
            if (r.error) {
                throw ScorerError("scorer error for request " + std::to_string(id) + ": " + *r.error);
            }
            return *r.score;
        });
    }

private:
    std::string base_;
    std::string path_;
};

} // namespace

ExternalScorer::ExternalScorer(ExternalOptions opts) : opts_(std::move(opts))
{
    if (opts_.max_in_flight == 0) {
        throw std::invalid_argument("max_in_flight must be at least 1");
    }
    if (opts_.timeout_ms <= 0) {
        throw std::invalid_argument("timeout must be positive");
    }
}

ExternalScorer::~ExternalScorer() = default;

std::vector<double> ExternalScorer::score(const std::vector<ScoreRequest>& requests)
{
    std::lock_guard lock(mu_);
    if (!transport_) {
        const auto& ep = opts_.endpoint;
        if (ep.rfind("exec:", 0) == 0) {
            transport_ = spawn_process(ep.substr(5));
        } else if (ep.rfind("tcp:", 0) == 0) {
            transport_ = connect_tcp(ep.substr(4), opts_.timeout_ms);
        } else if (ep.rfind("http://", 0) == 0) {
            transport_ = std::make_unique<HttpTransport>(ep);
        } else {
            throw ScorerUnavailable("unsupported scorer endpoint '" + ep + "'");
        }
    }
    std::vector<json> frames;
    frames.reserve(requests.size());
    for (const auto& r : requests) {
        frames.push_back(request_frame(next_id_++, r));
    }
    try {
        return transport_->exchange(frames, opts_);
    } catch (const ScorerUnavailable&) {
        transport_.reset();
        throw;
    } catch (const ProtocolError&) {
        transport_.reset();
        throw;
    }
}

} // namespace oracleforge::ranking
