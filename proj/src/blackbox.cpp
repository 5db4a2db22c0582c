#include "bcn/blackbox.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <sstream>

namespace bcn {
namespace {

std::vector<std::string_view> words(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
        const std::size_t start = k;
        while (k < line.size() && line[k] != ' ' && line[k] != '\t') ++k;
        if (k > start) out.push_back(line.substr(start, k - start));
    }
    return out;
}

std::optional<Index> parse_index(std::string_view text) {
    Index v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

void write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ProtocolError(std::string("write failed: ") + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

// Reads one '\n'-terminated line from fd, keeping leftovers in buffer.
// nullopt at end of input.
std::optional<std::string> read_line_fd(int fd, std::string& buffer) {
    while (true) {
        const auto nl = buffer.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            return strip_cr(std::move(line));
        }
        char chunk[4096];
        const ssize_t n = ::read(fd, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ProtocolError(std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            if (buffer.empty()) return std::nullopt;
            std::string line = std::move(buffer);
            buffer.clear();
            return strip_cr(std::move(line));
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

void ignore_sigpipe() { ::signal(SIGPIPE, SIG_IGN); }

}  // namespace

// ---- client ----

OutputIdx BlackBox::parse_out(const std::string& reply) {
    const auto w = words(reply);
    if (w.size() == 2 && w[0] == "OUT")
        if (auto k = parse_index(w[1])) return OutputIdx{*k};
    throw ProtocolError("unexpected reply '" + reply + "'");
}

std::string BlackBox::request(const std::string& line) {
    if (closed_) throw ProtocolError("session already closed");
    output();
    transcript_.push_back("> " + line);
    std::string reply = exchange(line);
    transcript_.push_back("< " + reply);
    return reply;
}

OutputIdx BlackBox::output() {
    if (!current_) {
        const std::string greeting = read_greeting();
        transcript_.push_back("< " + greeting);
        current_ = parse_out(greeting);
    }
    return *current_;
}

OutputIdx BlackBox::apply(InputIdx i) {
    const std::string reply = request("IN " + std::to_string(i.value));
    ++inputs_sent_;
    current_ = parse_out(reply);
    return *current_;
}

OutputIdx BlackBox::reset() {
    const std::string reply = request("RESET");
    ++resets_sent_;
    current_ = parse_out(reply);
    return *current_;
}

void BlackBox::quit() {
    if (closed_) return;
    const std::string reply = request("QUIT");
    closed_ = true;
    if (reply != "BYE") throw ProtocolError("unexpected reply '" + reply + "'");
}

// ---- initial states ----

InitialChooser::InitialChooser(Index states, std::optional<StateIdx> fixed, std::uint64_t seed)
    : states_(states), fixed_(fixed), rng_(seed) {}

InitialChooser InitialChooser::fixed(const NetworkDef& net, StateIdx s) {
    if (!net.valid_state(s))
        throw UsageError("initial state " + std::to_string(s.value) + " outside the state space");
    return InitialChooser(net.num_states(), s, 0);
}

InitialChooser InitialChooser::seeded(const NetworkDef& net, std::uint64_t seed) {
    return InitialChooser(net.num_states(), std::nullopt, seed);
}

StateIdx InitialChooser::next() {
    if (fixed_) return *fixed_;
    return StateIdx{std::uniform_int_distribution<Index>(0, states_ - 1)(rng_)};
}

// ---- server ----

HarnessSession::HarnessSession(const NetworkDef& net, StateIdx initial, bool allow_reset)
    : net_(&net), initial_(initial), state_(initial), allow_reset_(allow_reset) {
    if (!net.valid_state(initial))
        throw UsageError("initial state " + std::to_string(initial.value) + " outside the state space");
}

std::string HarnessSession::greeting() const { return "OUT " + std::to_string(net_->observe(state_).value); }

HarnessSession::Reply HarnessSession::handle(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto w = words(line);
    if (w.empty()) return {"ERR unknown-command"};
    if (w[0] == "IN") {
        if (w.size() != 2) return {"ERR syntax"};
        const auto j = parse_index(w[1]);
        if (!j) return {"ERR syntax"};
        if (*j >= net_->num_inputs()) return {"ERR range"};
        state_ = net_->step(InputIdx{*j}, state_);
        commands_.push_back("IN " + std::to_string(*j));
        return {greeting()};
    }
    if (w[0] == "RESET") {
        if (w.size() != 1) return {"ERR syntax"};
        if (!allow_reset_) return {"ERR reset-disabled"};
        state_ = initial_;
        ++resets_;
        commands_.push_back("RESET");
        return {greeting()};
    }
    if (w[0] == "QUIT") {
        if (w.size() != 1) return {"ERR syntax"};
        commands_.push_back("QUIT");
        return {"BYE", true};
    }
    return {"ERR unknown-command"};
}

void serve_fds(HarnessSession& session, int read_fd, int write_fd) {
    ignore_sigpipe();
    std::string buffer;
    write_all(write_fd, session.greeting() + "\n");
    while (auto line = read_line_fd(read_fd, buffer)) {
        const auto reply = session.handle(*line);
        write_all(write_fd, reply.line + "\n");
        if (reply.close) return;
    }
}

// ---- in-process ----

InProcessBlackBox::InProcessBlackBox(NetworkDef net, StateIdx initial, bool allow_reset)
    : net_(std::make_unique<NetworkDef>(std::move(net))), session_(*net_, initial, allow_reset) {}

std::string InProcessBlackBox::exchange(const std::string& line) { return session_.handle(line).line; }

std::string InProcessBlackBox::read_greeting() { return session_.greeting(); }

// ---- descriptors ----

FdBlackBox::FdBlackBox(int read_fd, int write_fd, bool owns_fds)
    : read_fd_(read_fd), write_fd_(write_fd), owns_(owns_fds) {
    ignore_sigpipe();
}

FdBlackBox::~FdBlackBox() {
    if (!owns_) return;
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

std::string FdBlackBox::read_line() {
    auto line = read_line_fd(read_fd_, buffer_);
    if (!line) throw ProtocolError("connection closed by the black box");
    return *line;
}

std::string FdBlackBox::exchange(const std::string& line) {
    write_all(write_fd_, line + "\n");
    return read_line();
}

std::string FdBlackBox::read_greeting() { return read_line(); }

std::unique_ptr<BlackBox> connect_tcp(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0)
        throw ProtocolError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    int fd = -1;
    for (addrinfo* a = found; a; a = a->ai_next) {
        fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) throw ProtocolError("cannot connect to " + host + ":" + service);
    return std::make_unique<FdBlackBox>(fd, fd, true);
}

namespace {

// {child stdin read end, child stdin write end, child stdout read end, child stdout write end}
std::array<int, 4> open_pipes() {
    int in[2], out[2];
    if (::pipe(in) != 0) throw ProtocolError(std::string("pipe failed: ") + std::strerror(errno));
    if (::pipe(out) != 0) {
        ::close(in[0]);
        ::close(in[1]);
        throw ProtocolError(std::string("pipe failed: ") + std::strerror(errno));
    }
    return {in[0], in[1], out[0], out[1]};
}

int spawn(const std::vector<std::string>& argv, const std::array<int, 4>& fds) {
    const pid_t pid = ::fork();
    if (pid < 0) throw ProtocolError(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(fds[0], 0);
        ::dup2(fds[3], 1);
        for (int fd : fds) ::close(fd);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(fds[0]);
    ::close(fds[3]);
    return pid;
}

}  // namespace

ProcessBlackBox::ProcessBlackBox(const std::vector<std::string>& argv) : ProcessBlackBox(argv, open_pipes()) {}

ProcessBlackBox::ProcessBlackBox(const std::vector<std::string>& argv, std::array<int, 4> fds)
    : FdBlackBox(fds[2], fds[1], true), pid_(-1) {
    if (argv.empty()) throw UsageError("empty command");
    pid_ = spawn(argv, fds);
}

ProcessBlackBox::~ProcessBlackBox() {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0) ::close(write_fd_);
    read_fd_ = write_fd_ = -1;
    int status = 0;
    ::waitpid(pid_, &status, 0);
}

// ---- TCP server ----

TcpServer::TcpServer(NetworkDef net, InitialChooser initial, bool allow_reset, std::uint16_t port)
    : net_(std::move(net)), initial_(std::move(initial)), allow_reset_(allow_reset) {
    ignore_sigpipe();
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw ProtocolError(std::string("socket failed: ") + std::strerror(errno));
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 8) != 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw ProtocolError("cannot listen on port " + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::run(std::optional<std::size_t> max_sessions) {
    while (!stop_ && (!max_sessions || served_ < *max_sessions)) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 50);
        if (ready < 0 && errno != EINTR) throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
        if (ready <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        try {
            HarnessSession session(net_, initial_.next(), allow_reset_);
            serve_fds(session, fd, fd);
        } catch (const ProtocolError&) {
            // The client went away; the next connection gets a fresh session.
        }
        ::close(fd);
        ++served_;
    }
}

}  // namespace bcn
