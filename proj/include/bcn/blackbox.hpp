#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bcn/network.hpp"

namespace bcn {

// Client view of a hidden-state network: inputs go in, outputs come out.
// Every implementation speaks the same line protocol and records it.
class BlackBox {
public:
    virtual ~BlackBox() = default;

    // Output of the current hidden state. Repeated reads agree.
    OutputIdx output();
    OutputIdx apply(InputIdx i);
    // Throws ProtocolError when the server refuses.
    OutputIdx reset();
    void quit();

    // "> IN 1", "< OUT 3", ... in exchange order, greeting included.
    const std::vector<std::string>& transcript() const { return transcript_; }
    std::size_t inputs_sent() const { return inputs_sent_; }
    std::size_t resets_sent() const { return resets_sent_; }

protected:
    // One request line out, one reply line back (no newlines).
    virtual std::string exchange(const std::string& line) = 0;
    // The first line the server sends.
    virtual std::string read_greeting() = 0;

private:
    OutputIdx parse_out(const std::string& reply);
    std::string request(const std::string& line);

    std::optional<OutputIdx> current_;
    std::vector<std::string> transcript_;
    std::size_t inputs_sent_ = 0;
    std::size_t resets_sent_ = 0;
    bool closed_ = false;
};

// Draws hidden initial states: a fixed state, or successive uniform draws
// from a seeded generator (one per session).
class InitialChooser {
public:
    static InitialChooser fixed(const NetworkDef& net, StateIdx s);
    static InitialChooser seeded(const NetworkDef& net, std::uint64_t seed);

    StateIdx next();

private:
    InitialChooser(Index states, std::optional<StateIdx> fixed, std::uint64_t seed);

    Index states_;
    std::optional<StateIdx> fixed_;
    std::mt19937_64 rng_;
};

// Server side of one connection.
class HarnessSession {
public:
    HarnessSession(const NetworkDef& net, StateIdx initial, bool allow_reset);

    std::string greeting() const;

    struct Reply {
        std::string line;
        bool close = false;
    };
    // Exactly one reply per line; errors leave the hidden state alone.
    Reply handle(std::string_view line);

    StateIdx hidden_state() const { return state_; }
    StateIdx initial_state() const { return initial_; }
    std::size_t resets() const { return resets_; }
    // Every well-formed command accepted, in order.
    const std::vector<std::string>& command_log() const { return commands_; }

private:
    const NetworkDef* net_;
    StateIdx initial_;
    StateIdx state_;
    bool allow_reset_;
    std::size_t resets_ = 0;
    std::vector<std::string> commands_;
};

// Talks to a HarnessSession in the same process. hidden_state() is for tests.
class InProcessBlackBox : public BlackBox {
public:
    InProcessBlackBox(NetworkDef net, StateIdx initial, bool allow_reset = false);

    StateIdx hidden_state() const { return session_.hidden_state(); }
    const HarnessSession& session() const { return session_; }

protected:
    std::string exchange(const std::string& line) override;
    std::string read_greeting() override;

private:
    std::unique_ptr<NetworkDef> net_;
    HarnessSession session_;
};

// Line transport over a pair of file descriptors.
class FdBlackBox : public BlackBox {
public:
    FdBlackBox(int read_fd, int write_fd, bool owns_fds);
    ~FdBlackBox() override;

    FdBlackBox(const FdBlackBox&) = delete;
    FdBlackBox& operator=(const FdBlackBox&) = delete;

protected:
    std::string exchange(const std::string& line) override;
    std::string read_greeting() override;

    int read_fd_;
    int write_fd_;

private:
    std::string read_line();

    bool owns_;
    std::string buffer_;
};

// Connects to a TCP harness.
std::unique_ptr<BlackBox> connect_tcp(const std::string& host, std::uint16_t port);

// Runs argv as a child process speaking the protocol on its stdin/stdout.
class ProcessBlackBox : public FdBlackBox {
public:
    explicit ProcessBlackBox(const std::vector<std::string>& argv);
    ~ProcessBlackBox() override;

private:
    ProcessBlackBox(const std::vector<std::string>& argv, std::array<int, 4> fds);

    int pid_;
};

// Serves one session over a pair of descriptors until QUIT or end of input.
void serve_fds(HarnessSession& session, int read_fd, int write_fd);

// Sequential accept loop on 127.0.0.1. Port 0 picks a free port.
class TcpServer {
public:
    TcpServer(NetworkDef net, InitialChooser initial, bool allow_reset, std::uint16_t port = 0);
    ~TcpServer();

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const { return port_; }

    // Serves sessions until stop() is called or max_sessions have finished.
    void run(std::optional<std::size_t> max_sessions = std::nullopt);
    void stop() { stop_ = true; }

    std::size_t sessions_served() const { return served_; }

private:
    NetworkDef net_;
    InitialChooser initial_;
    bool allow_reset_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    std::atomic<std::size_t> served_{0};
};

}  // namespace bcn
