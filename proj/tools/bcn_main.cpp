#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include "bcn/analysis.hpp"
#include "bcn/blackbox.hpp"
#include "bcn/determination.hpp"
#include "bcn/fixture.hpp"
#include "bcn/identification.hpp"
#include "bcn/model_io.hpp"
#include "bcn/online.hpp"
#include "bcn/oracle.hpp"

namespace {

using namespace bcn;

// 0 quiet, 1 progress, 2 wire transcript.
int log_level() {
    static const int level = [] {
        const char* v = std::getenv("BCN_LOG");
        if (!v || !*v) return 0;
        try {
            return std::stoi(v);
        } catch (...) {
            return 1;
        }
    }();
    return level;
}

void note(int level, const std::string& msg) {
    if (log_level() >= level) std::cerr << "bcn: " << msg << "\n";
}

void dump_transcript(const BlackBox& bb) {
    if (log_level() < 2) return;
    for (const auto& line : bb.transcript()) std::cerr << "  " << line << "\n";
}

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw UsageError("expected host:port, got '" + text + "'");
    Endpoint e{text.substr(0, colon), 0};
    const std::string port = text.substr(colon + 1);
    try {
        std::size_t used = 0;
        const unsigned long p = std::stoul(port, &used);
        if (used != port.size() || p == 0 || p > 65535) throw std::out_of_range("port");
        e.port = static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
        throw UsageError("bad port '" + port + "'");
    }
    if (e.host.empty()) e.host = "127.0.0.1";
    return e;
}

// Where the hidden network lives, from the client's point of view.
struct ClientOptions {
    std::string connect;
    bool stdio = false;
    bool interactive = false;
};

void add_client_options(CLI::App* cmd, ClientOptions& o) {
    auto* c = cmd->add_option("--connect", o.connect, "harness address host:port");
    auto* s = cmd->add_flag("--stdio", o.stdio, "talk the wire protocol on stdin/stdout");
    auto* i = cmd->add_flag("--interactive", o.interactive, "print each input, read the observed output");
    c->excludes(s, i);
    s->excludes(i);
}

std::unique_ptr<BlackBox> open_client(const ClientOptions& o) {
    if (!o.connect.empty()) {
        const Endpoint e = parse_endpoint(o.connect);
        note(1, "connecting to " + e.host + ":" + std::to_string(e.port));
        return connect_tcp(e.host, e.port);
    }
    if (o.interactive) std::cerr << "reply to each 'IN <j>' with 'OUT <k>'; first send the current output\n";
    return std::make_unique<FdBlackBox>(0, 1, false);
}

void close_client(BlackBox& bb, const ClientOptions& o) {
    if (!o.interactive) bb.quit();
}

// With --stdio the standard output carries the protocol, so results go to stderr.
std::ostream& result_stream(const ClientOptions& o) { return o.stdio ? std::cerr : std::cout; }

InputPolicy parse_policy(const std::string& name) {
    if (name == "min-gamma") return InputPolicy::min_gamma;
    if (name == "first-admissible") return InputPolicy::first_admissible;
    if (name == "random") return InputPolicy::random;
    throw UsageError("unknown policy '" + name + "'");
}

GammaMode mode_of(bool faithful) { return faithful ? GammaMode::full : GammaMode::reachable; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
    if (!out.flush()) throw UsageError("cannot write " + path);
}

TcpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int run(int argc, char** argv) {
    CLI::App app{"Observability, determination and identification of Boolean control networks"};
    app.require_subcommand(1);

    std::string model_path;
    bool json = false, faithful = false;

    auto* analyze_cmd = app.add_subcommand("analyze", "decide controllability and every observability notion");
    analyze_cmd->add_option("model", model_path, "model file")->required();
    analyze_cmd->add_flag("--json", json, "machine readable output");
    analyze_cmd->add_flag("--faithful", faithful, "use the full-domain gamma engine (exponential)");

    std::string format = "dot";
    auto* graph_cmd = app.add_subcommand("graph", "input-labelled graph of an online observable network");
    graph_cmd->add_option("model", model_path, "model file")->required();
    graph_cmd->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
    graph_cmd->add_flag("--faithful", faithful, "build over every output-uniform set");

    std::optional<std::uint16_t> port;
    bool serve_stdio = false, allow_reset = false;
    std::optional<Index> initial;
    std::optional<std::uint64_t> seed;
    auto* serve_cmd = app.add_subcommand("serve", "host a hidden instance behind the line protocol");
    serve_cmd->add_option("model", model_path, "model file")->required();
    auto* port_opt = serve_cmd->add_option("--port", port, "TCP port on 127.0.0.1 (0 picks one)");
    auto* stdio_opt = serve_cmd->add_flag("--stdio", serve_stdio, "serve one session on stdin/stdout");
    port_opt->excludes(stdio_opt);
    auto* initial_opt = serve_cmd->add_option("--initial", initial, "hidden initial state index");
    auto* seed_opt = serve_cmd->add_option("--seed", seed, "seed for uniformly drawn initial states");
    initial_opt->excludes(seed_opt);
    serve_cmd->add_flag("--allow-reset", allow_reset, "accept RESET");

    ClientOptions client;
    std::string policy_name = "min-gamma";
    auto* determine_cmd = app.add_subcommand("determine", "find the initial state of a running black box");
    determine_cmd->add_option("model", model_path, "model file")->required();
    add_client_options(determine_cmd, client);
    determine_cmd->add_option("--policy", policy_name, "input choice")
        ->check(CLI::IsMember({"min-gamma", "first-admissible", "random"}));

    std::string out_path;
    auto* identify_cmd = app.add_subcommand("identify", "learn the update rules of a black box without reset");
    identify_cmd->add_option("model", model_path, "model used to plan the experiments")->required();
    add_client_options(identify_cmd, client);
    identify_cmd->add_option("--out", out_path, "identified model; the log and labelling go next to it");

    auto* fixture_cmd = app.add_subcommand("fixture", "write the reference network");
    fixture_cmd->add_option("--out", out_path, "output file (default: standard output)");

    std::size_t seeds = 50;
    unsigned ell = 2, m = 3, n = 2;
    std::uint64_t first_seed = 0;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "compare the deciders with brute force on random networks");
    oracle_cmd->add_option("--seeds", seeds, "number of networks");
    oracle_cmd->add_option("--ell", ell, "input nodes")->check(CLI::Range(1u, oracle::kMaxWordInputNodes));
    oracle_cmd->add_option("--m", m, "state nodes")->check(CLI::Range(1u, oracle::kMaxWordStateNodes));
    oracle_cmd->add_option("--n", n, "output nodes")->check(CLI::Range(1u, 24u));
    oracle_cmd->add_option("--first-seed", first_seed, "first seed of the range");

    CLI11_PARSE(app, argc, argv);

    if (*analyze_cmd) {
        const NetworkDef net = load_model(model_path);
        const AnalysisReport report = analyze(net, mode_of(faithful));
        std::cout << (json ? report.to_json() : report.to_text());
        return 0;
    }

    if (*graph_cmd) {
        const NetworkDef net = load_model(model_path);
        const GraphResult result = build_input_labelled_graph(net, faithful);
        if (const auto* fail = std::get_if<GraphFailure>(&result)) {
            std::cerr << "not online observable: class of " << to_string(fail->output) << " "
                      << fail->witness_class.to_string() << " reaches " << fail->vertex.to_string()
                      << ", which has no admissible input\n";
            return 1;
        }
        std::cout << export_graph(std::get<InputLabelledGraph>(result),
                                  format == "json" ? GraphFormat::json : GraphFormat::dot);
        return 0;
    }

    if (*serve_cmd) {
        const NetworkDef net = load_model(model_path);
        if (!port && !serve_stdio) throw UsageError("serve needs --port or --stdio");
        std::uint64_t s = seed ? *seed : std::random_device{}();
        InitialChooser chooser =
            initial ? InitialChooser::fixed(net, StateIdx{*initial}) : InitialChooser::seeded(net, s);
        if (!initial) note(1, "initial states drawn with seed " + std::to_string(s));
        if (serve_stdio) {
            HarnessSession session(net, chooser.next(), allow_reset);
            serve_fds(session, 0, 1);
            note(1, "session closed after " + std::to_string(session.command_log().size()) + " commands");
            return 0;
        }
        TcpServer server(net, std::move(chooser), allow_reset, *port);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "listening 127.0.0.1:" << server.port() << std::endl;
        server.run();
        g_server = nullptr;
        note(1, std::to_string(server.sessions_served()) + " sessions served");
        return 0;
    }

    if (*determine_cmd) {
        const DeterminationModel model(load_model(model_path));
        auto bb = open_client(client);
        const DeterminationResult r = run_determination(model, *bb, parse_policy(policy_name));
        close_client(*bb, client);
        dump_transcript(*bb);
        result_stream(client) << "initial " << to_string(r.initial) << " after " << r.steps << " inputs\n";
        return 0;
    }

    if (*identify_cmd) {
        const NetworkDef model = load_model(model_path);
        if (!is_identifiable(model))
            throw UsageError("the model is not controllable and online observable, so it cannot be identified");
        auto bb = open_client(client);
        const ActiveResult r = active_identify(*bb, model);
        close_client(*bb, client);
        dump_transcript(*bb);

        // The log alone must give back the same model.
        const NetworkDef& plan = model;
        const auto tree = strip_states(build_determining_tree(plan));
        const Construction replay = construct_from_data(
            r.log, Dimensions{plan.input_nodes(), plan.state_nodes(), plan.output_nodes()}, tree);
        const auto* again = std::get_if<IdentifiedModel>(&replay);
        if (!again || !(again->net == r.model.net)) throw Error("replaying the log gives a different model");

        const std::string text = serialize_model(r.model.net);
        std::ostream& out = result_stream(client);
        if (out_path.empty()) {
            out << text;
        } else {
            write_file(out_path, text);
            write_file(out_path + ".log", r.log.serialize());
            write_file(out_path + ".labels.json", labeling_json(r.model));
        }
        const auto f = check_equivalence(model, r.model.net);
        out << "identified with " << r.log.inputs.size() << " inputs (" << r.probes << " probes, " << r.windows
            << " windows); " << (f ? "equivalent to" : "differs from") << " the planning model\n";
        return 0;
    }

    if (*fixture_cmd) {
        const std::string text = serialize_model(reference_network());
        if (out_path.empty())
            std::cout << text;
        else
            write_file(out_path, text);
        return 0;
    }

    if (*oracle_cmd) {
        const oracle::CheckReport r = oracle::cross_check(seeds, ell, m, n, first_seed);
        for (const auto& mismatch : r.mismatches) std::cout << "MISMATCH " << mismatch << "\n";
        std::cout << (r.ok() ? "PASS" : "FAIL") << " " << r.nets << " networks, " << r.comparisons
                  << " comparisons, " << r.mismatches.size() << " mismatches\n";
        return r.ok() ? 0 : 1;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bcn::ParseError& e) {
        std::cerr << "bcn: parse error: " << e.what() << "\n";
    } catch (const bcn::InconsistentObservation& e) {
        std::cerr << "bcn: inconsistent observation: " << e.what() << "\n";
    } catch (const bcn::IdentificationConflict& e) {
        std::cerr << "bcn: identification conflict: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "bcn: " << e.what() << "\n";
    }
    return 1;
}
