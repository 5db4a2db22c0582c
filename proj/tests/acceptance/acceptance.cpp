// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "bcn/analysis.hpp"
#include "bcn/blackbox.hpp"
#include "bcn/controllability.hpp"
#include "bcn/determination.hpp"
#include "bcn/fixture.hpp"
#include "bcn/identification.hpp"
#include "bcn/model_io.hpp"
#include "bcn/offline.hpp"
#include "bcn/online.hpp"
#include "bcn/oracle.hpp"

using namespace bcn;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 8) failures.push_back(what);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool conjugates(const NetworkDef& a, const NetworkDef& b, const std::vector<StateIdx>& f) {
    for (Index s = 0; s < a.num_states(); ++s) {
        if (b.observe(f[s]) != a.observe(StateIdx{s})) return false;
        for (Index i = 0; i < a.num_inputs(); ++i)
            if (b.step(InputIdx{i}, f[s]) != f[a.step(InputIdx{i}, StateIdx{s}).value]) return false;
    }
    return true;
}

std::string tag(const NetworkDef& net) {
    return net.name() + " (" + std::to_string(net.input_nodes()) + "," + std::to_string(net.state_nodes()) + "," +
           std::to_string(net.output_nodes()) + ")";
}

// 1 ------------------------------------------------------------------------

void fixture_regression(Outcome& out) {
    const NetworkDef net = reference_network();
    const StateSet all = StateSet::full(8);
    auto set = [&](std::initializer_list<Index> xs) { return StateSet(8, xs); };

    for (GammaMode mode : {GammaMode::full, GammaMode::reachable}) {
        const std::string m = mode == GammaMode::full ? "full" : "reachable";
        const GammaTable table = gamma_table(net, mode);
        const OnlineVerdict v = online_verdict(net, table);
        const Index expected[4] = {0, 2, 1, 1};
        out.expect(v.class_gamma.size() == 4, m + ": four output classes");
        for (std::size_t k = 0; k < v.class_gamma.size() && k < 4; ++k)
            out.expect(v.class_gamma[k].first == OutputIdx{static_cast<Index>(k)} &&
                           v.class_gamma[k].second == Gamma(expected[k]),
                       m + ": gamma of class o" + std::to_string(k));
        out.expect(v.observable, m + ": online observable");

        const auto p = psi(net, set({4, 5}), table);
        out.expect(std::find(p.begin(), p.end(), InputIdx{1}) != p.end(), m + ": i1 in psi({4,5})");
        out.expect(zeta(net, set({4, 5}), InputIdx{1}, OutputIdx{1}) == set({2}) &&
                       zeta(net, set({4, 5}), InputIdx{1}, OutputIdx{3}) == set({6}),
                   m + ": i1 splits {4,5} into singletons");
        out.expect(gamma_after(net, set({4, 5}), InputIdx{1}, table) == Gamma(0), m + ": successors of i1 need no further input");
    }

    const StateSet s0 = zeta(net, all, std::nullopt, OutputIdx{1});
    const StateSet s1 = zeta(net, s0, InputIdx{1}, OutputIdx{2});
    const StateSet s2 = zeta(net, s1, InputIdx{1}, OutputIdx{3});
    out.expect(s0 == set({1, 2, 3}) && s1 == set({4, 5}) && s2 == set({6}), "zeta chain {1,2,3} -> {4,5} -> {6}");
    out.expect(g_sets(net, inputs({1, 1}), outputs({1, 2, 3})) == set({6}), "g_sets chain");

    out.expect(!is_observable_type3(net), "type III is false");
    out.expect(is_controllable(net), "controllable");
    out.expect(is_identifiable(net), "identifiable");
    const AnalysisReport r = analyze(net);
    out.expect(r.online && !r.type3 && r.controllable && r.identifiable, "analysis report");

    const NetworkDef bundled = load_model(std::string(BCN_DATA_DIR) + "/fixture.bcn");
    out.expect(bundled == net, "bundled fixture file matches");
    out.detail << "gamma [0,2,1,1] in both engines, zeta chain, psi, type III false, online, controllable, "
                  "identifiable";
}

// 2 ------------------------------------------------------------------------

void determination(Outcome& out) {
    std::size_t runs = 0, nets = 0, max_steps = 0;
    auto check_net = [&](const NetworkDef& net) {
        ++nets;
        const DeterminationModel model(net);
        for (Index h = 0; h < net.num_states(); ++h) {
            InProcessBlackBox bb(net, StateIdx{h});
            const StateSet cls = zeta(net, StateSet::full(net.num_states()), std::nullopt, bb.output());
            const Gamma bound = model.gamma().at(cls);
            const DeterminationResult r = run_determination(model, bb);
            ++runs;
            max_steps = std::max(max_steps, r.steps);
            out.expect(r.initial == StateIdx{h}, tag(net) + ": hidden s" + std::to_string(h) + " recovered");
            out.expect(bound.finite() && r.steps <= bound.value(), tag(net) + ": step bound for s" + std::to_string(h));
            out.expect(bb.resets_sent() == 0, tag(net) + ": no reset");
        }
    };
    check_net(reference_network());
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        check_net(oracle::random_online_observable(1 + seed % 2, 1 + seed % 4, 1 + (seed / 2) % 3, 1000 + seed));
    out.detail << nets << " networks (fixture + 200 random, l<=2, m<=4), " << runs
               << " hidden states, all recovered within gamma; longest run " << max_steps << " inputs";
}

// 3 ------------------------------------------------------------------------

void identification(Outcome& out) {
    std::size_t rounds = 0, inputs_total = 0;
    auto check = [&](const NetworkDef& net, StateIdx h) {
        InProcessBlackBox bb(net, h);
        const ActiveResult r = active_identify(bb, net);
        ++rounds;
        inputs_total += r.log.inputs.size();
        const auto f = check_equivalence(net, r.model.net);
        out.expect(f.has_value() && conjugates(net, r.model.net, *f), tag(net) + ": bijection verified");
        out.expect(bb.resets_sent() == 0, tag(net) + ": no reset");
    };
    const NetworkDef fixture = reference_network();
    for (Index h = 0; h < 8; ++h) check(fixture, StateIdx{h});
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const NetworkDef net =
            oracle::random_online_observable(1 + seed % 2, 1 + seed % 3, 1 + (seed / 3) % 2, 2000 + seed, true);
        check(net, StateIdx{static_cast<Index>(seed % net.num_states())});
    }
    out.detail << rounds << " identifications (fixture from all 8 states + 50 random, l<=2, m<=3), "
               << inputs_total << " inputs in total, both conjugation equations checked on every (i,s)";
}

// 4 ------------------------------------------------------------------------

void property_suites(Outcome& out) {
    std::size_t nets = 0, pairs = 0;
    std::size_t counts[6] = {};  // online, type1, type2, type3, type4, controllable
    for (unsigned ell = 1; ell <= 2; ++ell) {
        for (unsigned m = 1; m <= 3; ++m) {
            for (unsigned n = 1; n <= 3; ++n) {
                for (std::uint64_t seed = 0; seed < 30; ++seed) {
                    const NetworkDef net = oracle::random_network(ell, m, n, 3000 + seed * 31 + ell * 7 + m * 3 + n);
                    ++nets;
                    const GammaTable t = gamma_table(net, GammaMode::full);
                    for (const StateSet& small : t.domain()) {
                        for (const StateSet& big : t.domain()) {
                            if (&small == &big || !small.is_subset_of(big) || !t.at(big).finite()) continue;
                            ++pairs;
                            out.expect(t.at(small).finite(), tag(net) + ": finiteness not inherited by subset");
                            out.expect(t.at(small) <= t.at(big), tag(net) + ": gamma not monotone in subsets");
                            const auto pb = psi(net, big, t), ps = psi(net, small, t);
                            for (InputIdx i : pb)
                                out.expect(std::find(ps.begin(), ps.end(), i) != ps.end(), tag(net) + ": psi not anti-monotone");
                        }
                    }
                    const bool online = online_verdict(net, t).observable;
                    const bool t1 = is_observable_type1(net), t2 = is_observable_type2(net);
                    const bool t3 = is_observable_type3(net), t4 = is_observable_type4(net);
                    out.expect(!online || t1, tag(net) + ": online without type I");
                    out.expect(!t3 || online, tag(net) + ": type III without online");
                    out.expect(!t4 || t3, tag(net) + ": IV => III");
                    out.expect(!t3 || t1, tag(net) + ": III => I");
                    out.expect(!t1 || t2, tag(net) + ": I => II");
                    counts[0] += online;
                    counts[1] += t1;
                    counts[2] += t2;
                    counts[3] += t3;
                    counts[4] += t4;
                    counts[5] += is_controllable(net);
                }
            }
        }
    }
    out.detail << nets << " networks, " << pairs << " subset pairs; true counts: online " << counts[0] << ", I "
               << counts[1] << ", II " << counts[2] << ", III " << counts[3] << ", IV " << counts[4]
               << ", controllable " << counts[5];
}

// 5 ------------------------------------------------------------------------

void oracle_equivalence(Outcome& out) {
    std::size_t nets = 0, comparisons = 0;
    for (unsigned ell = 1; ell <= 2; ++ell) {
        for (unsigned m = 1; m <= 3; ++m) {
            for (unsigned n = 1; n <= 3; ++n) {
                // Two input nodes with three state nodes and one output is the slowest oracle case.
                const std::size_t count = (ell == 2 && m == 3 && n == 1) ? 20 : 40;
                const auto r = oracle::cross_check(count, ell, m, n, 4000 + 100 * (ell * 16 + m * 4 + n));
                nets += r.nets;
                comparisons += r.comparisons;
                for (const auto& mm : r.mismatches) out.expect(false, mm);
            }
        }
    }
    // Gamma alone goes one state node further.
    std::size_t wide = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetworkDef net = oracle::random_network(1 + seed % 2, 4, 1 + seed % 3, 5000 + seed);
        const GammaTable full = gamma_table(net, GammaMode::full);
        const GammaTable reach = gamma_table(net, GammaMode::reachable);
        for (const StateSet& S : full.domain()) {
            const Gamma g = oracle::gamma(net, S);
            ++comparisons;
            out.expect(full.at(S) == g, tag(net) + ": gamma " + S.to_string());
            if (const Gamma* r = reach.find(S)) out.expect(*r == g, tag(net) + ": reachable gamma " + S.to_string());
        }
        out.expect(online_verdict(net, reach).observable == oracle::online(net), tag(net) + ": online");
        ++comparisons;
        ++wide;
    }
    out.detail << nets << " networks against every oracle (l<=2, m<=3) plus " << wide
               << " with m=4 for gamma; " << comparisons << " comparisons";
}

// 6 ------------------------------------------------------------------------

void engine_agreement(Outcome& out) {
    std::size_t nets = 0, values = 0, graphs = 0;
    auto check = [&](const NetworkDef& net) {
        ++nets;
        const GammaTable full = gamma_table(net, GammaMode::full);
        const GammaTable reach = gamma_table(net, GammaMode::reachable);
        out.expect(online_verdict(net, full).observable == online_verdict(net, reach).observable,
                   tag(net) + ": verdicts");
        for (const StateSet& S : reach.domain()) {
            const Gamma* g = full.find(S);
            ++values;
            out.expect(g && *g == reach.at(S), tag(net) + ": gamma on " + S.to_string());
        }
        const GraphResult a = build_input_labelled_graph(net, true);
        const GraphResult b = build_input_labelled_graph(net, false);
        out.expect(a.index() == b.index(), tag(net) + ": graph outcome");
        if (a.index() == 0 && b.index() == 0) {
            ++graphs;
            const auto& fg = std::get<InputLabelledGraph>(a);
            const auto& rg = std::get<InputLabelledGraph>(b);
            for (const auto& e : rg.edges) {
                const auto f = fg.index_of(rg.vertices[e.from]);
                const auto t = fg.index_of(rg.vertices[e.to]);
                const GraphEdge* fe = f && t ? fg.edge(*f, *t) : nullptr;
                out.expect(fe && fe->inputs == e.inputs, tag(net) + ": edge label");
            }
        }
    };
    for (unsigned ell = 1; ell <= 2; ++ell)
        for (unsigned m = 1; m <= 6; ++m)
            for (std::uint64_t seed = 0; seed < 40; ++seed) {
                // Enough outputs to keep classes small for the exponential engine.
                const unsigned n = m <= 3 ? 1 + seed % 3 : m - 2 + seed % 2;
                check(oracle::random_network(ell, m, n, 6000 + seed * 13 + ell * 5 + m));
            }
    for (std::uint64_t seed = 0; seed < 60; ++seed)
        check(oracle::random_online_observable(1 + seed % 2, 2 + seed % 3, 1 + seed % 2, 7000 + seed));
    check(reference_network());
    out.detail << nets << " networks (m<=6), " << values << " reachable gamma values, " << graphs
               << " graph pairs compared";
}

// 7 ------------------------------------------------------------------------

struct Transports {
    std::string model_path;
    NetworkDef net;

    std::unique_ptr<BlackBox> stdio(Index h) const {
        return std::make_unique<ProcessBlackBox>(
            std::vector<std::string>{BCN_CLI_PATH, "serve", "--stdio", "--initial", std::to_string(h), model_path});
    }
};

void protocol_conformance(Outcome& out) {
    std::size_t sessions = 0, lines = 0;
    auto compare = [&](const NetworkDef& net, const std::string& path, Index h,
                       const std::function<void(BlackBox&)>& client, const std::string& what) {
        const Transports tr{path, net};
        InProcessBlackBox local(net, StateIdx{h});
        client(local);
        local.quit();

        auto piped = tr.stdio(h);
        client(*piped);
        piped->quit();

        TcpServer server(net, InitialChooser::fixed(net, StateIdx{h}), false);
        std::thread t([&] { server.run(1); });
        auto remote = connect_tcp("127.0.0.1", server.port());
        client(*remote);
        remote->quit();
        t.join();

        sessions += 3;
        lines += local.transcript().size();
        const std::string label = tag(net) + " s" + std::to_string(h) + " " + what;
        out.expect(local.transcript() == piped->transcript(), label + ": stdio transcript differs");
        out.expect(local.transcript() == remote->transcript(), label + ": tcp transcript differs");
        for (const auto& line : local.transcript())
            out.expect(line.find("RESET") == std::string::npos, label + ": RESET sent");
        for (const auto& cmd : local.session().command_log()) out.expect(cmd != "RESET", label + ": harness saw RESET");
        out.expect(local.resets_sent() == 0 && piped->resets_sent() == 0 && remote->resets_sent() == 0,
                   label + ": reset counters");
    };

    std::vector<std::pair<NetworkDef, std::string>> cases;
    cases.emplace_back(reference_network(), std::string(BCN_DATA_DIR) + "/fixture.bcn");
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        NetworkDef net = oracle::random_online_observable(1 + seed % 2, 2 + seed % 2, 1 + seed % 2, 8000 + seed, true);
        const std::string path = "/tmp/bcn_acceptance_" + std::to_string(seed) + ".bcn";
        save_model(net, path);
        cases.emplace_back(std::move(net), path);
    }
    for (const auto& [net, path] : cases) {
        const DeterminationModel model(net);
        for (Index h = 0; h < net.num_states(); ++h) {
            for (InputPolicy policy : {InputPolicy::min_gamma, InputPolicy::random}) {
                compare(net, path, h, [&](BlackBox& bb) { run_determination(model, bb, policy, 17 + h); },
                        "determination");
            }
            if (h % 3 == 0)
                compare(net, path, h, [&](BlackBox& bb) { active_identify(bb, net); }, "identification");
        }
    }
    for (std::uint64_t seed = 0; seed < 4; ++seed) std::remove(("/tmp/bcn_acceptance_" + std::to_string(seed) + ".bcn").c_str());
    out.detail << sessions << " sessions over in-process, stdio and TCP; " << lines
               << " transcript lines per transport, identical, no RESET";
}

// 8 ------------------------------------------------------------------------

void performance(Outcome& out) {
    for (unsigned n : {4u, 6u}) {
        std::vector<double> times;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const NetworkDef net = oracle::random_network(2, 10, n, 9000 + seed);
            const auto t0 = Clock::now();
            const AnalysisReport r = analyze(net, GammaMode::reachable);
            times.push_back(seconds_since(t0));
            out.expect(r.hierarchy_consistent(), tag(net) + ": hierarchy");
        }
        std::sort(times.begin(), times.end());
        const double median = (times[9] + times[10]) / 2;
        out.expect(median < 10.0, "median for n=" + std::to_string(n) + " is " + std::to_string(median) + " s");
        char buf[128];
        std::snprintf(buf, sizeof buf, "n=%u median %.3f s max %.3f s; ", n, median, times.back());
        out.detail << buf;
    }
    out.detail << "l=2, m=10, 20 seeds each, reachable engine";
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        void (*run)(Outcome&);
    };
    const Criterion criteria[] = {
        {"fixture regression", fixture_regression},
        {"determination correctness", determination},
        {"identification round trip", identification},
        {"property suites", property_suites},
        {"oracle equivalence", oracle_equivalence},
        {"engine agreement", engine_agreement},
        {"protocol conformance", protocol_conformance},
        {"performance sanity", performance},
    };
    int failed = 0, k = 0;
    for (const auto& c : criteria) {
        ++k;
        Outcome out;
        const auto t0 = Clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.expect(false, std::string("exception: ") + e.what());
        }
        char head[96];
        std::snprintf(head, sizeof head, "%s %d %-26s %7.2fs  ", out.pass ? "PASS" : "FAIL", k, c.name,
                      seconds_since(t0));
        std::cout << head << out.detail.str() << "\n";
        for (const auto& f : out.failures) std::cout << "       " << f << "\n";
        std::cout.flush();
        failed += !out.pass;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << (8 - failed) << "/8\n";
    return failed ? 1 : 0;
}
