#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

namespace py = pybind11;
using namespace bcn;

namespace {

// Python sees plain ints and lists; index types stay on this side.
std::vector<Index> raw(const InputSeq& xs) {
    std::vector<Index> r;
    for (auto x : xs) r.push_back(x.value);
    return r;
}

std::vector<Index> raw(const OutputSeq& xs) {
    std::vector<Index> r;
    for (auto x : xs) r.push_back(x.value);
    return r;
}

py::object gamma_value(const Gamma& g) { return g.finite() ? py::object(py::int_(g.value())) : py::object(py::none()); }

GammaMode mode_of(bool faithful) { return faithful ? GammaMode::full : GammaMode::reachable; }

InputPolicy policy_of(const std::string& name) {
    if (name == "min_gamma") return InputPolicy::min_gamma;
    if (name == "first_admissible") return InputPolicy::first_admissible;
    if (name == "random") return InputPolicy::random;
    throw UsageError("unknown policy '" + name + "'");
}

StateSet to_set(const NetworkDef& net, const std::vector<Index>& members) {
    StateSet S(net.num_states());
    for (Index s : members) {
        if (s >= net.num_states()) throw UsageError("state " + std::to_string(s) + " out of range");
        S.insert(StateIdx{s});
    }
    return S;
}

py::dict report_dict(const AnalysisReport& r) {
    py::dict gamma;
    for (auto& [o, g] : r.class_gamma) gamma[py::int_(o.value)] = gamma_value(g);
    py::dict d;
    d["controllable"] = r.controllable;
    d["type1"] = r.type1;
    d["type2"] = r.type2;
    d["type3"] = r.type3;
    d["type4"] = r.type4;
    d["online"] = r.online;
    d["identifiable"] = r.identifiable;
    d["gamma"] = gamma;
    d["hierarchy_consistent"] = r.hierarchy_consistent();
    return d;
}

}  // namespace

PYBIND11_MODULE(bcnkit, m) {
    m.doc() = "Boolean control networks: observability, determination and identification";

    py::register_exception<Error>(m, "BcnError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InconsistentObservation>(m, "InconsistentObservation", PyExc_RuntimeError);

    py::class_<NetworkDef>(m, "Network")
        .def(py::init([](unsigned ell, unsigned m, unsigned n, std::vector<Index> sigma, std::vector<Index> rho,
                         std::string name) { return NetworkDef(ell, m, n, std::move(sigma), std::move(rho), name); }),
             py::arg("ell"), py::arg("m"), py::arg("n"), py::arg("sigma"), py::arg("rho"), py::arg("name") = "")
        .def_property_readonly("ell", &NetworkDef::input_nodes)
        .def_property_readonly("m", &NetworkDef::state_nodes)
        .def_property_readonly("n", &NetworkDef::output_nodes)
        .def_property_readonly("name", &NetworkDef::name)
        .def_property_readonly("sigma", &NetworkDef::sigma_table)
        .def_property_readonly("rho", &NetworkDef::rho_table)
        .def("step", [](const NetworkDef& net, Index i, Index s) {
            if (!net.valid_input(InputIdx{i}) || !net.valid_state(StateIdx{s})) throw UsageError("index out of range");
            return net.step(InputIdx{i}, StateIdx{s}).value;
        })
        .def("observe", [](const NetworkDef& net, Index s) {
            if (!net.valid_state(StateIdx{s})) throw UsageError("state out of range");
            return net.observe(StateIdx{s}).value;
        })
        .def("serialize", [](const NetworkDef& net) { return serialize_model(net); })
        .def("__eq__", [](const NetworkDef& a, const NetworkDef& b) { return a == b; })
        .def("__repr__", [](const NetworkDef& net) {
            return "<Network " + (net.name().empty() ? std::string("?") : net.name()) + " l=" +
                   std::to_string(net.input_nodes()) + " m=" + std::to_string(net.state_nodes()) +
                   " n=" + std::to_string(net.output_nodes()) + ">";
        });

    m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"));
    m.def("load_model", &load_model, py::arg("path"));
    m.def("reference_network", &reference_network);
    m.def("random_network", &oracle::random_network, py::arg("ell"), py::arg("m"), py::arg("n"), py::arg("seed"));
    m.def("random_online_observable", &oracle::random_online_observable, py::arg("ell"), py::arg("m"), py::arg("n"),
          py::arg("seed"), py::arg("controllable") = false);

    m.def("analyze", [](const NetworkDef& net, bool faithful) { return report_dict(analyze(net, mode_of(faithful))); },
          py::arg("net"), py::arg("faithful") = false);
    m.def("is_controllable", &is_controllable);
    m.def("is_online_observable", [](const NetworkDef& net, bool faithful) {
        return is_online_observable(net, mode_of(faithful)).observable;
    }, py::arg("net"), py::arg("faithful") = false);

    m.def("gamma", [](const NetworkDef& net, const std::vector<Index>& members, bool faithful) {
        const GammaTable table = gamma_table(net, mode_of(faithful));
        const StateSet S = to_set(net, members);
        const Gamma* g = table.find(S);
        if (!g) throw UsageError(S.to_string() + " is outside the gamma domain");
        return gamma_value(*g);
    }, py::arg("net"), py::arg("states"), py::arg("faithful") = false);

    m.def("zeta", [](const NetworkDef& net, const std::vector<Index>& members, std::optional<Index> i, std::optional<Index> o) {
        const MaybeInput mi = i ? MaybeInput{InputIdx{*i}} : std::nullopt;
        const MaybeOutput mo = o ? MaybeOutput{OutputIdx{*o}} : std::nullopt;
        std::vector<Index> r;
        for (auto s : zeta(net, to_set(net, members), mi, mo).members()) r.push_back(s.value);
        return r;
    }, py::arg("net"), py::arg("states"), py::arg("input"), py::arg("output"));

    m.def("graph", [](const NetworkDef& net, const std::string& format, bool faithful) {
        const GraphResult r = build_input_labelled_graph(net, faithful);
        if (const auto* fail = std::get_if<GraphFailure>(&r))
            throw UsageError("not online observable: class of " + to_string(fail->output) + " reaches " +
                             fail->vertex.to_string());
        if (format != "dot" && format != "json") throw UsageError("format must be dot or json");
        return export_graph(std::get<InputLabelledGraph>(r), format == "json" ? GraphFormat::json : GraphFormat::dot);
    }, py::arg("net"), py::arg("format") = "dot", py::arg("faithful") = false);

    m.def("leaf_words", [](const NetworkDef& net) {
        std::vector<std::pair<std::vector<Index>, std::vector<Index>>> out;
        for (const auto& w : leaf_words(strip_states(build_determining_tree(net))))
            out.emplace_back(raw(w.inputs), raw(w.outputs));
        return out;
    }, py::arg("net"));

    m.def("determine", [](const NetworkDef& net, Index initial, const std::string& policy, std::uint64_t seed) {
        const DeterminationModel model(net);
        InProcessBlackBox bb(net, StateIdx{initial});
        const auto r = run_determination(model, bb, policy_of(policy), seed);
        return py::make_tuple(r.initial.value, r.steps, bb.transcript());
    }, py::arg("net"), py::arg("initial"), py::arg("policy") = "min_gamma", py::arg("seed") = 0);

    m.def("identify", [](const NetworkDef& hidden, Index initial, std::optional<NetworkDef> plan) {
        InProcessBlackBox bb(hidden, StateIdx{initial});
        const ActiveResult r = active_identify(bb, plan ? *plan : hidden);
        return py::make_tuple(r.model.net, r.log.serialize(), bb.resets_sent());
    }, py::arg("hidden"), py::arg("initial"), py::arg("plan") = std::nullopt);

    m.def("check_equivalence", [](const NetworkDef& a, const NetworkDef& b) -> std::optional<std::vector<Index>> {
        const auto f = check_equivalence(a, b);
        if (!f) return std::nullopt;
        std::vector<Index> r;
        for (auto s : *f) r.push_back(s.value);
        return r;
    });
    m.def("is_identifiable", &is_identifiable);

    m.def("observable_type1", &is_observable_type1);
    m.def("observable_type2", &is_observable_type2);
    m.def("observable_type3", &is_observable_type3);
    m.def("observable_type4", &is_observable_type4);
}
