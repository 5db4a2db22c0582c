import json
import os
import subprocess

import pytest

import bcnkit

DATA = os.environ.get("BCN_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))
FIXTURE = os.path.join(DATA, "fixture.bcn")


@pytest.fixture
def net():
    return bcnkit.reference_network()


def test_fixture_file_matches(net):
    assert bcnkit.load_model(FIXTURE) == net
    assert bcnkit.parse_model(net.serialize()) == net
    assert (net.ell, net.m, net.n) == (1, 3, 2)


def test_analyze(net):
    r = bcnkit.analyze(net)
    assert r["gamma"] == {0: 0, 1: 2, 2: 1, 3: 1}
    assert r["online"] and r["controllable"] and r["identifiable"]
    assert not r["type3"]
    assert r["hierarchy_consistent"]
    assert bcnkit.analyze(net, faithful=True)["gamma"] == r["gamma"]


def test_zeta_and_gamma(net):
    assert bcnkit.zeta(net, range(8), None, 1) == [1, 2, 3]
    assert bcnkit.zeta(net, [1, 2, 3], 1, 2) == [4, 5]
    assert bcnkit.zeta(net, [4, 5], 1, 3) == [6]
    assert bcnkit.gamma(net, [1, 2, 3]) == 2
    assert bcnkit.gamma(net, [7]) == 0


def test_non_observable_gamma_is_none():
    flat = bcnkit.Network(1, 2, 1, [0] * 8, [0] * 4)
    assert bcnkit.analyze(flat)["gamma"] == {0: None}
    assert not bcnkit.is_online_observable(flat)
    with pytest.raises(bcnkit.BcnError):
        bcnkit.graph(flat)


def test_graph(net):
    g = json.loads(bcnkit.graph(net, "json", faithful=True))
    assert len(g["vertices"]) == 14
    assert bcnkit.graph(net).startswith("digraph")


@pytest.mark.parametrize("hidden", range(8))
def test_determine(net, hidden):
    initial, steps, transcript = bcnkit.determine(net, hidden)
    assert initial == hidden
    assert steps == [0, 2, 2, 1, 1, 1, 1, 1][hidden]
    assert not any("RESET" in line for line in transcript)


def test_identify(net):
    model, log, resets = bcnkit.identify(net, 3)
    assert resets == 0
    assert log.startswith("IO v1")
    f = bcnkit.check_equivalence(net, model)
    assert f is not None
    for s in range(8):
        assert model.observe(f[s]) == net.observe(s)
        for i in range(2):
            assert model.step(i, f[s]) == f[net.step(i, s)]


def test_parse_error():
    with pytest.raises(bcnkit.ParseError):
        bcnkit.parse_model("bcn 1\ninputs 1\n")


@pytest.mark.skipif("BCN_CLI" not in os.environ, reason="command line tool not given")
def test_cli_serve_round_trip(net):
    out = subprocess.run(
        [os.environ["BCN_CLI"], "serve", "--stdio", "--initial", "5", FIXTURE],
        input="IN 1\nQUIT\n", capture_output=True, text=True, check=True,
    ).stdout
    assert out == "OUT 2\nOUT 3\nBYE\n"
