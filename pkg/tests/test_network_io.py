"""Network file format and structural validation."""

import numpy as np
import pytest

from gridplan.config import bundled_data_dir
from gridplan.core import Line, NetworkModel, load_network, save_network
from gridplan.errors import DataError


def test_bundled_feeder_shape():
    net = load_network(bundled_data_dir() / "ieee33_network.csv")
    assert net.n_buses == 33
    assert net.n_lines == 32
    assert net.slack_bus == 1
    assert net.v_base_kv == 12.66
    assert (net.v_min_pu, net.v_max_pu) == (0.95, 1.05)
    assert np.all(net.s_base_kw == 1000.0)
    first = net.lines[0]
    assert (first.from_bus, first.to_bus, first.r_ohm) == (1, 2, 0.0922)


def test_bundled_feeder_is_radial_tree():
    net = load_network(bundled_data_dir() / "ieee33_network.csv")
    # validate() already ran in the constructor; spot-check reachability
    fi, ti = net.edge_index_arrays()
    assert len(fi) == net.n_buses - 1
    seen = {net.bus_index(net.slack_bus)}
    frontier = True
    while frontier:
        frontier = False
        for a, b in zip(fi, ti):
            if (a in seen) != (b in seen):
                seen.update((int(a), int(b)))
                frontier = True
    assert len(seen) == net.n_buses


def test_round_trip_exact(tmp_path, roomy_net):
    path = tmp_path / "net.csv"
    save_network(roomy_net, path)
    back = load_network(path)
    assert back.buses == roomy_net.buses
    assert back.lines == roomy_net.lines  # repr floats survive exactly
    assert back.v_base_kv == roomy_net.v_base_kv
    assert back.slack_bus == roomy_net.slack_bus
    assert np.array_equal(back.s_base_kw, roomy_net.s_base_kw)


def test_round_trip_awkward_floats(tmp_path):
    net = NetworkModel(
        buses=(1, 2),
        lines=(Line(1, 2, 0.1 + 0.2, 123.456789012345),),
        v_base_kv=12.66,
        v_min_pu=0.95,
        v_max_pu=1.05,
        s_base_kw=np.array([0.0, 1.0 / 3.0]),
    )
    path = tmp_path / "net.csv"
    save_network(net, path)
    back = load_network(path)
    assert back.lines[0].r_ohm == net.lines[0].r_ohm
    assert back.s_base_kw[1] == net.s_base_kw[1]


def _write(tmp_path, text):
    p = tmp_path / "net.csv"
    p.write_text(text)
    return p


GOOD = """\
[meta]
key,value
v_base_kv,12.66
v_min_pu,0.95
v_max_pu,1.05
slack_bus,1

[buses]
bus_id,s_base_kw
1,0
2,100

[lines]
from,to,r_ohm,p_max_kw
1,2,0.05,400
"""


def test_parse_minimal_file(tmp_path):
    net = load_network(_write(tmp_path, GOOD))
    assert net.n_buses == 2 and net.n_lines == 1


def test_comments_and_blank_lines(tmp_path):
    text = "# feeder data\n\n" + GOOD.replace("[buses]", "# buses next\n[buses]")
    net = load_network(_write(tmp_path, text))
    assert net.n_buses == 2


def test_missing_file():
    with pytest.raises(DataError, match="not found"):
        load_network("/nonexistent/net.csv")


def test_unknown_section(tmp_path):
    with pytest.raises(DataError, match=r"unknown section"):
        load_network(_write(tmp_path, GOOD + "\n[frobs]\na,b\n1,2\n"))


def test_data_before_section(tmp_path):
    with pytest.raises(DataError, match="before any section"):
        load_network(_write(tmp_path, "a,b\n" + GOOD))


def test_bad_header(tmp_path):
    with pytest.raises(DataError, match="header must be"):
        load_network(_write(tmp_path, GOOD.replace("bus_id,s_base_kw", "bus,cap")))


def test_unparseable_row(tmp_path):
    with pytest.raises(DataError, match="cannot parse"):
        load_network(_write(tmp_path, GOOD.replace("1,2,0.05,400", "1,2,soft,400")))


def test_missing_meta_key(tmp_path):
    with pytest.raises(DataError, match="missing meta keys"):
        load_network(_write(tmp_path, GOOD.replace("v_base_kv,12.66\n", "")))


def _net(**kw):
    base = dict(
        buses=(1, 2, 3),
        lines=(Line(1, 2, 0.1, 100.0), Line(2, 3, 0.1, 100.0)),
        v_base_kv=12.66,
        v_min_pu=0.95,
        v_max_pu=1.05,
        s_base_kw=np.zeros(3),
        slack_bus=1,
    )
    base.update(kw)
    return NetworkModel(**base)


def test_validation_rejects_cycle():
    with pytest.raises(DataError, match="cycle"):
        _net(lines=(Line(1, 2, 0.1, 100.0), Line(2, 3, 0.1, 100.0), Line(3, 1, 0.1, 100.0)))


def test_validation_rejects_disconnected():
    with pytest.raises(DataError, match="radial network requires"):
        _net(lines=(Line(1, 2, 0.1, 100.0),))


def test_validation_rejects_stranded_component():
    with pytest.raises(DataError, match="disconnected"):
        _net(buses=(1, 2, 3, 4), lines=(
            Line(1, 2, 0.1, 100.0), Line(1, 2, 0.2, 100.0), Line(3, 4, 0.1, 100.0),
        ))


def test_validation_rejects_duplicate_bus():
    with pytest.raises(DataError, match="duplicate"):
        _net(buses=(1, 2, 2))


def test_validation_rejects_unknown_line_bus():
    with pytest.raises(DataError, match="unknown bus"):
        _net(lines=(Line(1, 2, 0.1, 100.0), Line(2, 9, 0.1, 100.0)))


def test_validation_rejects_bad_slack():
    with pytest.raises(DataError, match="slack"):
        _net(slack_bus=7)


def test_validation_rejects_negative_resistance():
    with pytest.raises(DataError, match="negative resistance"):
        _net(lines=(Line(1, 2, -0.1, 100.0), Line(2, 3, 0.1, 100.0)))


def test_validation_rejects_zero_line_limit():
    with pytest.raises(DataError, match="non-positive limit"):
        _net(lines=(Line(1, 2, 0.1, 0.0), Line(2, 3, 0.1, 100.0)))


def test_validation_rejects_bad_voltage_band():
    with pytest.raises(DataError, match="straddle"):
        _net(v_min_pu=1.01)


def test_validation_rejects_negative_hosting():
    with pytest.raises(DataError, match="non-negative"):
        _net(s_base_kw=np.array([0.0, -1.0, 0.0]))


def test_bus_index_lookup(roomy_net):
    assert roomy_net.bus_index(3) == 2
    with pytest.raises(DataError, match="unknown bus"):
        roomy_net.bus_index(99)
