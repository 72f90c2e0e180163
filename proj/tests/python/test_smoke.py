import math
import struct

import pytest

import sdp_partitioner as sdp


def test_balance_snapshot_hand_values():
    s = sdp.balance_snapshot({0: 10, 1: 4}, 20, 10)
    assert s["load_dev"] == pytest.approx(3.0)
    assert s["w_dev"] == pytest.approx(6.0)
    assert s["th"] == pytest.approx(3.0)
    assert not s["intervene"]
    assert sdp.balance_snapshot({0: 10, 1: 4}, 20, 16)["intervene"]
    assert math.isinf(sdp.balance_snapshot({0: 9, 1: 0}, 5, 0)["th"])


def test_engine_places_and_scales_out():
    g = sdp.synthetic.mesh_3elt_like()
    assert (g.vertex_count, g.edge_count) == (4200, 13722)
    e = sdp.Engine(maxcap=4000, seed=1)
    for v in range(g.vertex_count):
        d = e.add_vertex(v, g.neighbors(v))
        assert d.partition == e.placement(v)
    assert e.partition_count >= 4
    stats = e.stats()
    assert sum(s["internal_edges"] + s["cut_edges"] / 2 for s in stats.values()) == 13722
    assert 0.0 <= e.edge_cut_ratio() <= 1.0
    e.check_invariants()


def test_engine_deletions_and_errors():
    e = sdp.Engine(initial_partitions=2, autoscale=False)
    e.add_vertex(1, [2])
    e.add_vertex(2, [1])
    e.delete_edge(2, 1)
    e.delete_vertex(7)
    assert e.warn_count == 1
    assert e.event_count == 4
    with pytest.raises(RuntimeError):
        e.add_vertex(1)
    with pytest.raises(ValueError):
        sdp.Engine(maxcap=0)


def test_run_and_compare(tmp_path):
    r = sdp.run("synthetic:grqc", seed=3, out=str(tmp_path / "run"))
    assert len(r["series"]) == 4
    assert all(0.0 <= row["edge_cut_ratio"] <= 1.0 for row in r["series"])
    assert (tmp_path / "run" / "metrics.csv").read_text().startswith("seq,interval,edge_cut_ratio")
    again = sdp.run("synthetic:grqc", seed=3)
    assert again["placement"] == r["placement"]
    c = sdp.compare("synthetic:3elt", ["sdp", "hash"], intervals=1, add=100, delete=0)
    assert c["hash"]["final_partitions"] == c["sdp"]["final_partitions"]
    assert c["sdp"]["series"][-1]["edge_cut_ratio"] < c["hash"]["series"][-1]["edge_cut_ratio"]
    with pytest.raises(ValueError):
        sdp.run("synthetic:3elt", bogus=1)


def test_decode_frame():
    payload = struct.pack(">QIQI", 5, 1, 7, 2) + struct.pack(">QQ", 3, 9)
    frame = struct.pack(">I", len(payload) + 2) + bytes([1, 2]) + payload
    d = sdp.decode_frame(frame)
    assert d == {"kind": "PlaceVertex", "seq": 5, "partition": 1, "vertex": 7, "neighbors": [3, 9]}
    with pytest.raises(RuntimeError):
        sdp.decode_frame(frame[:-1])
