import math

import pytest

from linkstab.csvout import format_value, write_csv
from linkstab.traces import (
    entropy_rows,
    neighbor_features,
    node_entropies,
    read_trace,
    route_rows,
)


def test_read_trace(trace_file):
    trace = read_trace(trace_file)
    assert list(trace) == [1, 2, 3, 4, 5]
    assert [s.timestamp for s in trace[1]] == [0.0, 1.0, 2.0]
    assert trace[4][1].position == (15.5, 5.5)


def test_read_trace_sorts_and_skips_comments(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# recorded\nnode_id,t_s,x_m,y_m,vx_mps,vy_mps\na,1,0,0,0,0\na,0,1,0,0,0\n")
    trace = read_trace(p)
    assert list(trace) == ["a"]
    assert [s.timestamp for s in trace["a"]] == [0.0, 1.0]


@pytest.mark.parametrize("text", [
    "node_id,t_s,x_m,y_m\n1,0,0,0\n",
    "node_id,t_s,x_m,y_m,vx_mps,vy_mps\n1,0,0,0,0,zero\n",
    "node_id,t_s,x_m,y_m,vx_mps,vy_mps\n1,0,0,0,0,0\n1,0,1,1,0,0\n",
    "node_id,t_s,x_m,y_m,vx_mps,vy_mps\n",
])
def test_bad_traces(tmp_path, text):
    p = tmp_path / "t.csv"
    p.write_text(text)
    with pytest.raises(ValueError):
        read_trace(p)


def test_neighbors_and_features(trace_file):
    feats = neighbor_features(read_trace(trace_file), 20.0)
    assert [f.neighbor_id for f in feats[1]] == [2, 3, 4]
    assert feats[5] == []
    # Node 2 relative to node 1: positions (10,0),(9,0),(8,0) moving at -1 m/s over 1 s.
    a21 = next(f.a_mn for f in feats[2] if f.neighbor_id == 1)
    assert a21 == pytest.approx((9 + 8 + 7) / (3 * 20.0))


def test_speed_feature_option(trace_file):
    feats = neighbor_features(read_trace(trace_file), 20.0, feature="speed")
    a12 = next(f.a_mn for f in feats[1] if f.neighbor_id == 2)
    assert a12 == 1.0


def test_single_sample_needs_horizon(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("node_id,t_s,x_m,y_m,vx_mps,vy_mps\n1,0,0,0,0,0\n2,0,10,0,0,0\n")
    trace = read_trace(p)
    with pytest.raises(ValueError):
        neighbor_features(trace, 20.0)
    feats = neighbor_features(trace, 20.0, horizon=1.0)
    assert feats[1][0].a_mn == 0.5


def test_entropy_and_routes(trace_file):
    feats = neighbor_features(read_trace(trace_file), 20.0)
    ents = node_entropies(feats)
    assert ents[5] is None
    assert all(0 < ents[n] <= 1 for n in (1, 2, 3, 4))
    rows = list(route_rows(ents, [[1, 2, 3], [5, 1]]))
    assert rows[0][:3] == (0, "1-2-3", 2)
    assert rows[0][3] == pytest.approx(ents[1] * ents[2])
    assert rows[0][4] == pytest.approx(-math.log(ents[1]) - math.log(ents[2]))
    assert rows[1][3:] == (None, None)
    assert len(list(entropy_rows(feats, ents))) == sum(len(f) for f in feats.values())


@pytest.mark.parametrize("route", [[1], [1, 99]])
def test_bad_routes(trace_file, route):
    ents = node_entropies(neighbor_features(read_trace(trace_file), 20.0))
    with pytest.raises(ValueError):
        list(route_rows(ents, [route]))


def test_format_and_write():
    assert [format_value(v) for v in (None, True, 3, 0.1, math.inf)] == ["", "true", "3", "0.1", "inf"]
    import io
    buf = io.StringIO()
    write_csv(buf, ("a", "b"), [(1, "x,y")], {"seed": 1})
    assert buf.getvalue() == '# seed=1\na,b\n1,"x,y"\n'
