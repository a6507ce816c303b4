import pytest

ACCEPTANCE_RESULTS = {}

TRACE_TEXT = """node_id,t_s,x_m,y_m,vx_mps,vy_mps
1,0,0,0,1,0
1,1,1,0,1,0
1,2,2,0,1,0
2,0,10,0,0,0
2,1,10,0,0,0
2,2,10,0,0,0
3,0,0,12,0,-1
3,1,0,11,0,-1
3,2,0,10,0,-1
4,0,15,5,0.5,0.5
4,1,15.5,5.5,0.5,0.5
4,2,16,6,0.5,0.5
5,0,200,200,0,0
5,1,200,200,0,0
5,2,200,200,0,0
"""


@pytest.fixture
def trace_file(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text(TRACE_TEXT)
    return path


@pytest.fixture
def record_criterion():
    """Store a PASS/FAIL line for the acceptance summary, then assert."""
    def record(key, ok, detail):
        prev = ACCEPTANCE_RESULTS.get(key)
        ok_all = ok if prev is None else prev[0] and ok
        details = detail if prev is None else f"{prev[1]}; {detail}"
        ACCEPTANCE_RESULTS[key] = (ok_all, details)
        assert ok, f"criterion {key}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.split(".")[0]), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
