import pytest

import hdpa

GX = "0fac9dfcbac8313bb2139f1bb755fef65bc391f8b36f8f8eb7371fd558b"
GY = "1006a08a41903350678e58528bebf8a0beff867a7ca36716f7e01f81052"
ORDER = "1000000000000000000000000000013e974e72f8a6922031d2603cfe0d7"


def test_field_roundtrip():
    a = "1234567890abcdef"
    inv = hdpa.field_inv(a)
    assert int(hdpa.field_mul(a, inv), 16) == 1
    assert hdpa.field_mul(a, a, "pm3") == hdpa.field_sqr(a)
    with pytest.raises(ZeroDivisionError):
        hdpa.field_inv("0")


def test_gate_complexity():
    assert hdpa.gate_complexity("pm1") == (3481, 3364)
    assert hdpa.gate_complexity("pm2")[0] < 3481
    assert hdpa.plan_text("pm1") == "classical(59)"


def test_kp():
    assert hdpa.kp("1") == {"infinity": False, "x": GX, "y": GY}
    assert hdpa.kp(ORDER)["infinity"]
    assert hdpa.kp("2b", plan="pm4:2") == hdpa.kp("2b", plan="pm2")
    with pytest.raises(ValueError):
        hdpa.kp("0")
    with pytest.raises(ValueError):
        hdpa.kp("5", plan="pm9")


def test_trace_and_attack():
    values, layout = hdpa.simulate_trace(profile="high-bus")
    assert layout["slots"] == 231
    assert len(values) == 45 + 231 * 54 + layout["postamble_cycles"]
    report = hdpa.attack(values, hdpa.DEFAULT_SCALAR)
    assert len(report["candidates"]) == 54
    assert report["sorted_folded"][0] == 100.0
    assert report["sorted_folded"] == sorted(report["sorted_folded"], reverse=True)
    again, _ = hdpa.simulate_trace(profile="high-bus")
    assert again == values


def test_sweep(tmp_path):
    cells = hdpa.sweep(str(tmp_path), "1f0ff3a9")
    assert len(cells) == 10
    assert all(c["error"] == "" for c in cells)
    assert (tmp_path / "sweep.csv").exists()
