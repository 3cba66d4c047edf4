import json
import threading
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from weakloop import LoopSession, benchmark_config, run_case
from weakloop.cli import main
from weakloop.service import Session, make_server

CONFIG_PATH = Path(__file__).resolve().parents[1] / "demos" / "configs" / "benchmark.json"


@pytest.fixture()
def config_file(tmp_path):
    assert CONFIG_PATH.is_file(), "bundled benchmark config missing"
    return str(CONFIG_PATH)


class TestCli:
    def test_simulate_case2(self, config_file, tmp_path):
        out = tmp_path / "case2.csv"
        code = main(
            ["simulate", "--config", config_file, "--case", "2", "--out", str(out)]
        )
        assert code == 0
        last = out.read_text().strip().splitlines()[-1].split(",")
        assert abs(float(last[1])) < 1e-6
        manifest = json.loads((tmp_path / "case2.csv.manifest.json").read_text())
        assert manifest["perf_report"]["rho_nominal"] < 1e-12
        assert manifest["perf_report"]["budget_satisfied"] is True
        assert manifest["steady_cost"] == pytest.approx(17.7916667, abs=1e-4)

    def test_missing_config_exits_2(self, tmp_path):
        code = main(
            ["simulate", "--config", "/does/not/exist.json", "--out", str(tmp_path / "x.csv")]
        )
        assert code == 2

    def test_invalid_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"horizon": 10}')
        code = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_bit_identical_reruns(self, config_file, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out_a, out_b):
            code = main(
                [
                    "simulate",
                    "--config",
                    config_file,
                    "--case",
                    "3",
                    "--seed",
                    "11",
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_learn_alias_records_converged_direction(self, config_file, tmp_path):
        out = tmp_path / "case4.csv"
        code = main(["learn", "--config", config_file, "--out", str(out)])
        assert code == 0
        manifest = json.loads((tmp_path / "case4.csv.manifest.json").read_text())
        assert manifest["learner"]["converged"] is True
        oracle = np.array([-17.0 / 12.0, -7.0 / 3.0, -19.0 / 12.0])
        oracle /= np.linalg.norm(oracle)
        learned = np.asarray(manifest["learner"]["direction"])
        assert abs(float(learned @ oracle)) > np.cos(np.radians(1.0))
        # Sidecar checkpoint restores a resumable learner.
        from weakloop import LearnerState

        checkpoint = json.loads((tmp_path / "case4.csv.learner.json").read_text())
        restored = LearnerState.from_dict(checkpoint)
        assert restored.converged
        assert_allclose(restored.current.direction, learned)

    def test_verify_benchmark_passes(self, config_file, capsys):
        code = main(["verify", "--config", config_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "rho_nominal = " in out
        fields = dict(
            line.split(" = ") for line in out.strip().splitlines() if " = " in line
        )
        assert float(fields["rho_nominal"]) < 1e-12
        assert float(fields["worst_dc_deviation"]) == pytest.approx(0.2, abs=1e-9)

    def test_verify_budget_violation_exits_3(self, config_file, tmp_path, capsys):
        data = json.loads(Path(config_file).read_text())
        data["expander"]["gamma"] = 2 * 0.2 * 6 * np.sqrt(3) / 24.5
        doubled = tmp_path / "doubled.json"
        doubled.write_text(json.dumps(data))
        code = main(["verify", "--config", str(doubled)])
        assert code == 3
        assert "budget_satisfied = False" in capsys.readouterr().out

    def test_verify_zero_gain_reports_passthrough(self, config_file, tmp_path, capsys):
        data = json.loads(Path(config_file).read_text())
        data["K_e"] = [[0.0], [0.0], [0.0]]
        data["expander"] = None
        data["policy_kind"] = "nominal"
        path = tmp_path / "zero_gain.json"
        path.write_text(json.dumps(data))
        main(["verify", "--config", str(path)])
        out = capsys.readouterr().out
        fields = dict(
            line.split(" = ") for line in out.strip().splitlines() if " = " in line
        )
        assert float(fields["rho_nominal"]) == pytest.approx(3.5)


@pytest.fixture(scope="module")
def server():
    srv = make_server(port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base
    srv.shutdown()
    srv.server_close()


def _post(url, payload):
    req = urllib.request.Request(
        url,
        data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        return resp.status, json.loads(resp.read())


def _post_expecting_error(url, payload):
    try:
        return _post(url, payload)
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def _get(url):
    with urllib.request.urlopen(url) as resp:
        return resp.status, json.loads(resp.read())


def small_case3_config(horizon=60):
    return benchmark_config(3).replace(horizon=horizon).to_dict()


class TestService:
    def test_create_and_state(self, server):
        status, state = _post(f"{server}/sessions", {"config": small_case3_config()})
        assert status == 201
        assert state["status"] == "awaiting_decision"
        assert state["t"] == 0
        assert state["set"]["kind"] == "segment"
        assert state["gamma"] == pytest.approx(0.0848351, abs=1e-6)
        status2, again = _get(f"{server}/sessions/{state['id']}")
        assert status2 == 200
        assert again == state

    def test_nominal_decisions_reproduce_case2(self, server):
        # delta = 0 every step equals the batch case-2 run, value for value.
        cfg = benchmark_config(2).replace(horizon=40)
        reference = run_case(cfg)
        status, state = _post(
            f"{server}/sessions",
            {"config": benchmark_config(3).replace(horizon=40).to_dict()},
        )
        sid = state["id"]
        while state["status"] == "awaiting_decision":
            _, state = _post(
                f"{server}/sessions/{sid}/decision",
                {"delta": 0.0, "t": state["t"]},
            )
        served_y = state["y_history"]
        ref_y = [float(np.asarray(r.y).reshape(())) for r in reference]
        assert_allclose(served_y, ref_y, atol=0)
        served_f = state["f_so_far"]
        ref_f = [r.cost for r in reference]
        assert_allclose(served_f, ref_f, atol=0)

    def test_worst_case_decisions_settle_at_budget(self, server):
        status, state = _post(
            f"{server}/sessions", {"config": small_case3_config(horizon=80)}
        )
        sid = state["id"]
        while state["status"] == "awaiting_decision":
            _, state = _post(
                f"{server}/sessions/{sid}/decision",
                {"delta": -state["gamma"], "t": state["t"]},
            )
        assert abs(state["y_history"][-1]) == pytest.approx(0.2, abs=1e-3)
        assert max(abs(y) for y in state["y_history"][-8:]) <= 0.2 + 1e-6

    def test_forged_action_rejected_with_geometry(self, server):
        status, state = _post(f"{server}/sessions", {"config": small_case3_config()})
        sid = state["id"]
        before = state
        forged = list(np.asarray(state["v"]) + np.array([5.0, 0.0, 0.0]))
        code, body = _post_expecting_error(
            f"{server}/sessions/{sid}/decision", {"u": forged, "t": state["t"]}
        )
        assert code == 422
        assert body["set"]["kind"] == "segment"
        _, after = _get(f"{server}/sessions/{sid}")
        assert after == before  # rejected decisions leave the state untouched

    def test_out_of_range_delta_rejected(self, server):
        status, state = _post(f"{server}/sessions", {"config": small_case3_config()})
        code, body = _post_expecting_error(
            f"{server}/sessions/{state['id']}/decision",
            {"delta": 10 * state["gamma"], "t": state["t"]},
        )
        assert code == 422

    def test_unknown_session_404(self, server):
        code, _ = _post_expecting_error(
            f"{server}/sessions/nope/decision", {"delta": 0.0}
        )
        assert code == 404
        try:
            _get(f"{server}/sessions/nope")
            assert False, "expected 404"
        except urllib.error.HTTPError as exc:
            assert exc.code == 404

    def test_double_submit_conflict(self, server):
        status, state = _post(f"{server}/sessions", {"config": small_case3_config()})
        sid = state["id"]
        _post(f"{server}/sessions/{sid}/decision", {"delta": 0.0, "t": 0})
        code, _ = _post_expecting_error(
            f"{server}/sessions/{sid}/decision", {"delta": 0.0, "t": 0}
        )
        assert code == 409

    def test_decision_after_done_conflict(self, server):
        status, state = _post(
            f"{server}/sessions", {"config": small_case3_config(horizon=2)}
        )
        sid = state["id"]
        for t in range(2):
            _, state = _post(f"{server}/sessions/{sid}/decision", {"delta": 0.0, "t": t})
        assert state["status"] == "done"
        code, _ = _post_expecting_error(
            f"{server}/sessions/{sid}/decision", {"delta": 0.0}
        )
        assert code == 409

    def test_baselines_ordering(self, server):
        cfg = benchmark_config(3).replace(horizon=120)
        status, state = _post(f"{server}/sessions", {"config": cfg.to_dict()})
        status, payload = _get(f"{server}/sessions/{state['id']}/baselines")
        assert status == 200
        cases = payload["cases"]
        f2 = np.mean(cases["2"]["f"][-12:])
        f3 = np.mean(cases["3"]["f"][-12:])
        f4 = np.mean(cases["4"]["f"][-2400:])
        assert f4 <= f3 <= f2
        assert payload["config_hash"] == cfg.hash()


class TestAutoNominal:
    def test_timeout_advances_with_the_nominal_action(self):
        import time

        cfg = benchmark_config(3).replace(horizon=30)
        session = Session(cfg)
        session.enable_auto_nominal(0.05)
        deadline = time.monotonic() + 3.0
        while session.loop.t < 2 and time.monotonic() < deadline:
            time.sleep(0.05)
        session.close()
        assert session.loop.t >= 2
        # Auto-steps apply the nominal action: identical to driving delta = 0.
        for rec in session.loop.trace:
            assert_allclose(rec.u, rec.v, atol=0)


class TestSessionReplay:
    def test_replay_reproduces_trace_bit_exactly(self, tmp_path):
        from weakloop import emit_trace

        cfg = benchmark_config(3).replace(horizon=50, policy_kind="random")
        session = Session(cfg)
        rng = np.random.default_rng(2)
        while session.loop.pending_set is not None:
            gamma = session.loop.pending_set.gamma
            u = session.loop.pending_set.select(rng.uniform(-gamma, gamma))
            session.decide({"u": list(u)})
        replay = Session(cfg)
        for u in session.decisions:
            replay.decide({"u": list(u)})
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_trace(session.loop.trace, "csv", a)
        emit_trace(replay.loop.trace, "csv", b)
        assert a.read_bytes() == b.read_bytes()
