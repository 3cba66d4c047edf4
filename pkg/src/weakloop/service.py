"""Interactive session service: a human (or any client) as the decision maker.

Sessions wrap the stepping engine and advance one decision at a time over a
small JSON-over-HTTP API:

    POST /sessions                         create a session
    GET  /sessions/{id}                    current state
    POST /sessions/{id}/decision           submit a selection, advance one step
    GET  /sessions/{id}/baselines          precomputed case-2/3/4 traces

The simulation clock is decision-driven: nothing advances until a selection
arrives, and the server never accepts an action outside the published
candidate set, so no client can break the closed-loop guarantee.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .expander import contains
from .sim import LoopSession, ScenarioConfig, apply_case, benchmark_config, run_case

__all__ = ["Session", "SessionStore", "make_server", "serve"]

log = logging.getLogger("weakloop.service")

MEMBERSHIP_TOL = 1e-6


class Session:
    """One decision-driven loop, serialized behind a lock."""

    def __init__(self, cfg: ScenarioConfig, session_id: str | None = None):
        self.id = session_id or uuid.uuid4().hex[:12]
        self.cfg = cfg
        self.loop = LoopSession(cfg)
        self.lock = threading.Lock()
        self.decisions: list[np.ndarray] = []
        self._timer: threading.Timer | None = None
        self.auto_nominal_timeout: float | None = None

    # -- state ----------------------------------------------------------

    @property
    def status(self) -> str:
        return "done" if self.loop.done else "awaiting_decision"

    def state_dict(self) -> dict:
        pending = self.loop.pending_set
        if pending is None:
            set_payload = None
        elif pending.kind == "segment":
            set_payload = {
                "kind": "segment",
                "center": pending.center.tolist(),
                "direction": pending.direction.tolist(),
                "gamma": pending.gamma,
            }
        else:
            set_payload = {
                "kind": "box",
                "center": pending.center.tolist(),
                "half_lengths": pending.half_lengths.tolist(),
            }
        y_history = [float(np.asarray(rec.y).reshape(())) for rec in self.loop.trace]
        f_history = [rec.cost for rec in self.loop.trace]
        y_now = self.loop.pending_y
        return {
            "id": self.id,
            "status": self.status,
            "t": self.loop.t,
            "y": None if y_now is None else float(np.asarray(y_now).reshape(())),
            "v": None if self.loop.pending_v is None else self.loop.pending_v.tolist(),
            "set": set_payload,
            "gamma": (
                pending.gamma
                if pending is not None and pending.kind == "segment"
                else None
            ),
            "f_so_far": f_history,
            "y_history": y_history,
            "delta_rho": self.cfg.delta_rho,
            "config_hash": self.cfg.hash(),
        }

    # -- decisions ------------------------------------------------------

    def decide(self, payload: dict) -> dict:
        """Validate and apply one selection; returns the new state.

        The payload carries ``delta`` (segment parameter) or ``u`` (full
        action), and optionally ``t`` echoing the pending step index, which
        detects double submissions.
        """
        with self.lock:
            if self.loop.done:
                raise ConflictError("session is done; no decision pending")
            if "t" in payload and payload["t"] is not None:
                if int(payload["t"]) != self.loop.t:
                    raise ConflictError(
                        f"decision for step {payload['t']} but step {self.loop.t} is pending"
                    )
            pending = self.loop.pending_set
            if self.loop.no_controller:
                u = np.zeros(self.loop.plant_d.m)
            elif "u" in payload and payload["u"] is not None:
                u = np.asarray(payload["u"], float).reshape(-1)
            elif "delta" in payload and payload["delta"] is not None:
                try:
                    u = pending.select(payload["delta"])
                except Exception as exc:
                    raise RejectedError(str(exc), pending) from exc
            else:
                raise ValueError("decision payload must carry 'delta' or 'u'")
            if pending is not None and not contains(pending, u, MEMBERSHIP_TOL):
                raise RejectedError(
                    "action lies outside the admissible set", pending
                )
            self.loop.advance(u)
            self.decisions.append(u)
            self._restart_timer()
            return self.state_dict()

    # -- optional auto-nominal timeout -----------------------------------

    def enable_auto_nominal(self, timeout: float):
        self.auto_nominal_timeout = timeout
        self._restart_timer()

    def _restart_timer(self):
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None
        if self.auto_nominal_timeout and not self.loop.done:
            self._timer = threading.Timer(self.auto_nominal_timeout, self._auto_step)
            self._timer.daemon = True
            self._timer.start()

    def _auto_step(self):
        with self.lock:
            if not self.loop.done and self.loop.pending_v is not None:
                nominal = self.loop.pending_v.copy()
                self.loop.advance(nominal)
                self.decisions.append(nominal)
        self._restart_timer()

    def close(self):
        if self._timer is not None:
            self._timer.cancel()


class ConflictError(Exception):
    """Decision submitted for a step that is not pending."""


class RejectedError(Exception):
    """Inadmissible action; carries the set geometry for the client."""

    def __init__(self, message: str, pending):
        super().__init__(message)
        self.pending = pending

    def geometry(self) -> dict | None:
        if self.pending is None:
            return None
        if self.pending.kind == "segment":
            return {
                "kind": "segment",
                "center": self.pending.center.tolist(),
                "direction": self.pending.direction.tolist(),
                "gamma": self.pending.gamma,
            }
        return {
            "kind": "box",
            "center": self.pending.center.tolist(),
            "half_lengths": self.pending.half_lengths.tolist(),
        }


class SessionStore:
    """Thread-safe registry of live sessions plus baseline cache."""

    def __init__(self, default_config: ScenarioConfig | None = None):
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        self.default_config = default_config or benchmark_config(3)
        self._baseline_cache: dict[str, dict] = {}

    def create(self, body: dict | None) -> Session:
        body = body or {}
        if "config" in body and body["config"] is not None:
            cfg = ScenarioConfig.from_dict(body["config"])
        else:
            cfg = self.default_config
        if "case" in body and body["case"] is not None:
            cfg = apply_case(cfg, int(body["case"]))
        session = Session(cfg)
        timeout = body.get("auto_nominal_timeout")
        if timeout:
            session.enable_auto_nominal(float(timeout))
        with self.lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self.lock:
            return self.sessions.get(session_id)

    def baselines(self, session: Session) -> dict:
        """Case-2/3/4 traces for the session's configuration, cached."""
        key = session.cfg.hash()
        with self.lock:
            if key in self._baseline_cache:
                return self._baseline_cache[key]
        payload = {"config_hash": key, "cases": {}}
        for case in (2, 3, 4):
            cfg = apply_case(session.cfg, case)
            trace = run_case(cfg)
            payload["cases"][str(case)] = {
                "t": [rec.t for rec in trace],
                "y": [float(np.asarray(rec.y).reshape(())) for rec in trace],
                "f": [rec.cost for rec in trace],
            }
        with self.lock:
            self._baseline_cache[key] = payload
        return payload


def make_server(
    port: int = 0,
    default_config: ScenarioConfig | None = None,
    static_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; port 0 picks a free port."""
    store = SessionStore(default_config)
    static_root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            log.debug("%s - %s", self.address_string(), fmt % args)

        # -- helpers ----------------------------------------------------

        def _send_json(self, code: int, payload: dict):
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _read_body(self) -> dict | None:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return None
            raw = self.rfile.read(length)
            try:
                return json.loads(raw)
            except json.JSONDecodeError:
                raise ValueError("request body is not valid JSON")

        def _session_or_404(self, session_id: str) -> Session | None:
            session = store.get(session_id)
            if session is None:
                self._send_json(404, {"error": f"unknown session {session_id!r}"})
            return session

        # -- routes -----------------------------------------------------

        def do_GET(self):
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            try:
                if parts[:1] == ["sessions"] and len(parts) == 2:
                    session = self._session_or_404(parts[1])
                    if session:
                        self._send_json(200, session.state_dict())
                elif parts[:1] == ["sessions"] and len(parts) == 3 and parts[2] == "baselines":
                    session = self._session_or_404(parts[1])
                    if session:
                        self._send_json(200, store.baselines(session))
                elif static_root is not None:
                    self._serve_static(parts)
                else:
                    self._send_json(404, {"error": "not found"})
            except Exception as exc:  # surface, don't kill the thread
                log.exception("GET %s failed", self.path)
                self._send_json(500, {"error": str(exc)})

        def do_POST(self):
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            try:
                body = self._read_body()
            except ValueError as exc:
                self._send_json(400, {"error": str(exc)})
                return
            try:
                if parts == ["sessions"]:
                    try:
                        session = store.create(body)
                    except (ConfigError, ValueError) as exc:
                        self._send_json(400, {"error": str(exc)})
                        return
                    self._send_json(201, session.state_dict())
                elif len(parts) == 3 and parts[0] == "sessions" and parts[2] == "decision":
                    session = self._session_or_404(parts[1])
                    if session is None:
                        return
                    try:
                        state = session.decide(body or {})
                    except ConflictError as exc:
                        self._send_json(409, {"error": str(exc)})
                        return
                    except RejectedError as exc:
                        self._send_json(
                            422, {"error": str(exc), "set": exc.geometry()}
                        )
                        return
                    except ValueError as exc:
                        self._send_json(400, {"error": str(exc)})
                        return
                    self._send_json(200, state)
                else:
                    self._send_json(404, {"error": "not found"})
            except Exception as exc:
                log.exception("POST %s failed", self.path)
                self._send_json(500, {"error": str(exc)})

        def _serve_static(self, parts):
            rel = "/".join(parts) or "index.html"
            target = (static_root / rel).resolve()
            if not str(target).startswith(str(static_root)) or not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
            content = target.read_bytes()
            ctype = {
                ".html": "text/html",
                ".js": "application/javascript",
                ".css": "text/css",
                ".svg": "image/svg+xml",
            }.get(target.suffix, "application/octet-stream")
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(content)))
            self.end_headers()
            self.wfile.write(content)

    server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
    server.store = store
    return server


def serve(
    port: int = 8000,
    default_config: ScenarioConfig | None = None,
    static_dir: str | None = None,
):
    """Run the service until interrupted; prints the bound port."""
    server = make_server(port, default_config, static_dir)
    bound = server.server_address[1]
    print(f"weakloop service listening on http://127.0.0.1:{bound}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
