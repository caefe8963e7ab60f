"""JSON-over-HTTP broker facade: offering registry plus ranking requests.

Endpoints::

    PUT  /v1/hierarchy          hierarchy template          -> {"revision": n}
    PUT  /v1/offerings/{id}     one offering record         -> {"revision": n}
    POST /v1/rank               requirements template       -> ranking response
    GET  /v1/reports/{id}       stored report
    GET  /v1/healthz            {"status": "ok", "revision": n}

Errors come back as ``{"error": <code>, "detail": <message>}``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import threading
from dataclasses import dataclass
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any

from .ahp import ahp_rank, injection_from_dict, select_best
from .catalog import (
    Catalog,
    QoSHierarchy,
    ServiceOffering,
    hierarchy_from_dict,
    offering_from_dict,
    offering_to_dict,
    read_json,
    write_json,
)
from .errors import (
    EmptyMatch,
    IoError,
    ParseError,
    RankfarmError,
    RankingError,
    SchemaError,
    ValidationError,
)
from .matcher import fn_match
from .report import report_to_dict
from .requirements import requirements_from_dict

logger = logging.getLogger(__name__)


class HierarchyNotConfigured(RankfarmError):
    pass


class ReportNotFound(RankfarmError):
    pass


@dataclass(frozen=True)
class Snapshot:
    revision: int
    hierarchy: QoSHierarchy | None
    offerings: tuple[ServiceOffering, ...]


def _dumps(data: Any) -> bytes:
    return (json.dumps(data, indent=2) + "\n").encode("utf-8")


class BrokerState:
    """Registry with linearized mutations and snapshot reads."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._snapshot = Snapshot(0, None, ())
        self._reports: dict[str, bytes] = {}

    @property
    def revision(self) -> int:
        return self._snapshot.revision

    def snapshot(self) -> Snapshot:
        return self._snapshot

    def set_hierarchy(self, body: Any) -> int:
        hierarchy = hierarchy_from_dict(body)
        with self._lock:
            snap = self._snapshot
            # existing offerings must stay valid under the new hierarchy
            offerings = tuple(offering_from_dict(offering_to_dict(o), hierarchy) for o in snap.offerings)
            self._snapshot = Snapshot(snap.revision + 1, hierarchy, offerings)
            return self._snapshot.revision

    def put_offering(self, service_id: str, body: Any) -> int:
        if isinstance(body, dict):
            body = {"id": service_id, **body}
            if body["id"] != service_id:
                raise SchemaError(f"body id {body['id']!r} does not match path id {service_id!r}")
        with self._lock:
            snap = self._snapshot
            if snap.hierarchy is None:
                raise HierarchyNotConfigured("PUT /v1/hierarchy before registering offerings")
            offering = offering_from_dict(body, snap.hierarchy)
            ids = [o.service_id for o in snap.offerings]
            if service_id in ids:
                offerings = tuple(offering if o.service_id == service_id else o for o in snap.offerings)
            else:
                offerings = snap.offerings + (offering,)
            self._snapshot = Snapshot(snap.revision + 1, snap.hierarchy, offerings)
            return self._snapshot.revision

    def rank(self, body: Any) -> bytes:
        """Run match, rank and select against the current snapshot.

        The report id is a digest of (revision, request body), so replaying a
        request against an unchanged registry returns the same bytes.
        """
        snap = self._snapshot
        if snap.hierarchy is None:
            raise HierarchyNotConfigured("no hierarchy configured")
        if not isinstance(body, dict):
            raise SchemaError("rank request must be a JSON object")
        req = requirements_from_dict(body, snap.hierarchy)
        injected = None
        if body.get("sub_level_vectors") is not None:
            injected = injection_from_dict({"vectors": body["sub_level_vectors"]})
        catalog = Catalog(snap.offerings, snap.hierarchy)
        match = fn_match(catalog, req.functional)
        if not match.matched:
            raise EmptyMatch("no registered service satisfies the functional requirements")
        report = ahp_rank(catalog, match.matched, req, injected=injected)

        canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
        digest = hashlib.sha256(f"{snap.revision}\n{canonical}".encode("utf-8")).hexdigest()[:16]
        report_dict = report_to_dict(report)
        with self._lock:
            self._reports.setdefault(digest, _dumps(report_dict))
        return _dumps(
            {
                "revision": snap.revision,
                "report_id": digest,
                "matched": list(match.matched),
                "rejected": [
                    {"service_id": r.service_id, "reason": r.reason, "detail": r.detail}
                    for r in match.rejected
                ],
                "best": select_best(report),
                "report": report_dict,
            }
        )

    def get_report(self, report_id: str) -> bytes:
        try:
            return self._reports[report_id]
        except KeyError:
            raise ReportNotFound(f"no report with id {report_id!r}") from None

    def save(self, path: str | Path) -> None:
        snap = self._snapshot
        write_json(
            {
                "revision": snap.revision,
                "hierarchy": snap.hierarchy.to_dict() if snap.hierarchy else None,
                "services": [offering_to_dict(o) for o in snap.offerings],
            },
            path,
        )

    @classmethod
    def load(cls, path: str | Path) -> BrokerState:
        data = read_json(path)
        if not isinstance(data, dict):
            raise SchemaError(f"{path}: snapshot must be an object")
        state = cls()
        hierarchy = hierarchy_from_dict(data["hierarchy"]) if data.get("hierarchy") else None
        offerings: tuple[ServiceOffering, ...] = ()
        if hierarchy is not None:
            offerings = tuple(offering_from_dict(o, hierarchy) for o in data.get("services", []))
        state._snapshot = Snapshot(int(data.get("revision", 0)), hierarchy, offerings)
        return state


def _status_for(exc: RankfarmError) -> HTTPStatus:
    if isinstance(exc, HierarchyNotConfigured):
        return HTTPStatus.CONFLICT
    if isinstance(exc, ReportNotFound):
        return HTTPStatus.NOT_FOUND
    if isinstance(exc, RankingError):
        return HTTPStatus.UNPROCESSABLE_ENTITY
    if isinstance(exc, ValidationError):
        return HTTPStatus.BAD_REQUEST
    return HTTPStatus.INTERNAL_SERVER_ERROR


_OFFERING = re.compile(r"^/v1/offerings/([^/]+)$")
_REPORT = re.compile(r"^/v1/reports/([^/]+)$")


class BrokerHandler(BaseHTTPRequestHandler):
    server: BrokerServer
    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args: Any) -> None:
        logger.info("%s - %s", self.address_string(), format % args)

    def _send(self, status: HTTPStatus, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> Any:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"request body is not valid JSON: {exc}") from None

    def _dispatch(self, method: str) -> None:
        state = self.server.state
        path = self.path.split("?", 1)[0]
        try:
            if method == "GET" and path == "/v1/healthz":
                body = _dumps({"status": "ok", "revision": state.revision})
            elif method == "GET" and (m := _REPORT.match(path)):
                body = state.get_report(m.group(1))
            elif method == "PUT" and path == "/v1/hierarchy":
                body = _dumps({"revision": state.set_hierarchy(self._body())})
            elif method == "PUT" and (m := _OFFERING.match(path)):
                body = _dumps({"revision": state.put_offering(m.group(1), self._body())})
            elif method == "POST" and path == "/v1/rank":
                body = state.rank(self._body())
            else:
                self._send(HTTPStatus.NOT_FOUND, _dumps({"error": "NotFound", "detail": path}))
                return
        except RankfarmError as exc:
            self._send(_status_for(exc), _dumps({"error": exc.code, "detail": str(exc)}))
            return
        except Exception as exc:  # pragma: no cover - defensive
            logger.exception("internal error")
            self._send(HTTPStatus.INTERNAL_SERVER_ERROR, _dumps({"error": "Internal", "detail": str(exc)}))
            return
        self._send(HTTPStatus.OK, body)

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_PUT(self) -> None:
        self._dispatch("PUT")

    def do_POST(self) -> None:
        self._dispatch("POST")


class BrokerServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], state: BrokerState):
        super().__init__(address, BrokerHandler)
        self.state = state


def parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit() or int(port) > 65535:
        raise IoError(f"invalid listen address {addr!r}; expected HOST:PORT")
    return host or "127.0.0.1", int(port)


def make_server(addr: str, state: BrokerState | None = None) -> BrokerServer:
    try:
        return BrokerServer(parse_addr(addr), state or BrokerState())
    except OSError as exc:
        raise IoError(f"cannot listen on {addr}: {exc.strerror or exc}") from None


def serve(addr: str, snapshot: str | Path | None = None) -> None:
    """Run until interrupted; snapshot is loaded on start and written on exit."""
    state = BrokerState.load(snapshot) if snapshot and Path(snapshot).exists() else BrokerState()
    server = make_server(addr, state)
    host, port = server.server_address[:2]
    logger.info("rankfarm broker listening on %s:%s (revision %d)", host, port, state.revision)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        if snapshot:
            state.save(snapshot)
