"""JSON loading and saving for networks and codes."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import gf
from .code import LinearCode
from .errors import FieldMismatch, InputError
from .network import Network, validate


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_json(path) -> tuple[dict, bytes]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _require(d, keys, where):
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected a JSON object")
    missing = [k for k in keys if k not in d]
    if missing:
        raise InputError(f"{where}: missing field(s) {', '.join(missing)}")


def network_from_dict(d: dict, where: str = "network") -> tuple[Network, int | None]:
    _require(d, ["nodes", "edges", "sources", "sink"], where)
    for k, e in enumerate(d["edges"]):
        _require(e, ["id", "tail", "head"], f"{where}: edges[{k}]")
    try:
        net = Network.from_dict(d)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc
    problems = validate(net)
    if problems:
        raise InputError(f"{where}: " + "; ".join(problems))
    q = d.get("field")
    if q is not None and not gf.is_prime_power(int(q)):
        raise InputError(f"{where}: field {q} is not a prime power")
    return net, (int(q) if q is not None else None)


def load_network(path) -> tuple[Network, int | None, str]:
    """Read and validate a network file; returns the network, its field order (or None) and the file hash."""
    d, raw = _read_json(path)
    net, q = network_from_dict(d, str(path))
    return net, q, sha256_bytes(raw)


def code_from_dict(net: Network, d: dict, q: int | None = None, where: str = "code") -> LinearCode:
    _require(d, ["field", "ell", "z"], where)
    if q is not None and int(d["field"]) != q:
        raise FieldMismatch(f"{where}: code is over GF({d['field']}) but the network declares GF({q})")
    try:
        return LinearCode.from_dict(net, d)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def load_code(path, net: Network, q: int | None = None) -> tuple[LinearCode, str]:
    d, raw = _read_json(path)
    return code_from_dict(net, d, q, str(path)), sha256_bytes(raw)


def code_to_dict(code: LinearCode) -> dict:
    d = code.to_dict()
    if code.provenance is not None:
        d["provenance"] = code.provenance.to_dict()
    return d


def save_code(code: LinearCode, path) -> None:
    Path(path).write_text(dumps(code_to_dict(code)))


def save_network(net: Network, path, q: int | None = None) -> None:
    Path(path).write_text(dumps(net.to_dict(q)))
