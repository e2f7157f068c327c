"""Small reference networks and codes used by the CLI, tests and demos."""

from __future__ import annotations

import numpy as np

from .network import Edge, Network


def reverse_butterfly() -> Network:
    """Two sources feeding a sink over the reverse butterfly (nine edges)."""
    edges = [
        Edge("e1", "s1", "v4"),
        Edge("e2", "s1", "v3"),
        Edge("e3", "s2", "v3"),
        Edge("e4", "s2", "v5"),
        Edge("e5", "v3", "v6"),
        Edge("e6", "v6", "v4"),
        Edge("e7", "v6", "v5"),
        Edge("e8", "v4", "rho"),
        Edge("e9", "v5", "rho"),
    ]
    return Network(["s1", "s2", "v3", "v4", "v5", "v6", "rho"], edges, ["s1", "s2"], "rho")


def two_direct() -> Network:
    """Two sources, each with one edge straight into the sink."""
    return Network(["s1", "s2", "rho"],
                   [Edge("e1", "s1", "rho"), Edge("e2", "s2", "rho")],
                   ["s1", "s2"], "rho")


def two_direct_doubled() -> Network:
    """Like :func:`two_direct` but with two parallel edges per source."""
    return Network(["s1", "s2", "rho"],
                   [Edge("e1", "s1", "rho"), Edge("e2", "s1", "rho"),
                    Edge("e3", "s2", "rho"), Edge("e4", "s2", "rho")],
                   ["s1", "s2"], "rho")


def butterfly_base_locals() -> dict:
    """Local coefficients of the rate-2 sum-computing base code on the reverse butterfly."""
    return {
        "source_columns": {"e1": [1, 2], "e2": [0, 1], "e3": [1, 0], "e4": [2, 1]},
        "pair_coeffs": {
            "e5": {"e2": 1, "e3": 1},
            "e6": {"e5": 1},
            "e7": {"e5": 1},
            "e8": {"e1": 1, "e6": 1},
            "e9": {"e4": 1, "e7": 1},
        },
    }


BUTTERFLY_BASE_GLOBALS = {
    "e1": [1, 2, 0, 0], "e2": [0, 1, 0, 0], "e3": [0, 0, 1, 0], "e4": [0, 0, 2, 1],
    "e5": [0, 1, 1, 0], "e6": [0, 1, 1, 0], "e7": [0, 1, 1, 0],
    "e8": [1, 0, 1, 0], "e9": [0, 1, 0, 1],
}

BUTTERFLY_SECURE_GLOBALS = {
    "e1": [1, 0, 0, 0], "e2": [0, 1, 0, 0], "e3": [0, 0, 0, 1], "e4": [0, 0, 2, 0],
    "e5": [0, 1, 0, 1], "e6": [0, 1, 0, 1], "e7": [0, 1, 0, 1],
    "e8": [1, 1, 0, 1], "e9": [0, 1, 2, 1],
}

# selected columns and per-source completions reproducing the reference secure code
BUTTERFLY_B_COLUMNS = np.array([[1, 2, 1, 2]], dtype=np.int64).T
BUTTERFLY_COMPLETION = [np.array([[0], [1]]), np.array([[1], [0]])]
BUTTERFLY_B = [np.array([[1, 0], [1, 1]]), np.array([[0, 2], [1, 1]])]


def butterfly_base_code():
    from .code import LinearCode
    from .gf import field
    return LinearCode.from_locals(reverse_butterfly(), field(3), 2, [0, 0], butterfly_base_locals())


def butterfly_secure_code():
    from .code import LinearCode
    from .gf import field
    return LinearCode.from_globals(reverse_butterfly(), field(3), 1, [1, 1], BUTTERFLY_SECURE_GLOBALS)


def two_direct_code(q: int = 2):
    """Keyless rate-1 sum code: each source sends its message unchanged."""
    from .code import LinearCode
    from .gf import field
    return LinearCode.from_locals(two_direct(), field(q), 1, [0, 0],
                                  {"source_columns": {"e1": [1], "e2": [1]}, "pair_coeffs": {}})


NETWORKS = {"rbfly": reverse_butterfly, "toy2": two_direct, "toy2x2": two_direct_doubled}
CODES = {
    "rbfly-base": butterfly_base_code,
    "rbfly-secure": butterfly_secure_code,
    "toy2-keyless": two_direct_code,
}
