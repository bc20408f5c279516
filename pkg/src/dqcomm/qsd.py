"""Quantum Shannon decomposition with uniformly controlled rotations.

One step writes an n-qubit unitary as seven time-ordered factors

    V1, UCR_z, V2, UCR_y, V3, UCR_z, V4

where the V factors act on qubits 1..n-1 and every UCR targets qubit 0 with
qubits 1..n-1 as controls (qubit 0 is the most significant bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import InvalidInput
from .linalg import check_unitary, cosine_sine_decompose


def demultiplex(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Write a (+) b as (I (x) v) . UCR_z(angles) . (I (x) w).

    Uses a = v D w and b = v D^dagger w, so a b^dagger = v D^2 v^dagger; the
    eigenbasis comes from a complex Schur form, which stays orthonormal when
    eigenvalues cluster.
    """
    t, v = sla.schur(a @ b.conj().T, output="complex")
    d = np.sqrt(np.diagonal(t))
    w = d[:, None] * (v.conj().T @ b)
    angles = -2.0 * np.angle(d)
    return v, angles, w


@dataclass(frozen=True)
class QsdFactor:
    """Either a unitary on the trailing qubits or a UCR on the leading one."""

    kind: str  # "unitary" or "ucr"
    matrix: np.ndarray | None = None
    axis: str | None = None
    angles: np.ndarray | None = None


def qsd_step(u) -> list[QsdFactor]:
    u = check_unitary(u, "QSD input")
    dim = u.shape[0]
    if dim < 2 or dim & (dim - 1):
        raise InvalidInput("QSD needs a 2^n x 2^n unitary with n >= 1")
    csd = cosine_sine_decompose(u)
    vl, al, wl = demultiplex(*csd.left)
    vr, ar, wr = demultiplex(*csd.right)
    return [
        QsdFactor("unitary", matrix=wr),
        QsdFactor("ucr", axis="z", angles=ar),
        QsdFactor("unitary", matrix=vr),
        QsdFactor("ucr", axis="y", angles=2.0 * csd.theta),
        QsdFactor("unitary", matrix=wl),
        QsdFactor("ucr", axis="z", angles=al),
        QsdFactor("unitary", matrix=vl),
    ]


@dataclass(frozen=True)
class PeelItem:
    """A factor of a peel-against-first decomposition.

    ``unitary``: acts on qubits r..n-1. ``ucr``: target ``depth`` with controls
    depth+1..n-1 in order.
    """

    kind: str
    matrix: np.ndarray | None = None
    axis: str | None = None
    angles: np.ndarray | None = None
    depth: int = 0


def decompose_against_first(u, r: int) -> list[PeelItem]:
    """Apply the QSD step r times down the leading qubits.

    Yields 4^r unitaries on the last n-r qubits and 3*4^i UCRs at depth i < r,
    in time order.
    """
    u = np.asarray(u, dtype=complex)
    n = int(round(np.log2(u.shape[0])))
    if not 0 <= r < max(n, 1):
        raise InvalidInput(f"r must satisfy 0 <= r < n, got r={r}, n={n}")

    def rec(v: np.ndarray, depth: int) -> list[PeelItem]:
        if depth == r:
            return [PeelItem("unitary", matrix=v)]
        out = []
        for f in qsd_step(v):
            if f.kind == "unitary":
                out.extend(rec(f.matrix, depth + 1))
            else:
                out.append(PeelItem("ucr", axis=f.axis, angles=f.angles, depth=depth))
        return out

    return rec(u, 0)


def peel_counts(r: int) -> dict[str, int]:
    """Counts promised by the peel-against-first construction."""
    return {
        "ucr": sum(3 * 4**i for i in range(r)),
        "unitaries": 4**r,
        "crossing": sum(3 * 4**i * (2 ** (r - i) + 2) for i in range(r)),
        "crossing_bound": 6 * 4**r,
        "children": sum(3 * 4**i * 2 ** (r - i) for i in range(r)),
        "children_bound": 3 * 4**r,
    }
