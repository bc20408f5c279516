"""Reference implementations used only by the tests.

Each one is built a different way from the library code it checks: dense
embedding by index arithmetic instead of tensor contraction, the DFT from
its w^{xy} entries, GF(2) products on 0/1 numpy arrays instead of packed ints.
"""

from __future__ import annotations

import numpy as np

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def embed(gate: np.ndarray, wires: list[int], n_w: int) -> np.ndarray:
    """Full 2^n_w operator acting as ``gate`` on ``wires`` (first wire = MSB of gate)."""
    d = len(wires)
    dim = 2**n_w
    x = np.arange(dim)
    a = np.zeros(dim, dtype=np.int64)
    for j, w in enumerate(wires):
        a |= ((x >> (n_w - 1 - w)) & 1) << (d - 1 - j)
    mask = 0
    for w in wires:
        mask |= 1 << (n_w - 1 - w)
    rest = x & ~mask
    out = np.zeros((dim, dim), dtype=complex)
    for b in range(2**d):
        y = rest.copy()
        for j, w in enumerate(wires):
            y |= ((b >> (d - 1 - j)) & 1) << (n_w - 1 - w)
        out[y, x] += gate[b, a]
    return out


def gate_matrix(g) -> np.ndarray:
    """Matrix of a library gate from first principles (UCRs included)."""
    k = g.kind
    if k == "h":
        return H.astype(complex)
    if k == "s":
        return np.diag([1, 1j])
    if k in ("rx", "ry", "rz"):
        return _rot(k[1], g.theta)
    if k == "cnot":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if k == "swap":
        return np.eye(4)[[0, 2, 1, 3]].astype(complex)
    if k == "cr":
        out = np.eye(4, dtype=complex)
        out[2:, 2:] = _rot(g.axis, g.theta)
        return out
    if k == "local_u":
        return np.asarray(g.matrix)
    if k == "ucr":
        # qubits are (target, controls...); build with controls leading, then move the target first
        c = len(g.qubits) - 1
        blocks = np.zeros((2 ** (c + 1),) * 2, dtype=complex)
        for j, t in enumerate(g.angles):
            blocks[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = _rot(g.axis, t)
        # blocks acts on (controls..., target); reorder to (target, controls...)
        n = c + 1
        order = [c] + list(range(c))
        return _reorder(blocks, order, n)
    raise ValueError(k)


def _rot(axis: str, theta: float) -> np.ndarray:
    paulis = {
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]]),
        "z": np.diag([1.0 + 0j, -1.0]),
    }
    if axis == "p":
        return np.diag([1, np.exp(1j * theta)])
    p = paulis[axis]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * p


def _reorder(u: np.ndarray, order: list[int], n: int) -> np.ndarray:
    """Operator acting on qubit j as u acted on qubit order[j]."""
    dim = 2**n
    perm = np.zeros(dim, dtype=np.int64)
    for x in range(dim):
        y = 0
        for j in range(n):
            bit = (x >> (n - 1 - order[j])) & 1
            y |= bit << (n - 1 - j)
        perm[x] = y
    # p maps |x> to |perm[x]>
    p = np.zeros((dim, dim))
    p[perm, np.arange(dim)] = 1
    return p @ u @ p.T


def dense_circuit(c) -> np.ndarray:
    """Full unitary of a distributed circuit by multiplying embedded gates."""
    index = c.wire_index()
    n_w = c.num_wires
    u = np.eye(2**n_w, dtype=complex)
    for g in c.gates:
        u = embed(gate_matrix(g), [index[q] for q in g.qubits], n_w) @ u
    return u


def data_action(c) -> tuple[np.ndarray, float]:
    """(V, leakage): the data-to-data block with clean ancillas, read at the output layout."""
    full = dense_circuit(c)
    index = c.wire_index()
    n_w = c.num_wires

    def idx(wires):
        out = np.zeros(2 ** len(wires), dtype=np.int64)
        for j, w in enumerate(wires):
            out |= ((np.arange(2 ** len(wires)) >> (len(wires) - 1 - j)) & 1) << (n_w - 1 - w)
        return out

    cols = idx([index[q] for q in c.data_in()])
    rows = idx([index[q] for q in c.output_layout()])
    sub = full[np.ix_(rows, cols)]
    leak = float(np.max(1 - np.sum(np.abs(sub) ** 2, axis=0)))
    return sub, leak


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min_phi ||a - e^{i phi} b||_2, scanning the optimal trace phase."""
    t = np.trace(b.conj().T @ a)
    ph = t / abs(t) if abs(t) > 0 else 1.0
    return float(np.linalg.norm(a - ph * b, 2))


def bit_reverse(v: int, n: int) -> int:
    return int(format(v, f"0{n}b")[::-1], 2) if n else 0


def dft(n: int) -> np.ndarray:
    dim = 2**n
    x = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(x, x) / dim) / np.sqrt(dim)


def plain_qft(n: int) -> np.ndarray:
    """QFT without the final reversal: output qubit j carries 0.x_j...x_{n-1}."""
    f = dft(n)
    rev = [bit_reverse(y, n) for y in range(2**n)]
    out = np.zeros_like(f)
    out[rev] = f
    return out


def f2_apply(mat01: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Rows of ``bits`` (batch, n) mapped by y = M x over GF(2)."""
    return (bits @ mat01.T) % 2


def unpack(values, n: int) -> np.ndarray:
    return np.array([[(int(v) >> j) & 1 for j in range(n)] for v in values], dtype=np.int64)


def pack(bits: np.ndarray) -> list[int]:
    return [sum(int(b) << j for j, b in enumerate(row)) for row in bits]


def cnot_list_bits(n: int, gates, bits: np.ndarray) -> np.ndarray:
    out = bits.copy()
    for c, t in gates:
        out[:, t] ^= out[:, c]
    return out


def f2_rank_dense(a: np.ndarray) -> int:
    a = (np.asarray(a, dtype=np.int64) % 2).copy()
    r = 0
    rows, cols = a.shape
    for col in range(cols):
        piv = next((i for i in range(r, rows) if a[i, col]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, col]:
                a[i] ^= a[r]
        r += 1
    return r
