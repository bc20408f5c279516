"""Exact and approximate distributed QFT.

Qubit 0 is the most significant. The plain transform (no bit reversal) maps
|x_0 ... x_{n-1}> to a product state whose qubit j is

    (|0> + exp(2 pi i 0.x_j x_{j+1} ... x_{n-1}) |1>) / sqrt(2)

and the bit-reversed transform is the usual DFT with entries w^{xy}/sqrt(2^n).
The circuit is H on qubit i followed by controlled phases R_d onto qubit i
from qubit i + d - 1, where R_d = diag(1, exp(2 pi i / 2^d)). Truncation with
parameter b keeps the rotations whose control distance d - 1 is at most b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .certificate import Certificate
from .circuit import DistributedCircuit, Gate, Partition, balanced_sizes
from .errors import InsufficientAncilla, InvalidInput, TooLarge
from .topology import Topology, route_state

QFT_ORACLE_CAP = 12


@dataclass(frozen=True)
class QftSpec:
    n: int
    bit_reversed: bool = False
    approx_b: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput("QFT needs n >= 1")
        if self.approx_b is not None and self.approx_b < 1:
            raise InvalidInput("truncation depth b must be >= 1")


@dataclass(frozen=True)
class GateGroup:
    """Controlled phases sharing target ``target``; members are (control, d)."""

    target: int
    members: tuple[tuple[int, int], ...]

    def angle(self, d: int) -> float:
        return 2 * math.pi / 2**d


def _spec(spec_or_n, bit_reversed=False, b=None) -> QftSpec:
    if isinstance(spec_or_n, QftSpec):
        return spec_or_n
    return QftSpec(int(spec_or_n), bit_reversed, b)


def qft_matrix(spec: QftSpec | int, bit_reversed: bool = False) -> np.ndarray:
    """Dense QFT built entry by entry from the product formula."""
    spec = _spec(spec, bit_reversed)
    n = spec.n
    if n > QFT_ORACLE_CAP:
        raise TooLarge(f"dense QFT oracle is capped at n={QFT_ORACLE_CAP}")
    dim = 2**n
    x = np.arange(dim)
    y = np.arange(dim)
    # fractional phase for output qubit j is 0.x_j...x_{n-1} = (x mod 2^{n-j}) / 2^{n-j}
    phase = np.zeros((dim, dim))
    for j in range(n):
        yj = (y >> (n - 1 - j)) & 1
        frac = (x % 2 ** (n - j)) / 2 ** (n - j)
        phase += np.outer(yj, frac)
    u = np.exp(2j * np.pi * phase) / np.sqrt(dim)
    if spec.bit_reversed:
        rev = np.array([int(format(v, f"0{n}b")[::-1], 2) for v in y]) if n > 0 else y
        u = u[rev]
    return u


def qft_groups(spec: QftSpec | int, b: int | None = None) -> list[GateGroup]:
    """Groups S_0..S_{n-2}; S_i holds R_2..R_{n-i} onto target i."""
    spec = _spec(spec, b=b)
    n, b = spec.n, spec.approx_b
    groups = []
    for i in range(n - 1):
        members = []
        for j in range(i + 1, n):
            if b is not None and j - i > b:
                break
            members.append((j, j - i + 1))
        groups.append(GateGroup(i, tuple(members)))
    return groups


def qft_gate_list(spec: QftSpec | int, b: int | None = None) -> list[tuple]:
    """Undistributed QFT as ("h", i) and ("cr", control, target, d) tuples."""
    spec = _spec(spec, b=b)
    groups = qft_groups(spec)
    out: list[tuple] = []
    for i in range(spec.n):
        out.append(("h", i))
        if i < len(groups):
            out.extend(("cr", c, i, d) for c, d in groups[i].members)
    return out


def choose_b(n: int, eps: float) -> int:
    """Smallest b >= 1 with 2 pi n 2^-b <= eps."""
    if not eps > 0:
        raise InvalidInput("eps must be positive")
    if n < 1:
        raise InvalidInput("n must be >= 1")
    b = max(1, math.ceil(math.log2(2 * math.pi * n / eps)))
    # correct for rounding in log2 at exact powers of two
    while b > 1 and 2 * math.pi * n * 2.0 ** -(b - 1) <= eps:
        b -= 1
    while 2 * math.pi * n * 2.0**-b > eps:
        b += 1
    return b


def aqft_error_bound(n: int, b: int) -> float:
    return 2 * math.pi * n * 2.0**-b


def aqft_dropped_sum(n: int, b: int) -> float:
    """Sum of ||CR - I|| over dropped rotations; a tighter telescoping bound."""
    total = 0.0
    for dist in range(b + 1, n):
        theta = 2 * math.pi / 2 ** (dist + 1)
        total += (n - dist) * abs(np.exp(1j * theta) - 1)
    return total


# distributed construction


def _emit_groups(c: DistributedCircuit, spec: QftSpec, order: Sequence[int], paths) -> None:
    """Shared emitter. ``order`` lists processors in block order; ``paths(u, v)``
    gives the processor path used to move a state from u to v."""
    refs = c.partition.data_refs()
    block_of = {p: idx for idx, p in enumerate(order)}
    for g in qft_groups(spec) + [GateGroup(spec.n - 1, ())]:
        i = g.target
        tq = refs[i]
        c.append(Gate.h(tq))
        by_proc: dict[int, list[tuple[int, int]]] = {}
        for ctrl, d in g.members:
            by_proc.setdefault(refs[ctrl].proc, []).append((ctrl, d))
        for ctrl, d in by_proc.pop(tq.proc, []):
            c.append(Gate.cr("p", g.angle(d), refs[ctrl], tq))
        if not by_proc:
            continue
        if c.m < 1:
            raise InsufficientAncilla("a crossing gate group needs one ancilla on each remote processor")
        cur, here = tq, tq.proc
        for p in sorted(by_proc, key=block_of.__getitem__):
            cur = route_state(c, cur, paths(here, p))
            here = p
            for ctrl, d in by_proc[p]:
                c.append(Gate.cr("p", g.angle(d), refs[ctrl], cur))
        route_state(c, cur, paths(here, tq.proc), dst=tq)


def _finish_layout(c: DistributedCircuit, spec: QftSpec) -> None:
    if spec.bit_reversed:
        # the DFT's output qubit j is the plain transform's qubit n-1-j
        c.layout_out = c.data_in()[::-1]
        c.restore_layout = False


def pair_crossings(spec: QftSpec, order: Sequence[int], partition: Partition) -> list[int]:
    """For each consecutive block pair, how many groups have members on both sides."""
    refs = partition.data_refs()
    block_of = {p: idx for idx, p in enumerate(order)}
    counts = [0] * max(len(order) - 1, 0)
    for g in qft_groups(spec):
        if not g.members:
            continue
        lo = block_of[refs[g.target].proc]
        hi = max(block_of[refs[ctrl].proc] for ctrl, _ in g.members)
        for t in range(lo, hi):
            counts[t] += 1
    return counts


def qft_distribute_2(spec: QftSpec | int, m: int = 1, bit_reversed: bool = False):
    """Two processors: A holds the first half, B the second; one ancilla on B is used."""
    spec = _spec(spec, bit_reversed)
    if spec.approx_b is not None:
        return aqft_distribute_2(spec, m=m)
    return _two_party(spec, m, "qft-two-party", spec.n)


def aqft_distribute_2(spec: QftSpec, m: int = 1):
    if spec.approx_b is None:
        raise InvalidInput("approximate QFT needs a truncation depth b")
    cert_bound = 2 * spec.approx_b
    return _two_party(spec, m, "aqft-two-party", cert_bound)


def _two_party(spec: QftSpec, m: int, lemma: str, bound: float):
    n = spec.n
    if n >= 2 and m < 1:
        raise InsufficientAncilla("two-party QFT needs m >= 1 ancilla on processor B")
    # A takes the smaller half so at most floor(n/2) groups cross
    part = Partition.contiguous(balanced_sizes(n, 2, larger_last=True))
    c = DistributedCircuit(part, m)
    _emit_groups(c, spec, [0, 1], lambda u, v: [u] if u == v else [u, v])
    _finish_layout(c, spec)
    crossings = pair_crossings(spec, [0, 1], part)
    params = {"n": n, "m": m, "bit_reversed": spec.bit_reversed, "crossing_groups": crossings[0]}
    if spec.approx_b is not None:
        params["b"] = spec.approx_b
        params["error_bound"] = aqft_error_bound(n, spec.approx_b)
    return c, Certificate(lemma, c.nonlocal_count(), bound, params).check()


def dfs_route_certificate(topo: Topology, root: int = 0) -> Certificate:
    """Sum of spanning-tree distances between consecutive preorder vertices."""
    tree = topo.spanning_tree(root)
    order = tree.dfs_preorder(root)
    dists = [tree.distance(order[j], order[j + 1]) for j in range(len(order) - 1)]
    return Certificate("dfs-route", sum(dists), 2 * topo.k - 2, {"order": order, "distances": dists}).check()


def qft_distribute_k(spec: QftSpec | int, topo: Topology, m: int = 1, bit_reversed: bool = False):
    """k processors over ``topo``: contiguous blocks in DFS preorder of a spanning tree.

    A crossing group carries its target through ancilla slot 0 of every later
    processor holding one of its controls, then returns it directly.
    """
    spec = _spec(spec, bit_reversed)
    n, k = spec.n, topo.k
    tree = topo.spanning_tree(0)
    order = tree.dfs_preorder(0)
    sizes = balanced_sizes(n, k)
    assign = []
    for idx, p in enumerate(order):
        assign.extend([p] * sizes[idx])
    part = Partition(n, k, tuple(assign))
    c = DistributedCircuit(part, m)
    _emit_groups(c, spec, order, tree.shortest_path)
    _finish_layout(c, spec)
    route = dfs_route_certificate(topo)
    crossings = pair_crossings(spec, order, part)
    per_group = 4 * k - 4
    if spec.approx_b is None:
        lemma, bound = "qft-k-party", per_group * n
    else:
        lemma, bound = "aqft-k-party", per_group * spec.approx_b
    params = {
        "n": n,
        "k": k,
        "m": m,
        "order": order,
        "route_sum": route.measured,
        "route_bound": route.bound,
        "pair_crossings": crossings,
        "bit_reversed": spec.bit_reversed,
    }
    if spec.approx_b is not None:
        params["b"] = spec.approx_b
        params["error_bound"] = aqft_error_bound(n, spec.approx_b)
        params["max_pair_crossings"] = max(crossings, default=0)
    return c, Certificate(lemma, c.nonlocal_count(), bound, params).check()


def aqft_distribute_k(spec: QftSpec, topo: Topology, m: int = 1):
    if spec.approx_b is None:
        raise InvalidInput("approximate QFT needs a truncation depth b")
    return qft_distribute_k(spec, topo, m=m)
