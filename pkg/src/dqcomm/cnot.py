"""Distributed CNOT circuits and layered Clifford circuits.

A CNOT circuit on n bits acts as x -> M x over GF(2). Everything here builds
M block by block: diagonal blocks are local CNOT circuits, off-diagonal blocks
compute a parity on the source processor's ancilla and add it into each
target row with a single (possibly routed) nonlocal CNOT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .certificate import Certificate
from .circuit import ANCILLA, DistributedCircuit, Gate, Partition, QubitRef, balanced_sizes
from .errors import InsufficientAncilla, InvalidDag, InvalidInput, NotInvertible
from .gf2 import F2Matrix, cnot_circuit_matrix, f2_local_synth, f2_plu, f2_random_invertible
from .topology import Topology, route_state


def cnot_to_f2(gates, n: int) -> F2Matrix:
    """Matrix of a CNOT list given as (control, target) pairs or ("cnot", c, t)."""
    pairs = []
    for g in gates:
        if isinstance(g, Gate):
            raise InvalidInput("pass logical (control, target) pairs, not distributed gates")
        g = tuple(g)
        if len(g) == 3 and g[0] == "cnot":
            g = g[1:]
        if len(g) != 2 or not all(isinstance(v, (int, np.integer)) for v in g):
            raise InvalidInput(f"not a CNOT: {g!r}")
        c, t = int(g[0]), int(g[1])
        if not (0 <= c < n and 0 <= t < n):
            raise InvalidInput(f"CNOT {g} outside 0..{n - 1}")
        pairs.append((c, t))
    return cnot_circuit_matrix(n, pairs)


# DAG circuits


@dataclass(frozen=True)
class DagCnotSpec:
    """Directed edge (i, j) is a CNOT with control i and target j."""

    n: int
    edges: tuple[tuple[int, int], ...]
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                raise InvalidDag(f"bad edge ({i}, {j}) for n={self.n}")
        object.__setattr__(self, "edges", edges)
        order = self.order
        if order is None:
            order = _topological_order(self.n, edges)
        order = tuple(int(v) for v in order)
        if sorted(order) != list(range(self.n)):
            raise InvalidDag("order must list every vertex once")
        pos = {v: t for t, v in enumerate(order)}
        for i, j in edges:
            if pos[i] >= pos[j]:
                raise InvalidDag(f"edge ({i}, {j}) goes against the given order")
        object.__setattr__(self, "order", order)

    def gate_list(self) -> list[tuple[int, int]]:
        """Edges in execution order: by control position, then target position."""
        pos = {v: t for t, v in enumerate(self.order)}
        return sorted(self.edges, key=lambda e: (pos[e[0]], pos[e[1]]))

    def matrix(self) -> F2Matrix:
        return cnot_circuit_matrix(self.n, self.gate_list())

    @classmethod
    def from_lower_triangular(cls, m: F2Matrix, order: Sequence[int] | None = None) -> "DagCnotSpec":
        """A DAG whose circuit has matrix m, lower unitriangular in ``order``."""
        n = m.nrows
        order = list(range(n)) if order is None else list(order)
        pos = {v: t for t, v in enumerate(order)}
        for i in range(n):
            for j in range(n):
                if (m[i, j] and pos[j] > pos[i]) or (i == j and not m[i, j]):
                    raise InvalidInput("matrix is not unit lower-triangular in the given order")
        # controls fire in order, so each target collects its controls' final
        # values: y = x + A y, hence A = I + m^-1
        inv = m.inverse()
        edges = [(u, v) for v in order for u in order[: pos[v]] if inv[v, u]]
        spec = cls(n, tuple(edges), tuple(order))
        if spec.matrix() != m:
            raise AssertionError("DAG reconstruction mismatch")
        return spec


def _topological_order(n: int, edges) -> tuple[int, ...]:
    indeg = [0] * n
    out: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        out[i].append(j)
        indeg[j] += 1
    ready = sorted(v for v in range(n) if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort()
    if len(order) != n:
        raise InvalidDag("edge list has a cycle")
    return tuple(order)


# block-triangular emission


PathFn = Callable[[int, int], list[int]]


def _direct(u: int, v: int) -> list[int]:
    return [u] if u == v else [u, v]


def _long_cnot(c: DistributedCircuit, ctrl: QubitRef, tgt: QubitRef, paths: PathFn):
    """CNOT across a path of length L using 2L - 1 nonlocal gates."""
    path = paths(ctrl.proc, tgt.proc)
    if len(path) <= 2:
        c.append(Gate.cnot(ctrl, tgt))
        return
    if c.m < 1:
        raise InsufficientAncilla("routing a CNOT needs one ancilla per relay processor")
    near = route_state(c, ctrl, path[:-1])
    c.append(Gate.cnot(near, tgt))
    route_state(c, near, path[-2::-1], dst=ctrl)


def _long_swap(c: DistributedCircuit, a: QubitRef, b: QubitRef, paths: PathFn):
    """SWAP across a path of length L using 2L - 1 nonlocal gates."""
    path = paths(a.proc, b.proc)
    if len(path) <= 2:
        c.append(Gate.swap(a, b))
        return
    route_state(c, a, path, dst=b)
    # b's old state now sits on ancilla slot 0 of the processor before b
    route_state(c, QubitRef(path[-2], 0, ANCILLA), path[-2::-1], dst=a)


def _emit_local(c: DistributedCircuit, sub: F2Matrix, refs: Sequence[QubitRef]):
    for ctl, tgt in f2_local_synth(sub):
        c.append(Gate.cnot(refs[ctl], refs[tgt]))


def _emit_parity_add(c, row_bits: Sequence[int], src: Sequence[QubitRef], tgt: QubitRef, paths: PathFn):
    """tgt ^= XOR of src[j] for j in row_bits."""
    if len(row_bits) == 1:
        _long_cnot(c, src[row_bits[0]], tgt, paths)
        return
    if c.m < 1:
        raise InsufficientAncilla(f"parity needs an ancilla on processor {src[0].proc}")
    a = QubitRef(src[0].proc, 0, ANCILLA)
    compute = [Gate.cnot(src[j], a) for j in row_bits]
    c.extend(compute)
    _long_cnot(c, a, tgt, paths)
    c.extend(compute)


def emit_block_lower(
    c: DistributedCircuit,
    mat: F2Matrix,
    blocks: Sequence[Sequence[int]],
    refs: Sequence[QubitRef],
    paths: PathFn = _direct,
) -> None:
    """Append gates realising x -> mat x for a block lower-triangular mat.

    ``blocks`` lists logical qubits per block; every block sits on one
    processor. Uses the factorisation (D_1 prod_i L_i1)(D_2 prod_i L_i2)...D_k,
    so in time D_k comes first and D_1 last.
    """
    k = len(blocks)
    block_of = {}
    for b, qs in enumerate(blocks):
        for q in qs:
            block_of[q] = b
    for r in range(mat.nrows):
        for col in range(mat.ncols):
            if mat[r, col] and block_of[col] > block_of[r]:
                raise InvalidInput("matrix is not block lower-triangular for these blocks")
    for j in range(k - 1, -1, -1):
        src = list(blocks[j])
        for i in range(j + 1, k):
            for r in blocks[i]:
                bits = [t for t, q in enumerate(src) if mat[r, q]]
                if bits:
                    _emit_parity_add(c, bits, [refs[q] for q in src], refs[r], paths)
        diag = mat.submatrix(src, src)
        if not diag.is_invertible():
            raise NotInvertible("diagonal block is singular")
        _emit_local(c, diag, [refs[q] for q in src])


def emit_permutation(c: DistributedCircuit, perm: Sequence[int], refs: Sequence[QubitRef], paths: PathFn = _direct):
    """Move contents so that logical wire i ends with the old content of perm[i]."""
    n = len(perm)
    where = list(range(n))  # where[v] = wire holding original content v
    holds = list(range(n))  # holds[w] = original content on wire w
    for i in range(n):
        j = where[perm[i]]
        if j == i:
            continue
        _long_swap(c, refs[i], refs[j], paths)
        vi, vj = holds[i], holds[j]
        holds[i], holds[j] = vj, vi
        where[vi], where[vj] = j, i


def _apply_plu(c: DistributedCircuit, mat: F2Matrix, block_order: Sequence[int], paths: PathFn):
    """Append x -> mat x for arbitrary invertible mat via mat = P L U."""
    perm, lmat, umat = f2_plu(mat)
    refs = c.partition.data_refs()
    blocks = [[q for q in range(c.n) if c.partition.assign[q] == p] for p in block_order]
    # U is lower-triangular once qubits and blocks are reversed
    emit_block_lower(c, umat, [b[::-1] for b in blocks[::-1]], refs, paths)
    emit_block_lower(c, lmat, blocks, refs, paths)
    emit_permutation(c, perm, refs, paths)


def dag_cnot_distribute(spec: DagCnotSpec, m: int = 1):
    """Two processors; A holds the first ceil(n/2) vertices of the order and its ancilla."""
    n = spec.n
    h = (n + 1) // 2
    first = set(spec.order[:h])
    part = Partition(n, 2, tuple(0 if v in first else 1 for v in range(n)))
    c = DistributedCircuit(part, m)
    blocks = [list(spec.order[:h]), list(spec.order[h:])]
    mat = spec.matrix()
    emit_block_lower(c, mat, blocks, part.data_refs())
    return c, Certificate("dag-cnot", c.nonlocal_count(), n / 2, {"n": n}).check()


def cnot_distribute(mat: F2Matrix | Sequence[tuple[int, int]], n: int | None = None, m: int = 1):
    """Any invertible CNOT circuit over two processors via PLU."""
    if not isinstance(mat, F2Matrix):
        if n is None:
            raise InvalidInput("a CNOT gate list needs n")
        mat = cnot_to_f2(mat, n)
    if not mat.is_invertible():
        raise NotInvertible("matrix is singular over GF(2)")
    n = mat.nrows
    part = Partition.balanced(n, 2)
    c = DistributedCircuit(part, m)
    _apply_plu(c, mat, [0, 1], _direct)
    return c, Certificate("cnot-plu", c.nonlocal_count(), 2 * n, {"n": n}).check()


def cnot_distribute_topology(mat: F2Matrix, topo: Topology, m: int = 1):
    """k processors over ``topo``; qubits in contiguous blocks by processor index.

    Long-range CNOTs and SWAPs relay through ancilla slot 0 along shortest
    paths, costing 2L - 1 nonlocal gates for a path of length L <= D.
    """
    if not mat.is_invertible():
        raise NotInvertible("matrix is singular over GF(2)")
    n, k = mat.nrows, topo.k
    part = Partition.contiguous(balanced_sizes(n, k))
    c = DistributedCircuit(part, m)
    _apply_plu(c, mat, list(range(k)), topo.shortest_path)
    diam = topo.diameter()
    return c, Certificate(
        "cnot-topology", c.nonlocal_count(), 2 * n * k * diam, {"n": n, "k": k, "diameter": diam}
    ).check()


# layered Clifford circuits

LAYER_KINDS = ("H", "C", "S", "C", "S", "C", "H", "S", "C", "S", "C")


@dataclass(frozen=True)
class CliffordLayers:
    """Eleven layers in time order; H/S layers hold a qubit mask, C layers a matrix."""

    n: int
    layers: tuple

    def __post_init__(self):
        if len(self.layers) != len(LAYER_KINDS):
            raise InvalidInput(f"expected {len(LAYER_KINDS)} layers, got {len(self.layers)}")
        norm = []
        for idx, ((kind, val), want) in enumerate(zip(self.layers, LAYER_KINDS)):
            if kind != want:
                raise InvalidInput(f"layer {idx} must be {want}, got {kind}")
            if kind == "C":
                if not isinstance(val, F2Matrix) or val.nrows != self.n or not val.is_invertible():
                    raise InvalidInput(f"layer {idx} must be an invertible {self.n}x{self.n} bit matrix")
            else:
                val = tuple(int(b) for b in val)
                if len(val) != self.n or any(b not in (0, 1) for b in val):
                    raise InvalidInput(f"layer {idx} mask must have {self.n} bits")
            norm.append((kind, val))
        object.__setattr__(self, "layers", tuple(norm))

    @classmethod
    def trivial(cls, n: int) -> "CliffordLayers":
        return cls(n, tuple((k, F2Matrix.identity(n) if k == "C" else (0,) * n) for k in LAYER_KINDS))

    @classmethod
    def random(cls, n: int, seed=None) -> "CliffordLayers":
        rng = np.random.default_rng(seed)
        layers = []
        for k in LAYER_KINDS:
            if k == "C":
                layers.append((k, f2_random_invertible(n, rng)))
            else:
                layers.append((k, tuple(int(b) for b in rng.integers(0, 2, size=n))))
        return cls(n, tuple(layers))

    def to_dict(self) -> dict:
        out = []
        for kind, val in self.layers:
            if kind == "C":
                out.append({"kind": kind, "matrix": val.to_lists()})
            else:
                out.append({"kind": kind, "mask": list(val)})
        return {"n": self.n, "layers": out}

    @classmethod
    def from_dict(cls, d: dict) -> "CliffordLayers":
        n = int(d["n"])
        layers = []
        for entry in d["layers"]:
            if entry["kind"] == "C":
                layers.append(("C", F2Matrix.from_array(np.array(entry["matrix"], dtype=int).reshape(n, n))))
            else:
                layers.append((entry["kind"], tuple(entry["mask"])))
        return cls(n, tuple(layers))


def clifford_matrix(layers: CliffordLayers) -> np.ndarray:
    """Dense unitary of the layered circuit, built from the layer definitions."""
    n = layers.n
    dim = 2**n
    u = np.eye(dim, dtype=complex)
    h1 = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    idx = np.arange(dim)
    bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
    for kind, val in layers.layers:
        if kind == "H":
            op = np.ones((1, 1))
            for j in range(n):
                op = np.kron(op, h1 if val[j] else np.eye(2))
        elif kind == "S":
            phase = np.ones(dim, dtype=complex)
            for j in range(n):
                if val[j]:
                    phase *= np.where(bits[j] == 1, 1j, 1)
            op = np.diag(phase)
        else:
            op = np.zeros((dim, dim))
            for x in range(dim):
                packed = sum(int(bits[j][x]) << j for j in range(n))
                y = val.apply(packed)
                row = sum(((y >> j) & 1) << (n - 1 - j) for j in range(n))
                op[row, x] = 1
        u = op @ u
    return u


def clifford_distribute(layers: CliffordLayers, m: int = 1, topo: Topology | None = None):
    """Distribute the layered circuit; with ``topo`` each C layer is routed."""
    n = layers.n
    if topo is None or (topo.k == 2 and topo.is_complete()):
        part = Partition.balanced(n, 2)
        order, paths = [0, 1], _direct
        lemma, bound, params = "clifford-layers", 10 * n, {"n": n}
    else:
        part = Partition.contiguous(balanced_sizes(n, topo.k))
        order, paths = list(range(topo.k)), topo.shortest_path
        diam = topo.diameter()
        # five CNOT layers, each within the CNOT topology budget
        lemma, bound = "clifford-topology", 5 * 2 * n * topo.k * diam
        params = {"n": n, "k": topo.k, "diameter": diam}
    c = DistributedCircuit(part, m)
    refs = part.data_refs()
    for kind, val in layers.layers:
        if kind == "C":
            _apply_plu(c, val, order, paths)
        else:
            make = Gate.h if kind == "H" else Gate.s
            c.extend(make(refs[j]) for j in range(n) if val[j])
    return c, Certificate(lemma, c.nonlocal_count(), bound, params).check()
