"""Distributed circuit representation and nonlocal gate counting.

Qubits live on processors. Each processor owns a number of data slots (its
share of the balanced input partition) followed by ``m`` ancilla slots. The
global qubit order used for dense assembly is processor-major with data slots
before ancilla slots. Within any multi-qubit operator the first listed qubit is
the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidCircuit, InvalidInput, InvalidLayout, MustLowerFirst

DATA = "d"
ANCILLA = "a"

TWO_QUBIT_KINDS = ("cnot", "swap", "cr")
ONE_QUBIT_KINDS = ("h", "s", "rx", "ry", "rz")
AXES = ("x", "y", "z")


@dataclass(frozen=True, order=True)
class QubitRef:
    proc: int
    slot: int
    kind: str = DATA

    def __post_init__(self):
        if self.kind not in (DATA, ANCILLA):
            raise InvalidInput(f"qubit kind must be 'd' or 'a', got {self.kind!r}")
        if self.proc < 0 or self.slot < 0:
            raise InvalidInput("negative processor or slot index")

    def __str__(self) -> str:
        return f"{self.proc}:{self.kind}{self.slot}"


def data(proc: int, slot: int) -> QubitRef:
    return QubitRef(proc, slot, DATA)


def anc(proc: int, slot: int = 0) -> QubitRef:
    return QubitRef(proc, slot, ANCILLA)


@dataclass(frozen=True)
class Partition:
    """Assignment of logical data qubits to processors.

    Data qubit ``i`` sits in slot ``r`` of processor ``assign[i]`` where ``r``
    is the number of lower-indexed data qubits on the same processor.
    """

    n: int
    k: int
    assign: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1 or self.n < 0:
            raise InvalidInput("need k >= 1 and n >= 0")
        if len(self.assign) != self.n:
            raise InvalidInput("assignment length differs from n")
        if any(p < 0 or p >= self.k for p in self.assign):
            raise InvalidInput("assignment refers to a missing processor")
        loads = self.loads
        if loads and max(loads) - min(loads) > 1:
            raise InvalidLayout(f"partition is not balanced: loads {loads}")

    @classmethod
    def contiguous(cls, sizes: Sequence[int]) -> "Partition":
        assign = []
        for p, s in enumerate(sizes):
            assign.extend([p] * s)
        return cls(len(assign), len(sizes), tuple(assign))

    @classmethod
    def balanced(cls, n: int, k: int, larger_last: bool = False) -> "Partition":
        return cls.contiguous(balanced_sizes(n, k, larger_last))

    @property
    def loads(self) -> list[int]:
        out = [0] * self.k
        for p in self.assign:
            out[p] += 1
        return out

    def data_ref(self, i: int) -> QubitRef:
        p = self.assign[i]
        slot = sum(1 for j in range(i) if self.assign[j] == p)
        return QubitRef(p, slot, DATA)

    def data_refs(self) -> list[QubitRef]:
        seen = [0] * self.k
        out = []
        for p in self.assign:
            out.append(QubitRef(p, seen[p], DATA))
            seen[p] += 1
        return out


def balanced_sizes(n: int, k: int, larger_last: bool = False) -> list[int]:
    base, extra = divmod(n, k)
    sizes = [base + 1 if p < extra else base for p in range(k)]
    return sizes[::-1] if larger_last else sizes


# gate matrices


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    """R_P(theta) = exp(-i theta P / 2); axis 'p' gives diag(1, e^{i theta})."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    if axis == "p":
        return np.diag([1.0, np.exp(1j * theta)]).astype(complex)
    raise InvalidInput(f"unknown rotation axis {axis!r}")


H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S_MATRIX = np.diag([1, 1j]).astype(complex)
CNOT_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def ucr_matrix(axis: str, angles, target_first: bool = True) -> np.ndarray:
    """Dense matrix of a uniformly controlled rotation.

    Controls are ordered with the first control as most significant bit of the
    angle index. With ``target_first`` the target is the leading tensor factor,
    otherwise it is the trailing one.
    """
    angles = np.asarray(angles, dtype=float)
    c = int(round(np.log2(len(angles))))
    if 2**c != len(angles):
        raise InvalidInput("angle count must be a power of two")
    blocks = [rotation_matrix(axis, t) for t in angles]
    dim = 2 ** (c + 1)
    out = np.zeros((dim, dim), dtype=complex)
    for j, b in enumerate(blocks):
        out[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = b
    if target_first:
        from .linalg import permute_qubits

        out = permute_qubits(out, [c] + list(range(c)))
    return out


@dataclass(frozen=True, eq=False)
class Gate:
    """One operation of a distributed circuit.

    kinds: h, s, rx, ry, rz (theta), cnot (control, target), swap,
    cr (axis in x/y/z/p, theta; control, target), local_u (matrix over the
    listed qubits), ucr (axis, angles; qubits = target then controls).
    """

    kind: str
    qubits: tuple[QubitRef, ...]
    theta: float | None = None
    axis: str | None = None
    matrix: np.ndarray | None = None
    angles: np.ndarray | None = None

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidCircuit(f"{self.kind} gate repeats a qubit: {self.qubits}")
        k = self.kind
        if k in ONE_QUBIT_KINDS:
            if len(self.qubits) != 1:
                raise InvalidCircuit(f"{k} acts on one qubit")
            if k.startswith("r") and self.theta is None:
                raise InvalidCircuit(f"{k} needs an angle")
        elif k in TWO_QUBIT_KINDS:
            if len(self.qubits) != 2:
                raise InvalidCircuit(f"{k} acts on two qubits")
            if k == "cr" and (self.theta is None or self.axis not in AXES + ("p",)):
                raise InvalidCircuit("cr needs an axis and an angle")
        elif k == "local_u":
            if self.matrix is None or self.matrix.shape != (2 ** len(self.qubits),) * 2:
                raise InvalidCircuit("local_u matrix shape does not match its qubits")
            if len({q.proc for q in self.qubits}) != 1:
                raise InvalidCircuit("local_u spans several processors")
        elif k == "ucr":
            if self.axis not in AXES or self.angles is None:
                raise InvalidCircuit("ucr needs an axis and angles")
            if len(self.angles) != 2 ** (len(self.qubits) - 1):
                raise InvalidCircuit("ucr angle count must be 2^controls")
        else:
            raise InvalidCircuit(f"unknown gate kind {k!r}")

    # constructors

    @staticmethod
    def h(q: QubitRef) -> "Gate":
        return Gate("h", (q,))

    @staticmethod
    def s(q: QubitRef) -> "Gate":
        return Gate("s", (q,))

    @staticmethod
    def rot(axis: str, theta: float, q: QubitRef) -> "Gate":
        return Gate("r" + axis, (q,), theta=float(theta))

    @staticmethod
    def cnot(control: QubitRef, target: QubitRef) -> "Gate":
        return Gate("cnot", (control, target))

    @staticmethod
    def swap(a: QubitRef, b: QubitRef) -> "Gate":
        return Gate("swap", (a, b))

    @staticmethod
    def cr(axis: str, theta: float, control: QubitRef, target: QubitRef) -> "Gate":
        return Gate("cr", (control, target), theta=float(theta), axis=axis)

    @staticmethod
    def local(qubits: Sequence[QubitRef], u) -> "Gate":
        return Gate("local_u", tuple(qubits), matrix=np.asarray(u, dtype=complex))

    @staticmethod
    def ucr(axis: str, target: QubitRef, controls: Sequence[QubitRef], angles) -> "Gate":
        return Gate("ucr", (target, *controls), axis=axis, angles=np.asarray(angles, dtype=float))

    # queries

    @property
    def procs(self) -> set[int]:
        return {q.proc for q in self.qubits}

    @property
    def is_nonlocal(self) -> bool:
        if self.kind in TWO_QUBIT_KINDS:
            return self.qubits[0].proc != self.qubits[1].proc
        if self.kind == "ucr" and len(self.procs) > 1:
            raise MustLowerFirst("UCR macro spans processors; lower it before counting")
        return False

    def unitary(self) -> np.ndarray:
        """Matrix over ``self.qubits`` in listed order."""
        k = self.kind
        if k == "h":
            return H_MATRIX
        if k == "s":
            return S_MATRIX
        if k in ("rx", "ry", "rz"):
            return rotation_matrix(k[1], self.theta)
        if k == "cnot":
            return CNOT_MATRIX
        if k == "swap":
            return SWAP_MATRIX
        if k == "cr":
            out = np.eye(4, dtype=complex)
            out[2:, 2:] = rotation_matrix(self.axis, self.theta)
            return out
        if k == "local_u":
            return self.matrix
        return ucr_matrix(self.axis, self.angles, target_first=True)

    def same_as(self, other: "Gate", tol: float = 0.0) -> bool:
        if (self.kind, self.qubits, self.axis) != (other.kind, other.qubits, other.axis):
            return False
        if (self.theta is None) != (other.theta is None):
            return False
        if self.theta is not None and abs(self.theta - other.theta) > tol:
            return False
        for a, b in ((self.matrix, other.matrix), (self.angles, other.angles)):
            if (a is None) != (b is None):
                return False
            if a is not None and (a.shape != b.shape or np.max(np.abs(a - b), initial=0) > tol):
                return False
        return True


@dataclass
class DistributedCircuit:
    partition: Partition
    m: int = 0
    gates: list[Gate] = field(default_factory=list)
    layout_out: list[QubitRef] | None = None
    restore_layout: bool = True

    def __post_init__(self):
        if self.m < 0:
            raise InvalidInput("ancilla count must be >= 0")
        for g in self.gates:
            self._check(g)

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def num_wires(self) -> int:
        return self.n + self.k * self.m

    def wires(self) -> list[QubitRef]:
        """All qubits in global order: processor-major, data before ancilla."""
        out = []
        loads = self.partition.loads
        for p in range(self.k):
            out.extend(QubitRef(p, s, DATA) for s in range(loads[p]))
            out.extend(QubitRef(p, s, ANCILLA) for s in range(self.m))
        return out

    def wire_index(self) -> dict[QubitRef, int]:
        return {q: i for i, q in enumerate(self.wires())}

    def proc_wires(self, p: int) -> list[QubitRef]:
        load = self.partition.loads[p]
        return [QubitRef(p, s, DATA) for s in range(load)] + [QubitRef(p, s, ANCILLA) for s in range(self.m)]

    def data_in(self) -> list[QubitRef]:
        return self.partition.data_refs()

    def output_layout(self) -> list[QubitRef]:
        return list(self.layout_out) if self.layout_out is not None else self.data_in()

    def valid_ref(self, q: QubitRef) -> bool:
        if q.proc >= self.k:
            return False
        if q.kind == DATA:
            return q.slot < self.partition.loads[q.proc]
        return q.slot < self.m

    def _check(self, g: Gate):
        for q in g.qubits:
            if not self.valid_ref(q):
                raise InvalidCircuit(f"gate {g.kind} refers to missing qubit {q}")

    def append(self, g: Gate) -> Gate:
        self._check(g)
        self.gates.append(g)
        return g

    def extend(self, gates: Iterable[Gate]):
        for g in gates:
            self.append(g)

    def nonlocal_count(self) -> int:
        return sum(1 for g in self.gates if g.is_nonlocal)

    def count_by_kind(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            if g.kind in TWO_QUBIT_KINDS and g.qubits[0].proc != g.qubits[1].proc:
                out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def track_swaps(self) -> list[QubitRef]:
        """Where each data qubit ends up if only SWAP gates move states."""
        pos = {q: i for i, q in enumerate(self.data_in())}
        for g in self.gates:
            if g.kind == "swap":
                a, b = g.qubits
                ia, ib = pos.pop(a, None), pos.pop(b, None)
                if ia is not None:
                    pos[b] = ia
                if ib is not None:
                    pos[a] = ib
        out = [None] * self.n
        for q, i in pos.items():
            out[i] = q
        return out

    def validate(self):
        for g in self.gates:
            self._check(g)
        layout = self.output_layout()
        if len(layout) != self.n or len(set(layout)) != self.n:
            raise InvalidLayout("output layout must place every data qubit on a distinct wire")
        for q in layout:
            if not self.valid_ref(q):
                raise InvalidLayout(f"output layout refers to missing qubit {q}")
        if self.restore_layout and layout != self.data_in():
            raise InvalidLayout("restore_layout is set but the output layout is permuted")

    def copy_empty(self) -> "DistributedCircuit":
        return DistributedCircuit(self.partition, self.m, [], None, self.restore_layout)


# UCR peeling


def reorder_controls(angles, order: Sequence[int]) -> np.ndarray:
    """Angles of the same UCR with controls listed as ``[controls[i] for i in order]``."""
    angles = np.asarray(angles, dtype=float)
    c = len(order)
    if c == 0 or list(order) == list(range(c)):
        return angles
    return angles.reshape((2,) * c).transpose(list(order)).reshape(-1)


def peel_sequence(angles, num_peel: int) -> list[tuple[str, object]]:
    """Peel the leading ``num_peel`` controls off a UCR.

    Returns a time-ordered list of ``("child", angles)`` items, which are UCRs
    over the remaining controls with the same target and axis, and
    ``("cnot", j)`` items, a CNOT from peeled control ``j`` onto the target.
    Runs of CNOTs are merged modulo two, leaving exactly 2^num_peel CNOTs and
    2^num_peel children when num_peel >= 1. Valid for Y and Z axes.
    """
    angles = np.asarray(angles, dtype=float)
    c = int(round(np.log2(len(angles))))
    if 2**c != len(angles):
        raise InvalidInput("angle count must be a power of two")
    if not 0 <= num_peel <= c:
        raise InvalidInput(f"cannot peel {num_peel} of {c} controls")

    def build(theta, depth, first):
        if depth == num_peel:
            return [("child", theta)]
        h = len(theta) // 2
        plus = (theta[:h] + theta[h:]) / 2
        minus = (theta[:h] - theta[h:]) / 2
        x = ("cnot", depth)
        if first:
            return build(plus, depth + 1, True) + [x] + build(minus, depth + 1, False) + [x]
        return [x] + build(minus, depth + 1, True) + [x] + build(plus, depth + 1, False)

    raw = build(angles, 0, True)
    out: list[tuple[str, object]] = []
    run: set[int] = set()
    for item in raw:
        if item[0] == "cnot":
            run ^= {item[1]}
            continue
        out.extend(("cnot", j) for j in sorted(run))
        run = set()
        out.append(item)
    out.extend(("cnot", j) for j in sorted(run))
    return out


def lower_ucr_gate(g: Gate) -> list[Gate]:
    """Full lowering of a UCR macro to CNOTs and single-qubit rotations."""
    target, *controls = g.qubits
    axis = g.axis
    pre: list[Gate] = []
    if axis == "x":
        # conjugate by H so the CNOT sign-flip trick applies
        pre = [Gate.h(target)]
        axis = "z"
    out = list(pre)
    for kind, val in peel_sequence(g.angles, len(controls)):
        if kind == "cnot":
            out.append(Gate.cnot(controls[val], target))
        else:
            out.append(Gate.rot(axis, float(val[0]), target))
    out.extend(pre)
    return out


def lower_ucr_macros(c: DistributedCircuit) -> DistributedCircuit:
    out = c.copy_empty()
    out.layout_out = None if c.layout_out is None else list(c.layout_out)
    for g in c.gates:
        if g.kind == "ucr":
            out.extend(lower_ucr_gate(g))
        else:
            out.append(g)
    return out
