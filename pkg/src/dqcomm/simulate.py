"""State-vector assembly of distributed circuits and functional verification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import DistributedCircuit, Gate, rotation_matrix
from .errors import InvalidCircuit, InvalidInput, InvalidTol, TooLarge
from .linalg import frobenius_norm, phase_align, spectral_norm

SIM_CAP = 22
DENSE_CAP = 12
# complex entries per simulated batch, about 256 MB
BATCH_BUDGET = 2**24


def _apply_matrix(psi: np.ndarray, mat: np.ndarray, axes: list[int]) -> np.ndarray:
    d = len(axes)
    t = mat.reshape((2,) * (2 * d))
    out = np.tensordot(t, psi, axes=(list(range(d, 2 * d)), axes))
    return np.moveaxis(out, list(range(d)), axes)


def _apply_ucr(psi: np.ndarray, g: Gate, axes: list[int]) -> np.ndarray:
    target, controls = axes[0], axes[1:]
    c = len(controls)
    front = controls + [target]
    moved = np.moveaxis(psi, front, list(range(c + 1)))
    shape = moved.shape
    flat = moved.reshape(2**c, 2, -1)
    if g.axis == "z":
        half = 0.5j * np.asarray(g.angles)
        phases = np.stack([np.exp(-half), np.exp(half)], axis=1)
        flat = flat * phases[:, :, None]
    else:
        mats = np.stack([rotation_matrix(g.axis, t) for t in g.angles])
        flat = np.einsum("jab,jbr->jar", mats, flat)
    return np.moveaxis(flat.reshape(shape), list(range(c + 1)), front)


def apply_gate(psi: np.ndarray, g: Gate, axes: list[int]) -> np.ndarray:
    k = g.kind
    if k == "ucr":
        return _apply_ucr(psi, g, axes)
    if k == "swap":
        return np.swapaxes(psi, axes[0], axes[1])
    if k == "cnot":
        c, t = axes
        psi = np.array(psi, copy=True)
        idx = [slice(None)] * psi.ndim
        idx[c] = 1
        sub = psi[tuple(idx)]
        tt = t - 1 if t > c else t
        psi[tuple(idx)] = np.flip(sub, axis=tt)
        return psi
    return _apply_matrix(psi, g.unitary(), axes)


def run_circuit(c: DistributedCircuit, psi: np.ndarray) -> np.ndarray:
    """Apply the circuit to a batch of states shaped (2,)*num_wires + (batch,)."""
    index = c.wire_index()
    for g in c.gates:
        try:
            axes = [index[q] for q in g.qubits]
        except KeyError as e:
            raise InvalidCircuit(f"gate {g.kind} refers to missing qubit {e.args[0]}") from None
        psi = apply_gate(psi, g, axes)
    return psi


def assemble_global(c: DistributedCircuit) -> np.ndarray:
    """Full unitary over all wires (global order of ``c.wires()``)."""
    n_w = c.num_wires
    if n_w > DENSE_CAP:
        raise TooLarge(f"{n_w} qubits exceeds the dense assembly cap of {DENSE_CAP}")
    dim = 2**n_w
    psi = np.eye(dim, dtype=complex).reshape((2,) * n_w + (dim,))
    out = run_circuit(c, psi)
    return np.ascontiguousarray(out).reshape(dim, dim)


def _basis_indices(wires_of_qubits: list[int], n_w: int) -> np.ndarray:
    """Global basis index for every assignment of the listed wires, others 0."""
    n = len(wires_of_qubits)
    idx = np.zeros(2**n, dtype=np.int64)
    for j, w in enumerate(wires_of_qubits):
        bit = (np.arange(2**n) >> (n - 1 - j)) & 1
        idx += bit.astype(np.int64) << (n_w - 1 - w)
    return idx


def restricted_action(c: DistributedCircuit, columns: np.ndarray | None = None) -> np.ndarray:
    """Matrix V[y, x] of the circuit on data inputs with ancillas in |0>.

    Rows index the data qubits read at the output layout with every other wire
    in |0>; the mass lost from these rows is ancilla leakage.
    """
    n_w = c.num_wires
    if n_w > SIM_CAP:
        raise TooLarge(f"{n_w} qubits exceeds the simulation cap of {SIM_CAP}")
    index = c.wire_index()
    n = c.n
    in_idx = _basis_indices([index[q] for q in c.data_in()], n_w)
    out_idx = _basis_indices([index[q] for q in c.output_layout()], n_w)
    cols = np.arange(2**n) if columns is None else np.asarray(columns)
    batch = max(1, BATCH_BUDGET // 2**n_w)
    result = np.zeros((2**n, len(cols)), dtype=complex)
    for start in range(0, len(cols), batch):
        chunk = cols[start : start + batch]
        psi = np.zeros((2**n_w, len(chunk)), dtype=complex)
        psi[in_idx[chunk], np.arange(len(chunk))] = 1.0
        psi = run_circuit(c, psi.reshape((2,) * n_w + (len(chunk),)))
        flat = np.ascontiguousarray(psi).reshape(2**n_w, len(chunk))
        result[:, start : start + len(chunk)] = flat[out_idx]
    return result


@dataclass(frozen=True)
class VerificationReport:
    spectral_error: float
    phase_aligned_frobenius_error: float
    ancilla_leakage: float
    nonlocal_count: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.spectral_error <= self.tol and self.ancilla_leakage <= self.tol

    def as_dict(self) -> dict:
        return {
            "spectral_error": self.spectral_error,
            "phase_aligned_frobenius_error": self.phase_aligned_frobenius_error,
            "ancilla_leakage": self.ancilla_leakage,
            "nonlocal_count": self.nonlocal_count,
            "tol": self.tol,
            "ok": self.ok,
        }


def verify_implements(c: DistributedCircuit, target, tol: float = 1e-8) -> VerificationReport:
    """Compare the circuit's action on clean-ancilla inputs with ``target``."""
    if not (tol > 0 and np.isfinite(tol)):
        raise InvalidTol(f"tolerance must be positive and finite, got {tol}")
    target = np.asarray(target, dtype=complex)
    if target.shape != (2**c.n, 2**c.n):
        raise InvalidInput(f"target shape {target.shape} does not match n={c.n}")
    c.validate()
    v = restricted_action(c)
    mass = np.sum(np.abs(v) ** 2, axis=0)
    leakage = float(max(0.0, np.max(1.0 - mass))) if v.size else 0.0
    aligned = phase_align(target, v)
    return VerificationReport(
        spectral_error=spectral_norm(aligned - target),
        phase_aligned_frobenius_error=frobenius_norm(aligned - target),
        ancilla_leakage=leakage,
        nonlocal_count=c.nonlocal_count(),
        tol=tol,
    )


def simulate_bits(c: DistributedCircuit, inputs) -> np.ndarray:
    """Classical action of a CNOT/SWAP circuit on packed data inputs.

    Bit j of each input is the value of data qubit j; ancillas start at 0.
    Outputs are packed the same way, read at the output layout.
    """
    # object dtype keeps Python ints, so n may exceed 63
    if isinstance(inputs, np.ndarray):
        inputs = inputs.reshape(-1).tolist()
    elif isinstance(inputs, (int, np.integer)):
        inputs = [inputs]
    # a plain asarray would turn a mix of large ints into floats
    inputs = np.array([int(x) for x in inputs] + [None], dtype=object)[:-1]
    state = {q: np.zeros(len(inputs), dtype=bool) for q in c.wires()}
    for j, q in enumerate(c.data_in()):
        state[q] = ((inputs >> j) & 1).astype(bool)
    for g in c.gates:
        if g.kind == "cnot":
            a, b = g.qubits
            state[b] = state[b] ^ state[a]
        elif g.kind == "swap":
            a, b = g.qubits
            state[a], state[b] = state[b], state[a]
        else:
            raise InvalidCircuit(f"bitwise simulation only handles cnot and swap, got {g.kind}")
    out = np.zeros(len(inputs), dtype=object)
    for j, q in enumerate(c.output_layout()):
        out = out | (state[q].astype(object) * (1 << j))
    dirty = np.zeros(len(inputs), dtype=bool)
    kept = set(c.output_layout())
    for q in c.wires():
        if q not in kept:
            dirty |= state[q]
    if np.any(dirty):
        raise InvalidCircuit("an ancilla or spare wire is left non-zero")
    return out
