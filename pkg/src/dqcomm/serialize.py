"""JSON circuit files.

Schema::

    {"n", "k", "m", "partition": [proc per data qubit], "restore_layout": bool,
     "gates": [{"type", "qubits": [[proc, slot, "d"|"a"], ...],
                "theta"?, "axis"?, "matrix"?: row-major [re, im] pairs}],
     "layout_out": [[proc, slot, kind], ...], "certificate"?: {...}}

UCR macros are lowered before export. Floats are written with 17 significant
digits so they read back bit-exactly.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .certificate import Certificate
from .circuit import DistributedCircuit, Gate, Partition, QubitRef, lower_ucr_macros
from .errors import DqcError, ParseError

GATE_TYPES = ("cnot", "swap", "h", "s", "rx", "ry", "rz", "cr", "local_u")


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError("non-finite number in circuit")
    s = format(v, ".17g")
    # keep floats recognisable as floats
    if all(ch not in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps_json(obj, indent: int | None = None, _level: int = 0, wrap_levels: int = 2) -> str:
    """json.dumps with 17-digit floats; keys keep insertion order.

    Only the outer ``wrap_levels`` containers are broken across lines.
    """
    if indent is not None and _level >= wrap_levels:
        indent = None
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1, wrap_levels)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # scalar lists stay on one line
        if all(not isinstance(v, (list, tuple, dict)) for v in obj):
            return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1, wrap_levels) for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _ref(q: QubitRef) -> list:
    return [q.proc, q.slot, q.kind]


def gate_to_dict(g: Gate) -> dict:
    if g.kind == "ucr":
        raise ValueError("lower UCR macros before serialising")
    d: dict = {"type": g.kind, "qubits": [_ref(q) for q in g.qubits]}
    if g.theta is not None:
        d["theta"] = float(g.theta)
    if g.axis is not None:
        d["axis"] = g.axis
    if g.matrix is not None:
        flat = np.asarray(g.matrix, dtype=complex).reshape(-1)
        d["matrix"] = [[float(z.real), float(z.imag)] for z in flat]
    return d


def circuit_to_dict(c: DistributedCircuit, certificate: Certificate | None = None) -> dict:
    if any(g.kind == "ucr" for g in c.gates):
        c = lower_ucr_macros(c)
    out = {
        "n": c.n,
        "k": c.k,
        "m": c.m,
        "partition": list(c.partition.assign),
        "restore_layout": c.restore_layout,
        "gates": [gate_to_dict(g) for g in c.gates],
        "layout_out": [_ref(q) for q in c.output_layout()],
    }
    if certificate is not None:
        out["certificate"] = certificate.as_dict()
    return out


def serialize(c: DistributedCircuit, certificate: Certificate | None = None) -> str:
    return dumps_json(circuit_to_dict(c, certificate), indent=1) + "\n"


def _need(obj: dict, key: str, where: str = ""):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError("missing field", field=f"{where}{key}")
    return obj[key]


def _parse_ref(v, where: str) -> QubitRef:
    if not (isinstance(v, list) and len(v) == 3 and isinstance(v[0], int) and isinstance(v[1], int)):
        raise ParseError("qubit must be [proc, slot, kind]", field=where)
    try:
        return QubitRef(v[0], v[1], v[2])
    except DqcError as e:
        raise ParseError(str(e), field=where) from None


def _parse_gate(d: dict, idx: int) -> Gate:
    where = f"gates[{idx}]."
    kind = _need(d, "type", where)
    if kind not in GATE_TYPES:
        raise ParseError(f"unknown gate type {kind!r}", field=where + "type")
    raw = _need(d, "qubits", where)
    if not isinstance(raw, list):
        raise ParseError("qubits must be a list", field=where + "qubits")
    qubits = tuple(_parse_ref(v, f"{where}qubits[{j}]") for j, v in enumerate(raw))
    theta = d.get("theta")
    if theta is not None:
        if not isinstance(theta, (int, float)) or isinstance(theta, bool):
            raise ParseError("theta must be a number", field=where + "theta")
        theta = float(theta)
    matrix = None
    if "matrix" in d:
        try:
            arr = np.array(d["matrix"], dtype=float)
            flat = arr[:, 0] + 1j * arr[:, 1]
            dim = int(round(math.sqrt(len(flat))))
            matrix = flat.reshape(dim, dim)
        except (ValueError, IndexError, TypeError):
            raise ParseError("matrix must be a list of [re, im] pairs forming a square", field=where + "matrix") from None
    try:
        return Gate(kind, qubits, theta=theta, axis=d.get("axis"), matrix=matrix)
    except DqcError as e:
        raise ParseError(str(e), field=where.rstrip(".")) from None


def circuit_from_dict(obj: dict) -> tuple[DistributedCircuit, Certificate | None]:
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    n = _need(obj, "n")
    k = _need(obj, "k")
    m = _need(obj, "m")
    assign = _need(obj, "partition")
    for name, v in (("n", n), ("k", k), ("m", m)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ParseError("must be an integer", field=name)
    if not isinstance(assign, list) or not all(isinstance(p, int) for p in assign):
        raise ParseError("partition must list a processor per data qubit", field="partition")
    try:
        part = Partition(n, k, tuple(assign))
    except DqcError as e:
        raise ParseError(str(e), field="partition") from None
    gates_raw = _need(obj, "gates")
    if not isinstance(gates_raw, list):
        raise ParseError("gates must be a list", field="gates")
    gates = [_parse_gate(d, i) for i, d in enumerate(gates_raw)]
    layout = None
    if "layout_out" in obj:
        layout = [_parse_ref(v, f"layout_out[{j}]") for j, v in enumerate(obj["layout_out"])]
    restore = obj.get("restore_layout", True)
    if not isinstance(restore, bool):
        raise ParseError("restore_layout must be a boolean", field="restore_layout")
    try:
        c = DistributedCircuit(part, m, gates, None, restore)
        if layout is not None and layout != c.data_in():
            c.layout_out = layout
        c.validate()
    except DqcError as e:
        raise ParseError(str(e), field="gates") from None
    cert = None
    if "certificate" in obj:
        try:
            cert = Certificate.from_dict(obj["certificate"])
        except (KeyError, TypeError, ValueError):
            raise ParseError("malformed certificate", field="certificate") from None
    return c, cert


def loads_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None


def deserialize(text: str) -> tuple[DistributedCircuit, Certificate | None]:
    return circuit_from_dict(loads_json(text))


def circuits_equal(a: DistributedCircuit, b: DistributedCircuit) -> bool:
    """Structural equality: partition, ancillas, layout flags and gate-by-gate match."""
    if (a.partition, a.m, a.restore_layout) != (b.partition, b.m, b.restore_layout):
        return False
    if a.output_layout() != b.output_layout() or len(a.gates) != len(b.gates):
        return False
    return all(x.same_as(y) for x, y in zip(a.gates, b.gates))


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# other input files


def unitary_from_json(obj) -> np.ndarray:
    """Accept {"matrix": rows} or bare rows; entries are [re, im] pairs or reals."""
    rows = obj.get("matrix") if isinstance(obj, dict) else obj
    if rows is None:
        raise ParseError("missing field", field="matrix")
    try:
        arr = np.array(rows, dtype=float)
    except (ValueError, TypeError):
        raise ParseError("matrix entries must be numbers or [re, im] pairs", field="matrix") from None
    if arr.ndim == 3 and arr.shape[2] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParseError(f"matrix must be square, got shape {arr.shape}", field="matrix")
    return arr.astype(complex)


def unitary_to_json(u: np.ndarray) -> dict:
    u = np.asarray(u, dtype=complex)
    return {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in u]}


def load_unitary(path: str) -> np.ndarray:
    if path.endswith(".npy"):
        try:
            return np.asarray(np.load(path), dtype=complex)
        except (OSError, ValueError) as e:
            raise ParseError(f"cannot read {path}: {e}") from None
    with open(path) as f:
        return unitary_from_json(loads_json(f.read()))


def f2_from_json(obj):
    """A bit matrix from {"matrix": rows}, bare rows, or {"n", "gates": [[c, t], ...]}."""
    from .cnot import cnot_to_f2
    from .gf2 import F2Matrix

    if isinstance(obj, dict) and "gates" in obj:
        n = _need(obj, "n")
        try:
            return cnot_to_f2(obj["gates"], n)
        except DqcError as e:
            raise ParseError(str(e), field="gates") from None
    rows = obj.get("matrix") if isinstance(obj, dict) else obj
    if rows is None:
        raise ParseError("missing field", field="matrix")
    try:
        return F2Matrix.from_array(np.array(rows, dtype=int))
    except (DqcError, ValueError, TypeError) as e:
        raise ParseError(f"bad bit matrix: {e}", field="matrix") from None


def f2_to_json(m) -> dict:
    return {"n": m.nrows, "matrix": m.to_lists()}


def clifford_from_json(obj):
    from .cnot import CliffordLayers

    try:
        return CliffordLayers.from_dict(obj)
    except KeyError as e:
        raise ParseError("missing field", field=str(e.args[0])) from None
    except (DqcError, ValueError, TypeError) as e:
        raise ParseError(f"bad layer file: {e}", field="layers") from None
