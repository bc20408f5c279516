"""Command-line front end.

Exit codes: synth 0 ok / 1 input error / 2 certificate violation; verify 0 ok /
1 outside tolerance or bad input / 3 skipped because the oracle cap was hit;
bounds 0 pass / 1 input error / 2 experiment assertion failed.

File formats:
  circuit   {"n","k","m","partition","restore_layout","gates","layout_out","certificate"?}
  topology  {"k": K, "edges": [[i, j], ...]} or text lines "i j" (optional "k K")
  unitary   {"matrix": [[[re, im], ...], ...]} or a .npy array
  cnot      {"matrix": [[0/1, ...], ...]} or {"n": N, "gates": [[control, target], ...]}
  layers    {"n": N, "layers": [{"kind": "H"|"S", "mask": [...]} | {"kind": "C", "matrix": [[...]]}]}
            exactly 11 layers in the order H C S C S C H S C S C
  grid      [{"family": general|qft|aqft|cnot|clifford, "n", "k", "m", "topology"?, "b"?}, ...]
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds, cnot, general, qft
from .errors import CertificateViolation, DqcError, NotFound, TooLarge
from .gf2 import F2Matrix
from .linalg import random_unitary
from .serialize import (
    clifford_from_json,
    deserialize,
    dumps_json,
    f2_from_json,
    f2_to_json,
    load_unitary,
    loads_json,
    serialize,
    write_atomic,
)
from .simulate import verify_implements
from .topology import Topology, parse_topology


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def _emit(text: str, out: str | None):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _topology(args) -> Topology | None:
    if getattr(args, "topology", None):
        topo = parse_topology(_read(args.topology))
        if args.k is not None and args.k != topo.k:
            raise DqcError(f"--k {args.k} disagrees with the topology's k={topo.k}")
        return topo
    return None


def _fail(err: Exception, code: int) -> int:
    kind = getattr(err, "kind", type(err).__name__)
    print(f"error [{kind}]: {err}", file=sys.stderr)
    return code


# synth


def _synth_general(args):
    if args.unitary:
        u = load_unitary(args.unitary)
    else:
        u = random_unitary(2**args.n, args.seed)
    if args.n is not None and u.shape[0] != 2**args.n:
        raise DqcError(f"unitary has dimension {u.shape[0]}, expected 2^{args.n}")
    topo = _topology(args)
    restore = not args.no_restore
    if topo is not None:
        return general.synth_topology(u, topo, args.m, restore)
    return general.synth(u, args.k or 1, args.m, restore)


def _synth_qft(args):
    b = args.approx_b
    if args.approx_eps is not None:
        b = qft.choose_b(args.n, args.approx_eps)
    spec = qft.QftSpec(args.n, args.bit_reversed, b)
    topo = _topology(args)
    k = args.k or 2
    if topo is None and k != 2:
        topo = Topology.path(k)
    if topo is None:
        return qft.qft_distribute_2(spec, m=args.m)
    return qft.qft_distribute_k(spec, topo, m=args.m)


def _synth_clifford(args):
    layers = clifford_from_json(loads_json(_read(args.layers)))
    topo = _topology(args)
    if topo is None and args.k not in (None, 2):
        topo = Topology.complete(args.k)
    return cnot.clifford_distribute(layers, m=args.m, topo=topo)


def _synth_cnot(args):
    mat = f2_from_json(loads_json(_read(args.matrix)))
    topo = _topology(args)
    if topo is None and args.k not in (None, 2):
        topo = Topology.complete(args.k)
    if topo is None:
        return cnot.cnot_distribute(mat, m=args.m)
    return cnot.cnot_distribute_topology(mat, topo, m=args.m)


SYNTH = {"general": _synth_general, "qft": _synth_qft, "clifford": _synth_clifford, "cnot": _synth_cnot}


def cmd_synth(args) -> int:
    try:
        c, cert = SYNTH[args.family](args)
    except CertificateViolation as e:
        return _fail(e, 2)
    except (DqcError, OSError, ValueError) as e:
        return _fail(e, 1)
    _emit(serialize(c, cert), args.out)
    print(f"{cert.lemma}: nonlocal {cert.measured} <= bound {cert.bound:g}", file=sys.stderr)
    return 0


# verify


def _target(spec: str, n: int) -> np.ndarray:
    if spec.startswith("qft:") or spec.startswith("qft-rev:"):
        size = int(spec.split(":", 1)[1])
        return qft.qft_matrix(size, bit_reversed=spec.startswith("qft-rev:"))
    if spec.startswith("cnot:"):
        mat = f2_from_json(loads_json(_read(spec.split(":", 1)[1])))
        return _cnot_unitary(mat)
    if spec.startswith("clifford:"):
        return cnot.clifford_matrix(clifford_from_json(loads_json(_read(spec.split(":", 1)[1]))))
    return load_unitary(spec)


def _cnot_unitary(mat: F2Matrix) -> np.ndarray:
    n = mat.nrows
    if n > 12:
        raise TooLarge("dense CNOT target is capped at n=12")
    dim = 2**n
    u = np.zeros((dim, dim))
    for x in range(dim):
        packed = sum(((x >> (n - 1 - j)) & 1) << j for j in range(n))
        y = mat.apply(packed)
        u[sum(((y >> j) & 1) << (n - 1 - j) for j in range(n)), x] = 1
    return u


def cmd_verify(args) -> int:
    try:
        c, _ = deserialize(_read(args.circuit))
        target = _target(args.target, c.n)
        report = verify_implements(c, target, args.tol)
    except TooLarge as e:
        print(f"verification skipped: {e}")
        return 3
    except (DqcError, OSError, ValueError) as e:
        return _fail(e, 1)
    print(dumps_json(report.as_dict(), indent=1))
    return 0 if report.ok else 1


# bounds


def cmd_bounds(args) -> int:
    try:
        if args.experiment == "rank-qft":
            w = bounds.rank_experiment(args.n, args.tol)
            _emit(dumps_json(w.as_dict(), indent=1) + "\n", args.out)
            if not w.passes:
                print(f"rank {w.rank} < required {w.required} at tol {w.tol:g}", file=sys.stderr)
                return 2
            return 0
        if args.experiment == "f2-matrix":
            try:
                m, trial = bounds.sample_hard_matrix(args.n, args.delta, args.trials, args.seed)
            except NotFound as e:
                return _fail(e, 2)
            rep = bounds.f2_submatrix_property(m, args.delta)
            out = {"trial": trial, "seed": args.seed, "report": rep.as_dict(), **f2_to_json(m)}
            _emit(dumps_json(out, indent=1) + "\n", args.out)
            return 0 if rep.passed else 2
        grid = None
        if args.grid != "default":
            grid = loads_json(_read(args.grid))
        rows = bounds.bound_report(grid, seed=args.seed)
        text = bounds.report_csv(rows) if args.format == "csv" else bounds.report_text(rows)
        _emit(text, args.out)
        return 0 if all(r.measured <= r.bound for r in rows) else 2
    except CertificateViolation as e:
        return _fail(e, 2)
    except (DqcError, OSError, ValueError, KeyError) as e:
        return _fail(e, 1)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dqcomm",
        description="Distributed synthesis with counted nonlocal gates.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("synth", help="synthesise a distributed circuit")
    fam = ps.add_subparsers(dest="family", required=True)

    g = fam.add_parser("general", help="arbitrary unitary")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--topology")
    g.add_argument("--seed", type=int, default=0, help="seed for the Haar-random target (default 0)")
    g.add_argument("--unitary", help="target unitary file; random if omitted")
    g.add_argument("--no-restore", action="store_true", help="leave data qubits where the circuit puts them")
    g.add_argument("--out")

    q = fam.add_parser("qft", help="exact or approximate QFT")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int)
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--topology")
    q.add_argument("--bit-reversed", action="store_true")
    approx = q.add_mutually_exclusive_group()
    approx.add_argument("--approx-eps", type=float)
    approx.add_argument("--approx-b", type=int)
    q.add_argument("--out")

    cl = fam.add_parser("clifford", help="layered Clifford circuit")
    cl.add_argument("--layers", required=True)
    cl.add_argument("--k", type=int)
    cl.add_argument("--m", type=int, default=1)
    cl.add_argument("--topology")
    cl.add_argument("--out")

    cn = fam.add_parser("cnot", help="CNOT circuit or bit matrix")
    cn.add_argument("--matrix", required=True)
    cn.add_argument("--k", type=int)
    cn.add_argument("--m", type=int, default=1)
    cn.add_argument("--topology")
    cn.add_argument("--out")

    pv = sub.add_parser("verify", help="compare a circuit file with a target")
    pv.add_argument("--circuit", required=True)
    pv.add_argument("--target", required=True, help="unitary file, qft:N, qft-rev:N, cnot:FILE or clifford:FILE")
    pv.add_argument("--tol", type=float, default=1e-8)

    pb = sub.add_parser("bounds", help="lower-bound experiments and reports")
    exp = pb.add_subparsers(dest="experiment", required=True)
    r = exp.add_parser("rank-qft")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--tol", type=float, default=1e-9)
    r.add_argument("--out")
    f = exp.add_parser("f2-matrix")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--delta", type=float, required=True)
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out")
    rp = exp.add_parser("report")
    rp.add_argument("--grid", default="default")
    rp.add_argument("--format", choices=("csv", "text"), default="csv")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synth":
        return cmd_synth(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_bounds(args)


if __name__ == "__main__":
    sys.exit(main())
