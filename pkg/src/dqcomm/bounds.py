"""Lower-bound experiments: QFT rank method and random bit-matrix submatrix ranks."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidTol, NotFound, TooLarge
from .gf2 import F2Matrix, f2_random

PROB_CAP = 12
PROTOCOL_CAP = 7
EXHAUSTIVE_CAP = 12
MOD_PRIME = (1 << 61) - 1


# QFT probability matrix


def qft_prob_matrix(n: int) -> np.ndarray:
    """M[x, y] = 2^-n prod_i [cos^2, sin^2](pi x / 2^(2n-i))[y_i], i = 1..n.

    y_1 is the most significant bit of the column index.
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if n > PROB_CAP:
        raise TooLarge(f"probability matrix is capped at n={PROB_CAP}")
    x = np.arange(2**n, dtype=float)[:, None]
    rows = np.ones((2**n, 1))
    for i in range(1, n + 1):
        t = np.pi * x / 2.0 ** (2 * n - i)
        pair = np.hstack([np.cos(t) ** 2, np.sin(t) ** 2])
        rows = (rows[:, :, None] * pair[:, None, :]).reshape(2**n, -1)
    return rows / 2**n


def _qft_state_batch(psi: np.ndarray, nq: int) -> np.ndarray:
    """Plain QFT (H then controlled phases, no reversal) on a batch of states."""
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    psi = psi.reshape((2,) * nq + (-1,))
    for t in range(nq):
        psi = np.moveaxis(np.tensordot(h, psi, axes=([1], [t])), 0, t)
        for ctrl in range(t + 1, nq):
            phase = np.exp(2j * np.pi / 2 ** (ctrl - t + 1))
            idx = [slice(None)] * psi.ndim
            idx[t], idx[ctrl] = 1, 1
            psi[tuple(idx)] *= phase
    return psi


def protocol_prob_matrix(n: int) -> np.ndarray:
    """The Alice/Bob experiment simulated on state vectors.

    Alice writes x on qubits n..2n-1 of a 2n-qubit register of zeros and the
    QFT is applied. Bob applies H to output qubits 1..n and measures them;
    qubit 0 is discarded. Entries are Pr(x) * Pr(y | x).
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if n > PROTOCOL_CAP:
        raise TooLarge(f"protocol simulation is capped at n={PROTOCOL_CAP}")
    nq = 2 * n
    xs = np.arange(2**n)
    psi = np.zeros((2**nq, len(xs)), dtype=complex)
    psi[xs, xs] = 1.0  # Alice's bits are the low-order qubits
    psi = _qft_state_batch(psi, nq)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for q in range(1, n + 1):
        psi = np.moveaxis(np.tensordot(h, psi, axes=([1], [q])), 0, q)
    probs = np.abs(psi.reshape(2, 2**n, 2 ** (n - 1), len(xs))) ** 2
    bob = probs.sum(axis=(0, 2))
    return bob.T / 2**n


def chebyshev_power(k: int, p: int = MOD_PRIME) -> list[int]:
    """Coefficients of T_k modulo p, lowest degree first."""
    t0, t1 = [1], [0, 1]
    if k == 0:
        return t0
    for _ in range(k - 1):
        nxt = [0] * (len(t1) + 1)
        for d, a in enumerate(t1):
            nxt[d + 1] = (nxt[d + 1] + 2 * a) % p
        for d, a in enumerate(t0):
            nxt[d] = (nxt[d] - a) % p
        t0, t1 = t1, nxt
    return t1


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] = (out[i + j] + u * v) % p
    return out


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = max((len(r) for r in rows), default=0)
    rows = [r + [0] * (ncols - len(r)) for r in rows]
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def exact_rank_lower_bound(n: int) -> int:
    """Exact lower bound on rank of the probability matrix.

    Up to an invertible column map the matrix is [f_y(c_x)] with
    f_y = prod_i T_{2^i}^{y_i} and c_x = cos(2 pi x / 2^(2n)). The 2^n points
    c_x are distinct (the angles lie in [0, pi)), so polynomials of degree
    below 2^n restricted to them are independent whenever their coefficient
    vectors are. That coefficient rank is computed exactly modulo a prime,
    which can only under-count the rational rank.
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if n > 8:
        raise TooLarge("exact witness is capped at n=8")
    npts = 2**n
    # angles 2 pi x / 4^n < pi for x < 2^n, so cos is injective on them
    assert 2 * (npts - 1) < 4**n
    cheb = [chebyshev_power(2**i) for i in range(1, n + 1)]
    polys = []
    for y in range(2**n):
        bits = [(y >> (n - i)) & 1 for i in range(1, n + 1)]
        deg = sum(2**i for i, b in zip(range(1, n + 1), bits) if b)
        if deg >= npts:
            continue
        poly = [1]
        for b, t in zip(bits, cheb):
            if b:
                poly = _poly_mul(poly, t, MOD_PRIME)
        polys.append(poly)
    return _rank_mod_p(polys, MOD_PRIME)


@dataclass(frozen=True)
class RankWitness:
    n: int
    rank: int
    tol: float
    qubit_bound: int
    gate_bound: float
    required: int = 0
    exact_lower_bound: int | None = None
    singular_ratio_min: float = 0.0

    @property
    def passes(self) -> bool:
        return self.rank >= self.required

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passes"] = self.passes
        return d


def numeric_rank(mat: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    if not (0 < tol < 1 and np.isfinite(tol)):
        raise InvalidTol(f"relative tolerance must lie in (0, 1), got {tol}")
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    return int(np.sum(s > tol * s[0])), s


def implied_bounds(rank: int) -> tuple[int, float]:
    """Communicated qubits >= ceil(log2(rank) / 2); one nonlocal gate moves two qubits."""
    q = math.ceil(0.5 * math.log2(rank)) if rank > 0 else 0
    return q, q / 2


def rank_experiment(n: int, tol: float = 1e-9, exact: bool = True) -> RankWitness:
    m = qft_prob_matrix(n)
    rank, s = numeric_rank(m, tol)
    q, g = implied_bounds(rank)
    lower = exact_rank_lower_bound(n) if exact and n <= 8 else None
    return RankWitness(
        n=n,
        rank=rank,
        tol=tol,
        qubit_bound=q,
        gate_bound=g,
        required=2 ** (n - 1),
        exact_lower_bound=lower,
        singular_ratio_min=float(s[-1] / s[0]) if s.size else 0.0,
    )


def partition_rank_experiment(n: int, seed: int = 0, tol: float = 1e-9) -> dict:
    """Rank experiment with random register choices on QFT_{2n}.

    Alice writes x on a random half-size subset X of the low half of the
    register, Bob measures (after H) a random subset Y of the high half.
    Reported only; the general-partition bound hides constants.
    """
    if n < 2 or n % 2:
        raise InvalidInput("n must be even and >= 2")
    if 2 * n > 14:
        raise TooLarge("partition experiment is capped at 2n = 14 qubits")
    rng = np.random.default_rng(seed)
    nq = 2 * n
    xset = sorted(int(v) for v in rng.choice(np.arange(n, nq), size=n // 2, replace=False))
    yset = sorted(int(v) for v in rng.choice(np.arange(n), size=n // 2, replace=False))
    nx = len(xset)
    cols = []
    for x in range(2**nx):
        idx = 0
        for j, q in enumerate(xset):
            if (x >> (nx - 1 - j)) & 1:
                idx |= 1 << (nq - 1 - q)
        cols.append(idx)
    psi = np.zeros((2**nq, len(cols)), dtype=complex)
    psi[cols, np.arange(len(cols))] = 1.0
    psi = _qft_state_batch(psi, nq)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for q in yset:
        psi = np.moveaxis(np.tensordot(h, psi, axes=([1], [q])), 0, q)
    probs = np.abs(psi) ** 2
    rest = [q for q in range(nq) if q not in yset]
    marg = np.moveaxis(probs, yset + rest, list(range(nq))).reshape(2 ** len(yset), -1, len(cols)).sum(axis=1)
    mat = marg.T / len(cols)
    rank, _ = numeric_rank(mat, tol)
    return {"n": n, "seed": seed, "alice": xset, "bob": yset, "rank": rank, "max_rank": 2 ** len(yset), "tol": tol}


# random bit matrices


@dataclass(frozen=True)
class SubmatrixReport:
    n: int
    delta: float
    threshold: int
    min_rank: int
    checked: int
    mode: str
    worst_rows: tuple[int, ...] = ()
    worst_cols: tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return self.min_rank >= self.threshold

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _rank_of_ints(rows) -> int:
    rank = 0
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
            rank += 1
    return rank


def submatrix_threshold(n: int, delta: float) -> int:
    return math.ceil((1 - delta) * n / 2 - 1e-12)


def f2_submatrix_property(
    m: F2Matrix,
    delta: float,
    mode: str = "exhaustive",
    trials: int = 1000,
    seed: int = 0,
    stop_early: bool = False,
) -> SubmatrixReport:
    """Minimum rank over n/2 x n/2 submatrices against ceil((1 - delta) n / 2)."""
    n = m.nrows
    if not m.is_square or n % 2:
        raise InvalidInput("need a square matrix with even n")
    if not 0 <= delta <= 1:
        raise InvalidInput("delta must lie in [0, 1]")
    half = n // 2
    thr = submatrix_threshold(n, delta)
    if mode == "exhaustive":
        if n > EXHAUSTIVE_CAP:
            raise TooLarge(f"exhaustive enumeration is capped at n={EXHAUSTIVE_CAP}")
        row_sets = list(itertools.combinations(range(n), half))
        col_sets = row_sets

        def pairs():
            for rs in row_sets:
                for cs in col_sets:
                    yield rs, cs

    elif mode == "sampled":
        rng = np.random.default_rng(seed)

        def pairs():
            for _ in range(trials):
                rs = tuple(sorted(int(v) for v in rng.choice(n, size=half, replace=False)))
                cs = tuple(sorted(int(v) for v in rng.choice(n, size=half, replace=False)))
                yield rs, cs

    else:
        raise InvalidInput(f"unknown mode {mode!r}")
    best = half + 1
    worst = ((), ())
    checked = 0
    for rs, cs in pairs():
        mask = sum(1 << c for c in cs)
        r = _rank_of_ints(m.rows[i] & mask for i in rs)
        checked += 1
        if r < best:
            best, worst = r, (rs, cs)
            if stop_early and best < thr:
                break
    return SubmatrixReport(n, delta, thr, min(best, half), checked, mode, worst[0], worst[1])


def sample_hard_matrix(n: int, delta: float, max_trials: int = 100, seed: int = 0) -> tuple[F2Matrix, int]:
    """First uniformly sampled matrix that is invertible and passes the property.

    Returns the matrix and the 1-based trial at which it was found.
    """
    if n % 2:
        raise InvalidInput("n must be even")
    rng = np.random.default_rng(seed)
    for trial in range(1, max_trials + 1):
        m = f2_random(n, rng)
        if not m.is_invertible():
            continue
        if f2_submatrix_property(m, delta, stop_early=True).passed:
            return m, trial
    raise NotFound(f"no matrix passed within {max_trials} trials (n={n}, delta={delta})")


# report


@dataclass
class ReportRow:
    family: str
    n: int
    k: int
    m: int
    topology: str
    measured: int
    bound: float
    asymptotic: float
    extra: dict = field(default_factory=dict)


DEFAULT_GRID = [
    {"family": "general", "n": n, "k": 2, "m": 0} for n in (4, 6, 8)
] + [
    {"family": "general", "n": 6, "k": 3, "m": 0},
    {"family": "general", "n": 6, "k": 2, "m": 1},
    {"family": "general", "n": 6, "k": 2, "m": 2},
    {"family": "general", "n": 4, "k": 2, "m": 4},
    {"family": "general", "n": 6, "k": 3, "m": 0, "topology": "path"},
    {"family": "qft", "n": 8, "k": 2, "m": 1},
    {"family": "qft", "n": 16, "k": 2, "m": 1},
    {"family": "qft", "n": 8, "k": 4, "m": 1, "topology": "path"},
    {"family": "aqft", "n": 16, "k": 2, "m": 1, "b": 4},
    {"family": "cnot", "n": 16, "k": 2, "m": 1},
    {"family": "cnot", "n": 16, "k": 4, "m": 1, "topology": "path"},
    {"family": "clifford", "n": 8, "k": 2, "m": 1},
]


def _topology(name: str, k: int):
    from .topology import Topology

    makers = {"complete": Topology.complete, "path": Topology.path, "star": Topology.star, "ring": Topology.ring}
    if name not in makers:
        raise InvalidInput(f"unknown topology {name!r}")
    return makers[name](k)


def run_report_row(spec: dict, seed: int = 0) -> ReportRow:
    from . import cnot, general, qft
    from .gf2 import f2_random_invertible
    from .linalg import random_unitary

    fam = spec["family"]
    n, k, m = int(spec["n"]), int(spec.get("k", 2)), int(spec.get("m", 0))
    topo_name = spec.get("topology", "complete")
    topo = _topology(topo_name, k)
    extra: dict = {}
    if fam == "general":
        u = random_unitary(2**n, seed)
        if topo.is_complete():
            c, cert = general.synth(u, k, m)
        else:
            c, cert = general.synth_topology(u, topo, m)
        asym = max(4 ** ((1 - 1 / k) * n - m), n)
    elif fam in ("qft", "aqft"):
        spec_q = qft.QftSpec(n, approx_b=spec.get("b"))
        if k == 2 and topo.is_complete():
            c, cert = qft.qft_distribute_2(spec_q, m=max(m, 1))
        else:
            c, cert = qft.qft_distribute_k(spec_q, topo, m=max(m, 1))
        asym = k * (spec_q.approx_b or n)
        if spec_q.approx_b:
            extra["b"] = spec_q.approx_b
    elif fam == "cnot":
        mat = f2_random_invertible(n, seed)
        if k == 2 and topo.is_complete():
            c, cert = cnot.cnot_distribute(mat, m=max(m, 1))
        else:
            c, cert = cnot.cnot_distribute_topology(mat, topo, m=max(m, 1))
        asym = n * k * topo.diameter()
    elif fam == "clifford":
        layers = cnot.CliffordLayers.random(n, seed)
        c, cert = cnot.clifford_distribute(layers, m=max(m, 1))
        asym = n
    else:
        raise InvalidInput(f"unknown family {fam!r}")
    return ReportRow(fam, n, k, m, topo_name, cert.measured, float(cert.bound), float(asym), extra)


def bound_report(grid=None, seed: int = 0) -> list[ReportRow]:
    grid = DEFAULT_GRID if grid is None else grid
    return [run_report_row(spec, seed) for spec in grid]


REPORT_FIELDS = ["family", "n", "k", "m", "topology", "measured", "bound", "asymptotic", "ok"]


def _row_values(r: ReportRow) -> list:
    return [r.family, r.n, r.k, r.m, r.topology, r.measured, f"{r.bound:g}", f"{r.asymptotic:g}", r.measured <= r.bound]


def report_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_FIELDS)
    for r in rows:
        w.writerow(_row_values(r))
    return buf.getvalue()


def report_text(rows: list[ReportRow]) -> str:
    table = [REPORT_FIELDS] + [[str(v) for v in _row_values(r)] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(REPORT_FIELDS))]
    lines = ["  ".join(v.rjust(wd) for v, wd in zip(row, widths)) for row in table]
    return "\n".join(lines) + "\n"
