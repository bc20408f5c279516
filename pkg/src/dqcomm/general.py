"""Distributed synthesis of arbitrary unitaries.

The recursion peels one processor at a time. A processor's qubits are split
off with the peel-against-first QSD; every resulting UCR has its target
swapped onto the remaining processors, its controls on the peeled processor
are removed with CNOTs, and the children are spread over the remaining
processors. The leftover unitaries recurse on the remaining processors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .certificate import (
    Certificate,
    gathered_budget,
    gathered_topology_budget,
    no_ancilla_budget,
    topology_budget,
    ucr_distribute_bound,
)
from .circuit import DistributedCircuit, Gate, Partition, QubitRef, balanced_sizes, peel_sequence, reorder_controls
from .errors import InvalidInput, InvalidPeel
from .linalg import check_unitary, permute_qubits
from .qsd import decompose_against_first
from .topology import Topology, subtree_leaves, subtree_path


def _num_qubits(u) -> int:
    dim = np.asarray(u).shape[0]
    n = int(round(np.log2(dim))) if dim else -1
    if n < 0 or 2**n != dim:
        raise InvalidInput(f"unitary dimension {dim} is not a power of two")
    return n


# UCR emission


def _emit_ucr_local(c: DistributedCircuit, axis, target, controls, angles):
    if controls:
        c.append(Gate.ucr(axis, target, controls, angles))
    else:
        c.append(Gate.rot(axis, float(angles[0]), target))


def _peel_into(c, axis, target, controls, angles, peel_idx, on_child):
    """Emit CNOTs for the controls at ``peel_idx`` and hand children to ``on_child``."""
    others = [i for i in range(len(controls)) if i not in set(peel_idx)]
    reordered = reorder_controls(angles, list(peel_idx) + others)
    rest = [controls[i] for i in others]
    if axis == "x":
        c.append(Gate.h(target))
        axis_eff = "z"
    else:
        axis_eff = axis
    for kind, val in peel_sequence(reordered, len(peel_idx)):
        if kind == "cnot":
            c.append(Gate.cnot(controls[peel_idx[val]], target))
        else:
            on_child(axis_eff, target, rest, val)
    if axis == "x":
        c.append(Gate.h(target))


def ucr_peel(c: DistributedCircuit, axis: str, target: QubitRef, controls: Sequence[QubitRef], angles, num_peel: int):
    """Peel the first ``num_peel`` controls, leaving child UCR macros in place."""
    if num_peel > len(controls):
        raise InvalidPeel(f"cannot peel {num_peel} of {len(controls)} controls")
    _peel_into(
        c, axis, target, list(controls), angles, list(range(num_peel)),
        lambda ax, t, cs, a: _emit_ucr_local(c, ax, t, cs, a),
    )


def distribute_ucr(c: DistributedCircuit, axis, target: QubitRef, controls: Sequence[QubitRef], angles, order: Sequence[int]):
    """Peel controls processor by processor (in ``order``) until the UCR is local."""
    controls = list(controls)
    for p in order:
        if p == target.proc:
            continue
        idx = [i for i, q in enumerate(controls) if q.proc == p]
        if idx:
            _peel_into(c, axis, target, controls, angles, idx,
                       lambda ax, t, cs, a: distribute_ucr(c, ax, t, cs, a, order))
            return
    stray = [q for q in controls if q.proc != target.proc]
    if stray:
        raise InvalidPeel(f"controls on processors outside the peel order: {stray}")
    _emit_ucr_local(c, axis, target, controls, angles)


def ucr_distribute(angles, axis: str, sizes: Sequence[int]) -> tuple[DistributedCircuit, Certificate]:
    """Stand-alone UCR distribution with the target on the last processor.

    ``sizes`` lists qubits per processor (contiguous); the UCR target is the
    last qubit of the last processor and every other qubit is a control.
    """
    part = Partition.contiguous(sizes)
    c = DistributedCircuit(part, 0)
    refs = c.data_in()
    target = refs[-1]
    controls = refs[:-1]
    if len(angles) != 2 ** len(controls):
        raise InvalidInput("angle count must be 2^(n-1)")
    distribute_ucr(c, axis, target, controls, angles, list(range(len(sizes))))
    n, k = part.n, len([s for s in sizes if s])
    # off-target controls set the cost; with n/k on the target this is ucr_distribute_bound(n, k)
    off = n - sizes[-1]
    bound = 2.0 ** (off + 1) - 2 if k > 1 else 0.0
    params = {"n": n, "k": k, "off_target": off, "balanced_bound": ucr_distribute_bound(n, k)}
    cert = Certificate("ucr-distribute", c.nonlocal_count(), bound, params).check()
    return c, cert


# dense recursion on a fixed peel order


def _block_peel(c, u, ws, p, rest_order, partner, child):
    """Peel the qubits of processor ``p`` off the block (u on wires ws)."""
    on_p = [j for j, w in enumerate(ws) if w.proc == p]
    others = [j for j, w in enumerate(ws) if w.proc != p]
    perm = on_p + others
    u = permute_qubits(u, perm)
    ws = [ws[j] for j in perm]
    r = len(on_p)
    for item in decompose_against_first(u, r):
        if item.kind == "unitary":
            child(item.matrix, ws[r:])
            continue
        i = item.depth
        target, controls = ws[i], ws[i + 1 :]
        c.append(Gate.swap(target, partner))
        moved = [target if w == partner else w for w in controls]
        peel_idx = [j for j, w in enumerate(moved) if w.proc == p]
        _peel_into(c, item.axis, partner, moved, item.angles, peel_idx,
                   lambda ax, t, cs, a: rest_order(ax, t, cs, a))
        c.append(Gate.swap(target, partner))


def synth_block(c: DistributedCircuit, u, ws: Sequence[QubitRef], order: Sequence[int]):
    """Implement u on wires ``ws`` using only processors in ``order``.

    The first processor in ``order`` is peeled first and the last one ends up
    holding the UCR targets.
    """
    ws = list(ws)
    present = [p for p in order if any(w.proc == p for w in ws)]
    if not ws:
        return
    if len(present) == 1:
        c.append(Gate.local(ws, u))
        return
    p, rest = present[0], present[1:]
    partner = next(w for w in ws if w.proc == rest[-1])
    _block_peel(
        c, u, ws, p,
        lambda ax, t, cs, a: distribute_ucr(c, ax, t, cs, a, rest),
        partner,
        lambda v, sub: synth_block(c, v, sub, rest),
    )


def _peel_order(c: DistributedCircuit, procs: Sequence[int]) -> list[int]:
    loads = c.partition.loads
    return sorted((p for p in procs if loads[p] > 0), key=lambda p: (loads[p], p))


def synth_no_ancilla(u, k: int) -> tuple[DistributedCircuit, Certificate]:
    """Distribute u over k processors holding a balanced contiguous partition, m = 0."""
    u = check_unitary(u, "target unitary")
    n = _num_qubits(u)
    if k < 1:
        raise InvalidInput("k must be >= 1")
    c = DistributedCircuit(Partition.balanced(n, k), 0)
    synth_block(c, u, c.data_in(), _peel_order(c, range(k)))
    cert = Certificate("no-ancilla", c.nonlocal_count(), no_ancilla_budget(n, k), {"n": n, "k": k, "m": 0}).check()
    return c, cert


# gathering onto fewer processors


@dataclass
class _Occupancy:
    c: DistributedCircuit
    holder: dict  # wire -> logical index

    @classmethod
    def initial(cls, c: DistributedCircuit) -> "_Occupancy":
        return cls(c, {q: i for i, q in enumerate(c.data_in())})

    def count(self, p: int) -> int:
        return sum(1 for w in self.holder if w.proc == p)

    def occupied(self, p: int) -> list[QubitRef]:
        return [w for w in self.c.proc_wires(p) if w in self.holder]

    def free(self, p: int) -> list[QubitRef]:
        return [w for w in self.c.proc_wires(p) if w not in self.holder]

    def swap(self, a: QubitRef, b: QubitRef):
        self.c.append(Gate.swap(a, b))
        ha, hb = self.holder.pop(a, None), self.holder.pop(b, None)
        if ha is not None:
            self.holder[b] = ha
        if hb is not None:
            self.holder[a] = hb

    def positions(self) -> list[QubitRef]:
        out = [None] * self.c.n
        for w, i in self.holder.items():
            out[i] = w
        return out


def _move_unit(occ: _Occupancy, path: list[int]) -> int:
    """Shift one unit of occupancy from path[0] to path[-1], one SWAP per hop.

    The SWAP chain starts at the receiving end, so intermediate processors keep
    their counts. An empty intermediate splits the path in two.
    """
    for j in range(1, len(path) - 1):
        if occ.count(path[j]) == 0:
            return _move_unit(occ, path[: j + 1]) + _move_unit(occ, path[j:])
    hole = occ.free(path[-1])[0]
    for mid in reversed(path[1:-1]):
        src = occ.occupied(mid)[-1]
        occ.swap(src, hole)
        hole = src
    occ.swap(occ.occupied(path[0])[-1], hole)
    return len(path) - 1


def _gather(occ: _Occupancy, targets: dict[int, int], topo: Topology | None) -> int:
    """Move states until processor p holds targets[p] qubits; returns SWAPs used."""
    c = occ.c
    used = 0
    while True:
        surplus = [p for p in range(c.k) if occ.count(p) > targets.get(p, 0)]
        if not surplus:
            return used
        p = surplus[0]
        deficit = [q for q in range(c.k) if occ.count(q) < targets.get(q, 0)]
        if topo is None:
            path = [p, deficit[0]]
        else:
            q = min(deficit, key=lambda x: (topo.distance(p, x), x))
            path = topo.shortest_path(p, q)
        used += _move_unit(occ, path)


def gather_plan(loads: Sequence[int], m: int, order: Sequence[int]) -> tuple[list[int], int]:
    """Processors (in ``order``) that receive all n qubits, and the remainder R.

    Capacities are load + m. The last chosen processor holds R qubits and the
    others are filled completely.
    """
    n = sum(loads)
    chosen, total = [], 0
    for p in order:
        cap = loads[p] + m
        if cap == 0:
            continue
        chosen.append(p)
        if total + cap >= n:
            return chosen, n - total
        total += cap
    raise InvalidInput("not enough capacity to hold the input")


def synth(u, k: int, m: int, restore_layout: bool = True, topology: Topology | None = None):
    """Dense synthesis with m ancillas per processor.

    With m > 0 the inputs are first gathered onto as few processors as
    possible; the processor holding the remainder is peeled first.
    """
    if topology is not None:
        return synth_topology(u, topology, m, restore_layout)
    u = check_unitary(u, "target unitary")
    n = _num_qubits(u)
    if m < 0 or k < 1:
        raise InvalidInput("need k >= 1 and m >= 0")
    if m == 0:
        c, cert = synth_no_ancilla(u, k)
        return c, cert
    c = DistributedCircuit(Partition.balanced(n, k), m, restore_layout=restore_layout)
    loads = c.partition.loads
    cap_order = sorted(range(k), key=lambda p: (-(loads[p] + m), p))
    chosen, rem = gather_plan(loads, m, cap_order)
    targets = {p: loads[p] + m for p in chosen[:-1]}
    targets[chosen[-1]] = rem
    occ = _Occupancy.initial(c)
    moves = _gather(occ, targets, None)
    gather_gates = list(c.gates)
    pos = occ.positions()
    order = [chosen[-1]] + chosen[:-1]
    synth_block(c, u, pos, order)
    if restore_layout:
        c.extend(reversed(gather_gates))
        c.layout_out = None
    else:
        c.layout_out = pos
    num_used = len(chosen)
    gather_cost = n * (2 if restore_layout else 1)
    bound = gathered_budget(n, num_used, rem, gather_cost)
    params = {"n": n, "k": k, "m": m, "used": num_used, "remainder": rem, "gather_swaps": moves}
    cert = Certificate("ancilla-gather", c.nonlocal_count(), bound, params).check()
    return c, cert


# topology-restricted variant


def _distribute_ucr_tree(c, axis, target, controls, angles, tree: Topology, alive: frozenset):
    controls = list(controls)
    if all(q.proc == target.proc for q in controls):
        _emit_ucr_local(c, axis, target, controls, angles)
        return
    leaves = [v for v in subtree_leaves(tree, set(alive)) if v != target.proc]
    leaf = min(leaves, key=lambda v: (sum(1 for q in controls if q.proc == v), v))
    adj = tree.adjacency()
    hub = next(w for w in adj[leaf] if w in alive)
    path = subtree_path(tree, set(alive), target.proc, hub)
    undo = []
    cur = target
    for p in path[1:]:
        nxt = next(q for q in controls if q.proc == p)
        c.append(Gate.swap(cur, nxt))
        undo.append((cur, nxt))
        controls = [cur if q == nxt else q for q in controls]
        cur = nxt
    idx = [i for i, q in enumerate(controls) if q.proc == leaf]
    remaining = alive - {leaf}
    if idx:
        _peel_into(c, axis, cur, controls, angles, idx,
                   lambda ax, t, cs, a: _distribute_ucr_tree(c, ax, t, cs, a, tree, remaining))
    else:
        _distribute_ucr_tree(c, axis, cur, controls, angles, tree, remaining)
    for a, b in reversed(undo):
        c.append(Gate.swap(a, b))


def _synth_tree_block(c, u, ws, tree: Topology, alive: frozenset, first: int | None = None):
    ws = list(ws)
    if not ws:
        return
    if len(alive) == 1:
        c.append(Gate.local(ws, u))
        return
    if first is None:
        load = {p: sum(1 for w in ws if w.proc == p) for p in alive}
        first = min(subtree_leaves(tree, set(alive)), key=lambda v: (load[v], v))
    leaf = first
    hub = next(w for w in tree.adjacency()[leaf] if w in alive)
    partner = next(w for w in ws if w.proc == hub)
    remaining = alive - {leaf}
    _block_peel(
        c, u, ws, leaf,
        lambda ax, t, cs, a: _distribute_ucr_tree(c, ax, t, cs, a, tree, remaining),
        partner,
        lambda v, sub: _synth_tree_block(c, v, sub, tree, remaining),
    )


def _tree_partition(n: int, tree: Topology) -> Partition:
    pre = tree.dfs_preorder(0)
    sizes = balanced_sizes(n, tree.k)
    assign = []
    for p, s in zip(pre, sizes):
        assign.extend([p] * s)
    return Partition(n, tree.k, tuple(assign))


def synth_topology(u, topology: Topology, m: int = 0, restore_layout: bool = True):
    """Dense synthesis where two-qubit gates may only join adjacent processors."""
    u = check_unitary(u, "target unitary")
    n = _num_qubits(u)
    tree = topology.spanning_tree(0)
    k = topology.k
    part = _tree_partition(n, tree)
    c = DistributedCircuit(part, m, restore_layout=restore_layout)
    loads = part.loads
    pre = tree.dfs_preorder(0)
    diam = topology.diameter()
    if m == 0:
        alive = frozenset(p for p in range(k) if loads[p] > 0)
        _synth_tree_block(c, u, c.data_in(), tree, alive)
        used = len(alive)
        bound = topology_budget(n, used)
        params = {"n": n, "k": k, "m": 0, "diameter": diam}
        cert = Certificate("topology", c.nonlocal_count(), bound, params).check()
        return c, cert
    chosen, rem = gather_plan(loads, m, pre)
    targets = {p: loads[p] + m for p in chosen[:-1]}
    targets[chosen[-1]] = rem
    occ = _Occupancy.initial(c)
    moves = _gather(occ, targets, tree)
    gather_gates = list(c.gates)
    pos = occ.positions()
    alive = frozenset(chosen)
    _synth_tree_block(c, u, pos, tree, alive, first=chosen[-1] if len(chosen) > 1 else None)
    if restore_layout:
        c.extend(reversed(gather_gates))
        c.layout_out = None
    else:
        c.layout_out = pos
    gather_cost = diam * n * (2 if restore_layout else 1)
    bound = gathered_topology_budget(n, len(chosen), rem, gather_cost)
    params = {"n": n, "k": k, "m": m, "diameter": diam, "used": len(chosen), "remainder": rem, "gather_swaps": moves}
    cert = Certificate("topology", c.nonlocal_count(), bound, params).check()
    return c, cert
