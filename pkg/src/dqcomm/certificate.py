"""Count certificates: a measured nonlocal count next to the bound it must meet."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CertificateViolation


@dataclass(frozen=True)
class Certificate:
    lemma: str
    measured: int
    bound: float
    params: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound

    def check(self) -> "Certificate":
        if not self.holds:
            raise CertificateViolation(
                f"{self.lemma}: measured {self.measured} exceeds bound {self.bound} ({self.params})"
            )
        return self

    def as_dict(self) -> dict:
        return {"lemma": self.lemma, "measured": self.measured, "bound": self.bound, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(d["lemma"], int(d["measured"]), d["bound"], dict(d.get("params", {})))


# bound formulas for dense synthesis


def ucr_distribute_bound(n: float, k: int) -> float:
    """CNOTs needed to spread an n-qubit UCR over k processors."""
    if k <= 1:
        return 0.0
    return 2 ** ((1 - 1 / k) * n + 1) - 2


def no_ancilla_budget(n: float, k: int) -> float:
    """Proof sum for dense synthesis over k processors without ancillas."""
    if k <= 1:
        return 0.0
    a = sum(4 ** (i * n / k) for i in range(1, k))
    b = sum(2 ** ((1 + i / k) * n) for i in range(0, k - 1))
    return 6 * a + 6 * b


def per_round_budget(n: float, k: int) -> float:
    """Budget for a single peeling round: 6*4^{n/k} + 6*2^n."""
    return 6 * 4 ** (n / k) + 6 * 2**n


def gathered_budget(n: int, num_used: int, peel: int, gather_moves: float) -> float:
    """Ancilla-assisted bound: gathering, one peel of ``peel`` qubits, recursion."""
    if num_used <= 1:
        return gather_moves
    rest = n - peel
    return (
        gather_moves
        + 6 * 4**peel
        + 3 * 4**peel * ucr_distribute_bound(rest, num_used - 1)
        + 4**peel * no_ancilla_budget(rest, num_used - 1)
    )


def ucr_tree_bound(n: float, k: int) -> float:
    """UCR distribution over a spanning tree."""
    if k <= 1:
        return 0.0
    return 2 ** (n - n / k + 1) + (k - 1) * 2 ** (n - 2 * n / k + 2)


def topology_budget(n: float, k: int) -> float:
    """Sum of the per-round topology costs for rounds 1..k-1."""
    total = 0.0
    for i in range(1, k):
        total += 6 * 4 ** (i * n / k)
        total += 6 * 2 ** (n + (i - 1) * n / k)
        total += 12 * (k - i) * 2 ** (n + (i - 2) * n / k)
    return total


def gathered_topology_budget(n: int, num_used: int, peel: int, gather_moves: float) -> float:
    if num_used <= 1:
        return gather_moves
    rest = n - peel
    return (
        gather_moves
        + 6 * 4**peel
        + 3 * 4**peel * ucr_tree_bound(rest, num_used - 1)
        + 4**peel * topology_budget(rest, num_used - 1)
    )
