"""Dense complex linear algebra used by synthesis and verification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import InvalidInput, PrecisionFailure

UNITARITY_TOL_PER_DIM = 1e-10
CSD_TOL = 1e-9


def _as_finite(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise InvalidInput(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    return a


def spectral_norm(a) -> float:
    """Largest singular value."""
    a = _as_finite(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(_as_finite(a), "fro"))


def unitarity_residual(u) -> float:
    u = _as_finite(u)
    return frobenius_norm(u.conj().T @ u - np.eye(u.shape[0]))


def is_unitary(u, tol: float | None = None) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    if tol is None:
        tol = UNITARITY_TOL_PER_DIM * u.shape[0]
    return unitarity_residual(u) <= tol


def check_unitary(u, what: str = "matrix") -> np.ndarray:
    u = _as_finite(u)
    if u.shape[0] != u.shape[1]:
        raise InvalidInput(f"{what} is not square: {u.shape}")
    res = unitarity_residual(u)
    if res > UNITARITY_TOL_PER_DIM * u.shape[0]:
        raise PrecisionFailure(f"{what} is not unitary (residual {res:.3e})")
    return u


def phase_align(target, actual) -> np.ndarray:
    """Return ``actual`` multiplied by the phase that best matches ``target``.

    The phase is taken from trace(actual^dagger target); when that trace
    vanishes no phase is preferred and ``actual`` is returned unchanged.
    """
    t = np.vdot(actual, target)
    if abs(t) < 1e-300:
        return np.asarray(actual)
    return np.asarray(actual) * (t / abs(t))


def global_phase_distance(u, v) -> float:
    """min over phi of ||u - e^{i phi} v||_2 with phi from the trace phase."""
    u = _as_finite(u)
    v = _as_finite(v)
    if u.shape != v.shape:
        raise InvalidInput(f"dimension mismatch {u.shape} vs {v.shape}")
    return spectral_norm(u - phase_align(u, v))


def random_unitary(dim: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian with R-diagonal phases removed."""
    if dim < 1:
        raise InvalidInput("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class CsdResult:
    """u = (left0 (+) left1) . [[C, -S], [S, C]] . (right0 (+) right1)

    with C = diag(cos theta), S = diag(sin theta).
    """

    left: tuple[np.ndarray, np.ndarray]
    theta: np.ndarray
    right: tuple[np.ndarray, np.ndarray]

    def middle(self) -> np.ndarray:
        c = np.diag(np.cos(self.theta))
        s = np.diag(np.sin(self.theta))
        return np.block([[c, -s], [s, c]])

    def reassemble(self) -> np.ndarray:
        left = sla.block_diag(*self.left)
        right = sla.block_diag(*self.right)
        return left @ self.middle() @ right


def cosine_sine_decompose(u) -> CsdResult:
    """Equal-block cosine-sine decomposition of an even-dimensional unitary."""
    u = _as_finite(u)
    dim = u.shape[0]
    if u.shape != (dim, dim) or dim < 2 or dim % 2:
        raise InvalidInput(f"CSD needs an even square matrix, got {u.shape}")
    res = unitarity_residual(u)
    if res > UNITARITY_TOL_PER_DIM * dim:
        raise PrecisionFailure(f"CSD input is not unitary (residual {res:.3e})")
    h = dim // 2
    (l0, l1), theta, (r0, r1) = sla.cossin(u, p=h, q=h, separate=True)
    out = CsdResult((l0, l1), np.asarray(theta, dtype=float), (r0, r1))
    err = frobenius_norm(out.reassemble() - u)
    if err > CSD_TOL:
        raise PrecisionFailure(f"CSD reassembly residual {err:.3e} exceeds {CSD_TOL}")
    return out


def permute_qubits(u: np.ndarray, order) -> np.ndarray:
    """Reorder the tensor factors of a 2^n x 2^n operator.

    Qubit 0 is the most significant bit. The result acts on qubit ``j`` the way
    ``u`` acted on qubit ``order[j]``.
    """
    order = list(order)
    n = len(order)
    if order == list(range(n)):
        return u
    t = np.asarray(u).reshape((2,) * (2 * n))
    t = t.transpose(order + [n + q for q in order])
    return t.reshape(2**n, 2**n)
