"""Two-qubit polarization states and entanglement measures.

Basis ordering is fixed to (HH, HV, VH, VV); the first qubit is the photon
seen by detector D1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
LOG_CUTOFF = 1e-14

BASIS_LABELS = ("HH", "HV", "VH", "VV")

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Validated 4x4 density matrix over (HH, HV, VH, VV).

    The stored matrix is a read-only copy. Construction fails with
    `InvariantError` unless the matrix is Hermitian, has unit trace and is
    positive semidefinite (within the module tolerances).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise InvariantError(f"density matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvariantError("density matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvariantError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantError(f"trace is {tr.real:.3e}, expected 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < PSD_TOL:
            raise InvariantError(f"smallest eigenvalue {lam_min:.3e} is negative")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_ket(cls, ket) -> "TwoQubitState":
        psi = np.asarray(ket, dtype=complex).reshape(4)
        norm = np.vdot(psi, psi).real
        if norm <= 0:
            raise DomainError("zero vector is not a state")
        psi = psi / np.sqrt(norm)
        return cls(np.outer(psi, psi.conj()))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __repr__(self):
        return f"TwoQubitState(purity={purity(self):.6f})"


@dataclass(frozen=True)
class StateMetrics:
    concurrence: float
    entanglement_of_formation: float
    normalized_entropy: float
    purity: float


def _as_state(rho) -> TwoQubitState:
    if isinstance(rho, TwoQubitState):
        return rho
    return TwoQubitState(rho)


def analyzer_ket(theta: float) -> np.ndarray:
    """Single-photon linear polarization cos(theta)|H> + sin(theta)|V>."""
    return np.array([np.cos(theta), np.sin(theta)], dtype=complex)


# -- constructors -----------------------------------------------------------

def bell_phi(phi: float = 0.0) -> TwoQubitState:
    """(|HH> + e^{i phi}|VV>)/sqrt(2)."""
    return TwoQubitState.from_ket([1.0, 0.0, 0.0, np.exp(1j * phi)])


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(np.eye(4) / 4)


def output_mixture() -> TwoQubitState:
    """Incoherent HH/VV mixture left after the concentrator when the two paths
    are fully distinguishable."""
    return TwoQubitState(np.diag([0.5, 0.0, 0.0, 0.5]))


def pre_concentrator_mixed_state() -> TwoQubitState:
    """HV/VH mixture carried by type-II pairs before the half-wave plate and PBS."""
    return TwoQubitState(np.diag([0.0, 0.5, 0.5, 0.0]))


def partial_state(epsilon: float, phi: float = 0.0) -> TwoQubitState:
    """Partially mixed, partially entangled state.

    Returns ``eps |Phi_phi><Phi_phi| + (1 - eps) (|HH><HH| + |VV><VV|)/2`` with
    ``|Phi_phi> = (|HH> + e^{i phi}|VV>)/sqrt(2)``.

    Parameters
    ----------
    epsilon : float
        Weight of the entangled component, in [0, 1].
    phi : float
        Relative phase of the VV amplitude, radians.
    """
    epsilon = float(epsilon)
    if not (0.0 <= epsilon <= 1.0) or not np.isfinite(epsilon):
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = 0.5 * epsilon * np.exp(-1j * phi)
    m[3, 0] = 0.5 * epsilon * np.exp(1j * phi)
    return TwoQubitState(m)


# -- measures ---------------------------------------------------------------

def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence(rho) -> float:
    """Wootters concurrence.

    The spin-flip values are taken as singular values of
    ``sqrt(rho) (sy x sy) sqrt(rho)*`` which equal the square roots of the
    eigenvalues of ``rho (sy x sy) rho* (sy x sy)`` but do not lose half the
    digits near zero.
    """
    m = _as_state(rho).matrix
    r = _psd_sqrt(m)
    lam = np.linalg.svd(r @ _SPIN_FLIP @ r.conj(), compute_uv=False)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def eof_from_concurrence(c: float) -> float:
    c = min(max(float(c), 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - c * c)))


def entanglement_of_formation(rho) -> float:
    return eof_from_concurrence(concurrence(rho))


def normalized_entropy(rho) -> float:
    """Von Neumann entropy in bits divided by 2, so that I/4 maps to 1."""
    w = _as_state(rho).eigenvalues()
    w = w[w > LOG_CUTOFF]
    s = -np.sum(w * np.log2(w)) / 2.0
    return float(min(max(s, 0.0), 1.0)) + 0.0  # no negative zero


def purity(rho) -> float:
    m = _as_state(rho).matrix
    return float(np.real(np.trace(m @ m)))


def metrics(rho) -> StateMetrics:
    rho = _as_state(rho)
    c = concurrence(rho)
    return StateMetrics(
        concurrence=c,
        entanglement_of_formation=eof_from_concurrence(c),
        normalized_entropy=normalized_entropy(rho),
        purity=purity(rho),
    )


def coincidence_probability(rho, theta1: float, theta2: float) -> float:
    """Probability that both photons pass linear analyzers at theta1, theta2 (rad)."""
    m = _as_state(rho).matrix
    v = np.kron(analyzer_ket(theta1), analyzer_ket(theta2))
    p = np.real(np.vdot(v, m @ v))
    return float(min(max(p, 0.0), 1.0))


def projector_probability(rho, ket1, ket2) -> float:
    """<a b| rho |a b> for arbitrary single-photon kets a, b."""
    m = _as_state(rho).matrix
    v = np.kron(np.asarray(ket1, dtype=complex), np.asarray(ket2, dtype=complex))
    v = v / np.linalg.norm(v)
    return float(min(max(np.real(np.vdot(v, m @ v)), 0.0), 1.0))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    a = _as_state(rho).matrix
    b = _as_state(sigma).matrix
    r = _psd_sqrt(a)
    w = np.linalg.eigvalsh(r @ b @ r)
    f = np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2
    return float(min(max(f, 0.0), 1.0))


def to_rows(rho):
    """Flatten to 16 rows ``(row_label, col_label, re, im)``."""
    m = _as_state(rho).matrix
    return [
        (BASIS_LABELS[i], BASIS_LABELS[j], float(m[i, j].real), float(m[i, j].imag))
        for i in range(4)
        for j in range(4)
    ]


def from_rows(rows) -> TwoQubitState:
    index = {lab: k for k, lab in enumerate(BASIS_LABELS)}
    m = np.zeros((4, 4), dtype=complex)
    seen = set()
    for r, c, re, im in rows:
        i, j = index[r], index[c]
        m[i, j] = float(re) + 1j * float(im)
        seen.add((i, j))
    if len(seen) != 16:
        raise InvariantError("state table must have all 16 entries")
    # text round trips lose digits; restore exact Hermiticity and trace
    m = 0.5 * (m + m.conj().T)
    return TwoQubitState(m / np.trace(m).real)
