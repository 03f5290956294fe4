"""Chain geometry and coupling-matrix construction.

The system is a 1D XX chain made of three segments: a left register of n
qubits (L1..Ln), a channel of N qubits (c1..cN), and a right register
(Rn..R1, mirror ordered).  The channel couples uniformly with strength g_C,
the registers attach to the channel ends with strength g_I, and the
intraregister couplings follow the perfect-transfer profile

    g_u = (g0/2) * sqrt(u * (2n - u + 1)),   u = 1..n,

with g_n tuned to the zero-mode coupling t_kappa.  That tuning makes the
weak-coupling effective matrix equal to g0 * Jx for a pseudo spin J = n,
which is what produces mirror inversion at tau = pi / g0.

All matrices here are real symmetric tridiagonal with zero diagonal.  The
site ordering [L1..Ln, c1..cN, Rn..R1] is fixed once here and every other
module indexes into it; in particular R1 is always the *last* index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChainSpec",
    "CouplingMatrix",
    "derive_parameters",
    "build_full_coupling_matrix",
    "build_effective_coupling_matrix",
    "channel_spectrum",
    "mode_couplings",
    "jx_matrix",
]


@dataclass(frozen=True)
class ChainSpec:
    """Geometry plus every derived coupling parameter.

    Instances should be produced by :func:`derive_parameters`; the fields
    satisfy g_u[n-1] == t_kappa (tuning), g0 == 2*t_kappa/sqrt(n(n+1)) and
    tau * g0 == pi.
    """

    n: int              # qubits per register
    N: int              # channel length, odd
    g_C: float          # intrachannel coupling
    g_I: float          # register-channel coupling
    kappa: int          # zero-mode index, (N+1)/2
    t_kappa: float      # register <-> zero-mode coupling
    g0: float           # base register coupling, sets the transfer clock
    g_u: tuple[float, ...]  # intraregister couplings, u = 1..n
    tau: float          # transfer time, pi / g0

    @property
    def total_sites(self) -> int:
        return 2 * self.n + self.N

    @property
    def kappa_parity(self) -> int:
        """(-1)**(kappa-1), the sign absorbed into the right-end mode."""
        return -1 if (self.kappa - 1) % 2 else 1


@dataclass(frozen=True)
class CouplingMatrix:
    """Real symmetric tridiagonal single-particle matrix with site labels."""

    order: int
    entries: np.ndarray
    site_labels: tuple[str, ...]
    kind: str  # "full" | "effective"

    def offdiagonal(self) -> np.ndarray:
        return np.diag(self.entries, 1).copy()

    def index_of(self, label: str) -> int:
        return self.site_labels.index(label)


def derive_parameters(n: int, N: int, g_C: float, g_I: float) -> ChainSpec:
    """Derive every coupling parameter from the four free inputs.

    Raises ValueError for even N (no zero-energy channel mode exists),
    non-positive lengths, or non-positive couplings.
    """
    if n < 1:
        raise ValueError(f"register size must be >= 1, got {n}")
    if N < 1 or N % 2 == 0:
        raise ValueError(f"channel length must be a positive odd integer, got {N}")
    if g_C <= 0 or g_I <= 0:
        raise ValueError(f"couplings must be positive, got g_C={g_C}, g_I={g_I}")

    kappa = (N + 1) // 2
    # sin(kappa*pi/(N+1)) = sin(pi/2) = 1 for odd N; keep the formula literal
    t_kappa = float(g_I * np.sqrt(2.0 / (N + 1)) * np.sin(kappa * np.pi / (N + 1)))
    g0 = float(2.0 * t_kappa / np.sqrt(n * (n + 1)))
    g_u = tuple(float(0.5 * g0 * np.sqrt(u * (2 * n - u + 1))) for u in range(1, n + 1))
    tau = float(np.pi / g0)
    return ChainSpec(n=n, N=N, g_C=g_C, g_I=g_I, kappa=kappa,
                     t_kappa=t_kappa, g0=g0, g_u=g_u, tau=tau)


def _tridiagonal(offdiag: np.ndarray, labels: tuple[str, ...], kind: str) -> CouplingMatrix:
    order = len(offdiag) + 1
    m = np.zeros((order, order))
    idx = np.arange(order - 1)
    m[idx, idx + 1] = offdiag
    m[idx + 1, idx] = offdiag
    return CouplingMatrix(order=order, entries=m, site_labels=labels, kind=kind)


def _register_labels(n: int) -> tuple[list[str], list[str]]:
    left = [f"L{u}" for u in range(1, n + 1)]
    right = [f"R{u}" for u in range(n, 0, -1)]
    return left, right


def build_full_coupling_matrix(spec: ChainSpec,
                               register_offdiag: np.ndarray | None = None) -> CouplingMatrix:
    """(N+2n) x (N+2n) coupling matrix in the ordering [L1..Ln, c1..cN, Rn..R1].

    `register_offdiag` optionally overrides the left/right intraregister
    bonds (length n-1 each); used by the disorder knob in the sweep engine.
    """
    n, N = spec.n, spec.N
    reg = np.asarray(spec.g_u[:n - 1])
    left_reg = right_reg = reg
    if register_offdiag is not None:
        left_reg, right_reg = register_offdiag
    off = np.concatenate([
        left_reg,
        [spec.g_I],
        np.full(N - 1, spec.g_C),
        [spec.g_I],
        right_reg[::-1],
    ])
    left, right = _register_labels(n)
    labels = tuple(left + [f"c{i}" for i in range(1, N + 1)] + right)
    return _tridiagonal(off, labels, "full")


def build_effective_coupling_matrix(spec: ChainSpec) -> CouplingMatrix:
    """(2n+1) x (2n+1) weak-coupling matrix [L1..Ln, kappa, Rn..R1].

    Under the tuning g_n = t_kappa this equals g0 * Jx for J = n.
    """
    n = spec.n
    reg = np.asarray(spec.g_u[:n - 1])
    off = np.concatenate([reg, [spec.t_kappa, spec.t_kappa], reg[::-1]])
    left, right = _register_labels(n)
    labels = tuple(left + ["kappa"] + right)
    return _tridiagonal(off, labels, "effective")


def channel_spectrum(spec: ChainSpec) -> np.ndarray:
    """Collective-mode energies eps_k = 2 g_C cos(k pi/(N+1)), k = 1..N."""
    k = np.arange(1, spec.N + 1)
    return 2.0 * spec.g_C * np.cos(k * np.pi / (spec.N + 1))


def mode_couplings(spec: ChainSpec) -> np.ndarray:
    """Register-to-mode couplings t_k = g_I sqrt(2/(N+1)) sin(k pi/(N+1))."""
    k = np.arange(1, spec.N + 1)
    return spec.g_I * np.sqrt(2.0 / (spec.N + 1)) * np.sin(k * np.pi / (spec.N + 1))


def jx_matrix(n: int) -> np.ndarray:
    """Angular-momentum x-matrix for J = n, dimension 2n+1.

    Superdiagonal element m -> m+1 is (1/2) sqrt(J(J+1) - m(m+1)) with
    m = -J..J-1.
    """
    m = np.arange(-n, n)
    off = 0.5 * np.sqrt(n * (n + 1) - m * (m + 1))
    jx = np.zeros((2 * n + 1, 2 * n + 1))
    idx = np.arange(2 * n)
    jx[idx, idx + 1] = off
    jx[idx + 1, idx] = off
    return jx
