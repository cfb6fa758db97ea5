"""Excitation-number blocks of the coupled field-atom Hamiltonian.

The model couples a math-type q-deformed bosonic mode (ladder operators
A, A+) to an ordinary atomic mode b with a Kerr-type self-interaction:

    H = (A A+ + A+ A)/2  +  omega (b+ b + 1/2) + chi b+^2 b^2
        + gamma (A+ b + A b+)

The exchange term moves one quantum between the modes, so the total count
n + m is conserved and H is block diagonal.  Block N acts on
span{ |n = N - m quanta; m atomic quanta>, m = 0..N } and is real
symmetric tridiagonal there:

    diag[m]    = ([N-m] + [N-m+1])/2 + omega (m + 1/2) + chi m (m - 1)
    offdiag[m-1] = gamma sqrt(m) sqrt([N-m+1])          (m = 1..N)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qalgebra import box_n, check_deformation


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters (hbar = 1): atomic frequency omega > 0, Kerr
    strength chi >= 0, real exchange coupling gamma, deformation q."""

    omega: float = 1.0
    chi: float = 0.0
    gamma: float = 1.0
    q: float = 1.0

    def __post_init__(self) -> None:
        for name in ("omega", "chi", "gamma"):
            value = getattr(self, name)
            if isinstance(value, complex):
                raise TypeError(f"{name} must be real, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.omega <= 0.0:
            raise ValueError(f"omega must be > 0, got {self.omega!r}")
        if self.chi < 0.0:
            raise ValueError(f"chi must be >= 0, got {self.chi!r}")
        object.__setattr__(self, "q", check_deformation(self.q))


@dataclass(frozen=True)
class BlockMatrix:
    """Real symmetric tridiagonal block at total excitation n_total.

    diag has n_total + 1 entries (index m = atomic quanta), offdiag the
    n_total couplings between m - 1 and m.
    """

    n_total: int
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        if self.n_total < 0:
            raise ValueError(f"n_total must be >= 0, got {self.n_total}")
        if self.diag.shape != (self.n_total + 1,):
            raise ValueError(f"diag must have {self.n_total + 1} entries")
        if self.offdiag.shape != (self.n_total,):
            raise ValueError(f"offdiag must have {self.n_total} entries")

    @property
    def dim(self) -> int:
        return self.n_total + 1


def build_block(params: SystemParams, n_total: int) -> BlockMatrix:
    """Assemble the tridiagonal Hamiltonian block at total excitation n_total."""
    if n_total < 0:
        raise ValueError(f"n_total must be >= 0, got {n_total}")
    n_total = int(n_total)
    # brackets[k] = [k] for k = 0..n_total+1
    brackets = np.array([box_n(k, params.q) for k in range(n_total + 2)])
    m = np.arange(n_total + 1)
    field_n = n_total - m
    diag = (
        0.5 * (brackets[field_n] + brackets[field_n + 1])
        + params.omega * (m + 0.5)
        + params.chi * m * (m - 1)
    )
    mm = np.arange(1, n_total + 1)
    offdiag = params.gamma * np.sqrt(mm) * np.sqrt(brackets[n_total - mm + 1])
    return BlockMatrix(n_total=n_total, diag=diag, offdiag=offdiag)


def block_matrix_dense(block: BlockMatrix) -> np.ndarray:
    """Dense (n_total+1) x (n_total+1) array of a tridiagonal block."""
    out = np.diag(block.diag)
    if block.n_total > 0:
        out += np.diag(block.offdiag, 1) + np.diag(block.offdiag, -1)
    return out


def lattice_index(n: int, m: int) -> int:
    """Position of |n; m> in the block-ordered triangular lattice."""
    total = n + m
    return total * (total + 1) // 2 + m


def lattice_states(n_max: int) -> list[tuple[int, int]]:
    """All (n, m) with n + m <= n_max, grouped by total excitation."""
    return [(total - m, m) for total in range(n_max + 1) for m in range(total + 1)]


def total_hamiltonian_dense(params: SystemParams, n_max: int) -> np.ndarray:
    """Full two-mode Hamiltonian on the lattice {(n, m): n + m <= n_max}.

    Assembled directly from the operator actions (not from build_block):
    A+ b maps |n; m> to sqrt(m) sqrt([n+1]) |n+1; m-1> and A b+ maps it to
    sqrt([n]) sqrt(m+1) |n-1; m+1>, both preserving n + m, so the matrix
    is block diagonal with one block per total excitation.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    states = lattice_states(n_max)
    dim = len(states)
    ham = np.zeros((dim, dim))
    for n, m in states:
        idx = lattice_index(n, m)
        ham[idx, idx] = (
            0.5 * (box_n(n, params.q) + box_n(n + 1, params.q))
            + params.omega * (m + 0.5)
            + params.chi * m * (m - 1)
        )
        if m >= 1:
            jdx = lattice_index(n + 1, m - 1)
            ham[jdx, idx] += params.gamma * math.sqrt(m) * math.sqrt(box_n(n + 1, params.q))
        if n >= 1:
            # same factor order as the A+ b branch so the two transpose
            # entries of each coupling come out bit-identical
            jdx = lattice_index(n - 1, m + 1)
            ham[jdx, idx] += params.gamma * math.sqrt(m + 1) * math.sqrt(box_n(n, params.q))
    return ham
