"""Dense operators on small tensor-product Hilbert spaces.

Conventions fixed here and relied on by every other module:

* atom basis order (|e>, |g>), so sigma_z = diag(+1, -1) and the excited
  state carries one excitation;
* composite factor order (atom A, atom B, field a, field b) with dims
  (2, 2, N, N) and row-major flattening;
* the only matrix-function route is the Hermitian eigendecomposition.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError, ContractViolationError

__all__ = [
    "HERMITICITY_TOL",
    "Operator",
    "CompositeSpace",
    "EigDecomposition",
    "annihilation",
    "number",
    "atomic_ops",
    "identity",
    "embed",
    "herm_eig",
    "unitary_exp",
]

# Inputs to herm_eig may deviate from exact Hermiticity by no more than this.
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class Operator:
    """A square matrix tagged with the tensor-factor dimensions it acts on."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        n = int(np.prod(dims))
        if data.ndim != 2 or data.shape != (n, n):
            raise ConfigurationError(
                f"operator data of shape {data.shape} does not match dims {dims}"
            )
        data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T, self.dims)

    def hermiticity_defect(self) -> float:
        """Max-entry deviation from self-adjointness."""
        return float(np.abs(self.data - self.data.conj().T).max())

    def _check_dims(self, other: "Operator") -> None:
        if self.dims != other.dims:
            raise ConfigurationError(
                f"dims mismatch: {self.dims} vs {other.dims}"
            )

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.data @ other.data, self.dims)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.data - other.data, self.dims)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.data * scalar, self.dims)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.data, self.dims)


@dataclass(frozen=True)
class CompositeSpace:
    """The four-factor space (atom A, atom B, field a, field b).

    cutoff is the number of Fock levels retained per cavity field.
    """

    cutoff: int

    def __post_init__(self) -> None:
        if int(self.cutoff) < 2:
            raise ConfigurationError(f"cutoff must be >= 2, got {self.cutoff}")
        object.__setattr__(self, "cutoff", int(self.cutoff))

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (2, 2, self.cutoff, self.cutoff)

    @property
    def dim(self) -> int:
        return 4 * self.cutoff * self.cutoff

    def flat_index(self, ia: int, ib: int, na: int, nb: int) -> int:
        """Row-major flat index of |ia, ib, na, nb> (atom index 0 = |e>)."""
        n = self.cutoff
        if not (0 <= ia < 2 and 0 <= ib < 2 and 0 <= na < n and 0 <= nb < n):
            raise ConfigurationError(
                f"basis labels ({ia},{ib},{na},{nb}) out of range for cutoff {n}"
            )
        return ((ia * 2 + ib) * n + na) * n + nb

    def excitations(self) -> np.ndarray:
        """Total excitation number of every flat basis state.

        |e> (atom index 0) counts one excitation; fields count their
        Fock level. Integer vector of length dim.
        """
        n = self.cutoff
        ia, ib, na, nb = np.meshgrid(
            np.arange(2), np.arange(2), np.arange(n), np.arange(n), indexing="ij"
        )
        return ((1 - ia) + (1 - ib) + na + nb).reshape(-1)

    def field_tail_mask(self, levels: int = 2) -> np.ndarray:
        """Boolean mask of basis states with either field in its top `levels` levels."""
        n = self.cutoff
        ia, ib, na, nb = np.meshgrid(
            np.arange(2), np.arange(2), np.arange(n), np.arange(n), indexing="ij"
        )
        return ((na >= n - levels) | (nb >= n - levels)).reshape(-1)


@dataclass(frozen=True)
class EigDecomposition:
    """Eigenvalues (real, ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def annihilation(cutoff: int) -> Operator:
    """Truncated bosonic annihilation operator, <n-1|a|n> = sqrt(n).

    The truncation shows up only in the commutator: [a, a+] equals the
    identity except for the bottom-right entry -(cutoff-1).
    """
    if int(cutoff) < 2:
        raise ConfigurationError(f"cutoff must be >= 2, got {cutoff}")
    cutoff = int(cutoff)
    return Operator(np.diag(np.sqrt(np.arange(1, cutoff)), 1), (cutoff,))


def number(cutoff: int) -> Operator:
    """Photon number operator diag(0 .. cutoff-1)."""
    if int(cutoff) < 2:
        raise ConfigurationError(f"cutoff must be >= 2, got {cutoff}")
    return Operator(np.diag(np.arange(int(cutoff), dtype=float)), (int(cutoff),))


def atomic_ops() -> tuple[Operator, Operator, Operator]:
    """(sigma_z, sigma_plus, sigma_minus) in the (|e>, |g>) basis."""
    sz = Operator(np.diag([1.0, -1.0]), (2,))
    sp = Operator(np.array([[0.0, 1.0], [0.0, 0.0]]), (2,))
    sm = Operator(np.array([[0.0, 0.0], [1.0, 0.0]]), (2,))
    return sz, sp, sm


def identity(dims: Union[CompositeSpace, Sequence[int]]) -> Operator:
    dims = dims.dims if isinstance(dims, CompositeSpace) else tuple(int(d) for d in dims)
    return Operator(np.eye(int(np.prod(dims))), dims)


def embed(op: Operator, slot: int, space: Union[CompositeSpace, Sequence[int]]) -> Operator:
    """Lift a single-factor operator to the composite space.

    Acts as `op` on factor `slot` and as the identity on every other factor.
    """
    dims = space.dims if isinstance(space, CompositeSpace) else tuple(int(d) for d in space)
    if not (0 <= slot < len(dims)):
        raise ConfigurationError(f"slot {slot} out of range for dims {dims}")
    if op.dims != (dims[slot],):
        raise ConfigurationError(
            f"operator dims {op.dims} do not fit factor {slot} of {dims}"
        )
    out = np.array([[1.0 + 0.0j]])
    for k, d in enumerate(dims):
        out = np.kron(out, op.data if k == slot else np.eye(d))
    return Operator(out, dims)


def herm_eig(op: Operator) -> EigDecomposition:
    """Eigendecomposition of a Hermitian operator.

    Rejects inputs whose asymmetry exceeds HERMITICITY_TOL, reporting the
    measured defect.
    """
    defect = op.hermiticity_defect()
    if defect >= HERMITICITY_TOL:
        raise ContractViolationError(
            f"herm_eig requires a Hermitian operator; asymmetry {defect:.3e} "
            f"exceeds {HERMITICITY_TOL:.0e}"
        )
    w, v = np.linalg.eigh(op.data)
    return EigDecomposition(eigenvalues=w, eigenvectors=v)


def unitary_exp(op: Operator, t: float = 1.0) -> Operator:
    """exp(-i * op * t) for Hermitian op, via the eigendecomposition."""
    dec = herm_eig(op)
    u = (dec.eigenvectors * np.exp(-1j * dec.eigenvalues * t)) @ dec.eigenvectors.conj().T
    return Operator(u, op.dims)
