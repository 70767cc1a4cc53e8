"""Bipartite entanglement measures and their trajectory sweep.

Four cuts are measured along every trajectory: Wootters concurrence
between the atoms, and negativity for atom A vs its own field, atom A vs
the remote field, and field vs field. Entanglement sudden death shows up
as maximal intervals where a series stays below threshold; interval
endpoints are linearly interpolated between grid samples.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError, ContractViolationError
from .evolve import Trajectory
from .qops import Operator

__all__ = [
    "ESD_THRESHOLD",
    "BipartiteCut",
    "CUTS_OF_RECORD",
    "EntanglementSeries",
    "partial_trace",
    "partial_transpose",
    "concurrence",
    "negativity",
    "measure_trajectory",
    "esd_intervals",
]

ESD_THRESHOLD = 1e-6


@dataclass(frozen=True)
class BipartiteCut:
    """A kept pair of factors, named as it appears in the CSV schema."""

    name: str
    keep: tuple[int, int]


CUTS_OF_RECORD = (
    BipartiteCut("C_AB", (0, 1)),
    BipartiteCut("N_Aa", (0, 2)),
    BipartiteCut("N_Ab", (0, 3)),
    BipartiteCut("N_ab", (2, 3)),
)

# sigma_y (x) sigma_y, the spin-flip kernel of the concurrence
_SY2 = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=complex,
)


def partial_trace(rho: Operator, keep: Sequence[int]) -> Operator:
    """Reduced density matrix on the kept factors, in their given order.

    Factor dimensions are read from rho.dims.
    """
    dims = rho.dims
    nfac = len(dims)
    keep = tuple(int(k) for k in keep)
    if any(not 0 <= k < nfac for k in keep) or len(set(keep)) != len(keep):
        raise ConfigurationError(f"keep {keep} invalid for {nfac} factors")
    tensor = rho.data.reshape(dims + dims)
    row_sub = list(range(nfac))
    col_sub = [nfac + i if i in keep else i for i in range(nfac)]
    out_sub = [i for i in keep] + [nfac + i for i in keep]
    reduced = np.einsum(tensor, row_sub + col_sub, out_sub)
    kept_dims = tuple(dims[i] for i in keep)
    side = int(np.prod(kept_dims))
    return Operator(reduced.reshape(side, side), kept_dims)


def partial_transpose(rho: Operator, subsystem: int = 1) -> Operator:
    """Transpose one factor of a bipartite operator; an exact involution."""
    if len(rho.dims) != 2:
        raise ConfigurationError(f"partial transpose needs two factors, got dims {rho.dims}")
    if subsystem not in (0, 1):
        raise ConfigurationError(f"subsystem must be 0 or 1, got {subsystem}")
    d0, d1 = rho.dims
    tensor = rho.data.reshape(d0, d1, d0, d1)
    axes = (0, 3, 2, 1) if subsystem == 1 else (2, 1, 0, 3)
    return Operator(tensor.transpose(axes).reshape(d0 * d1, d0 * d1), rho.dims)


def _check_density(data: np.ndarray, tol: float = 1e-8) -> None:
    defect = float(np.abs(data - data.conj().T).max())
    if defect > tol:
        raise ContractViolationError(f"density matrix asymmetry {defect:.3e} exceeds {tol:.0e}")
    trace = complex(np.trace(data))
    if abs(trace - 1.0) > 1e-6:
        raise ContractViolationError(f"density matrix trace {trace:.8f} is not 1")
    wmin = float(np.linalg.eigvalsh(0.5 * (data + data.conj().T)).min())
    if wmin < -tol:
        raise ContractViolationError(f"density matrix eigenvalue {wmin:.3e} below -{tol:.0e}")


def concurrence(rho: Union[Operator, np.ndarray]) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    max(0, xi_1 - xi_2 - xi_3 - xi_4) with xi the decreasingly sorted
    square roots of the eigenvalues of rho (sy(x)sy) rho* (sy(x)sy).
    Evaluated as the singular values of X^T (sy(x)sy) X with rho = X X†:
    identical in exact arithmetic, but it avoids taking square roots of
    eigenvalues that roundoff smeared around zero, which would otherwise
    inject O(sqrt(eps)) noise into the xi of low-rank states.
    """
    data = rho.data if isinstance(rho, Operator) else np.asarray(rho, dtype=complex)
    if data.shape != (4, 4):
        raise ConfigurationError(f"concurrence needs a 4x4 matrix, got {data.shape}")
    _check_density(data)
    w, v = np.linalg.eigh(0.5 * (data + data.conj().T))
    # rank-reveal: weights below eps-scale are exact zeros of the state
    w = np.where(w > w[-1] * 1e-12, w, 0.0)
    x = v * np.sqrt(w)
    xi = np.linalg.svd(x.T @ _SY2 @ x, compute_uv=False)
    return float(max(0.0, xi[0] - xi[1] - xi[2] - xi[3]))


def negativity(rho: Operator, subsystem: int = 1) -> float:
    """Sum of the magnitudes of the negative partial-transpose eigenvalues."""
    w = np.linalg.eigvalsh(partial_transpose(rho, subsystem).data)
    return float(np.sum(np.abs(w) - w) / 2.0)


@dataclass(frozen=True)
class EntanglementSeries:
    """The four measured series over a trajectory, plus its diagnostics."""

    gt: np.ndarray
    c_atoms: np.ndarray        # C_AB
    n_atom_field: np.ndarray   # N_Aa: atom A with its own field
    n_atom_remote: np.ndarray  # N_Ab: atom A with the other cavity's field
    n_fields: np.ndarray       # N_ab: field with field
    trace_err: np.ndarray
    leakage: np.ndarray

    def by_name(self, name: str) -> np.ndarray:
        table = {
            "C_AB": self.c_atoms,
            "N_Aa": self.n_atom_field,
            "N_Ab": self.n_atom_remote,
            "N_ab": self.n_fields,
        }
        if name not in table:
            raise ConfigurationError(f"unknown series {name!r}")
        return table[name]


def _pure_cut_matrices(psi: np.ndarray, n: int) -> tuple[np.ndarray, ...]:
    """All four reduced density matrices of a pure composite state.

    For a pure |psi> the reduction to a factor pair is G G+ with G the
    (kept, traced) reshaping of the amplitude tensor.
    """
    tensor = psi.reshape(2, 2, n, n)
    g_ab = tensor.reshape(4, n * n)
    rho_ab = g_ab @ g_ab.conj().T
    g_aa = tensor.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    rho_aa = g_aa @ g_aa.conj().T
    g_abf = tensor.transpose(0, 3, 1, 2).reshape(2 * n, 2 * n)
    rho_abf = g_abf @ g_abf.conj().T
    g_ff = tensor.transpose(2, 3, 0, 1).reshape(n * n, 4)
    rho_ff = g_ff @ g_ff.conj().T
    return rho_ab, rho_aa, rho_abf, rho_ff


def _mixed_cut_matrices(rho: np.ndarray, n: int) -> tuple[np.ndarray, ...]:
    tensor = rho.reshape(2, 2, n, n, 2, 2, n, n)
    rho_ab = np.einsum("ijnmklnm->ijkl", tensor).reshape(4, 4)
    rho_aa = np.einsum("ijnmkjlm->inkl", tensor).reshape(2 * n, 2 * n)
    rho_abf = np.einsum("ijnmkjnl->imkl", tensor).reshape(2 * n, 2 * n)
    rho_ff = np.einsum("ijnmijkl->nmkl", tensor).reshape(n * n, n * n)
    return rho_ab, rho_aa, rho_abf, rho_ff


def measure_trajectory(traj: Trajectory, g: float = 1.0) -> EntanglementSeries:
    """Sweep the four cuts of record over every grid point of a trajectory."""
    n = traj.space.cutoff
    points = len(traj)
    c_atoms = np.empty(points)
    n_atom_field = np.empty(points)
    n_atom_remote = np.empty(points)
    n_fields = np.empty(points)
    for k in range(points):
        psi = traj.ket_at(k)
        if psi is not None:
            rho_ab, rho_aa, rho_abf, rho_ff = _pure_cut_matrices(psi, n)
        else:
            rho_ab, rho_aa, rho_abf, rho_ff = _mixed_cut_matrices(traj.state_at(k).data, n)
        c_atoms[k] = concurrence(rho_ab)
        n_atom_field[k] = negativity(Operator(rho_aa, (2, n)))
        n_atom_remote[k] = negativity(Operator(rho_abf, (2, n)))
        n_fields[k] = negativity(Operator(rho_ff, (n, n)))
    return EntanglementSeries(
        gt=g * traj.times,
        c_atoms=c_atoms,
        n_atom_field=n_atom_field,
        n_atom_remote=n_atom_remote,
        n_fields=n_fields,
        trace_err=traj.trace_err.copy(),
        leakage=traj.leakage.copy(),
    )


def esd_intervals(times: np.ndarray, values: np.ndarray,
                  threshold: float = ESD_THRESHOLD) -> list[tuple[float, float]]:
    """Maximal intervals where a series sits below threshold.

    A run touching t=0 is dropped: a cut that starts unentangled has not
    died. Interior endpoints are linearly interpolated between the grid
    samples straddling the crossing.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ConfigurationError("times and values must be matching 1-d arrays")
    below = values < threshold
    intervals: list[tuple[float, float]] = []
    k = 0
    npts = len(times)
    while k < npts:
        if not below[k]:
            k += 1
            continue
        start_idx = k
        while k < npts and below[k]:
            k += 1
        end_idx = k - 1
        if start_idx == 0:
            continue  # started below threshold: not a death
        lo = _cross(times, values, start_idx - 1, start_idx, threshold)
        hi = (times[end_idx] if end_idx == npts - 1
              else _cross(times, values, end_idx, end_idx + 1, threshold))
        intervals.append((lo, hi))
    return intervals


def _cross(times: np.ndarray, values: np.ndarray, i: int, j: int, threshold: float) -> float:
    v0, v1 = values[i], values[j]
    if v1 == v0:
        return float(times[i])
    frac = (threshold - v0) / (v1 - v0)
    return float(times[i] + frac * (times[j] - times[i]))
