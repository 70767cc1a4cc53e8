"""Unitary evolution in truncated Fock space.

One Hermitian eigendecomposition per trajectory supplies every time point.
Because all model variants conserve the total excitation number, the
generator is block-diagonal over excitation sectors; the engine
eigendecomposes sector by sector and applies the per-sector propagators,
which is exactly equivalent to the dense route and far cheaper at the
default dimension (4N^2 = 1024). Operators that do not conserve excitation
fall back to a single dense sector.

States along a trajectory are exposed lazily: materializing the default
grid (1001 points of 1024x1024 matrices) would need ~16 GB, so density
matrices are computed per index on demand and diagnostics are recorded as
points are visited.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, ContractViolationError, CutoffTooSmallError
from .qops import CompositeSpace, Operator, herm_eig, unitary_exp
from .states import PreparedState

__all__ = [
    "LEAK_WARN",
    "LEAK_HARD",
    "TimeGrid",
    "Trajectory",
    "propagator",
    "analytic_propagator",
    "trajectory",
]

LEAK_WARN = 1e-6   # leakage above this is flagged on the trajectory
LEAK_HARD = 1e-3   # leakage above this aborts with a cutoff advisory
TRACE_TOL = 1e-9
# off-sector matrix elements must vanish to this level for blocking
_SECTOR_TOL = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid over [0, t_max] with `points` samples (endpoints included)."""

    t_max: float
    points: int = 1001

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ConfigurationError(f"t_max must be > 0, got {self.t_max}")
        if int(self.points) < 2:
            raise ConfigurationError(f"points must be >= 2, got {self.points}")
        object.__setattr__(self, "points", int(self.points))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.points)


DEFAULT_GRID = TimeGrid(t_max=25.0, points=1001)


class _SpectralEngine:
    """exp(-iHt) factored through per-sector eigendecompositions."""

    def __init__(self, h: Operator, sectors: Optional[np.ndarray]) -> None:
        data = h.data
        dim = data.shape[0]
        defect = h.hermiticity_defect()
        if defect >= 1e-10:
            raise ContractViolationError(
                f"trajectory generator must be Hermitian; asymmetry {defect:.3e}"
            )
        if sectors is not None:
            order = np.argsort(sectors, kind="stable")
            off = data.copy()
            for label in np.unique(sectors):
                sel = np.flatnonzero(sectors == label)
                off[np.ix_(sel, sel)] = 0.0
            if np.abs(off).max() >= _SECTOR_TOL:
                sectors = None
        if sectors is None:
            self.perm = np.arange(dim)
            self.blocks = [np.arange(dim)]
        else:
            self.perm = order
            self.blocks = []
            start = 0
            sorted_labels = sectors[order]
            for label in np.unique(sorted_labels):
                count = int(np.sum(sorted_labels == label))
                self.blocks.append(np.arange(start, start + count))
                start += count
        self.inv_perm = np.argsort(self.perm)
        hp = data[np.ix_(self.perm, self.perm)]
        self.eigvals = []
        self.eigvecs = []
        for sel in self.blocks:
            w, v = np.linalg.eigh(hp[np.ix_(sel, sel)])
            self.eigvals.append(w)
            self.eigvecs.append(v)
        self.dim = dim

    def _block_unitaries(self, t: float) -> list[np.ndarray]:
        return [
            (v * np.exp(-1j * w * t)) @ v.conj().T
            for w, v in zip(self.eigvals, self.eigvecs)
        ]

    def evolve_ket(self, psi0: np.ndarray, t: float) -> np.ndarray:
        psi_p = psi0[self.perm]
        out = np.empty_like(psi_p)
        for sel, u in zip(self.blocks, self._block_unitaries(t)):
            out[sel] = u @ psi_p[sel]
        return out[self.inv_perm]

    def evolve_rho(self, rho0_perm: np.ndarray, t: float) -> np.ndarray:
        """U(t) rho0 U(t)+ given rho0 already in permuted order; returns natural order."""
        units = self._block_unitaries(t)
        tmp = np.empty_like(rho0_perm)
        for sel, u in zip(self.blocks, units):
            tmp[sel, :] = u @ rho0_perm[sel, :]
        out = np.empty_like(tmp)
        for sel, u in zip(self.blocks, units):
            out[:, sel] = tmp[:, sel] @ u.conj().T
        return out[np.ix_(self.inv_perm, self.inv_perm)]


class Trajectory:
    """Lazy view of U(t_k) rho0 U(t_k)+ over a time grid.

    `states` computes density matrices on demand; `ket_at` returns the
    evolved state vector instead when the initial state was pure, which
    downstream measurement uses as the fast path. Unit trace is enforced
    on every computed state, leakage into the top two Fock levels of
    either field is recorded per visited point, and leakage beyond
    LEAK_HARD aborts.
    """

    def __init__(self, engine: _SpectralEngine, state: PreparedState,
                 grid: TimeGrid, space: CompositeSpace) -> None:
        self._engine = engine
        self._grid = grid
        self._space = space
        self._pure = state.purity_hint and state.ket is not None
        self._psi0 = state.ket if self._pure else None
        self._rho0_perm = (None if self._pure
                           else state.rho.data[np.ix_(engine.perm, engine.perm)])
        self._tail_mask = space.field_tail_mask()
        n = grid.points
        self.times = grid.times
        self.leakage = np.full(n, np.nan)
        self.trace_err = np.full(n, np.nan)
        self.leak_warning = False
        self._record(0, self._diag_at(0))

    @property
    def grid(self) -> TimeGrid:
        return self._grid

    @property
    def space(self) -> CompositeSpace:
        return self._space

    @property
    def pure(self) -> bool:
        return self._pure

    def __len__(self) -> int:
        return self._grid.points

    def _diag_at(self, k: int) -> np.ndarray:
        if self._pure:
            psi = self.ket_at(k, _record=False)
            return np.abs(psi) ** 2
        rho = self._engine.evolve_rho(self._rho0_perm, float(self.times[k]))
        return np.real(np.diag(rho))

    def _record(self, k: int, diag: np.ndarray) -> None:
        trace = float(diag.sum())
        leak = float(diag[self._tail_mask].sum())
        self.trace_err[k] = abs(trace - 1.0)
        self.leakage[k] = leak
        if self.trace_err[k] > TRACE_TOL:
            raise ContractViolationError(
                f"state trace deviates by {self.trace_err[k]:.3e} at t={self.times[k]:.6g}"
            )
        if leak > LEAK_HARD:
            raise CutoffTooSmallError(
                f"leakage {leak:.3e} into the top Fock levels at t={self.times[k]:.6g}; "
                f"increase the cutoff beyond {self._space.cutoff}"
            )
        if leak > LEAK_WARN:
            self.leak_warning = True

    def ket_at(self, k: int, _record: bool = True) -> Optional[np.ndarray]:
        """Evolved state vector at grid index k, or None for mixed trajectories."""
        if not self._pure:
            return None
        psi = self._engine.evolve_ket(self._psi0, float(self.times[k]))
        if _record:
            self._record(k, np.abs(psi) ** 2)
        return psi

    def state_at(self, k: int) -> Operator:
        """Density matrix at grid index k."""
        if self._pure:
            psi = self.ket_at(k)
            data = np.outer(psi, psi.conj())
        else:
            data = self._engine.evolve_rho(self._rho0_perm, float(self.times[k]))
            self._record(k, np.real(np.diag(data)))
        return Operator(data, self._space.dims)

    @property
    def states(self) -> "_LazyStates":
        return _LazyStates(self)


class _LazyStates(Sequence):
    """Sequence facade over Trajectory.state_at."""

    def __init__(self, traj: Trajectory) -> None:
        self._traj = traj

    def __len__(self) -> int:
        return len(self._traj)

    def __getitem__(self, k: int) -> Operator:
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not (0 <= k < len(self)):
            raise IndexError(k)
        return self._traj.state_at(k)


def propagator(h: Operator, t: float) -> Operator:
    """Dense exp(-iHt) through the Hermitian eigendecomposition."""
    return unitary_exp(h, t)


def analytic_propagator(space: CompositeSpace, g: float, t: float) -> Operator:
    """Closed-form bare-variant propagator, assembled cavity by cavity.

    Within one cavity the coupling only mixes |e,n> with |g,n+1>, rotating
    each pair by the angle g*sqrt(n+1)*t; |g,0> is stationary and the top
    pair partner |g,N> is truncated away, freezing |e,N-1>. The composite
    propagator is the product of the two single-cavity ones, reordered to
    the (A, B, a, b) factor layout.
    """
    n = space.cutoff
    u1 = np.zeros((2 * n, 2 * n), dtype=complex)

    def e_idx(level: int) -> int:
        return level

    def g_idx(level: int) -> int:
        return n + level

    u1[g_idx(0), g_idx(0)] = 1.0
    u1[e_idx(n - 1), e_idx(n - 1)] = 1.0
    for level in range(n - 1):
        angle = g * math.sqrt(level + 1.0) * t
        c, s = math.cos(angle), math.sin(angle)
        u1[e_idx(level), e_idx(level)] = c
        u1[g_idx(level + 1), e_idx(level)] = -1j * s
        u1[g_idx(level + 1), g_idx(level + 1)] = c
        u1[e_idx(level), g_idx(level + 1)] = -1j * s

    # u1 (x) u1 lives on (A, a, B, b); permute the axes to (A, B, a, b)
    u = np.kron(u1, u1).reshape((2, n, 2, n) * 2)
    u = u.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(space.dim, space.dim)
    return Operator(u, space.dims)


def trajectory(state: PreparedState, h: Operator, grid: TimeGrid) -> Trajectory:
    """Evolve a prepared state under h over the grid.

    The generator and state must share the standard four-factor layout.
    Excitation-sector blocking engages automatically; a generator with
    off-sector matrix elements evolves as a single dense block instead.
    """
    if state.rho.dims != h.dims:
        raise ConfigurationError(
            f"state dims {state.rho.dims} do not match generator dims {h.dims}"
        )
    dims = h.dims
    if len(dims) == 4 and dims[0] == dims[1] == 2 and dims[2] == dims[3]:
        space = CompositeSpace(dims[2])
        sectors = space.excitations()
    else:
        raise ConfigurationError(
            f"trajectory expects the (2, 2, N, N) factor layout, got {dims}"
        )
    engine = _SpectralEngine(h, sectors)
    return Trajectory(engine, state, grid, space)
