"""Initial-state preparation: cavity fields and atom pairs.

Fields come in two families with matching closed-form photon statistics:

* squeezed coherent, D(alpha) S(zeta) |0> with alpha = sqrt(nbar_c),
  zeta = r = arcsinh(sqrt(nbar_s)), phase 0, and the squeeze convention
  S(zeta) = exp((zeta* a^2 - zeta a+^2)/2);
* displaced thermal (Glauber-Lachs superposition), D(alpha) rho_th D(alpha)+.

`scs_pmf` and `gl_pmf` evaluate the photon-number distributions from their
closed forms and are kept independent of the matrix constructors so the two
routes can check each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError, CutoffTooSmallError
from .qops import CompositeSpace, Operator, annihilation, unitary_exp

__all__ = [
    "TAIL_HARD_LIMIT",
    "FieldSpec",
    "AtomSpec",
    "PreparedState",
    "squeezed_coherent_ket",
    "scs_pmf",
    "glauber_lachs_rho",
    "gl_pmf",
    "bell_atoms",
    "werner_atoms",
    "assemble_initial",
]

# Constructors refuse to truncate away more probability than this.
TAIL_HARD_LIMIT = 1e-3
# Extra Fock levels used internally so cropped amplitudes and the reported
# tail loss are accurate well below TAIL_HARD_LIMIT.
_WORK_MARGIN = 24
# Below this, the second field parameter is treated as exactly zero and the
# distribution reduces to Poisson(nbar_c).
_ZERO_EPS = 1e-12


@dataclass(frozen=True)
class FieldSpec:
    """One cavity field. kind is "scs" or "gl".

    nbar_c is the coherent (displacement) mean photon number; nbar_s the
    squeezed quanta (scs only); nbar_th the thermal quanta (gl only).
    """

    kind: str
    nbar_c: float = 0.0
    nbar_s: float = 0.0
    nbar_th: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("scs", "gl"):
            raise ConfigurationError(f"unknown field kind {self.kind!r}")
        for name in ("nbar_c", "nbar_s", "nbar_th"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.kind == "scs" and self.nbar_th != 0.0:
            raise ConfigurationError("scs field takes nbar_s, not nbar_th")
        if self.kind == "gl" and self.nbar_s != 0.0:
            raise ConfigurationError("gl field takes nbar_th, not nbar_s")


@dataclass(frozen=True)
class AtomSpec:
    """The two-atom register. kind is "bell" (angle theta) or "werner" (weight lam)."""

    kind: str
    theta: float = math.pi / 4
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("bell", "werner"):
            raise ConfigurationError(f"unknown atom kind {self.kind!r}")
        if self.kind == "werner" and not (0.0 <= self.lam <= 1.0):
            raise ConfigurationError(f"werner weight must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class PreparedState:
    """Assembled initial density matrix on (atom A, atom B, field a, field b).

    purity_hint marks states known pure by construction; ket is then the
    corresponding state vector. truncation_loss is the worst per-field
    Fock-tail probability discarded at the cutoff.
    """

    rho: Operator
    purity_hint: bool
    truncation_loss: float
    ket: Optional[np.ndarray] = None


def _displacement_generator(alpha: float, cutoff: int) -> Operator:
    # D(alpha) = exp(alpha a+ - alpha a) = exp(-i H), H = i alpha (a+ - a)
    a = annihilation(cutoff).data
    return Operator(1j * alpha * (a.conj().T - a), (cutoff,))


def _squeeze_generator(r: float, cutoff: int) -> Operator:
    # S(r) = exp((r/2)(a^2 - a+^2)) = exp(-i H), H = (i r / 2)(a^2 - a+^2)
    a = annihilation(cutoff).data
    a2 = a @ a
    return Operator(0.5j * r * (a2 - a2.conj().T), (cutoff,))


def _crop_and_weigh(vec: np.ndarray, cutoff: int, params: str,
                    max_tail: float) -> tuple[np.ndarray, float]:
    kept = vec[:cutoff]
    loss = float(max(0.0, 1.0 - np.vdot(kept, kept).real))
    if loss > max_tail:
        raise CutoffTooSmallError(
            f"field truncation discards {loss:.3e} probability at cutoff {cutoff} "
            f"for {params}; increase the cutoff"
        )
    return kept / math.sqrt(1.0 - loss), loss


def squeezed_coherent_ket(nbar_c: float, nbar_s: float, cutoff: int, *,
                          max_tail: float = TAIL_HARD_LIMIT) -> tuple[np.ndarray, float]:
    """Truncated D(alpha) S(r) |0> with alpha = sqrt(nbar_c), r = arcsinh(sqrt(nbar_s)).

    Built at an enlarged working cutoff and cropped, so the reported tail
    loss is the pre-normalization probability beyond the requested cutoff.
    Returns (unit-norm ket, tail loss).
    """
    if nbar_c < 0 or nbar_s < 0:
        raise ConfigurationError("mean photon numbers must be >= 0")
    if int(cutoff) < 2:
        raise ConfigurationError(f"cutoff must be >= 2, got {cutoff}")
    cutoff = int(cutoff)
    work = cutoff + _WORK_MARGIN
    alpha = math.sqrt(nbar_c)
    r = math.asinh(math.sqrt(nbar_s))
    vac = np.zeros(work, dtype=complex)
    vac[0] = 1.0
    ket = unitary_exp(_squeeze_generator(r, work)).data @ vac
    ket = unitary_exp(_displacement_generator(alpha, work)).data @ ket
    return _crop_and_weigh(ket, cutoff, f"scs(nbar_c={nbar_c}, nbar_s={nbar_s})", max_tail)


def glauber_lachs_rho(nbar_c: float, nbar_th: float, cutoff: int, *,
                      max_tail: float = TAIL_HARD_LIMIT) -> tuple[np.ndarray, float]:
    """Truncated displaced thermal state D(alpha) rho_th D(alpha)+.

    Returns (unit-trace density matrix, tail loss), with the loss measured
    before renormalization as for the squeezed coherent constructor.
    """
    if nbar_c < 0 or nbar_th < 0:
        raise ConfigurationError("mean photon numbers must be >= 0")
    if int(cutoff) < 2:
        raise ConfigurationError(f"cutoff must be >= 2, got {cutoff}")
    cutoff = int(cutoff)
    work = cutoff + _WORK_MARGIN
    n = np.arange(work)
    thermal = (nbar_th ** n) / (1.0 + nbar_th) ** (n + 1) if nbar_th > 0 else None
    if thermal is None:
        thermal = np.zeros(work)
        thermal[0] = 1.0
    d = unitary_exp(_displacement_generator(math.sqrt(nbar_c), work)).data
    rho = (d * thermal[None, :]) @ d.conj().T
    kept = rho[:cutoff, :cutoff]
    loss = float(max(0.0, 1.0 - np.trace(kept).real))
    if loss > max_tail:
        raise CutoffTooSmallError(
            f"field truncation discards {loss:.3e} probability at cutoff {cutoff} "
            f"for gl(nbar_c={nbar_c}, nbar_th={nbar_th}); increase the cutoff"
        )
    kept = kept / (1.0 - loss)
    return 0.5 * (kept + kept.conj().T), loss


def _poisson_pmf(nbar: float, n: int) -> float:
    if nbar <= 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(nbar) - nbar - math.lgamma(n + 1))


def scs_pmf(nbar_c: float, nbar_s: float, n: int) -> float:
    """Photon-number probability of the squeezed coherent field.

    Evaluates the closed form through a rescaled Hermite recurrence carried
    with a log-space magnitude offset, so the nbar_s -> 0 regime (Hermite
    argument diverging while the prefactor vanishes) stays finite; at
    nbar_s = 0 it reduces to Poisson(nbar_c) exactly.
    """
    if nbar_c < 0 or nbar_s < 0:
        raise ConfigurationError("mean photon numbers must be >= 0")
    if n < 0:
        raise ConfigurationError("photon number must be >= 0")
    if nbar_s < _ZERO_EPS:
        return _poisson_pmf(nbar_c, n)
    mu = math.sqrt(1.0 + nbar_s)
    nu = math.sqrt(nbar_s)
    beta = math.sqrt(nbar_c) * (mu + nu)
    # h_k = H_k(beta / sqrt(2 mu nu)) * (nu / 2 mu)^(k/2):
    # h_{k+1} = (beta/mu) h_k - k (nu/mu) h_{k-1}
    h_prev, h, logscale = 0.0, 1.0, 0.0
    for k in range(n):
        h, h_prev = (beta / mu) * h - k * (nu / mu) * h_prev, h
        mag = abs(h) + abs(h_prev)
        if mag > 1e120:
            h /= mag
            h_prev /= mag
            logscale += math.log(mag)
    if h == 0.0:
        return 0.0
    logp = (2.0 * (math.log(abs(h)) + logscale)
            - math.lgamma(n + 1) - math.log(mu)
            - beta * beta * (1.0 - nu / mu))
    return math.exp(logp)


def gl_pmf(nbar_c: float, nbar_th: float, n: int) -> float:
    """Photon-number probability of the displaced thermal field.

    Closed form: thermal weight times exp(-nbar_c/(1+nbar_th)) times the
    Laguerre polynomial at the negative argument -nbar_c/(nbar_th(1+nbar_th)),
    where every recurrence term is positive, evaluated with the same
    rescaling guard as scs_pmf. Reduces to Poisson(nbar_c) at nbar_th = 0.
    """
    if nbar_c < 0 or nbar_th < 0:
        raise ConfigurationError("mean photon numbers must be >= 0")
    if n < 0:
        raise ConfigurationError("photon number must be >= 0")
    if nbar_th < _ZERO_EPS:
        return _poisson_pmf(nbar_c, n)
    c = nbar_th / (1.0 + nbar_th)
    y = nbar_c / (1.0 + nbar_th) ** 2  # equals -c * (Laguerre argument)
    # l_k = L_k(-nbar_c / (nbar_th (1+nbar_th))) * c^k:
    # (k+1) l_{k+1} = (c (2k+1) + y) l_k - k c^2 l_{k-1}
    l_prev, l, logscale = 0.0, 1.0, 0.0
    for k in range(n):
        l, l_prev = ((c * (2 * k + 1) + y) * l - k * c * c * l_prev) / (k + 1), l
        mag = abs(l) + abs(l_prev)
        if mag > 1e120:
            l /= mag
            l_prev /= mag
            logscale += math.log(mag)
    if l == 0.0:
        return 0.0
    logp = math.log(l) + logscale - math.log(1.0 + nbar_th) - nbar_c / (1.0 + nbar_th)
    return math.exp(logp)


def bell_atoms(theta: float) -> np.ndarray:
    """cos(theta)|e,g> + sin(theta)|g,e> on the two-atom register."""
    ket = np.zeros(4, dtype=complex)
    ket[1] = math.cos(theta)
    ket[2] = math.sin(theta)
    return ket


def werner_atoms(lam: float) -> np.ndarray:
    """(1-lam) I/4 + lam |psi-><psi-| with psi- the singlet (|g,e> - |e,g>)/sqrt(2)."""
    if not (0.0 <= lam <= 1.0):
        raise ConfigurationError(f"werner weight must lie in [0, 1], got {lam}")
    psi = np.zeros(4, dtype=complex)
    psi[1] = -1.0 / math.sqrt(2.0)
    psi[2] = 1.0 / math.sqrt(2.0)
    return (1.0 - lam) * np.eye(4) / 4.0 + lam * np.outer(psi, psi.conj())


def _prepare_field(spec: FieldSpec, cutoff: int) -> tuple[Optional[np.ndarray], np.ndarray, float]:
    """(ket or None, density matrix, tail loss) for one cavity field."""
    if spec.kind == "scs":
        ket, loss = squeezed_coherent_ket(spec.nbar_c, spec.nbar_s, cutoff)
        return ket, np.outer(ket, ket.conj()), loss
    rho, loss = glauber_lachs_rho(spec.nbar_c, spec.nbar_th, cutoff)
    return None, rho, loss


def assemble_initial(atom: AtomSpec, field_a: FieldSpec, field_b: FieldSpec,
                     space: CompositeSpace) -> PreparedState:
    """Tensor the atomic register with the two fields in (A, B, a, b) order."""
    cutoff = space.cutoff
    ket_a, rho_a, loss_a = _prepare_field(field_a, cutoff)
    ket_b, rho_b, loss_b = _prepare_field(field_b, cutoff)
    if atom.kind == "bell":
        atom_ket = bell_atoms(atom.theta)
        atom_rho = np.outer(atom_ket, atom_ket.conj())
    else:
        atom_ket = None
        atom_rho = werner_atoms(atom.lam)
    rho = np.kron(atom_rho, np.kron(rho_a, rho_b))
    pure = atom_ket is not None and ket_a is not None and ket_b is not None
    ket = np.kron(atom_ket, np.kron(ket_a, ket_b)) if pure else None
    return PreparedState(
        rho=Operator(rho, space.dims),
        purity_hint=pure,
        truncation_loss=max(loss_a, loss_b),
        ket=ket,
    )


def sweep_field(spec: FieldSpec, name: str, value: float) -> FieldSpec:
    """Return a copy of the field spec with a swept parameter replaced."""
    if name == "nbar_s":
        if spec.kind != "scs":
            raise ConfigurationError("nbar_s sweep requires scs fields")
        return replace(spec, nbar_s=value)
    if name == "nbar_th":
        if spec.kind != "gl":
            raise ConfigurationError("nbar_th sweep requires gl fields")
        return replace(spec, nbar_th=value)
    raise ConfigurationError(f"unknown field sweep parameter {name!r}")
