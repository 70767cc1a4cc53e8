"""Interaction-picture generators for the two resonant atom-cavity pairs.

Four variants share the exchange couplings g(a+ sigma-^A + a sigma+^A) and
g(b+ sigma-^B + b sigma+^B):

* bare      - the couplings alone;
* ising     - adds J_z sigma_z^A sigma_z^B between the atoms;
* detuned   - adds Delta |g><g| on each atom;
* kerr      - adds k*omega (a+^2 a^2 + b+^2 b^2) on the fields.

Every variant commutes with the total excitation number, which the
evolution engine exploits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .qops import CompositeSpace, Operator, annihilation, atomic_ops, embed

__all__ = ["VARIANTS", "ModelParams", "build", "excitation_operator"]

VARIANTS = ("bare", "ising", "detuned", "kerr")

# which optional parameter each variant requires
_REQUIRED = {"bare": None, "ising": "jz", "detuned": "delta", "kerr": "kerr_k"}


@dataclass(frozen=True)
class ModelParams:
    """Coupling constants; the variant-specific one must be set exactly when used."""

    variant: str = "bare"
    g: float = 1.0
    jz: Optional[float] = None
    delta: Optional[float] = None
    kerr_k: Optional[float] = None
    omega: float = 1.0

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.g <= 0:
            raise ConfigurationError(f"coupling g must be > 0, got {self.g}")
        needed = _REQUIRED[self.variant]
        for name in ("jz", "delta", "kerr_k"):
            value = getattr(self, name)
            if name == needed and value is None:
                raise ConfigurationError(f"variant {self.variant!r} requires {name}")
            if name != needed and value is not None:
                raise ConfigurationError(f"variant {self.variant!r} does not take {name}")


def build(params: ModelParams, space: CompositeSpace) -> Operator:
    """Assemble the generator for the requested variant on the composite space."""
    sz, sp, sm = atomic_ops()
    a_low = embed(annihilation(space.cutoff), 2, space)
    b_low = embed(annihilation(space.cutoff), 3, space)
    sm_a, sp_a = embed(sm, 0, space), embed(sp, 0, space)
    sm_b, sp_b = embed(sm, 1, space), embed(sp, 1, space)

    h = params.g * (a_low.dag() @ sm_a + a_low @ sp_a
                    + b_low.dag() @ sm_b + b_low @ sp_b)

    if params.variant == "ising":
        h = h + params.jz * (embed(sz, 0, space) @ embed(sz, 1, space))
    elif params.variant == "detuned":
        # sigma- sigma+ = |g><g| on each atom
        h = h + params.delta * (sm_a @ sp_a + sm_b @ sp_b)
    elif params.variant == "kerr":
        chi = params.kerr_k * params.omega
        kerr_a = a_low.dag() @ a_low.dag() @ a_low @ a_low
        kerr_b = b_low.dag() @ b_low.dag() @ b_low @ b_low
        h = h + chi * (kerr_a + kerr_b)
    return h


def excitation_operator(space: CompositeSpace) -> Operator:
    """Total excitation number: atomic projectors |e><e| plus both field numbers."""
    return Operator(np.diag(space.excitations().astype(float)), space.dims)
