"""Minimal-length (GUP) modifications of the momentum operator.

The deformation keeps x unchanged and maps p -> P = p + beta' p^3.  Two
coefficient conventions are supported:

* ``"kempf"``: beta' = beta/3.  Then [x, P] = i(1 + beta p^2) exactly, i.e.
  the modified commutator [x, p] = i(1 + beta p^2) is reproduced to first
  order in beta.  This is the default; every witness bound in
  :mod:`gupwit.witnesses` descends from that commutator.
* ``"paper"``: beta' = beta, the representation P = p(1 + beta p^2) taken
  at face value.  It yields [x, P] = i(1 + 3 beta p^2), a factor-3 mismatch
  against the commutator above.  ``commutator_residual`` makes the mismatch
  measurable instead of hiding it.

beta is dimensionless in internal units and capped at 0.1: all bounds are
first order in beta and larger values silently leave their validity regime.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fock import (
    FockSpace,
    Operator,
    QuantumState,
    TruncationError,
    commutator,
    expectation,
    quadrature_pair,
)

BETA_CAP = 0.1
CONVENTIONS = ("kempf", "paper")


@dataclass(frozen=True)
class GupConfig:
    beta: float = 0.0
    convention: str = "kempf"

    def __post_init__(self):
        if not 0.0 <= self.beta <= BETA_CAP:
            raise ValueError(f"beta must lie in [0, {BETA_CAP}], got {self.beta}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")

    @property
    def beta_prime(self) -> float:
        """Coefficient of the p^3 term in the modified momentum."""
        return self.beta / 3.0 if self.convention == "kempf" else self.beta


def gup_momentum(p0: Operator, config: GupConfig) -> Operator:
    """P = p0 + beta' * p0^3 (Hermitian for Hermitian input)."""
    p0.require_hermitian("momentum operator")
    if config.beta == 0.0:
        return Operator(p0.space, p0.matrix.copy(), True)
    p3 = p0.matrix_power(3)
    return Operator(p0.space, p0.matrix + config.beta_prime * p3.matrix, True)


def commutator_residual(
    space: FockSpace,
    mode: int,
    config: GupConfig,
    state: QuantumState,
    max_tail: float = 1e-6,
) -> float:
    """|<[x, P]> - i(1 + beta <P^2>)| on the given state.

    Zero (to round-off) at beta = 0; O(beta^2) under the kempf convention;
    ~2 beta <p^2> under the paper convention, which is exactly the factor-3
    tension between the two defining relations.
    """
    if state.tail_mass > max_tail:
        raise TruncationError(
            f"state tail_mass {state.tail_mass:.3e} exceeds {max_tail:.1e}; "
            "commutator diagnostics are truncation-sensitive"
        )
    x, p = quadrature_pair(space, mode)
    pm = gup_momentum(p, config)
    lhs = expectation(state, commutator(x, pm))
    p2 = expectation(state, pm @ pm).real
    target = 1j * (1.0 + config.beta * p2)
    return abs(lhs - target)


def gup_hamiltonian(p0: Operator, potential: Operator, mass: float, config: GupConfig) -> Operator:
    """H = p0^2/(2m) + (beta/m) p0^4 + V.

    The quartic term carries beta itself, independent of the representation
    convention.
    """
    if mass <= 0:
        raise ValueError("mass must be positive")
    p0.require_hermitian("momentum operator")
    potential.require_hermitian("potential")
    if p0.space != potential.space:
        raise ValueError("momentum and potential live on different Fock spaces")
    p2 = p0.matrix @ p0.matrix
    h = p2 / (2.0 * mass) + (config.beta / mass) * (p2 @ p2) + potential.matrix
    return Operator(p0.space, h, True)


def sho_perturbative_shift(n: int, mass: float, omega: float, config: GupConfig) -> float:
    """First-order oscillator energy shift of the (beta/m) p^4 term.

    Uses <n|p^4|n> = (3/4)(2n^2 + 2n + 1) (m omega)^2 in hbar = 1 units;
    serves as the analytic cross-check for :func:`gup_hamiltonian`.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if mass <= 0 or omega <= 0:
        raise ValueError("mass and omega must be positive")
    p4 = 0.75 * (2 * n * n + 2 * n + 1) * (mass * omega) ** 2
    return (config.beta / mass) * p4
