"""Variance-based separability criteria in plain and GUP-corrected form.

Four criteria are implemented, each returning a :class:`WitnessReport`:

* ``rigolin_collective``: (Var Q)(Var P) >= N^2/4 for the collective
  quadratures Q = sum x_i, P = sum p_i.  This holds for *every* state, so a
  "detected" verdict here flags a numerical inconsistency, not entanglement.
* ``rigolin_pairwise``: [Var Q1 + Var Q2][Var P1 + Var P2] >= 1/4, again a
  universal law.  When the two modes have equal spreads the report also
  carries the per-particle product Dq_i Dp_i against its bound 1/4 and the
  classification of whether beta (Dp_i)^2 reaches 1.
* ``duan_witness``: Var(u) + Var(v) >= a^2 + 1/a^2 for all separable
  two-mode states, with u = |a| x1 + (1/a) x2 and v = |a| p1 - (1/a) p2.
* ``vanloock_witness``: the three-mode analogue against sum_n |h_n g_n|
  (fully separable bound).

Sign convention for the pair (u, v): the momentum combination carries the
opposite relative sign, giving [u, v] = i(a^2 - 1/a^2).  That commutator
vanishes at |a| = 1 and always stays strictly below the separable bound
a^2 + 1/a^2, so entangled states have room to violate the bound.  With a
common sign instead, [u, v] = i(a^2 + 1/a^2) and the uncertainty principle
alone enforces the bound for every state, separable or not, making the
criterion vacuous.  The separable-state proof is sign-independent, so the
bound itself is unchanged.

GUP corrections enter only through the additive, nonnegative ``delta_gup``
term on each bound.  By linearity of second moments over any convex
decomposition, the per-mode <p^2> taken on the full state equals its
ensemble average over every separable decomposition, so delta_gup is
computable without knowing the decomposition.  Moments use the canonical
momentum by default; ``use_modified_momentum=True`` substitutes
P = p + beta' p^3 everywhere for sensitivity analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import (
    FockSpace,
    Operator,
    QuantumState,
    TruncationError,
    expectation,
    quadrature_blocks,
    embed_blocks,
    reduced_density,
    variance,
)
from .gup import GupConfig

DETECTION_TOL = 1e-9
SYMMETRY_TOL = 1e-6
DEFAULT_MAX_TAIL = 1e-6

VERDICT_DETECTED = "detected_inseparable"
VERDICT_NOT_DETECTED = "not_detected"

CRITERIA = ("rigolin_collective", "rigolin_pairwise", "duan", "vanloock")


@dataclass(frozen=True)
class BipartiteCoefficients:
    """EPR coefficient a: positions weighted (|a|, 1/a), momenta (|a|, -1/a)."""

    a: float

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("coefficient a must be nonzero")


@dataclass(frozen=True)
class TripartiteCoefficients:
    """Real weights u = sum h_n x_n, v = sum g_n p_n."""

    h: tuple[float, float, float]
    g: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        if len(self.h) != 3 or len(self.g) != 3:
            raise ValueError("h and g must each have three entries")
        if all(hn * gn == 0 for hn, gn in zip(self.h, self.g)):
            raise ValueError("all h_n g_n vanish; the bound would be vacuous")


EprCoefficients = BipartiteCoefficients | TripartiteCoefficients


@dataclass
class WitnessReport:
    criterion: str
    lhs: float
    bound_hup: float
    delta_gup: float
    bound_gup: float
    verdict: str
    verdict_gup: str
    beta: float
    convention: str
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "lhs": self.lhs,
            "bound_hup": self.bound_hup,
            "delta_gup": self.delta_gup,
            "bound_gup": self.bound_gup,
            "verdict": self.verdict,
            "verdict_gup": self.verdict_gup,
            "beta": self.beta,
            "convention": self.convention,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessReport":
        return cls(**d)


# ---------------------------------------------------------------------------
# Operator assembly
# ---------------------------------------------------------------------------

def _momentum_block(dim: int, beta_prime: float) -> np.ndarray:
    _, p = quadrature_blocks(dim)
    if beta_prime:
        p = p + beta_prime * (p @ p @ p)
    return p


class _QuadraticBundle:
    """Collective operators u = sum c_m x_m, v = sum d_m p_m with lazy squares."""

    def __init__(self, space: FockSpace, xcoeffs, pcoeffs, beta_prime: float):
        dim = space.total_dim
        u = np.zeros((dim, dim), dtype=complex)
        v = np.zeros((dim, dim), dtype=complex)
        for m, d in enumerate(space.cutoffs):
            xb, _ = quadrature_blocks(d)
            pb = _momentum_block(d, beta_prime)
            if xcoeffs[m]:
                u += xcoeffs[m] * embed_blocks(space, {m: xb})
            if pcoeffs[m]:
                v += pcoeffs[m] * embed_blocks(space, {m: pb})
        self.u = Operator(space, u, True)
        self.v = Operator(space, v, True)
        self._squares: dict[str, np.ndarray] = {}

    def _square(self, name: str, op: Operator) -> np.ndarray:
        sq = self._squares.get(name)
        if sq is None:
            sq = op.matrix @ op.matrix
            self._squares[name] = sq
        return sq

    def _variance(self, state: QuantumState, name: str, op: Operator) -> float:
        if state.is_pure:
            return variance(state, op)
        # tr(rho M) = vdot(M, rho) for Hermitian M: one contiguous pass
        sq = self._square(name, op)
        m1 = np.vdot(op.matrix.ravel(), state.rho.ravel()).real
        m2 = np.vdot(sq.ravel(), state.rho.ravel()).real
        return max(m2 - m1 * m1, 0.0)

    def var_u(self, state: QuantumState) -> float:
        return self._variance(state, "u", self.u)

    def var_v(self, state: QuantumState) -> float:
        return self._variance(state, "v", self.v)


@lru_cache(maxsize=12)
def _bundle(space: FockSpace, xcoeffs: tuple, pcoeffs: tuple, beta_prime: float) -> _QuadraticBundle:
    return _QuadraticBundle(space, xcoeffs, pcoeffs, beta_prime)


def build_epr_operators(space: FockSpace, coeffs: EprCoefficients) -> tuple[Operator, Operator]:
    """The (u, v) pair for a coefficient choice (module docstring has the signs)."""
    xc, pc = _coefficient_vectors(space, coeffs)
    b = _bundle(space, xc, pc, 0.0)
    return b.u, b.v


def _coefficient_vectors(space: FockSpace, coeffs: EprCoefficients) -> tuple[tuple, tuple]:
    if isinstance(coeffs, BipartiteCoefficients):
        if space.n_modes != 2:
            raise ValueError("bipartite coefficients need a two-mode space")
        a = coeffs.a
        return (abs(a), 1.0 / a), (abs(a), -1.0 / a)
    if isinstance(coeffs, TripartiteCoefficients):
        if space.n_modes != 3:
            raise ValueError("tripartite coefficients need a three-mode space")
        return coeffs.h, coeffs.g
    raise TypeError(f"unsupported coefficient type {type(coeffs).__name__}")


# ---------------------------------------------------------------------------
# Per-mode moments (via reduced density matrices)
# ---------------------------------------------------------------------------

def mode_quadrature_moments(state: QuantumState, config: GupConfig | None = None):
    """Per-mode (var_x, var_p, <p^2>) lists; with a config, p -> P = p + beta' p^3."""
    beta_prime = config.beta_prime if config is not None else 0.0
    var_x, var_p, p_second = [], [], []
    for m, d in enumerate(state.space.cutoffs):
        rho_m = reduced_density(state, m)
        xb, _ = quadrature_blocks(d)
        pb = _momentum_block(d, beta_prime)
        x1 = np.einsum("ij,ji->", rho_m, xb).real
        x2 = np.einsum("ij,ji->", rho_m, xb @ xb).real
        p1 = np.einsum("ij,ji->", rho_m, pb).real
        p2 = np.einsum("ij,ji->", rho_m, pb @ pb).real
        var_x.append(max(x2 - x1 * x1, 0.0))
        var_p.append(max(p2 - p1 * p1, 0.0))
        p_second.append(p2)
    return var_x, var_p, p_second


def _require_tail(state: QuantumState, max_tail: float) -> None:
    if state.tail_mass > max_tail:
        raise TruncationError(
            f"state tail_mass {state.tail_mass:.3e} exceeds {max_tail:.1e}; "
            "witness values would be truncation-dominated"
        )


def _require_modes(state: QuantumState, n: int, criterion: str) -> None:
    if state.space.n_modes != n:
        raise ValueError(f"{criterion} needs a {n}-mode state, got {state.space.n_modes} modes")


def _verdicts(lhs: float, bound_hup: float, bound_gup: float) -> tuple[str, str]:
    verdict = VERDICT_DETECTED if lhs < bound_hup - DETECTION_TOL else VERDICT_NOT_DETECTED
    verdict_gup = VERDICT_DETECTED if lhs < bound_gup - DETECTION_TOL else VERDICT_NOT_DETECTED
    return verdict, verdict_gup


def _base_diagnostics(state: QuantumState, use_modified: bool) -> dict:
    return {
        "tail_mass": state.tail_mass,
        "cutoffs": list(state.space.cutoffs),
        "use_modified_momentum": use_modified,
    }


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------

def duan_witness(
    state: QuantumState,
    coeffs: BipartiteCoefficients,
    config: GupConfig = GupConfig(),
    *,
    use_modified_momentum: bool = False,
    max_tail: float = DEFAULT_MAX_TAIL,
) -> WitnessReport:
    """Bipartite EPR-variance criterion; detection means inseparability."""
    _require_modes(state, 2, "duan")
    _require_tail(state, max_tail)
    a = coeffs.a
    beta_prime = config.beta_prime if use_modified_momentum else 0.0
    xc, pc = _coefficient_vectors(state.space, coeffs)
    b = _bundle(state.space, xc, pc, beta_prime)
    lhs = b.var_u(state) + b.var_v(state)
    bound_hup = a * a + 1.0 / (a * a)
    _, _, p_second = mode_quadrature_moments(
        state, config if use_modified_momentum else None
    )
    delta = config.beta * (a * a * p_second[0] + p_second[1] / (a * a))
    bound_gup = bound_hup + delta
    verdict, verdict_gup = _verdicts(lhs, bound_hup, bound_gup)
    diag = _base_diagnostics(state, use_modified_momentum)
    diag.update({
        "a": a,
        "momentum_second_moments": p_second,
        "delta_gup_form": "beta * (a^2 <p1^2> + a^-2 <p2^2>)",
    })
    return WitnessReport("duan", lhs, bound_hup, delta, bound_gup,
                         verdict, verdict_gup, config.beta, config.convention, diag)


def vanloock_witness(
    state: QuantumState,
    coeffs: TripartiteCoefficients,
    config: GupConfig = GupConfig(),
    *,
    use_modified_momentum: bool = False,
    max_tail: float = DEFAULT_MAX_TAIL,
) -> WitnessReport:
    """Tripartite fully-separable bound; detection rules out full separability."""
    _require_modes(state, 3, "vanloock")
    _require_tail(state, max_tail)
    beta_prime = config.beta_prime if use_modified_momentum else 0.0
    b = _bundle(state.space, coeffs.h, coeffs.g, beta_prime)
    lhs = b.var_u(state) + b.var_v(state)
    bound_hup = sum(abs(hn * gn) for hn, gn in zip(coeffs.h, coeffs.g))
    _, _, p_second = mode_quadrature_moments(
        state, config if use_modified_momentum else None
    )
    # 1 + beta <p^2> > 0, so |h g (1 + beta <p^2>)| = |h g| (1 + beta <p^2>)
    delta = config.beta * sum(
        abs(hn * gn) * p2 for hn, gn, p2 in zip(coeffs.h, coeffs.g, p_second)
    )
    bound_gup = bound_hup + delta
    verdict, verdict_gup = _verdicts(lhs, bound_hup, bound_gup)
    diag = _base_diagnostics(state, use_modified_momentum)
    diag.update({
        "h": list(coeffs.h),
        "g": list(coeffs.g),
        "momentum_second_moments": p_second,
        "delta_gup_form": "beta * sum_n |h_n g_n| <p_n^2>",
    })
    return WitnessReport("vanloock", lhs, bound_hup, delta, bound_gup,
                         verdict, verdict_gup, config.beta, config.convention, diag)


def rigolin_collective(
    state: QuantumState,
    config: GupConfig = GupConfig(),
    *,
    use_modified_momentum: bool = False,
    max_tail: float = DEFAULT_MAX_TAIL,
) -> WitnessReport:
    """Collective-quadrature uncertainty product against N^2/4.

    A universal law: "detected" here means the numerics (or the truncation)
    are inconsistent, never entanglement.
    """
    n = state.space.n_modes
    if n < 2:
        raise ValueError("rigolin_collective needs at least two modes")
    _require_tail(state, max_tail)
    beta_prime = config.beta_prime if use_modified_momentum else 0.0
    ones = (1.0,) * n
    b = _bundle(state.space, ones, ones, beta_prime)
    lhs = b.var_u(state) * b.var_v(state)
    bound_hup = n * n / 4.0
    mom_cfg = config if use_modified_momentum else None
    _, var_p, p_second = mode_quadrature_moments(state, mom_cfg)
    # bound growth linearized at first order; the weaker variance form is
    # the reported delta, the second-moment form goes to diagnostics
    delta = (n / 2.0) * config.beta * sum(var_p)
    delta_second = (n / 2.0) * config.beta * sum(p_second)
    bound_gup = bound_hup + delta
    verdict, verdict_gup = _verdicts(lhs, bound_hup, bound_gup)
    diag = _base_diagnostics(state, use_modified_momentum)
    diag.update({
        "n_modes": n,
        "momentum_variance_sum": sum(var_p),
        "momentum_second_moment_sum": sum(p_second),
        "delta_gup_second_moment_form": delta_second,
        "violation_means": "numerical_inconsistency",
    })
    return WitnessReport("rigolin_collective", lhs, bound_hup, delta, bound_gup,
                         verdict, verdict_gup, config.beta, config.convention, diag)


def rigolin_pairwise(
    state: QuantumState,
    config: GupConfig = GupConfig(),
    *,
    use_modified_momentum: bool = False,
    max_tail: float = DEFAULT_MAX_TAIL,
) -> WitnessReport:
    """Two-mode summed-variance product against 1/4, plus the symmetric case.

    Universal law, like :func:`rigolin_collective`.  When the two modes have
    equal position and momentum spreads (within 1e-6 on the standard
    deviations), the report's diagnostics add the per-particle product
    Dq_i Dp_i, its bound 1/4 + (beta/4)(Dp_i)^2, and whether beta (Dp_i)^2
    reaches 1 (at or above: no tension with the uncertainty principle for a
    single particle; below: a sub-hbar/2 product is allowed).
    """
    _require_modes(state, 2, "rigolin_pairwise")
    _require_tail(state, max_tail)
    mom_cfg = config if use_modified_momentum else None
    var_x, var_p, p_second = mode_quadrature_moments(state, mom_cfg)
    sum_x = var_x[0] + var_x[1]
    sum_p = var_p[0] + var_p[1]
    lhs = sum_x * sum_p
    bound_hup = 0.25
    delta = 0.25 * config.beta * sum_p
    bound_gup = bound_hup + delta
    verdict, verdict_gup = _verdicts(lhs, bound_hup, bound_gup)
    diag = _base_diagnostics(state, use_modified_momentum)
    diag.update({
        "position_variances": var_x,
        "momentum_variances": var_p,
        "momentum_second_moments": p_second,
        "violation_means": "numerical_inconsistency",
    })
    dq = [math.sqrt(v) for v in var_x]
    dp = [math.sqrt(v) for v in var_p]
    symmetric = bool(abs(dq[0] - dq[1]) <= SYMMETRY_TOL and abs(dp[0] - dp[1]) <= SYMMETRY_TOL)
    diag["symmetric_case"] = symmetric
    if symmetric:
        dq_i = 0.5 * (dq[0] + dq[1])
        dp_i = 0.5 * (dp[0] + dp[1])
        pair_delta = 0.25 * config.beta * dp_i * dp_i
        beta_dp2 = config.beta * dp_i * dp_i
        diag.update({
            "pair_product": dq_i * dp_i,
            "pair_bound_hup": 0.25,
            "pair_delta_gup": pair_delta,
            "pair_bound_gup": 0.25 + pair_delta,
            "beta_dp_squared": beta_dp2,
            "hup_classification": "no_disagreement" if beta_dp2 >= 1.0 else "disagreement",
        })
    return WitnessReport("rigolin_pairwise", lhs, bound_hup, delta, bound_gup,
                         verdict, verdict_gup, config.beta, config.convention, diag)
