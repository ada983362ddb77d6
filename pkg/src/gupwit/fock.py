"""Truncated-Fock-basis operator algebra for multimode bosonic systems.

Conventions (fixed for the whole package):

* hbar = 1.
* Quadratures are x = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2), so the
  vacuum has Var(x) = Var(p) = 1/2 and [x, p] = i on well-truncated states.
* A mode with cutoff D keeps Fock levels 0..D-1.  Operators are built
  directly in the truncated space, so each mode carries the exact corner
  artifact [x, p] = i(I - D |D-1><D-1|).  States with negligible population
  in the top levels do not see it; ``tail_mass`` quantifies the exposure.
* Multimode basis ordering is row-major in mode order: the basis index of
  occupation (n_0, ..., n_{N-1}) is n_0 * D_1*...*D_{N-1} + ... + n_{N-1}.
  Mode 0 is the most significant Kronecker factor.

Everything here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass

import numpy as np

HBAR = 1.0

NORM_TOL = 1e-10
TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
VARIANCE_CLAMP = 1e-10

# Full eigenvalue checks get expensive; density matrices above this dimension
# are validated with cheap necessary conditions at construction and can be
# checked in full via QuantumState.assert_positive().
_EIG_CHECK_MAX_DIM = 1200


class TruncationError(RuntimeError):
    """A result cannot be trusted at the current Fock cutoff."""


class CutoffTooSmallError(TruncationError):
    """Requested state parameters put too much weight near the cutoff."""


@dataclass(frozen=True)
class FockSpace:
    """Tensor product of single-mode truncated Fock spaces."""

    cutoffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.cutoffs) == 0:
            raise ValueError("a Fock space needs at least one mode")
        for m, d in enumerate(self.cutoffs):
            if int(d) != d or d < 2:
                raise ValueError(f"cutoff of mode {m} must be an integer >= 2, got {d!r}")
        object.__setattr__(self, "cutoffs", tuple(int(d) for d in self.cutoffs))

    @property
    def n_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def total_dim(self) -> int:
        return math.prod(self.cutoffs)

    def index_of(self, occupation) -> int:
        """Basis index of |n_0, ..., n_{N-1}> (row-major in mode order)."""
        if len(occupation) != self.n_modes:
            raise ValueError("occupation length does not match mode count")
        idx = 0
        for n, d in zip(occupation, self.cutoffs):
            if not 0 <= n < d:
                raise ValueError(f"occupation {n} outside 0..{d - 1}")
            idx = idx * d + n
        return idx

    def occupation_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.total_dim:
            raise ValueError("basis index out of range")
        occ = []
        for d in reversed(self.cutoffs):
            occ.append(index % d)
            index //= d
        return tuple(reversed(occ))

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.n_modes:
            raise ValueError(f"mode {mode} out of range for {self.n_modes} modes")


def make_space(n_modes: int, cutoffs) -> FockSpace:
    """Create a FockSpace, cross-checking the declared mode count."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    cutoffs = tuple(cutoffs)
    if len(cutoffs) != n_modes:
        raise ValueError(f"n_modes={n_modes} but {len(cutoffs)} cutoffs given")
    return FockSpace(cutoffs)


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator on a FockSpace.

    ``hermitian`` is a tri-state hint: True (asserted Hermitian), False
    (known not to be), None (unknown).  Arithmetic propagates it
    conservatively.
    """

    space: FockSpace
    matrix: np.ndarray
    hermitian: bool | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = self.space.total_dim
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match space dim {dim}")
        object.__setattr__(self, "matrix", m)

    # -- algebra ------------------------------------------------------------

    def _require_same_space(self, other: "Operator") -> None:
        if self.space != other.space:
            raise ValueError("operators live on different Fock spaces")

    def __add__(self, other: "Operator") -> "Operator":
        self._require_same_space(other)
        hint = True if (self.hermitian is True and other.hermitian is True) else None
        return Operator(self.space, self.matrix + other.matrix, hint)

    def __sub__(self, other: "Operator") -> "Operator":
        self._require_same_space(other)
        hint = True if (self.hermitian is True and other.hermitian is True) else None
        return Operator(self.space, self.matrix - other.matrix, hint)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix, self.hermitian)

    def __mul__(self, scalar) -> "Operator":
        c = complex(scalar)
        if c.imag == 0.0:
            hint = self.hermitian
        else:
            hint = None
        return Operator(self.space, self.matrix * c, hint)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._require_same_space(other)
        return Operator(self.space, self.matrix @ other.matrix, None)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, self.hermitian)

    def matrix_power(self, k: int) -> "Operator":
        """Integer matrix power; Hermitian inputs give Hermitian powers."""
        if int(k) != k or k < 0:
            raise ValueError("power must be a nonnegative integer")
        out = np.linalg.matrix_power(self.matrix, int(k))
        hint = True if self.hermitian is True else None
        return Operator(self.space, out, hint)

    # -- diagnostics ----------------------------------------------------------

    def hermiticity_defect(self) -> float:
        """Max-entry deviation from self-adjointness."""
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def require_hermitian(self, what: str = "operator") -> None:
        if self.hermitian is True:
            return
        if self.hermiticity_defect() > HERMITIAN_TOL:
            raise ValueError(f"{what} is not Hermitian")


def identity(space: FockSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex), True)


def zero_operator(space: FockSpace) -> Operator:
    return Operator(space, np.zeros((space.total_dim, space.total_dim), dtype=complex), True)


def destroy_block(dim: int) -> np.ndarray:
    """Single-mode annihilation matrix, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def quadrature_blocks(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-mode (x, p) matrices in the D-level ladder."""
    a = destroy_block(dim)
    ad = a.conj().T
    x = (a + ad) / math.sqrt(2.0)
    p = 1j * (ad - a) / math.sqrt(2.0)
    return x, p


def embed_blocks(space: FockSpace, blocks: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker-embed single-mode blocks, identity on all other modes."""
    out = None
    for m, d in enumerate(space.cutoffs):
        factor = blocks.get(m)
        if factor is None:
            factor = np.eye(d, dtype=complex)
        else:
            if factor.shape != (d, d):
                raise ValueError(f"block for mode {m} has shape {factor.shape}, expected ({d},{d})")
        out = factor if out is None else np.kron(out, factor)
    return out


def ladder(space: FockSpace, mode: int) -> Operator:
    """Annihilation operator of one mode, embedded in the full space."""
    space.check_mode(mode)
    a = embed_blocks(space, {mode: destroy_block(space.cutoffs[mode])})
    return Operator(space, a, False)


def quadrature_pair(space: FockSpace, mode: int) -> tuple[Operator, Operator]:
    """Embedded (x, p) for one mode; both flagged Hermitian."""
    space.check_mode(mode)
    xb, pb = quadrature_blocks(space.cutoffs[mode])
    x = Operator(space, embed_blocks(space, {mode: xb}), True)
    p = Operator(space, embed_blocks(space, {mode: pb}), True)
    return x, p


def number(space: FockSpace, mode: int) -> Operator:
    space.check_mode(mode)
    d = space.cutoffs[mode]
    nb = np.diag(np.arange(d, dtype=float)).astype(complex)
    return Operator(space, embed_blocks(space, {mode: nb}), True)


def commutator(a: Operator, b: Operator) -> Operator:
    a._require_same_space(b)
    return Operator(a.space, a.matrix @ b.matrix - b.matrix @ a.matrix, None)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

class QuantumState:
    """Pure vector or density matrix on a FockSpace.

    ``tail_mass`` is the sum over modes of the marginal population in that
    mode's top two Fock levels, recomputed at construction.  It bounds the
    corner-artifact exposure: |<[x, p]> - i| <= D * tail_mass per mode.
    """

    __slots__ = ("space", "vector", "rho", "tail_mass", "ensemble")

    def __init__(self, space: FockSpace, vector=None, rho=None, ensemble=None,
                 check_psd: bool | None = None, check_hermitian: bool = True):
        """check_psd: None runs the eigenvalue test up to a dimension limit,
        True forces it, False skips it.  Both it and check_hermitian may be
        disabled by constructions that guarantee the property (convex
        mixtures of valid product states)."""
        if (vector is None) == (rho is None):
            raise ValueError("provide exactly one of vector / rho")
        self.space = space
        self.ensemble = ensemble
        dim = space.total_dim
        if vector is not None:
            v = np.asarray(vector, dtype=complex).reshape(-1)
            if v.shape != (dim,):
                raise ValueError(f"vector length {v.shape[0]} does not match dim {dim}")
            nrm = np.linalg.norm(v)
            if abs(nrm - 1.0) > NORM_TOL:
                raise ValueError(f"pure state norm {nrm} deviates from 1 beyond {NORM_TOL}")
            self.vector = v
            self.rho = None
        else:
            r = np.asarray(rho, dtype=complex)
            if r.shape != (dim, dim):
                raise ValueError(f"rho shape {r.shape} does not match dim {dim}")
            tr = np.trace(r).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} deviates from 1 beyond {TRACE_TOL}")
            if check_hermitian and np.abs(r - r.conj().T).max() > HERMITIAN_TOL:
                raise ValueError("density matrix is not Hermitian")
            if np.diagonal(r).real.min() < -PSD_TOL:
                raise ValueError("density matrix has a negative population")
            if check_psd or (check_psd is None and dim <= _EIG_CHECK_MAX_DIM):
                if np.linalg.eigvalsh(r).min() < -PSD_TOL:
                    raise ValueError("density matrix is not positive semidefinite")
            self.vector = None
            self.rho = r
        self.tail_mass = self._compute_tail_mass()

    # -- structure ------------------------------------------------------------

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.vector, self.vector.conj())
        return self.rho

    def mode_populations(self, mode: int) -> np.ndarray:
        """Marginal Fock-level populations of one mode."""
        self.space.check_mode(mode)
        cut = self.space.cutoffs
        if self.is_pure:
            probs = np.abs(self.vector.reshape(cut)) ** 2
        else:
            probs = np.diagonal(self.rho).real.reshape(cut)
        axes = tuple(ax for ax in range(len(cut)) if ax != mode)
        return probs.sum(axis=axes) if axes else probs

    def _compute_tail_mass(self) -> float:
        total = 0.0
        for m in range(self.space.n_modes):
            pops = self.mode_populations(m)
            total += float(pops[-1] + pops[-2])
        return total

    def assert_positive(self, tol: float = PSD_TOL) -> None:
        """Full eigenvalue PSD check (O(dim^3); optional at large dims)."""
        if self.is_pure:
            return
        lam = np.linalg.eigvalsh(self.rho).min()
        if lam < -tol:
            raise ValueError(f"density matrix has eigenvalue {lam} < -{tol}")


def reduced_density(state: QuantumState, mode: int) -> np.ndarray:
    """Reduced density matrix of one mode (all others traced out)."""
    state.space.check_mode(mode)
    cut = state.space.cutoffs
    n = len(cut)
    if state.is_pure:
        psi = state.vector.reshape(cut)
        t = np.moveaxis(psi, mode, 0).reshape(cut[mode], -1)
        return t @ t.conj().T
    letters = string.ascii_lowercase
    bra = list(letters[:n])
    ket = list(letters[n:2 * n])
    for ax in range(n):
        if ax != mode:
            ket[ax] = bra[ax]
    sub = "".join(bra) + "".join(ket) + "->" + bra[mode] + ket[mode]
    return np.einsum(sub, state.rho.reshape(cut + cut))


# ---------------------------------------------------------------------------
# Expectations
# ---------------------------------------------------------------------------

def expectation(state: QuantumState, op: Operator) -> complex:
    """<M> = <psi|M|psi> or tr(rho M)."""
    if state.space != op.space:
        raise ValueError("state and operator live on different Fock spaces")
    if state.is_pure:
        return complex(np.vdot(state.vector, op.matrix @ state.vector))
    return complex(np.einsum("ij,ji->", state.rho, op.matrix))


def expectation_value(state: QuantumState, op: Operator) -> float:
    """Hermitian expectation: returns the real part, rejecting stray imaginaries."""
    op.require_hermitian("expectation_value operand")
    val = expectation(state, op)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"Hermitian expectation came out complex: {val}")
    return val.real


def variance(state: QuantumState, op: Operator) -> float:
    """<M^2> - <M>^2, clamped to 0 when round-off pushes it slightly negative."""
    op.require_hermitian("variance operand")
    if state.space != op.space:
        raise ValueError("state and operator live on different Fock spaces")
    if state.is_pure:
        mv = op.matrix @ state.vector
        m1 = np.vdot(state.vector, mv).real
        m2 = np.vdot(mv, mv).real
    else:
        m1 = np.einsum("ij,ji->", state.rho, op.matrix).real
        m2 = np.einsum("ij,ji->", op.matrix @ state.rho, op.matrix).real
    var = m2 - m1 * m1
    if var < -VARIANCE_CLAMP:
        raise ValueError(f"variance {var} below clamping tolerance; operator not Hermitian?")
    return max(var, 0.0)
