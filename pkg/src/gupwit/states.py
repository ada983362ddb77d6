"""State factories: single-mode library, products, separable ensembles,
two-mode squeezed vacuum, a three-mode GHZ-type network, and seeded random
separable sampling.

Squeezing phase conventions (pinned numerically, see tests):

* ``squeezed_state(r, phi=0)`` squeezes x: Var(x) = e^{-2r}/2.  phi = pi
  squeezes p instead.
* ``two_mode_squeezed(r)`` has Fock amplitudes proportional to
  (-tanh r)^n |n, n>, which squeezes the *sum* of positions and the
  *difference* of momenta: Var(x1 + x2) = Var(p1 - p2) = e^{-2r}.
* ``cv_ghz(r)`` sends one p-squeezed and two x-squeezed modes through a
  balanced three-port mixer, so Var(x1 - x2) = e^{-2r} and
  Var(p1 + p2 + p3) = (3/2) e^{-2r} before truncation effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, logm

from .fock import (
    CutoffTooSmallError,
    FockSpace,
    QuantumState,
    destroy_block,
    embed_blocks,
)

DEFAULT_CUTOFF = 40
DEFAULT_MAX_TAIL = 1e-6

WEIGHT_SUM_TOL = 1e-10


def _check_tail(state: QuantumState, max_tail: float, what: str) -> QuantumState:
    if state.tail_mass > max_tail:
        raise CutoffTooSmallError(
            f"{what}: tail mass {state.tail_mass:.3e} exceeds {max_tail:.1e}; "
            "increase the cutoff"
        )
    return state


# ---------------------------------------------------------------------------
# Single-mode library
# ---------------------------------------------------------------------------

def vacuum_state(cutoff: int) -> QuantumState:
    v = np.zeros(cutoff, dtype=complex)
    v[0] = 1.0
    return QuantumState(FockSpace((cutoff,)), vector=v)


def fock_state(n: int, cutoff: int, max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    if n < 0:
        raise ValueError("Fock level must be nonnegative")
    if n >= cutoff:
        raise CutoffTooSmallError(f"fock(n={n}) does not fit below cutoff {cutoff}")
    v = np.zeros(cutoff, dtype=complex)
    v[n] = 1.0
    return _check_tail(QuantumState(FockSpace((cutoff,)), vector=v), max_tail, f"fock(n={n})")


def coherent_state(alpha: complex, cutoff: int, max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    """Coherent |alpha>, amplitudes alpha^n/sqrt(n!), renormalized after truncation."""
    alpha = complex(alpha)
    v = np.empty(cutoff, dtype=complex)
    v[0] = 1.0
    for n in range(cutoff - 1):
        v[n + 1] = v[n] * alpha / math.sqrt(n + 1)
    v /= np.linalg.norm(v)
    return _check_tail(
        QuantumState(FockSpace((cutoff,)), vector=v), max_tail, f"coherent(alpha={alpha})"
    )


def _squeezed_vector(r: float, phi: float, cutoff: int) -> np.ndarray:
    """Squeezed-vacuum amplitudes (-e^{i phi} tanh r)^n sqrt((2n)!)/(2^n n!)."""
    v = np.zeros(cutoff, dtype=complex)
    c = 1.0 / math.sqrt(math.cosh(r))
    factor = -np.exp(1j * phi) * math.tanh(r)
    n = 0
    while 2 * n < cutoff:
        v[2 * n] = c
        c = c * factor * math.sqrt((2 * n + 1) / (2 * n + 2))
        n += 1
    v /= np.linalg.norm(v)
    return v


def squeezed_state(r: float, phi: float = 0.0, cutoff: int = DEFAULT_CUTOFF,
                   max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    """Squeezed vacuum; phi = 0 squeezes x (Var x = e^{-2r}/2), phi = pi squeezes p."""
    if r < 0:
        raise ValueError("squeezing strength r must be nonnegative")
    v = _squeezed_vector(r, phi, cutoff)
    return _check_tail(
        QuantumState(FockSpace((cutoff,)), vector=v), max_tail, f"squeezed(r={r})"
    )


def thermal_state(nbar: float, cutoff: int, max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    """Thermal state with mean occupation nbar: geometric diagonal populations."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    q = nbar / (nbar + 1.0)
    pops = (1.0 - q) * q ** np.arange(cutoff)
    pops /= pops.sum()
    return _check_tail(
        QuantumState(FockSpace((cutoff,)), rho=np.diag(pops).astype(complex)),
        max_tail, f"thermal(nbar={nbar})",
    )


def single_mode_state(kind: str, cutoff: int, max_tail: float = DEFAULT_MAX_TAIL,
                      **params) -> QuantumState:
    """Dispatch on kind in {vacuum, fock, coherent, squeezed, thermal}."""
    try:
        if kind == "vacuum":
            _reject_extras(params, ())
            return vacuum_state(cutoff)
        if kind == "fock":
            _reject_extras(params, ("n",))
            return fock_state(int(params["n"]), cutoff, max_tail)
        if kind == "coherent":
            _reject_extras(params, ("alpha",))
            return coherent_state(params["alpha"], cutoff, max_tail)
        if kind == "squeezed":
            _reject_extras(params, ("r", "phi"))
            return squeezed_state(float(params["r"]), float(params.get("phi", 0.0)),
                                  cutoff, max_tail)
        if kind == "thermal":
            _reject_extras(params, ("nbar",))
            return thermal_state(float(params["nbar"]), cutoff, max_tail)
    except KeyError as exc:
        raise ValueError(f"state kind {kind!r} is missing parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown state kind {kind!r}")


def _reject_extras(params: dict, allowed: tuple) -> None:
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"unknown parameter(s) {sorted(extra)} (allowed: {list(allowed)})")


# ---------------------------------------------------------------------------
# Products and mixtures
# ---------------------------------------------------------------------------

def _kron_density(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product via one fused broadcast multiply (np.kron moves the
    same bytes several times, which dominates at tripartite dimensions)."""
    da, db = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(da * db, da * db)


def product_state(factors) -> QuantumState:
    """Tensor product of single-mode states on the combined space."""
    factors = list(factors)
    if not factors:
        raise ValueError("product_state needs at least one factor")
    for f in factors:
        if f.space.n_modes != 1:
            raise ValueError("product_state factors must be single-mode states")
    cutoffs = tuple(f.space.cutoffs[0] for f in factors)
    space = FockSpace(cutoffs)
    if all(f.is_pure for f in factors):
        vec = factors[0].vector
        for f in factors[1:]:
            vec = np.kron(vec, f.vector)
        return QuantumState(space, vector=vec)
    rho = factors[0].density_matrix()
    for f in factors[1:]:
        rho = np.kron(rho, f.density_matrix())
    return QuantumState(space, rho=rho)


@dataclass(frozen=True)
class SeparableEnsemble:
    """Explicit convex combination of product states: sum_i w_i rho_i1 x ... x rho_iN."""

    weights: tuple[float, ...]
    components: tuple[tuple[QuantumState, ...], ...]

    def __post_init__(self):
        if len(self.weights) != len(self.components) or not self.weights:
            raise ValueError("weights and components must be equal-length and nonempty")
        if any(w < 0 for w in self.weights):
            raise ValueError("ensemble weights must be nonnegative")
        total = sum(self.weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"ensemble weights sum to {total}, expected 1")
        first = self.components[0]
        for comp in self.components:
            if len(comp) != len(first):
                raise ValueError("all components must have the same number of modes")
            for f, ref in zip(comp, first):
                if f.space.n_modes != 1:
                    raise ValueError("component factors must be single-mode states")
                if f.space.cutoffs != ref.space.cutoffs:
                    raise ValueError("per-mode cutoffs must agree across components")

    @property
    def n_modes(self) -> int:
        return len(self.components[0])

    @property
    def space(self) -> FockSpace:
        return FockSpace(tuple(f.space.cutoffs[0] for f in self.components[0]))

    def assemble(self) -> QuantumState:
        space = self.space
        rho = np.zeros((space.total_dim, space.total_dim), dtype=complex)
        for w, comp in zip(self.weights, self.components):
            term = comp[0].density_matrix()
            for f in comp[1:]:
                term = _kron_density(term, f.density_matrix())
            term *= w
            rho += term
        # Hermitian and positive by convexity; skip the redundant checks,
        # which dominate the cost at tripartite dimensions
        return QuantumState(space, rho=rho, ensemble=self,
                            check_psd=False, check_hermitian=False)


def mixture_state(ensemble: SeparableEnsemble) -> QuantumState:
    """Assembled mixed state; keeps a back-reference to the ensemble."""
    return ensemble.assemble()


# ---------------------------------------------------------------------------
# Entangled test states
# ---------------------------------------------------------------------------

def two_mode_squeezed(r: float, cutoff: int = DEFAULT_CUTOFF,
                      max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    """Two-mode squeezed vacuum, amplitudes (-tanh r)^n |n, n>, renormalized.

    With this phase Var(x1 + x2) = Var(p1 - p2) = e^{-2r} and the
    antisqueezed combinations carry e^{+2r}; per-mode <p^2> = cosh(2r)/2.
    """
    if r < 0:
        raise ValueError("squeezing strength r must be nonnegative")
    lam = -math.tanh(r)
    space = FockSpace((cutoff, cutoff))
    v = np.zeros(space.total_dim, dtype=complex)
    amp = 1.0
    for n in range(cutoff):
        v[n * cutoff + n] = amp
        amp *= lam
    v /= np.linalg.norm(v)
    return _check_tail(QuantumState(space, vector=v), max_tail, f"tmsv(r={r})")


_MIXER = None


def _three_port_mixer() -> np.ndarray:
    """Orthogonal 3x3 mode-mixing matrix with first column (1,1,1)/sqrt(3), det +1."""
    global _MIXER
    if _MIXER is None:
        c1 = np.ones(3) / math.sqrt(3.0)
        c2 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
        c3 = np.cross(c1, c2)
        _MIXER = np.column_stack([c1, c2, c3])
    return _MIXER


@lru_cache(maxsize=4)
def _mixer_unitary(cutoff: int) -> np.ndarray:
    """Fock-space unitary of the three-port mixer, built sector by sector.

    The generator sum_ij A_ij a_i^dag a_j conserves total photon number, so
    the exponential is taken on each total-number block instead of the full
    cutoff^3 matrix.
    """
    o = _three_port_mixer()
    gen = logm(o)
    if np.abs(gen.imag).max() > 1e-12:
        raise RuntimeError("mixer generator should be real")
    gen = gen.real
    space = FockSpace((cutoff,) * 3)
    a = destroy_block(cutoff)
    ad = a.conj().T
    dim = space.total_dim
    k = np.zeros((dim, dim), dtype=complex)
    for i in range(3):
        for j in range(3):
            if i == j or gen[i, j] == 0.0:
                continue
            k += gen[i, j] * embed_blocks(space, {i: ad, j: a})
    levels = np.arange(cutoff)
    totals = (levels[:, None, None] + levels[None, :, None] + levels[None, None, :]).ravel()
    u = np.zeros((dim, dim), dtype=complex)
    for t in range(int(totals.max()) + 1):
        idx = np.flatnonzero(totals == t)
        u[np.ix_(idx, idx)] = expm(k[np.ix_(idx, idx)])
    u.flags.writeable = False
    return u


def cv_ghz(r: float, cutoff: int = 14, max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    """Three-mode GHZ-type state: squeezers into a balanced three-port mixer.

    Port 1 takes a p-squeezed vacuum, ports 2 and 3 x-squeezed vacua, all
    with strength r.  Ideally Var(x1 - x2) = e^{-2r} and
    Var(p1 + p2 + p3) = (3/2) e^{-2r}; truncation lifts both, so treat
    large-r values at small cutoffs as demonstrations, not references.
    """
    if r < 0:
        raise ValueError("squeezing strength r must be nonnegative")
    v1 = _squeezed_vector(r, math.pi, cutoff)
    v2 = _squeezed_vector(r, 0.0, cutoff)
    vin = np.kron(np.kron(v1, v2), v2)
    vout = _mixer_unitary(cutoff) @ vin
    vout = vout / np.linalg.norm(vout)
    return _check_tail(
        QuantumState(FockSpace((cutoff,) * 3), vector=vout), max_tail, f"cv_ghz(r={r})"
    )


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------

def tail_safe_caps(cutoff: int) -> dict[str, float]:
    """Parameter caps keeping single-mode tails far below the witness threshold.

    The caps scale with the cutoff; at cutoff 40 they are |alpha| <= 2,
    r <= 0.79, nbar <= 2.  Coherent states saturate the separable bounds at
    every amplitude, so their cap is derived from the Poisson tail directly:
    the mean mu is chosen so the level-(cutoff-2) occupation stays near
    1e-10 (mu^k/k! e^{-mu} with the e^{-mu} dropped for a safety margin).
    """
    if cutoff < 8:
        raise ValueError("random sampling needs cutoff >= 8")
    k = cutoff - 2
    mu_max = math.exp((math.lgamma(k + 1) - 23.0) / k)
    q = math.exp(-14.0 / k)
    return {
        "alpha": min(2.0, math.sqrt(mu_max)),
        "r": min(1.0, math.atanh(math.exp(-16.0 / k))),
        "nbar": min(2.0, q / (1.0 - q)),
        "fock": min(6, cutoff - 3),
    }


_RANDOM_KINDS = ("vacuum", "coherent", "squeezed", "thermal", "fock")


def _random_factor(rng: np.random.Generator, cutoff: int, caps: dict) -> QuantumState:
    kind = _RANDOM_KINDS[rng.integers(len(_RANDOM_KINDS))]
    if kind == "vacuum":
        return vacuum_state(cutoff)
    if kind == "coherent":
        mag = rng.uniform(0.0, caps["alpha"])
        phase = rng.uniform(0.0, 2.0 * math.pi)
        return coherent_state(mag * np.exp(1j * phase), cutoff)
    if kind == "squeezed":
        return squeezed_state(rng.uniform(0.0, caps["r"]), rng.uniform(0.0, 2.0 * math.pi), cutoff)
    if kind == "thermal":
        return thermal_state(rng.uniform(0.0, caps["nbar"]), cutoff)
    return fock_state(int(rng.integers(0, caps["fock"] + 1)), cutoff)


def random_separable(seed: int, n_modes: int, cutoff: int, n_components: int) -> SeparableEnsemble:
    """Seed-deterministic separable ensemble with tail-safe random factors."""
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    rng = np.random.default_rng(seed)
    caps = tail_safe_caps(cutoff)
    weights = tuple(rng.dirichlet(np.ones(n_components)).tolist()) if n_components > 1 else (1.0,)
    components = tuple(
        tuple(_random_factor(rng, cutoff, caps) for _ in range(n_modes))
        for _ in range(n_components)
    )
    return SeparableEnsemble(weights, components)


def random_fock_superposition(rng: np.random.Generator, cutoffs, max_level: int) -> QuantumState:
    """Random pure state supported on Fock levels <= max_level per mode.

    Zero population near the cutoff makes truncated commutators exact, so
    these states are the workhorse for round-off-level inequality checks.
    """
    cutoffs = tuple(cutoffs)
    space = FockSpace(cutoffs)
    if any(max_level > d - 3 for d in cutoffs):
        raise ValueError("max_level too close to the cutoff")
    shape = tuple(max_level + 1 for _ in cutoffs)
    block = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    full = np.zeros(cutoffs, dtype=complex)
    full[tuple(slice(0, max_level + 1) for _ in cutoffs)] = block
    v = full.ravel()
    v /= np.linalg.norm(v)
    return QuantumState(space, vector=v)


def random_symmetric_two_mode(rng: np.random.Generator, cutoff: int, max_level: int) -> QuantumState:
    """Random mode-swap-symmetric pure two-mode state on low Fock levels."""
    space = FockSpace((cutoff, cutoff))
    c = rng.standard_normal((max_level + 1,) * 2) + 1j * rng.standard_normal((max_level + 1,) * 2)
    c = c + c.T
    full = np.zeros((cutoff, cutoff), dtype=complex)
    full[: max_level + 1, : max_level + 1] = c
    v = full.ravel()
    v /= np.linalg.norm(v)
    return QuantumState(space, vector=v)


# ---------------------------------------------------------------------------
# Declarative state specs (the schema the CLI consumes)
# ---------------------------------------------------------------------------

_TOP_KEYS = ("product", "mixture", "tmsv", "cv_ghz")
_MODE_PARAMS = {
    "vacuum": (),
    "fock": ("n",),
    "coherent": ("alpha",),
    "squeezed": ("r", "phi"),
    "thermal": ("nbar",),
}


def _parse_mode_spec(spec, position: str, cutoff: int, max_tail: float) -> QuantumState:
    if not isinstance(spec, dict):
        raise ValueError(f"mode spec at {position} must be an object")
    if "kind" not in spec:
        raise ValueError(f"mode spec at {position} is missing 'kind'")
    kind = spec["kind"]
    if kind not in _MODE_PARAMS:
        raise ValueError(f"unknown state kind {kind!r} at {position}")
    allowed = set(_MODE_PARAMS[kind]) | {"kind"}
    extra = set(spec) - allowed
    if extra:
        raise ValueError(f"unknown field(s) {sorted(extra)} in {kind!r} spec at {position}")
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "coherent":
        alpha = params.get("alpha", 0.0)
        if isinstance(alpha, (list, tuple)):
            if len(alpha) != 2:
                raise ValueError(f"'alpha' at {position} must be a number or [re, im]")
            alpha = complex(alpha[0], alpha[1])
        params["alpha"] = complex(alpha)
    return single_mode_state(kind, cutoff, max_tail, **params)


def state_from_spec(tree, cutoff: int | None = None,
                    max_tail: float = DEFAULT_MAX_TAIL) -> QuantumState:
    """Build a state from the declarative spec tree.

    Accepted shapes: {"product": [mode specs]}, {"mixture": [{"weight": w,
    "product": [...]}, ...]}, {"tmsv": {"r": r}}, {"cv_ghz": {"r": r}}.
    An optional sibling "cutoff" key sets the per-mode dimension; an explicit
    ``cutoff`` argument overrides it; the fallback is 40.  Unknown fields are
    rejected.  Mixtures come back carrying their SeparableEnsemble.
    """
    if not isinstance(tree, dict):
        raise ValueError("state spec must be an object")
    keys = [k for k in tree if k in _TOP_KEYS]
    extra = set(tree) - set(_TOP_KEYS) - {"cutoff"}
    if extra:
        raise ValueError(f"unknown top-level field(s) {sorted(extra)} in state spec")
    if len(keys) != 1:
        raise ValueError(f"state spec must have exactly one of {_TOP_KEYS}, found {keys}")
    key = keys[0]
    if cutoff is None:
        # three modes at the bipartite default of 40 would be a 64000-dim
        # space; the tripartite family gets its own desk-scale default
        fallback = 14 if key == "cv_ghz" else DEFAULT_CUTOFF
        cutoff = int(tree.get("cutoff", fallback))
    body = tree[key]

    if key == "product":
        if not isinstance(body, list) or not body:
            raise ValueError("'product' must be a nonempty list of mode specs")
        factors = [
            _parse_mode_spec(s, f"product[{i}]", cutoff, max_tail) for i, s in enumerate(body)
        ]
        return product_state(factors)

    if key == "mixture":
        if not isinstance(body, list) or not body:
            raise ValueError("'mixture' must be a nonempty list of weighted products")
        weights, components = [], []
        for i, entry in enumerate(body):
            if not isinstance(entry, dict):
                raise ValueError(f"mixture[{i}] must be an object")
            extra = set(entry) - {"weight", "product"}
            if extra:
                raise ValueError(f"unknown field(s) {sorted(extra)} in mixture[{i}]")
            if "weight" not in entry or "product" not in entry:
                raise ValueError(f"mixture[{i}] needs 'weight' and 'product'")
            weights.append(float(entry["weight"]))
            prod = entry["product"]
            if not isinstance(prod, list) or not prod:
                raise ValueError(f"mixture[{i}].product must be a nonempty list")
            components.append(tuple(
                _parse_mode_spec(s, f"mixture[{i}].product[{j}]", cutoff, max_tail)
                for j, s in enumerate(prod)
            ))
        ensemble = SeparableEnsemble(tuple(weights), tuple(components))
        return mixture_state(ensemble)

    if not isinstance(body, dict) or set(body) != {"r"}:
        raise ValueError(f"'{key}' spec must be exactly {{\"r\": <float>}}")
    r = float(body["r"])
    if key == "tmsv":
        return two_mode_squeezed(r, cutoff, max_tail)
    return cv_ghz(r, cutoff, max_tail)
