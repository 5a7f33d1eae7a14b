"""Open-system time evolution: master equation, trajectories, no-jump filtering.

The damping generator used throughout is

    d(rho)/dt = 2 gamma a rho a+  -  gamma {a+ a, rho},

under which a pure state evolving without any jump has its level-n
amplitude multiplied by exp(-n gamma t) and the per-step jump probability
is dp = 2 gamma <a+ a> dt.  Those three pieces are mutually consistent and
are the package default ("amplitude" convention).  Measured population
series are sometimes quoted against the halved rate where level-n
*populations* decay as exp(-n gamma t); pass convention="population" to
select that reading.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import ComplexOperator, DensityMatrix, PureBipartiteState
from .rng import derive_rng

# Per-step jump probability stays below this bound, keeping the first-order
# jump/no-jump split valid.
STEP_PROBABILITY_BOUND = 1e-2

AMPLITUDE = "amplitude"
POPULATION = "population"
_CONVENTION_ALIASES = {
    "amplitude": AMPLITUDE,
    "eq17": AMPLITUDE,
    "population": POPULATION,
    "table2": POPULATION,
}


def resolve_convention(name: str) -> str:
    """Normalize a damping-rate convention name."""
    try:
        return _CONVENTION_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown convention {name!r}; use 'amplitude' or 'population'") from None


def _amplitude_rate(convention: str) -> float:
    """Per-level amplitude decay rate in units of gamma."""
    return 1.0 if resolve_convention(convention) == AMPLITUDE else 0.5


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian (pre-divided by hbar) plus Lindblad operators with rates."""

    dim: int
    hamiltonian: ComplexOperator
    lindblad_ops: tuple[tuple[ComplexOperator, float], ...]

    def __post_init__(self):
        if self.hamiltonian.dim != self.dim:
            raise ValueError("Hamiltonian dimension mismatch")
        ops = tuple((op, float(g)) for op, g in self.lindblad_ops)
        for op, g in ops:
            if op.dim != self.dim:
                raise ValueError("Lindblad operator dimension mismatch")
            if g < 0:
                raise ValueError(f"rates must be non-negative, got {g}")
        object.__setattr__(self, "lindblad_ops", ops)

    @property
    def max_rate(self) -> float:
        return max((g for _, g in self.lindblad_ops), default=0.0)


@dataclass(frozen=True)
class DampingModel:
    """Truncated-oscillator photon loss at decay rate gamma."""

    dim: int
    gamma: float

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")


@dataclass(frozen=True)
class TrajectoryConfig:
    n_trajectories: int
    dt: float
    seed: int

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ValueError("need at least one trajectory")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


def _check_step(max_rate: float, dim: int, dt: float):
    if max_rate * dim * dt > STEP_PROBABILITY_BOUND:
        raise ValueError(
            f"step too large: rate*dim*dt = {max_rate * dim * dt:.3g} "
            f"> {STEP_PROBABILITY_BOUND}"
        )


def annihilation(dim: int) -> ComplexOperator:
    """Truncated lowering operator: a|n> = sqrt(n)|n-1>."""
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    a = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    return ComplexOperator(a)


def damping_lindblad(model: DampingModel) -> LindbladModel:
    """Lindblad form of the damping generator: H = 0, operator a at rate 2*gamma."""
    zero = ComplexOperator(np.zeros((model.dim, model.dim)))
    return LindbladModel(model.dim, zero, ((annihilation(model.dim), 2.0 * model.gamma),))


def lindblad_rhs(model: LindbladModel, rho: DensityMatrix) -> ComplexOperator:
    """d(rho)/dt: commutator part plus dissipators; traceless and Hermitian."""
    if model.dim != rho.dim:
        raise ValueError("dimension mismatch")
    return ComplexOperator(_rhs_raw(model, rho.matrix))


def _rhs_raw(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    h = model.hamiltonian.matrix
    out = -1j * (h @ rho - rho @ h)
    for op, g in model.lindblad_ops:
        a = op.matrix
        ada = a.conj().T @ a
        out = out + g * (a @ rho @ a.conj().T - 0.5 * (ada @ rho + rho @ ada))
    return out


def integrate_master(model: LindbladModel, rho0: DensityMatrix, t: float, dt: float) -> DensityMatrix:
    """Fixed-step classical 4th-order integration of the master equation."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if model.dim != rho0.dim:
        raise ValueError("dimension mismatch")
    _check_step(model.max_rate, model.dim, dt)
    if t == 0:
        return rho0
    steps = max(1, int(np.ceil(t / dt - 1e-12)))
    h = t / steps
    r = rho0.matrix.copy()
    for _ in range(steps):
        k1 = _rhs_raw(model, r)
        k2 = _rhs_raw(model, r + 0.5 * h * k1)
        k3 = _rhs_raw(model, r + 0.5 * h * k2)
        k4 = _rhs_raw(model, r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # re-validation doubles as the dt-too-large signal
    return DensityMatrix(0.5 * (r + r.conj().T))


def no_jump_step(model: DampingModel, psi: np.ndarray, dt: float) -> tuple[np.ndarray, float]:
    """One jump-free interval: level n shrinks by exp(-n gamma dt), then renormalize.

    Returns the renormalized state together with the survival probability
    (the squared norm before renormalization).
    """
    v = np.asarray(psi, dtype=np.complex128)
    if v.shape != (model.dim,):
        raise ValueError(f"expected a {model.dim}-vector")
    levels = np.arange(model.dim)
    scaled = v * np.exp(-model.gamma * dt * levels)
    survival = float(np.sum(np.abs(scaled) ** 2))
    if survival == 0.0:
        raise ValueError("no-jump evolution annihilated the state; dt inconsistent")
    return scaled / np.sqrt(survival), survival


def jump_step(model: DampingModel, psi: np.ndarray) -> np.ndarray:
    """One quantum jump: apply the lowering operator and renormalize."""
    v = np.asarray(psi, dtype=np.complex128)
    if v.shape != (model.dim,):
        raise ValueError(f"expected a {model.dim}-vector")
    lowered = annihilation(model.dim).matrix @ v
    norm = np.linalg.norm(lowered)
    if norm == 0.0:
        raise ValueError("jump impossible: state has no support above the ground level")
    return lowered / norm


def run_trajectories(model: DampingModel, psi0: np.ndarray, t: float, cfg: TrajectoryConfig) -> DensityMatrix:
    """Ensemble average of |psi><psi| over stochastic jump/no-jump unravelings.

    Trajectory k draws its uniforms from the stream (seed, k), so the result
    is reproducible and independent of evaluation order.  The jump decision
    per step is first order: jump iff u < dp with dp = 2 gamma <a+ a> dt.
    """
    v0 = np.asarray(psi0, dtype=np.complex128)
    if v0.shape != (model.dim,):
        raise ValueError(f"expected a {model.dim}-vector")
    norm = np.linalg.norm(v0)
    if norm == 0:
        raise ValueError("initial state is zero")
    v0 = v0 / norm
    if t < 0:
        raise ValueError("t must be non-negative")
    _check_step(2.0 * model.gamma, model.dim, cfg.dt)
    if t == 0 or model.gamma == 0:
        return DensityMatrix.from_vector(v0)

    steps = max(1, int(np.ceil(t / cfg.dt - 1e-12)))
    h = t / steps
    n = cfg.n_trajectories
    levels = np.arange(model.dim, dtype=float)
    decay = np.exp(-model.gamma * h * levels)
    sqrt_n = np.sqrt(levels)

    uniforms = np.empty((n, steps))
    for k in range(n):
        uniforms[k] = derive_rng(cfg.seed, k).random(steps)

    psi = np.tile(v0, (n, 1))
    for s in range(steps):
        n_mean = np.abs(psi) ** 2 @ levels
        dp = 2.0 * model.gamma * h * n_mean
        jumped = uniforms[:, s] < dp
        if jumped.any():
            block = psi[jumped]
            lowered = np.zeros_like(block)
            lowered[:, :-1] = block[:, 1:] * sqrt_n[1:]
            psi[jumped] = lowered / np.linalg.norm(lowered, axis=1, keepdims=True)
        calm = ~jumped
        block = psi[calm] * decay
        psi[calm] = block / np.linalg.norm(block, axis=1, keepdims=True)

    rho = np.einsum("ki,kj->ij", psi, psi.conj()) / n
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def no_jump_conditional_state(
    psi0: PureBipartiteState, gamma_t: float, convention: str = AMPLITUDE
) -> PureBipartiteState:
    """Conditional pair state after a jump-free signal evolution of length gamma*t.

    The input must be in anti-diagonal Schmidt form (amplitude on |l>_s
    paired with idler level d-1-l only).  Signal level l is damped by
    exp(-l gamma t) under the default amplitude convention, by
    exp(-l gamma t / 2) under the population convention, then the state is
    renormalized.
    """
    if gamma_t < 0:
        raise ValueError("gamma_t must be non-negative")
    c = psi0.amplitudes
    if psi0.dim_s != psi0.dim_i:
        raise ValueError("expected equal signal and idler dimensions")
    d = psi0.dim_s
    anti = np.fliplr(np.eye(d)) > 0
    if np.max(np.abs(c[~anti])) > 1e-12:
        raise ValueError("state is not in anti-diagonal Schmidt form")
    rate = _amplitude_rate(convention)
    factors = np.exp(-rate * gamma_t * np.arange(d))
    scaled = c * factors[:, None]
    norm = np.linalg.norm(scaled)
    if norm == 0.0:
        raise ValueError("evolution annihilated the state")
    return PureBipartiteState(scaled / norm)


def no_jump_survival(psi0: PureBipartiteState, gamma_t: float, convention: str = AMPLITUDE) -> float:
    """Probability that the signal evolves for gamma*t without a jump."""
    if gamma_t < 0:
        raise ValueError("gamma_t must be non-negative")
    rate = _amplitude_rate(convention)
    factors = np.exp(-rate * gamma_t * np.arange(psi0.dim_s))
    return float(np.sum(np.abs(psi0.amplitudes * factors[:, None]) ** 2))
