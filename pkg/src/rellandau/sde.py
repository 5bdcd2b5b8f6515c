"""Interacting-particle discretization of the stochastic representation.

Two explicit Euler-Maruyama schemes over the empirical measure:

* ``MEANFIELD`` -- one matrix square root per particle, driven by the
  averaged kernel (the probabilistic form of the equation against the
  empirical law); O(N^2) per step with N Gaussian vectors.
* ``PAIRWISE`` -- one Gaussian vector per ordered pair, the faithful
  discretization of the white-noise form; same drift.

All randomness comes from a counter-based Philox stream keyed by the seed,
so runs are reproducible bit-for-bit.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from rellandau import transport
from rellandau._interactions import meanfield_coeffs, pairwise_diffusion
from rellandau.gronwall import invert_bound
from rellandau.estimates import psi_integral
from rellandau.kernel import energy
from rellandau.transport import Ensemble, MomentSummary, moments

__all__ = [
    "Scheme",
    "SimConfig",
    "TrajectoryRecord",
    "CoupledRecord",
    "sqrt_psd",
    "step_meanfield",
    "step_pairwise",
    "run",
    "run_coupled",
    "generator_residual",
    "make_rng",
    "TEST_FUNCTIONS",
]

MOMENT_KS = (2.0, 4.0, 7.0)


class Scheme(enum.Enum):
    MEANFIELD = "meanfield"
    PAIRWISE = "pairwise"


@dataclass
class SimConfig:
    n_particles: int
    dt: float
    t_final: float
    eps_reg: float
    seed: int = 0
    scheme: Scheme = Scheme.MEANFIELD
    record_every: int = 1
    w2_subsample: int = 512
    w2_reference: bool = False  # record W2 to a fixed Juttner reference sample
    coupling_mode: str = "index"  # "index" or "optimal_every_k"
    coupling_k: int = 1

    def __post_init__(self):
        if isinstance(self.scheme, str):
            self.scheme = Scheme(self.scheme)
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if not (0 < self.dt <= self.t_final or self.t_final == 0):
            raise ValueError("need 0 < dt <= t_final")
        if self.eps_reg <= 0:
            raise ValueError("simulation requires eps_reg > 0 (singular kernel)")
        if not (1 <= self.w2_subsample <= 512):
            raise ValueError("w2_subsample must be in [1, 512]")
        self.w2_subsample = min(self.w2_subsample, self.n_particles)
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.coupling_mode not in ("index", "optimal_every_k"):
            raise ValueError("coupling_mode must be 'index' or 'optimal_every_k'")


@dataclass
class TrajectoryRecord:
    times: list = field(default_factory=list)
    summaries: list = field(default_factory=list)  # MomentSummary
    w2_to_reference: list = field(default_factory=list)  # or None entries
    drift_balance: list = field(default_factory=list)  # |sum b_i| / sum |b_i|

    CSV_HEADER = "t,mean_px,mean_py,mean_pz,mean_energy,m2,m4,m7,w2_to_ref"

    def append(self, t, summary, w2=None, balance=0.0):
        self.times.append(t)
        self.summaries.append(summary)
        self.w2_to_reference.append(w2)
        self.drift_balance.append(balance)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.CSV_HEADER + "\n")
            for t, s, w2 in zip(self.times, self.summaries, self.w2_to_reference):
                mp = s.mean_momentum
                w2s = "" if w2 is None else f"{w2:.12g}"
                fh.write(
                    f"{t:.12g},{mp[0]:.12g},{mp[1]:.12g},{mp[2]:.12g},"
                    f"{s.mean_energy:.12g},{s.weighted_moments[2.0]:.12g},"
                    f"{s.weighted_moments[4.0]:.12g},{s.weighted_moments[7.0]:.12g},{w2s}\n"
                )


@dataclass
class CoupledRecord:
    times: list = field(default_factory=list)
    w2_sq: list = field(default_factory=list)
    summaries1: list = field(default_factory=list)
    summaries2: list = field(default_factory=list)
    gamma_fitted: float = 0.0
    envelope: list = field(default_factory=list)

    CSV_HEADER = "t,w2_sq,envelope,gamma_fitted"

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.CSV_HEADER + "\n")
            for t, w, e in zip(self.times, self.w2_sq, self.envelope):
                fh.write(f"{t:.12g},{w:.12g},{e:.12g},{self.gamma_fitted:.12g}\n")


def make_rng(seed):
    """Counter-based generator; deterministic given the seed."""
    return np.random.Generator(np.random.Philox(seed))


def sqrt_psd(mats, rel_floor=1e-6):
    """Symmetric PSD square roots of a batch of 3x3 matrices via eigh.

    Eigenvalues below -rel_floor * ||M|| raise; smaller negatives (round-off)
    are clamped to zero.  Cholesky is unsuitable: the averaged kernels are
    rank-deficient in directions away from the data support.
    """
    w, v = np.linalg.eigh(mats)
    scale = np.abs(w).max(axis=-1, keepdims=True)
    if np.any(w < -rel_floor * np.maximum(scale, 1e-300)):
        raise ValueError("matrix has a significantly negative eigenvalue; not PSD")
    w = np.clip(w, 0.0, None)
    return np.einsum("...ij,...j,...kj->...ik", v, np.sqrt(w), v)


def _coeffs(momenta, eps_reg):
    return meanfield_coeffs(momenta, energy(momenta), eps_reg)


def step_meanfield(ensemble, dt, eps_reg, rng, xi=None):
    """One Euler-Maruyama step of the mean-field scheme.

    All coefficients are computed from the pre-step snapshot.  ``xi``
    (shape (N, 3)) can be injected for tests; by default N i.i.d. standard
    Gaussian vectors are drawn from ``rng``.
    """
    P = ensemble.momenta
    a, b = _coeffs(P, eps_reg)
    if xi is None:
        xi = rng.standard_normal(P.shape)
    root = sqrt_psd(a)
    new = P + b * dt + np.einsum("nij,nj->ni", root, xi) * math.sqrt(dt)
    return Ensemble(new)


def step_pairwise(ensemble, dt, eps_reg, rng, xi=None):
    """One Euler-Maruyama step of the per-pair white-noise scheme.

    ``xi`` has shape (N, N, 3), one Gaussian vector per ordered pair
    (diagonal ignored); injectable for tests.
    """
    P = ensemble.momenta
    n = P.shape[0]
    _, b = _coeffs(P, eps_reg)
    if xi is None:
        xi = rng.standard_normal((n, n, 3))
    new = P + b * dt
    if n > 1:
        diff = pairwise_diffusion(P, energy(P), eps_reg, xi)
        new = new + diff * math.sqrt(dt / (n - 1))
    return Ensemble(new)


def _record_entry(ens, reference, config, rng):
    summary = moments(ens, MOMENT_KS)
    w2 = None
    if reference is not None:
        sub1 = ens.subsample(config.w2_subsample, rng)
        sub2 = reference.subsample(config.w2_subsample, rng)
        w2, _ = transport.w2_exact(sub1, sub2)
    return summary, w2


def run(config, initial):
    """Iterate the configured scheme, recording moments every record interval."""
    if len(initial) != config.n_particles:
        raise ValueError("initial ensemble size does not match config")
    rng = make_rng(config.seed)
    reference = None
    if config.w2_reference:
        reference = transport.sample_juttner(config.n_particles, make_rng(config.seed + 10**9))
    record = TrajectoryRecord()
    ens = initial
    summary, w2 = _record_entry(ens, reference, config, rng)
    record.append(0.0, summary, w2)
    n_steps = int(round(config.t_final / config.dt)) if config.t_final > 0 else 0
    step = step_meanfield if config.scheme is Scheme.MEANFIELD else step_pairwise
    for k in range(1, n_steps + 1):
        try:
            ens = step(ens, config.dt, config.eps_reg, rng)
        except ValueError as exc:
            raise RuntimeError(f"step {k} failed: {exc}") from exc
        if k % config.record_every == 0 or k == n_steps:
            summary, w2 = _record_entry(ens, reference, config, rng)
            record.append(k * config.dt, summary, w2)
    return record


def fit_gamma(times, w2_sq):
    """Smallest constant gamma whose closed-form envelope dominates the series."""
    w0 = w2_sq[0]
    if w0 == 0.0:
        return 0.0 if max(w2_sq) == 0.0 else math.inf
    gamma = 0.0
    for t, w in zip(times[1:], w2_sq[1:]):
        if w > w0:
            gamma = max(gamma, psi_integral(w0, w) / t)
    return gamma


def envelope_series(w2_sq0, gamma, times):
    """Closed-form Gronwall envelope through w2_sq0 with constant gamma."""
    out = []
    for t in times:
        if w2_sq0 == 0.0:
            out.append(0.0 if gamma == 0.0 else math.inf)
        else:
            out.append(invert_bound(w2_sq0, gamma * t))
    return out


def run_coupled(config, init1, init2):
    """Evolve two ensembles with shared noise and record their exact W2^2.

    The pair (i, pi(i)) consumes identical Gaussian draws; pi comes from one
    initial optimal assignment ("index" mode keeps it fixed;
    "optimal_every_k" re-solves it every k record intervals).  W2^2 is exact
    on a ``w2_subsample``-sized common subsample at each record time.
    """
    if len(init1) != len(init2):
        raise ValueError("coupled ensembles must have equal size")
    if len(init1) != config.n_particles:
        raise ValueError("initial ensemble size does not match config")
    if config.scheme is not Scheme.MEANFIELD:
        raise ValueError("coupled runs use the mean-field scheme")
    rng = make_rng(config.seed)
    sub_rng = make_rng(config.seed + 2**32)

    P1 = init1.momenta.copy()
    plan = transport.optimal_coupling(init1, init2)
    perm = plan.permutation
    P2 = init2.momenta[perm].copy()  # aligned: index i of P1 pairs with index i of P2

    record = CoupledRecord()

    def w2sq_now():
        n_sub = min(config.w2_subsample, config.n_particles)
        idx = sub_rng.choice(config.n_particles, size=n_sub, replace=False)
        d, _ = transport.w2_exact(Ensemble(P1[idx]), Ensemble(P2[idx]))
        return d * d

    def record_now(t):
        record.times.append(t)
        record.w2_sq.append(w2sq_now())
        record.summaries1.append(moments(Ensemble(P1), MOMENT_KS))
        record.summaries2.append(moments(Ensemble(P2), MOMENT_KS))

    record_now(0.0)
    n_steps = int(round(config.t_final / config.dt)) if config.t_final > 0 else 0
    sqdt = math.sqrt(config.dt)
    records_done = 0
    for k in range(1, n_steps + 1):
        a1, b1 = _coeffs(P1, config.eps_reg)
        a2, b2 = _coeffs(P2, config.eps_reg)
        xi = rng.standard_normal((config.n_particles, 3))
        P1 = P1 + b1 * config.dt + np.einsum("nij,nj->ni", sqrt_psd(a1), xi) * sqdt
        P2 = P2 + b2 * config.dt + np.einsum("nij,nj->ni", sqrt_psd(a2), xi) * sqdt
        if k % config.record_every == 0 or k == n_steps:
            record_now(k * config.dt)
            records_done += 1
            if (
                config.coupling_mode == "optimal_every_k"
                and records_done % config.coupling_k == 0
            ):
                plan = transport.optimal_coupling(Ensemble(P1), Ensemble(P2))
                P2 = P2[plan.permutation]
    record.gamma_fitted = fit_gamma(record.times, record.w2_sq)
    record.envelope = envelope_series(record.w2_sq[0], record.gamma_fitted, record.times)
    return record


def _bump(c, r):
    c = np.asarray(c, dtype=float)

    def value(p):
        return np.exp(-np.sum((p - c) ** 2, axis=-1) / (2.0 * r * r))

    def grad(p):
        return -(p - c) / (r * r) * value(p)[..., None]

    def hess(p):
        d = p - c
        outer = d[..., :, None] * d[..., None, :]
        return (outer / r**4 - np.eye(3) / r**2) * value(p)[..., None, None]

    return value, grad, hess


def _momentum_component(axis):
    e = np.zeros(3)
    e[axis] = 1.0

    def value(p):
        return p[..., axis]

    def grad(p):
        return np.broadcast_to(e, p.shape).copy()

    def hess(p):
        return np.zeros(p.shape[:-1] + (3, 3))

    return value, grad, hess


def _energy_fn():
    def value(p):
        return energy(p)

    def grad(p):
        return p / energy(p)[..., None]

    def hess(p):
        e = energy(p)
        outer = p[..., :, None] * p[..., None, :]
        return np.eye(3) / e[..., None, None] - outer / e[..., None, None] ** 3

    return value, grad, hess


TEST_FUNCTIONS = {
    "momentum_x": _momentum_component(0),
    "momentum_y": _momentum_component(1),
    "momentum_z": _momentum_component(2),
    "energy": _energy_fn(),
    "gaussian_bump": _bump((0.0, 0.0, 0.0), 1.0),
}


def test_function(test_fn_id):
    """Resolve a test-function id; 'gaussian_bump(cx,cy,cz,r)' is parametric."""
    if test_fn_id in TEST_FUNCTIONS:
        return TEST_FUNCTIONS[test_fn_id]
    if test_fn_id.startswith("gaussian_bump(") and test_fn_id.endswith(")"):
        parts = [float(x) for x in test_fn_id[len("gaussian_bump(") : -1].split(",")]
        if len(parts) == 4:
            return _bump(parts[:3], parts[3])
    raise ValueError(f"unknown test function {test_fn_id!r}")


def generator_residual(ensemble, test_fn_id, dt, eps_reg, n_replicas, rng):
    """Compare the one-step finite difference of E[phi] with the pair generator.

    lhs: mean over replicas of (mean phi after one step - mean phi)/dt,
    each replica re-drawing the Gaussian noise from the same snapshot.
    rhs: (1/(N(N-1))) sum_{i != j} L phi(P_i, P_j).
    Returns (lhs, rhs, stderr_of_lhs).
    """
    value, grad, hess = test_function(test_fn_id)
    P = ensemble.momenta
    a, b = _coeffs(P, eps_reg)
    root = sqrt_psd(a)
    g = grad(P)
    h = hess(P)
    # (1/(N(N-1))) sum_{i,j} L phi = (1/N) sum_i [ tr(a_i h_i)/2 + b_i . g_i ]
    rhs = float(
        np.mean(0.5 * np.einsum("nij,nji->n", a, h) + np.sum(b * g, axis=-1))
    )
    base = float(np.mean(value(P)))
    sqdt = math.sqrt(dt)
    samples = np.empty(n_replicas)
    for r in range(n_replicas):
        xi = rng.standard_normal(P.shape)
        newP = P + b * dt + np.einsum("nij,nj->ni", root, xi) * sqdt
        samples[r] = (float(np.mean(value(newP))) - base) / dt
    lhs = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(n_replicas))
    return lhs, rhs, stderr
