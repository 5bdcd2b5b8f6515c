"""Particle ensembles, the Juttner sampler, moments and exact Wasserstein-2.

An :class:`Ensemble` is a list of N equally weighted momentum vectors
standing in for a probability measure.  Wasserstein-2 distances between
equal-size ensembles are computed exactly as a minimum-cost perfect matching
under squared Euclidean cost (capped at N = 1024; subsample larger runs).
"""

import functools
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.optimize import linear_sum_assignment

from rellandau.kernel import as_momentum, energy

__all__ = [
    "Ensemble",
    "CouplingPlan",
    "MomentSummary",
    "W2_SIZE_CAP",
    "juttner_mass",
    "juttner_mean_energy",
    "sample_juttner",
    "moments",
    "w2_exact",
    "optimal_coupling",
]

W2_SIZE_CAP = 1024

RLEN_MAGIC = b"RLEN"


@dataclass
class Ensemble:
    """N equally weighted particles approximating a probability measure."""

    momenta: np.ndarray  # (N, 3)

    def __post_init__(self):
        self.momenta = as_momentum(self.momenta)
        if self.momenta.ndim != 2 or self.momenta.shape[0] < 1:
            raise ValueError("ensemble needs at least one particle of shape (N, 3)")

    def __len__(self):
        return self.momenta.shape[0]

    def subsample(self, k, rng):
        """Uniform subsample without replacement (k <= N)."""
        idx = rng.choice(len(self), size=min(k, len(self)), replace=False)
        return Ensemble(self.momenta[idx])

    def to_csv(self, path):
        np.savetxt(path, self.momenta, delimiter=",", header="px,py,pz", comments="")

    @classmethod
    def from_csv(cls, path):
        return cls(np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2))

    def to_rlen(self, path):
        """Compact binary form: magic 'RLEN', u32 count, little-endian f64 triples."""
        with open(path, "wb") as fh:
            fh.write(RLEN_MAGIC)
            fh.write(struct.pack("<I", len(self)))
            fh.write(self.momenta.astype("<f8").tobytes())

    @classmethod
    def from_rlen(cls, path):
        with open(path, "rb") as fh:
            if fh.read(4) != RLEN_MAGIC:
                raise ValueError("not an RLEN ensemble file")
            (count,) = struct.unpack("<I", fh.read(4))
            data = np.frombuffer(fh.read(count * 24), dtype="<f8").reshape(count, 3)
        return cls(data.copy())


@dataclass
class CouplingPlan:
    """A permutation coupling between two equal-size ensembles."""

    permutation: np.ndarray  # pi: particle i of e1 pairs with pi[i] of e2
    cost: float  # (1/N) sum |p_i - q_{pi(i)}|^2


@dataclass
class MomentSummary:
    mean_momentum: np.ndarray
    mean_energy: float
    weighted_moments: dict = field(default_factory=dict)  # k -> (1/N) sum (1+|p|^2)^k


@functools.lru_cache(maxsize=1)
def juttner_mass():
    """Normalizing mass int_1^inf e sqrt(e^2-1) exp(-e) de (equals K2(1))."""
    val, _ = integrate.quad(
        lambda e: e * math.sqrt(e * e - 1.0) * math.exp(-e), 1.0, np.inf
    )
    return val


@functools.lru_cache(maxsize=1)
def juttner_mean_energy():
    """Mean energy of the normalized Juttner distribution."""
    val, _ = integrate.quad(
        lambda e: e * e * math.sqrt(e * e - 1.0) * math.exp(-e), 1.0, np.inf
    )
    return val / juttner_mass()


def sample_juttner(n, rng):
    """i.i.d. sample of size n from the normalized Juttner density.

    Radial rejection with Gamma(3, 1) proposal r^2 e^-r and acceptance
    probability exp(-(p0 - r)) <= 1; directions uniform on the sphere.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    radii = np.empty(0)
    while radii.size < n:
        m = max(2 * (n - radii.size), 64)
        r = rng.gamma(3.0, 1.0, size=m)
        accept = rng.random(m) < np.exp(-(np.sqrt(1.0 + r * r) - r))
        radii = np.concatenate([radii, r[accept]])
    radii = radii[:n]
    u = rng.standard_normal((n, 3))
    u /= np.maximum(np.linalg.norm(u, axis=1, keepdims=True), 1e-300)
    return Ensemble(radii[:, None] * u)


def moments(ensemble, ks=()):
    """Empirical mean momentum, mean energy and requested weighted moments."""
    p = ensemble.momenta
    e = energy(p)
    wm = {k: float(np.mean((1.0 + np.sum(p * p, axis=1)) ** k)) for k in ks}
    return MomentSummary(p.mean(axis=0), float(e.mean()), wm)


def _cost_matrix(e1, e2):
    d = e1.momenta[:, None, :] - e2.momenta[None, :, :]
    return np.sum(d * d, axis=-1)


def optimal_coupling(e1, e2):
    """Exact minimum-cost perfect matching under squared Euclidean cost."""
    if len(e1) != len(e2):
        raise ValueError("ensembles must have equal size")
    if len(e1) > W2_SIZE_CAP:
        raise ValueError(
            f"exact assignment capped at N = {W2_SIZE_CAP}; subsample first"
        )
    cost = _cost_matrix(e1, e2)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(e1), dtype=np.intp)
    perm[rows] = cols
    return CouplingPlan(perm, float(cost[rows, cols].mean()))


def w2_exact(e1, e2):
    """Exact Wasserstein-2 distance and the optimal coupling plan."""
    plan = optimal_coupling(e1, e2)
    return math.sqrt(plan.cost), plan
