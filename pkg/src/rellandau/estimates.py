"""Region splitting, the Psi/Theta calculus, and pointwise-bound surveys.

The inequality lemmas that drive the uniqueness argument all have the shape
``LHS <= c * RHS`` with an unspecified constant c.  The surveys here sample
(p, q) tuples -- including deliberately near-singular and large-momentum
strata -- and report the empirical sup of LHS/RHS as a
:class:`BoundReport`.  Tests assert finiteness and sample-size stability of
the reported constants, never a particular value of c.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from rellandau import kernel, transport
from rellandau.kernel import SingularPair, as_momentum, energy

__all__ = [
    "RegionFlag",
    "BoundReport",
    "in_region_A",
    "region_flag",
    "psi",
    "theta",
    "psi_integral",
    "phi_b1",
    "phi_b2",
    "phi_sigma1",
    "phi_sigma2",
    "sample_pairs",
    "bound_survey",
    "integral_inequality_survey",
    "BOUND_IDS",
    "INTEGRAL_SURVEY_IDS",
]


class RegionFlag(enum.Enum):
    A = "A"
    AC = "Ac"


def in_region_A(p, q):
    """True where (p0 q0)^(1/2) >= |p - q| (comparable-energy region)."""
    p = as_momentum(p)
    q = as_momentum(q)
    sep = np.linalg.norm(p - q, axis=-1)
    return np.sqrt(energy(p) * energy(q)) >= sep


def region_flag(p, q):
    """Scalar RegionFlag for a single pair."""
    return RegionFlag.A if bool(in_region_A(p, q)) else RegionFlag.AC


def psi(x):
    """Psi(x) = x (1 - log x) on [0, 1], x above; Psi(0) = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("psi requires x >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        low = x * (1.0 - np.log(x))
    out = np.where(x <= 1.0, np.where(x == 0.0, 0.0, low), x)
    return out if out.ndim else float(out)


def theta(x):
    """Concave companion: x(1 - log x) on [0, 1/2], x log 2 + 1/2 above."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("theta requires x >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        low = x * (1.0 - np.log(x))
    out = np.where(x <= 0.5, np.where(x == 0.0, 0.0, low), x * math.log(2.0) + 0.5)
    return out if out.ndim else float(out)


def psi_integral(a, b):
    """Closed form of the integral of 1/Psi over [a, b]; +inf when a = 0 < b.

    The antiderivative is -log(1 - log y) below 1 and log y above, so the
    value is log((1 - log a)/(1 - log b)) + log(max(b,1)/max(a,1)) pieced at
    the breakpoint y = 1.
    """
    if a < 0 or b < a:
        raise ValueError("psi_integral requires 0 <= a <= b")
    if a == b:
        return 0.0
    if a == 0.0:
        return math.inf
    total = 0.0
    lo, hi = min(a, 1.0), min(b, 1.0)
    if lo < hi:
        total += math.log((1.0 - math.log(lo)) / (1.0 - math.log(hi)))
    lo, hi = max(a, 1.0), max(b, 1.0)
    if lo < hi:
        total += math.log(hi / lo)
    return total


def _split_bound(p, q, coef_a, coef_ac, pow_sep):
    """coef_a * |p-q|^pow_sep on A, coef_ac on Ac; singular when p = q on A."""
    p = as_momentum(p)
    q = as_momentum(q)
    sep = np.linalg.norm(p - q, axis=-1)
    on_a = in_region_A(p, q)
    if np.any(on_a & (sep == 0.0)):
        raise SingularPair("bound function evaluated at a coincident pair")
    with np.errstate(divide="ignore"):
        branch_a = coef_a * sep ** float(pow_sep)
    out = np.where(on_a, branch_a, coef_ac)
    return out if out.ndim else float(out)


def phi_b1(p, q):
    """Trivial drift bound: min(p0, q0) |p-q|^-2 on A, 1 on Ac."""
    p0, q0 = energy(p), energy(q)
    return _split_bound(p, q, np.minimum(p0, q0), np.ones_like(p0), -2)


def phi_b2(p, q):
    """Lipschitz drift bound: (q0)^3 |p-q|^-3 on A, 1 on Ac."""
    q0 = energy(q)
    return _split_bound(p, q, q0**3, np.ones_like(q0), -3)


def phi_sigma1(p, q):
    """Trivial diffusion bound: min(p0,q0)^3 |p-q|^-1 on A, min(p0,q0)^2 on Ac."""
    p0, q0 = energy(p), energy(q)
    m = np.minimum(p0, q0)
    return _split_bound(p, q, m**3, m**2, -1)


def phi_sigma2(p, q):
    """Lipschitz diffusion bound: min(p0,q0)^7 |p-q|^-3 on A, (q0)^5 on Ac."""
    p0, q0 = energy(p), energy(q)
    m = np.minimum(p0, q0)
    return _split_bound(p, q, m**7, q0**5, -3)


@dataclass
class BoundReport:
    """Empirical survey of an inequality LHS <= c * RHS."""

    bound_id: str
    n_samples: int
    max_ratio: float
    argmax_pair: tuple = ()
    sampler_spec: str = ""
    warnings: list = field(default_factory=list)

    CSV_HEADER = "bound_id,n_samples,max_ratio,argmax"

    def to_csv_row(self):
        coords = ";".join(
            " ".join(f"{x:.9g}" for x in np.ravel(v)) for v in self.argmax_pair
        )
        return f"{self.bound_id},{self.n_samples},{self.max_ratio:.9g},{coords}"


def _sample_momenta(n, rng):
    """|p| uniform on [0, 10] plus a log-uniform tail to 1e3; isotropic."""
    n_tail = n // 8
    r = np.empty(n)
    r[: n - n_tail] = rng.uniform(0.0, 10.0, n - n_tail)
    r[n - n_tail :] = 10.0 ** rng.uniform(1.0, 3.0, n_tail)
    u = rng.standard_normal((n, 3))
    u /= np.maximum(np.linalg.norm(u, axis=1, keepdims=True), 1e-300)
    return r[:, None] * u


def sample_pairs(n, rng):
    """Stratified (p, q) sample: bulk pairs plus log-uniform separations.

    Separations are log-uniform in [1e-4, 10] so both the region-A branch
    and the singular limit are exercised; coincident pairs never occur.
    """
    p = _sample_momenta(n, rng)
    sep = 10.0 ** rng.uniform(-4.0, 1.0, n)
    u = rng.standard_normal((n, 3))
    u /= np.maximum(np.linalg.norm(u, axis=1, keepdims=True), 1e-300)
    q = p + sep[:, None] * u
    return p, q


def _frob(mat):
    return np.sqrt(np.sum(mat * mat, axis=(-2, -1)))


BOUND_IDS = (
    "lambda",
    "phi_norm",
    "b_norm",
    "b_diff",
    "sigma_diff_trivial",
    "sigma_diff_lipschitz",
)


def bound_survey(bound_id, sampler_spec, n, rng):
    """Monte Carlo sup of LHS/RHS for one of the pointwise inequalities.

    ``sampler_spec`` is a free-form label recorded in the report; sampling
    itself is the stratified scheme of :func:`sample_pairs`.
    """
    if bound_id not in BOUND_IDS:
        raise ValueError(f"unknown bound_id {bound_id!r}")
    if n == 0:
        return BoundReport(bound_id, 0, 0.0, (), sampler_spec)

    p, q = sample_pairs(n, rng)
    sep = np.linalg.norm(p - q, axis=-1)
    on_a = in_region_A(p, q)

    if bound_id == "lambda":
        lhs = kernel.lam(p, q)
        rhs = np.where(
            on_a, np.sqrt(energy(p) * energy(q)) * sep**-3.0, sep**-2.0
        )
        args = (p, q)
    elif bound_id == "phi_norm":
        lhs = _frob(kernel.phi(p, q))
        rhs = 1.0 + np.minimum(energy(p), energy(q)) / sep
        args = (p, q)
    elif bound_id == "b_norm":
        lhs = np.linalg.norm(kernel.drift_b(p, q), axis=-1)
        rhs = phi_b1(p, q)
        args = (p, q)
    else:
        pt, qt = sample_pairs(n, rng)
        # survey the matched-second-argument case alongside the free case,
        # mirroring the triangle/Lipschitz split of the difference bounds
        qt[: n // 2] = q[: n // 2]
        if bound_id == "b_diff":
            lhs = np.linalg.norm(kernel.drift_b(p, q) - kernel.drift_b(pt, qt), axis=-1)
            tri = phi_b1(p, q) + phi_b1(pt, qt)
            lip = np.linalg.norm(p - pt, axis=-1) * (phi_b2(p, q) + phi_b2(pt, q)) + \
                np.linalg.norm(q - qt, axis=-1) * (phi_b2(q, pt) + phi_b2(qt, pt))
            rhs = np.minimum(tri, lip)
        elif bound_id == "sigma_diff_trivial":
            d = kernel.sigma(p, q) - kernel.sigma(pt, qt)
            lhs = np.sum(d * d, axis=(-2, -1))
            rhs = phi_sigma1(p, q) + phi_sigma1(pt, qt)
        else:  # sigma_diff_lipschitz
            d = kernel.sigma(p, q) - kernel.sigma(pt, qt)
            lhs = np.sum(d * d, axis=(-2, -1))
            rhs = np.linalg.norm(p - pt, axis=-1) ** 2 * (phi_sigma2(p, q) + phi_sigma2(pt, q)) + \
                np.linalg.norm(q - qt, axis=-1) ** 2 * (phi_sigma2(q, pt) + phi_sigma2(qt, pt))
        args = (p, q, pt, qt)

    ratio = lhs / rhs
    k = int(np.argmax(ratio))
    return BoundReport(
        bound_id,
        n,
        float(ratio[k]),
        tuple(a[k] for a in args),
        sampler_spec,
    )


class _JuttnerDensity:
    """Normalized Juttner density e^{-p0} / (4 pi K2(1))."""

    name = "juttner"

    def __init__(self):
        self.norm = 4.0 * math.pi * transport.juttner_mass()

    def pdf(self, p):
        return np.exp(-energy(p)) / self.norm

    def sample(self, n, rng):
        return transport.sample_juttner(n, rng).momenta

    def sup(self):
        return np.exp(-1.0) / self.norm


class _TruncGaussDensity:
    """Isotropic standard Gaussian truncated at |p| <= radius."""

    name = "trunc_gauss"
    radius = 5.0

    def __init__(self):
        mass, _ = integrate.quad(
            lambda r: r * r * np.exp(-r * r / 2.0), 0.0, self.radius
        )
        self.norm = 4.0 * math.pi * mass

    def pdf(self, p):
        p = as_momentum(p)
        r2 = np.sum(p * p, axis=-1)
        inside = r2 <= self.radius**2
        return np.where(inside, np.exp(-r2 / 2.0) / self.norm, 0.0)

    def sample(self, n, rng):
        out = np.empty((0, 3))
        while out.shape[0] < n:
            cand = rng.standard_normal((2 * n, 3))
            cand = cand[np.linalg.norm(cand, axis=1) <= self.radius]
            out = np.concatenate([out, cand])
        return out[:n]

    def sup(self):
        return 1.0 / self.norm


def _density(density_spec):
    if density_spec == "juttner":
        return _JuttnerDensity()
    if density_spec == "trunc_gauss":
        return _TruncGaussDensity()
    raise ValueError(f"unknown density_spec {density_spec!r}")


INTEGRAL_SURVEY_IDS = ("lem41_I", "lem41_IV", "prop42_sigma", "prop42_B", "prop43")


def _mc_mean(values):
    mean = float(np.mean(values))
    stderr = float(np.std(values) / math.sqrt(len(values)))
    return mean, stderr


def integral_inequality_survey(which, density_spec, n, rng):
    """Monte Carlo survey of the integral inequalities against their Psi shape.

    Reports the sup over outer sample points of LHS/RHS -- the empirical
    constant C(g).  A Monte Carlo variance estimate above 10% of the mean is
    recorded as a warning on the report, not raised.
    """
    if which not in INTEGRAL_SURVEY_IDS:
        raise ValueError(f"unknown survey id {which!r}")
    g = _density(density_spec)
    spec = f"{which}:{density_spec}:n={n}"
    if n == 0:
        return BoundReport(which, 0, 0.0, (), spec)

    warnings = []
    qs = g.sample(n, rng)
    g_l1 = 1.0
    g_sup = g.sup()

    if which == "lem41_I":
        # sup_p int |p-q|^alpha g(q) dq with alpha = -1, over a |p| grid.
        best, arg = -np.inf, None
        for pr in np.linspace(0.0, 20.0, 21):
            p = np.array([pr, 0.0, 0.0])
            vals = 1.0 / np.maximum(np.linalg.norm(qs - p, axis=1), 1e-300)
            mean, stderr = _mc_mean(vals)
            if stderr > 0.1 * abs(mean):
                warnings.append(f"high MC variance at |p|={pr:g}")
            ratio = mean / (g_l1 + g_sup)
            if ratio > best:
                best, arg = ratio, (p,)
        return BoundReport(which, n, best, arg, spec, warnings)

    if which == "lem41_IV":
        # int_{|p-q|>=eps} |p-q|^-3 g vs ||g||_1 + ||g||_inf log(1/eps).
        best, arg = -np.inf, None
        for pr in (0.0, 2.0, 8.0):
            p = np.array([pr, 0.0, 0.0])
            d = np.linalg.norm(qs - p, axis=1)
            for eps in (1e-1, 1e-2, 1e-3):
                vals = np.where(d >= eps, d**-3.0, 0.0)
                mean, stderr = _mc_mean(vals)
                if stderr > 0.1 * max(abs(mean), 1e-300):
                    warnings.append(f"high MC variance at |p|={pr:g}, eps={eps:g}")
                ratio = mean / (g_l1 + g_sup * math.log(1.0 / eps))
                if ratio > best:
                    best, arg = ratio, (p, np.array([eps]))
        return BoundReport(which, n, best, arg, spec, warnings)

    if which in ("prop42_sigma", "prop42_B"):
        n_outer = 40
        best, arg = 0.0, ()
        for _ in range(n_outer):
            p = _sample_momenta(1, rng)[0]
            delta = 10.0 ** rng.uniform(-3.0, 0.5)
            u = rng.standard_normal(3)
            pt = p + delta * u / np.linalg.norm(u)
            if which == "prop42_sigma":
                d = kernel.sigma(p[None, :], qs) - kernel.sigma(pt[None, :], qs)
                vals = np.sum(d * d, axis=(-2, -1))
                denom = psi(float(np.sum((p - pt) ** 2)))
            else:
                d = kernel.drift_b(p[None, :], qs) - kernel.drift_b(pt[None, :], qs)
                vals = np.linalg.norm(d, axis=-1)
                denom = psi(float(np.linalg.norm(p - pt)))
            mean, stderr = _mc_mean(vals)
            if stderr > 0.1 * max(abs(mean), 1e-300):
                warnings.append("high MC variance")
            ratio = 0.0 if denom == 0.0 else mean / denom
            if ratio > best:
                best, arg = ratio, (p, pt)
        return BoundReport(which, n, best, arg, spec, warnings)

    # prop43: double-coupling drift inequality under translation couplings.
    best, arg = 0.0, ()
    for delta in (0.3, 0.1, 0.03):
        shift = np.array([delta, 0.0, 0.0])
        ps = g.sample(n, rng)
        pts = ps + shift  # coupling Q: (X, X + delta e1)
        qts = qs + shift  # coupling R with the same shift
        d = kernel.drift_b(ps, qs) - kernel.drift_b(pts, qts)
        vals = np.linalg.norm(ps - pts, axis=-1) * np.linalg.norm(d, axis=-1)
        mean, stderr = _mc_mean(vals)
        if stderr > 0.1 * max(abs(mean), 1e-300):
            warnings.append(f"high MC variance at delta={delta:g}")
        denom = psi(delta**2) + psi(delta**2)
        ratio = mean / denom
        if ratio > best:
            best, arg = ratio, (shift,)
    return BoundReport(which, n, best, arg, spec, warnings)
