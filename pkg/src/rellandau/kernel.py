"""Exact algebra of the relativistic Landau collision kernel.

All operations act on momentum 3-vectors (units with m = c = 1) and are
vectorized over leading axes: any function taking ``p, q`` accepts arrays of
shape ``(..., 3)`` and broadcasts.  The kernel matrices are returned with
shape ``(..., 3, 3)``.

The continuum kernel is singular on the diagonal p = q.  Every operation
that diverges there takes an explicit ``eps_reg`` which replaces the
relative momentum ``rho`` by ``rho + eps_reg``; with ``eps_reg = 0`` a
coincident pair raises :class:`SingularPair`.
"""

import numpy as np

__all__ = [
    "SingularPair",
    "as_momentum",
    "energy",
    "rho",
    "rho_difference_form",
    "lam",
    "s_matrix",
    "pi1",
    "pi2",
    "sigma_pi1",
    "sigma_pi2",
    "sigma_s",
    "sigma",
    "phi",
    "drift_b",
    "div_p_phi",
    "div_q_phi",
    "generator",
]


class SingularPair(ValueError):
    """Raised when an unregularized kernel quantity is evaluated at rho = 0."""


def as_momentum(p):
    """Validate and return a momentum vector (or batch of them).

    Accepts anything convertible to a float array with trailing dimension 3.
    Rejects NaN/Inf entries.
    """
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (3,):
        raise ValueError(f"momentum must have trailing dimension 3, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("momentum components must be finite")
    return p


def energy(p):
    """Relativistic energy p0 = sqrt(1 + |p|^2) >= 1."""
    p = as_momentum(p)
    return np.sqrt(1.0 + np.sum(p * p, axis=-1))


def rho(p, q):
    """Relative momentum rho >= 0, quotient form.

    The quotient form (|p-q|^2 + |p x q|^2) / (p0 q0 + p.q + 1) avoids the
    catastrophic cancellation of the difference form p0 q0 - p.q - 1 near
    p = q.  The denominator is >= 1 for all p, q.
    """
    p = as_momentum(p)
    q = as_momentum(q)
    d = p - q
    cr = np.cross(p, q)
    num = np.sum(d * d, axis=-1) + np.sum(cr * cr, axis=-1)
    den = energy(p) * energy(q) + np.sum(p * q, axis=-1) + 1.0
    return num / den


def rho_difference_form(p, q):
    """rho via p0 q0 - p.q - 1; retained for cross-checks only."""
    p = as_momentum(p)
    q = as_momentum(q)
    return energy(p) * energy(q) - np.sum(p * q, axis=-1) - 1.0


def _reg_scalars(p, q, eps_reg):
    """Return (rho_eps, tau_eps, p0q0) with singularity check."""
    if eps_reg < 0:
        raise ValueError("eps_reg must be nonnegative")
    r = rho(p, q) + eps_reg
    if eps_reg == 0.0 and np.any(r == 0.0):
        raise SingularPair("kernel evaluated at a coincident pair with eps_reg = 0")
    return r, r + 2.0, energy(p) * energy(q)


def lam(p, q, eps_reg=0.0):
    """Scalar coefficient Lambda = (rho+1)^2 / (p0 q0) * (rho tau)^(-3/2)."""
    r, t, p0q0 = _reg_scalars(p, q, eps_reg)
    return (r + 1.0) ** 2 / p0q0 * (r * t) ** -1.5


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


def s_matrix(p, q):
    """Kernel matrix S = rho tau Id - (p-q)x(p-q) + rho (pxq + qxp)."""
    p = as_momentum(p)
    q = as_momentum(q)
    r = rho(p, q)
    t = r + 2.0
    d = p - q
    eye = np.eye(3)
    return (
        (r * t)[..., None, None] * eye
        - _outer(d, d)
        + r[..., None, None] * (_outer(p, q) + _outer(q, p))
    )


def _boost_vector(p, q):
    """v1 = q0 p - p0 q, in a form stable near p = q.

    The direct difference cancels catastrophically for nearly coincident
    large momenta; expanding q0 - p0 through the energy difference quotient
    keeps both terms O(q0 |p - q|).
    """
    d = p - q
    shift = np.sum(d * (p + q), axis=-1) / (energy(p) + energy(q))
    return energy(q)[..., None] * d - shift[..., None] * q


def pi1(p, q):
    """Rank-2 scaled projector |v1|^2 Id - v1 x v1 with v1 = q0 p - p0 q."""
    p = as_momentum(p)
    q = as_momentum(q)
    v1 = _boost_vector(p, q)
    n2 = np.sum(v1 * v1, axis=-1)
    return n2[..., None, None] * np.eye(3) - _outer(v1, v1)


def pi2(p, q):
    """Rank-1 scaled projector (p x q) x (p x q)."""
    cr = np.cross(as_momentum(p), as_momentum(q))
    return _outer(cr, cr)


def _sigma_pi1_entries(p, q):
    v = _boost_vector(p, q)
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    z = np.zeros_like(v1)
    rows = np.stack(
        [
            np.stack([v2, -v3, z], axis=-1),
            np.stack([-v1, z, v3], axis=-1),
            np.stack([z, v1, -v2], axis=-1),
        ],
        axis=-2,
    )
    return rows


def sigma_pi1(p, q):
    """Sparse square-root factor of pi1 (cross-product structure)."""
    return _sigma_pi1_entries(as_momentum(p), as_momentum(q))


def _rev(p):
    """Component-reversed vector (p3, p2, p1)."""
    return p[..., ::-1]


def sigma_pi2(p, q):
    """Square-root factor (1/|p|) (p x q) x (p3, p2, p1).

    At p = 0 the cross product vanishes quadratically against the 1/|p|
    denominator's linear divergence, so the limit is the zero matrix and we
    define the value there accordingly.
    """
    p = as_momentum(p)
    q = as_momentum(q)
    cr = np.cross(p, q)
    norm = np.sqrt(np.sum(p * p, axis=-1))
    safe = np.where(norm == 0.0, 1.0, norm)
    out = _outer(cr, _rev(p)) / safe[..., None, None]
    if np.any(norm == 0.0):
        out = np.where((norm == 0.0)[..., None, None], 0.0, out)
    return out


def sigma_s(p, q):
    """Square root of S: sigma_s = sigma_pi1 - (1/(p0+1)) (p x q) x (p3,p2,p1)."""
    p = as_momentum(p)
    q = as_momentum(q)
    cr = np.cross(p, q)
    mu = 1.0 / (energy(p) + 1.0)
    return _sigma_pi1_entries(p, q) - mu[..., None, None] * _outer(cr, _rev(p))


def sigma(p, q, eps_reg=0.0):
    """Square root of the kernel: Sigma SigmaT = Phi (for eps_reg = 0)."""
    r, t, p0q0 = _reg_scalars(p, q, eps_reg)
    coeff = (r + 1.0) / np.sqrt(p0q0) * (r * t) ** -0.75
    return coeff[..., None, None] * sigma_s(p, q)


def phi(p, q, eps_reg=0.0):
    """Relativistic Landau kernel Phi = Lambda_eps S; symmetric, PSD."""
    return lam(p, q, eps_reg)[..., None, None] * s_matrix(p, q)


def drift_b(p, q, eps_reg=0.0):
    """Drift vector B = Lambda_eps (rho_eps + 2)(q - p); exactly antisymmetric."""
    p = as_momentum(p)
    q = as_momentum(q)
    r, t, p0q0 = _reg_scalars(p, q, eps_reg)
    lam_bar = (r + 1.0) ** 2 / p0q0 * r**-1.5 * t**-0.5
    return lam_bar[..., None] * (q - p)


def div_p_phi(p, q):
    """Row divergence sum_j d/dp_j Phi^ij = 2 Lambda ((rho+1) q - p)."""
    p = as_momentum(p)
    q = as_momentum(q)
    r = rho(p, q)
    if np.any(r == 0.0):
        raise SingularPair("divergence evaluated at a coincident pair")
    l = lam(p, q)
    return 2.0 * l[..., None] * ((r + 1.0)[..., None] * q - p)


def div_q_phi(p, q):
    """Column divergence sum_j d/dq_j Phi^ij = 2 Lambda ((rho+1) p - q)."""
    p = as_momentum(p)
    q = as_momentum(q)
    r = rho(p, q)
    if np.any(r == 0.0):
        raise SingularPair("divergence evaluated at a coincident pair")
    l = lam(p, q)
    return 2.0 * l[..., None] * ((r + 1.0)[..., None] * p - q)


def generator(p, q, grad_phi, hess_phi, eps_reg=0.0):
    """Weak-form generator L = (1/2) tr(Phi hess) + B . grad at (p, q).

    ``grad_phi`` and ``hess_phi`` are the caller-evaluated gradient and
    Hessian of a C^2_b test function at p.
    """
    grad_phi = np.asarray(grad_phi, dtype=float)
    hess_phi = np.asarray(hess_phi, dtype=float)
    mat = phi(p, q, eps_reg)
    diff = 0.5 * np.einsum("...ij,...ji->...", mat, hess_phi)
    return diff + np.sum(drift_b(p, q, eps_reg) * grad_phi, axis=-1)
