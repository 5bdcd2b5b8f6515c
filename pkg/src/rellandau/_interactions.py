"""Numba kernels for the O(N^2) pair-interaction sums.

The mean-field accumulation exploits the pair symmetry of the kernel
(Phi(p, q) = Phi(q, p), B(p, q) = -B(q, p)) to halve the work.  Loops are
sequential, so results are independent of thread count by construction.
"""

import numba
import numpy as np


@numba.njit(cache=True, fastmath=True)
def meanfield_coeffs(P, p0, eps):
    """Per-particle diffusion matrices and drifts from the empirical measure.

    a[i] = (1/(N-1)) sum_{j != i} Phi_eps(P_i, P_j)
    b[i] = (1/(N-1)) sum_{j != i} B_eps(P_i, P_j)

    Self-interaction is excluded; N = 1 returns zeros.
    """
    N = P.shape[0]
    a = np.zeros((N, 3, 3))
    b = np.zeros((N, 3))
    if N < 2:
        return a, b
    for i in range(N):
        xi, yi, zi = P[i, 0], P[i, 1], P[i, 2]
        e_i = p0[i]
        for j in range(i + 1, N):
            xj, yj, zj = P[j, 0], P[j, 1], P[j, 2]
            dx, dy, dz = xi - xj, yi - yj, zi - zj
            cx = yi * zj - zi * yj
            cy = zi * xj - xi * zj
            cz = xi * yj - yi * xj
            dot = xi * xj + yi * yj + zi * zj
            e_ij = e_i * p0[j]
            r0 = (dx * dx + dy * dy + dz * dz + cx * cx + cy * cy + cz * cz) / (
                e_ij + dot + 1.0
            )
            r = r0 + eps
            t = r + 2.0
            rt = r * t
            lam = (r + 1.0) * (r + 1.0) / (e_ij * rt * np.sqrt(rt))
            lam_bar = lam * t
            # drift: B(P_i, P_j) = lam_bar (P_j - P_i), antisymmetric
            bx, by, bz = -lam_bar * dx, -lam_bar * dy, -lam_bar * dz
            b[i, 0] += bx
            b[i, 1] += by
            b[i, 2] += bz
            b[j, 0] -= bx
            b[j, 1] -= by
            b[j, 2] -= bz
            # kernel matrix: Phi = lam * S with unregularized S
            t0 = r0 + 2.0
            diag = r0 * t0
            s00 = diag - dx * dx + 2.0 * r0 * xi * xj
            s11 = diag - dy * dy + 2.0 * r0 * yi * yj
            s22 = diag - dz * dz + 2.0 * r0 * zi * zj
            s01 = -dx * dy + r0 * (xi * yj + yi * xj)
            s02 = -dx * dz + r0 * (xi * zj + zi * xj)
            s12 = -dy * dz + r0 * (yi * zj + zi * yj)
            f00, f11, f22 = lam * s00, lam * s11, lam * s22
            f01, f02, f12 = lam * s01, lam * s02, lam * s12
            a[i, 0, 0] += f00
            a[i, 1, 1] += f11
            a[i, 2, 2] += f22
            a[i, 0, 1] += f01
            a[i, 0, 2] += f02
            a[i, 1, 2] += f12
            a[j, 0, 0] += f00
            a[j, 1, 1] += f11
            a[j, 2, 2] += f22
            a[j, 0, 1] += f01
            a[j, 0, 2] += f02
            a[j, 1, 2] += f12
    inv = 1.0 / (N - 1)
    for i in range(N):
        a[i, 0, 0] *= inv
        a[i, 1, 1] *= inv
        a[i, 2, 2] *= inv
        a[i, 0, 1] *= inv
        a[i, 0, 2] *= inv
        a[i, 1, 2] *= inv
        a[i, 1, 0] = a[i, 0, 1]
        a[i, 2, 0] = a[i, 0, 2]
        a[i, 2, 1] = a[i, 1, 2]
        b[i, 0] *= inv
        b[i, 1] *= inv
        b[i, 2] *= inv
    return a, b


@numba.njit(cache=True)
def pairwise_diffusion(P, p0, eps, xi):
    """Sum over ordered pairs of Sigma_eps(P_i, P_j) . xi[i, j].

    ``xi`` has shape (N, N, 3): one Gaussian vector per ordered pair; the
    diagonal entries are ignored.  Returns the unnormalized sum; callers
    divide by sqrt(N - 1).
    """
    N = P.shape[0]
    out = np.zeros((N, 3))
    for i in range(N):
        pi0 = p0[i]
        xi_, yi_, zi_ = P[i, 0], P[i, 1], P[i, 2]
        mu = 1.0 / (pi0 + 1.0)
        for j in range(N):
            if j == i:
                continue
            xj, yj, zj = P[j, 0], P[j, 1], P[j, 2]
            dx, dy, dz = xi_ - xj, yi_ - yj, zi_ - zj
            cx = yi_ * zj - zi_ * yj
            cy = zi_ * xj - xi_ * zj
            cz = xi_ * yj - yi_ * xj
            dot = xi_ * xj + yi_ * yj + zi_ * zj
            e_ij = pi0 * p0[j]
            r = (dx * dx + dy * dy + dz * dz + cx * cx + cy * cy + cz * cz) / (
                e_ij + dot + 1.0
            ) + eps
            t = r + 2.0
            coeff = (r + 1.0) / (np.sqrt(e_ij) * (r * t) ** 0.75)
            qj0 = p0[j]
            # v = q0 p - p0 q written to avoid cancellation near p = q
            shift = (dx * (xi_ + xj) + dy * (yi_ + yj) + dz * (zi_ + zj)) / (
                pi0 + qj0
            )
            v1 = qj0 * dx - shift * xj
            v2 = qj0 * dy - shift * yj
            v3 = qj0 * dz - shift * zj
            # sigma_S rows: sigma_Pi1 minus mu * (p x q) (x) (p3, p2, p1)
            g0, g1, g2 = xi[i, j, 0], xi[i, j, 1], xi[i, j, 2]
            row0 = v2 * g0 - v3 * g1 - mu * cx * (zi_ * g0 + yi_ * g1 + xi_ * g2)
            row1 = -v1 * g0 + v3 * g2 - mu * cy * (zi_ * g0 + yi_ * g1 + xi_ * g2)
            row2 = v1 * g1 - v2 * g2 - mu * cz * (zi_ * g0 + yi_ * g1 + xi_ * g2)
            out[i, 0] += coeff * row0
            out[i, 1] += coeff * row1
            out[i, 2] += coeff * row2
    return out
