"""Walk through the algebraic structure of the collision kernel.

The kernel Phi(p, q) is a 3x3 symmetric PSD matrix with an explicit sparse
square root; this script checks the identities on a concrete pair and on a
random batch.
"""

import numpy as np

from rellandau import kernel

p = np.array([1.0, 0.0, 0.0])
q = np.array([0.0, 1.0, 0.0])

print("rho(p, q) =", kernel.rho(p, q))
print("Phi(p, q) =\n", kernel.phi(p, q))
print("B(p, q)   =", kernel.drift_b(p, q))

# Sigma is an exact square root of Phi
sig = kernel.sigma(p, q)
print("max |Sigma Sigma^T - Phi| =", np.abs(sig @ sig.T - kernel.phi(p, q)).max())

# Phi annihilates the relative velocity p/p0 - q/q0
v = p / kernel.energy(p) - q / kernel.energy(q)
print("|Phi v| =", np.linalg.norm(kernel.phi(p, q) @ v))

# batch check: S decomposes into a difference of scaled projectors
rng = np.random.Generator(np.random.Philox(0))
P = rng.normal(size=(1000, 3)) * 3
Q = rng.normal(size=(1000, 3)) * 3
S = kernel.s_matrix(P, Q)
resid = np.abs(S - (kernel.pi1(P, Q) - kernel.pi2(P, Q))).max()
print("batch S = Pi1 - Pi2 residual:", resid)
