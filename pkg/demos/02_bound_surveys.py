"""Survey the pointwise inequalities behind the uniqueness estimates.

Each bound has the shape LHS <= c * RHS with an unspecified constant; the
survey reports the empirical sup of LHS/RHS over a stratified sample that
includes near-singular and large-momentum pairs.
"""

import numpy as np

from rellandau import estimates

rng = np.random.Generator(np.random.Philox(1))

for bound_id in estimates.BOUND_IDS:
    rep = estimates.bound_survey(bound_id, "demo", 50000, rng)
    print(f"{bound_id:<22} empirical c = {rep.max_ratio:8.4g}  ({rep.n_samples} samples)")

print()
for survey_id in estimates.INTEGRAL_SURVEY_IDS:
    rep = estimates.integral_inequality_survey(survey_id, "juttner", 5000, rng)
    flag = " (noisy MC)" if rep.warnings else ""
    print(f"{survey_id:<14} empirical C(g) = {rep.max_ratio:8.4g}{flag}")
