"""Command line orchestration: verification, surveys, simulations, coupling.

Subcommands: verify, bounds, simulate, couple, gronwall, sample.
Configuration is a strict JSON document (unknown keys rejected); outputs are
the CSV schemas defined by the producing modules.  Exit codes: 0 success,
1 invariant violation during a run, 2 flag/config validation failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from rellandau import estimates, gronwall, kernel, sde, transport

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _apply_thread_cap():
    cap = os.environ.get("RELLANDAU_THREADS")
    if cap:
        try:
            import numba

            numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))
        except (ImportError, ValueError):
            pass


class ConfigError(ValueError):
    pass


_CONFIG_SCHEMA = {
    "kernel": {"eps_reg"},
    "survey": {"bound_id", "n", "seed", "which", "density_spec"},
    "sim": {
        "n_particles",
        "dt",
        "t_final",
        "eps_reg",
        "seed",
        "scheme",
        "record_every",
        "w2_subsample",
        "w2_reference",
        "coupling_mode",
        "coupling_k",
        "initial",
    },
    "couple": {"delta", "coupling_mode", "coupling_k"},
    "output": {"dir", "format"},
}


def load_config(path):
    """Load and strictly validate a JSON config (fail on unknown keys)."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    for section, body in doc.items():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(body, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        unknown = set(body) - _CONFIG_SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")
    return doc


def _sim_config(doc, seed_override=None):
    sim = dict(doc.get("sim", {}))
    sim.pop("initial", None)
    if seed_override is not None:
        sim["seed"] = seed_override
    try:
        return sde.SimConfig(**sim)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- verify


def _pair_scale(mats):
    return np.maximum(np.sqrt(np.sum(mats * mats, axis=(-2, -1))), 1e-300)


def kernel_identity_suite(n_pairs, seed):
    """Run the kernel-identity checks on a seeded sample; list of results.

    Each entry: (name, residual, tolerance, passed).
    """
    rng = sde.make_rng(seed)
    p, q = estimates.sample_pairs(n_pairs, rng)
    results = []

    def add(name, residual, tol):
        results.append((name, float(residual), tol, bool(residual <= tol)))

    phi = kernel.phi(p, q)
    scale = _pair_scale(phi)

    sig = kernel.sigma(p, q)
    res = np.abs(np.einsum("nij,nkj->nik", sig, sig) - phi).max(axis=(-2, -1))
    add("sigma_square_root", (res / scale).max(), 1e-9)

    s = kernel.s_matrix(p, q)
    p1m, p2m = kernel.pi1(p, q), kernel.pi2(p, q)
    s_scale = np.maximum(_pair_scale(p1m) + _pair_scale(p2m), 1e-300)
    add(
        "projector_difference",
        (np.abs(s - (p1m - p2m)).max(axis=(-2, -1)) / s_scale).max(),
        1e-9,
    )

    ss = kernel.sigma_s(p, q)
    add(
        "sigma_s_square_root",
        (np.abs(np.einsum("nij,nkj->nik", ss, ss) - s).max(axis=(-2, -1)) / s_scale).max(),
        1e-9,
    )

    p2_scale = np.maximum(_pair_scale(p2m), 1e-300)
    null_p = np.abs(np.einsum("nij,nj->ni", p2m, p)).max(axis=-1)
    null_q = np.abs(np.einsum("nij,nj->ni", p2m, q)).max(axis=-1)
    vec_scale = np.maximum(np.linalg.norm(p, axis=-1), np.linalg.norm(q, axis=-1)) + 1.0
    add("pi2_nullspace", (np.maximum(null_p, null_q) / (p2_scale * vec_scale)).max(), 1e-9)

    nv = p / kernel.energy(p)[:, None] - q / kernel.energy(q)[:, None]
    add(
        "phi_nullspace",
        (np.abs(np.einsum("nij,nj->ni", phi, nv)).max(axis=-1) / scale).max(),
        1e-9,
    )

    eigs = np.linalg.eigvalsh(phi)
    add("phi_psd", (np.maximum(-eigs.min(axis=-1), 0.0) / scale).max(), 1e-9)

    r = kernel.rho(p, q)
    sep2 = np.sum((p - q) ** 2, axis=-1)
    cr2 = np.sum(np.cross(p, q) ** 2, axis=-1)
    p0q0 = kernel.energy(p) * kernel.energy(q)
    lower_violation = np.maximum((sep2 + cr2) / (2 * p0q0) - r, 0.0).max()
    upper_violation = np.maximum(r - 0.5 * sep2, 0.0).max()
    add("rho_bounds_exact", max(lower_violation, upper_violation), 0.0)

    # two-form agreement on generic pairs in the ball of radius 100; the
    # stratified near-coincident tail is exactly where the difference form
    # cancels catastrophically and is excluded by design
    pg = rng.uniform(-1, 1, (n_pairs, 3)) * rng.uniform(0, 100, (n_pairs, 1))
    qg = rng.uniform(-1, 1, (n_pairs, 3)) * rng.uniform(0, 100, (n_pairs, 1))
    rg = kernel.rho(pg, qg)
    rd = kernel.rho_difference_form(pg, qg)
    add("rho_two_forms", (np.abs(rg - rd) / np.maximum(rg, 1e-300)).max(), 1e-9)

    # finite differences need generic separations: near the coincidence
    # singularity the kernel's curvature dominates the h^2 truncation error
    pu = rng.uniform(-10, 10, (400, 3))
    qu = rng.uniform(-10, 10, (400, 3))
    keep = np.linalg.norm(pu - qu, axis=-1) >= 1e-2
    pf, qf = pu[keep][:200], qu[keep][:200]
    fd_res = _divergence_fd_residual(pf, qf)
    add("divergence_vs_fd", fd_res, 1e-6)

    b = kernel.drift_b(p, q)
    add(
        "drift_antisymmetry",
        np.abs(b + kernel.drift_b(q, p)).max(),
        0.0,
    )
    half = 0.5 * (kernel.div_p_phi(pf, qf) - kernel.div_q_phi(pf, qf))
    bf = kernel.drift_b(pf, qf)
    add(
        "drift_half_divergence",
        (np.abs(half - bf) / np.maximum(np.linalg.norm(bf, axis=-1), 1e-300)[:, None]).max(),
        1e-9,
    )
    return results


def _divergence_fd_residual(p, q):
    """Max relative error of the analytic divergences vs central differences."""
    worst = 0.0
    for pi, qi in zip(p, q):
        h = 1e-5 * (1.0 + np.linalg.norm(pi))
        dp = np.zeros(3)
        dq = np.zeros(3)
        for i in range(3):
            for j in range(3):
                e = np.zeros(3)
                e[j] = h
                dp[i] += (kernel.phi(pi + e, qi)[i, j] - kernel.phi(pi - e, qi)[i, j]) / (2 * h)
                dq[i] += (kernel.phi(pi, qi + e)[i, j] - kernel.phi(pi, qi - e)[i, j]) / (2 * h)
        ap = kernel.div_p_phi(pi, qi)
        aq = kernel.div_q_phi(pi, qi)
        scale = max(np.linalg.norm(ap), np.linalg.norm(aq), 1e-300)
        worst = max(worst, np.abs(dp - ap).max() / scale, np.abs(dq - aq).max() / scale)
    return worst


def cmd_verify(args):
    if args.pairs < 1:
        print("error: --pairs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    results = kernel_identity_suite(args.pairs, args.seed)
    if args.json:
        print(
            json.dumps(
                [
                    {"check": n, "residual": r, "tolerance": t, "passed": ok}
                    for n, r, t, ok in results
                ],
                indent=2,
            )
        )
    else:
        for name, res, tol, ok in results:
            print(f"{'PASS' if ok else 'FAIL'}  {name:<24} residual={res:.3e} tol={tol:g}")
    return EXIT_OK if all(ok for *_, ok in results) else EXIT_FAIL


# ---------------------------------------------------------------- bounds


def cmd_bounds(args):
    doc = _load_or_usage(args)
    if doc is None:
        return EXIT_USAGE
    survey = doc.get("survey", {})
    seed = args.seed if args.seed is not None else survey.get("seed", 0)
    n = survey.get("n", 10**5)
    bound_ids = [survey["bound_id"]] if "bound_id" in survey else list(estimates.BOUND_IDS)
    out_dir = _out_dir(args, doc)
    rows = []
    for bid in bound_ids:
        rng = sde.make_rng(seed)
        rep = estimates.bound_survey(bid, f"stratified:n={n}:seed={seed}", n, rng)
        rows.append(rep.to_csv_row())
        print(f"{bid}: max_ratio={rep.max_ratio:.6g} over {rep.n_samples} samples")
    path = os.path.join(out_dir, "bounds.csv")
    with open(path, "w") as fh:
        fh.write(estimates.BoundReport.CSV_HEADER + "\n")
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------- simulate


def _initial_ensemble(doc, config):
    init = doc.get("sim", {}).get("initial", "juttner")
    rng = sde.make_rng(config.seed + 1)
    if init == "juttner":
        return transport.sample_juttner(config.n_particles, rng)
    raise ConfigError(f"unknown initial ensemble {init!r}")


def cmd_simulate(args):
    doc = _load_or_usage(args)
    if doc is None:
        return EXIT_USAGE
    try:
        config = _sim_config(doc, args.seed)
        initial = _initial_ensemble(doc, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        record = sde.run(config, initial)
    except RuntimeError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out_dir = _out_dir(args, doc)
    path = os.path.join(out_dir, "trajectory.csv")
    record.to_csv(path)
    print(
        f"simulated N={config.n_particles} to t={config.t_final} "
        f"({len(record.times)} records); wrote {path}"
    )
    return EXIT_OK


def cmd_couple(args):
    doc = _load_or_usage(args)
    if doc is None:
        return EXIT_USAGE
    try:
        config = _sim_config(doc, args.seed)
        couple = doc.get("couple", {})
        delta = float(couple.get("delta", 0.0))
        initial = _initial_ensemble(doc, config)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    shifted = transport.Ensemble(initial.momenta + np.array([delta, 0.0, 0.0]))
    try:
        record = sde.run_coupled(config, initial, shifted)
    except (RuntimeError, ValueError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out_dir = _out_dir(args, doc)
    path = os.path.join(out_dir, "coupling.csv")
    record.to_csv(path)
    print(
        f"coupled run delta={delta}: sup w2_sq={max(record.w2_sq):.6g}, "
        f"gamma={record.gamma_fitted:.6g}; wrote {path}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- gronwall


def cmd_gronwall(args):
    if args.rho0 < 0 or args.gamma_const < 0 or args.T <= 0 or args.dt <= 0:
        print("error: invalid gronwall flags", file=sys.stderr)
        return EXIT_USAGE
    problem = gronwall.GronwallProblem(args.rho0, args.gamma_const, args.T, args.dt)
    ts, rho = gronwall.integrate(problem)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "gronwall.csv")
    with open(path, "w") as fh:
        fh.write("t,rho\n")
        for t, r in zip(ts, rho):
            fh.write(f"{t:.12g},{r:.12g}\n")
    print(f"final rho({ts[-1]:g}) = {rho[-1]:.12g}; wrote {path}")
    return EXIT_OK


def cmd_sample(args):
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    ens = transport.sample_juttner(args.n, sde.make_rng(args.seed))
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sample.csv")
    ens.to_csv(path)
    print(f"wrote {args.n} Juttner samples to {path}")
    return EXIT_OK


# ---------------------------------------------------------------- plumbing


def _load_or_usage(args):
    if not args.config:
        return {}
    try:
        return load_config(args.config)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return None


def _out_dir(args, doc):
    out = args.out or doc.get("output", {}).get("dir", ".")
    os.makedirs(out, exist_ok=True)
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rellandau",
        description="Relativistic Landau kernel verification, surveys and simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, default=None, help="override RNG seed")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("verify", help="run the kernel-identity suite")
    common(sp)
    sp.add_argument("--pairs", type=int, default=10000)
    sp.set_defaults(func=cmd_verify, seed=0)

    sp = sub.add_parser("bounds", help="Monte Carlo bound surveys")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("simulate", help="single particle-system run")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("couple", help="coupled twin runs with shared noise")
    common(sp)
    sp.set_defaults(func=cmd_couple)

    sp = sub.add_parser("gronwall", help="integrate the Gronwall comparison ODE")
    common(sp)
    sp.add_argument("--rho0", type=float, required=True)
    sp.add_argument("--gamma-const", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1e-4)
    sp.set_defaults(func=cmd_gronwall)

    sp = sub.add_parser("sample", help="draw a Juttner ensemble")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_sample)

    return parser


def main(argv=None):
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    seed = getattr(args, "seed", None)
    if seed is None and args.command in ("verify", "sample"):
        args.seed = 0
    if args.command == "sample" and args.seed is None:
        args.seed = 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
