"""Scenario runner producing machine-readable data series.

Each scenario writes one CSV per panel (RFC 4180, a single '#'-prefixed
unit line above the column header, 17 significant digits) plus a JSON
manifest echoing the resolved inputs, the package version and the wall
time. Given the same config the CSV bytes are reproducible; the manifest
carries the only run-dependent field (runtime).

Panels fan out over a thread pool capped by the MFORCE_THREADS
environment variable; results are collected in input order and written
serially, so parallelism never changes the output.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, replace

import numpy as np

from . import __version__
from .model import ModelParams, DrivingParams, dressed_mode
from .equilibrium import equilibrium_point, star_quantities
from .dos import density_sharp, density_closed_forms
from .dynamics import initial_moments_product, initial_moments_joint_gibbs
from .thermo import trajectory_record, weak_coupling_measure
from .focklab import (DensityMatrix, BlockSpec, partial_trace, petz_map,
                      relative_entropy, verify_thermo_initial_condition,
                      build_block_state)

__all__ = ["ScenarioConfig", "scenario_config", "run", "main"]

SCENARIOS = ("equilibrium", "dos", "relax", "driven-damped",
             "driven-periodic", "weak-limit", "petz-demo")

_PETZ_SEED = 20260815
_PETZ_INSTANCES = 10


@dataclass
class ScenarioConfig:
    """Resolved inputs for one scenario run.

    Sweep axes: kappa_list (equilibrium, dos), beta_list (driven runs),
    r (relax panels), zeta_list (weak-limit). epsilon_reg and e_max set
    the density regularization width and energy-grid extent; t_max and
    dt_out the output time grid.
    """

    scenario: str
    model: ModelParams
    output_path: str
    driving: DrivingParams = None
    r: tuple = ()
    theta: float = 0.0
    t_max: float = 0.0
    dt_out: float = 0.0
    beta_list: tuple = ()
    kappa_list: tuple = ()
    zeta_list: tuple = ()
    epsilon_reg: float = 1e-3
    e_max: float = 0.0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not self.output_path:
            raise ValueError("output_path is required")
        for name in ("r", "beta_list", "kappa_list", "zeta_list"):
            val = getattr(self, name)
            if np.isscalar(val):
                val = (val,)
            setattr(self, name, tuple(float(v) for v in val))
        if self.scenario in ("relax", "driven-damped", "driven-periodic"):
            if self.t_max <= 0 or self.dt_out <= 0:
                raise ValueError("t_max and dt_out must be positive")
            if self.dt_out > self.t_max:
                raise ValueError("dt_out exceeds t_max")
        if self.scenario == "relax" and not self.r:
            raise ValueError("relax needs at least one squeeze value")
        if self.scenario in ("driven-damped", "driven-periodic"):
            if not self.beta_list:
                raise ValueError("driven scenarios need beta_list")
            if self.driving is None:
                raise ValueError("driven scenarios need driving parameters")
        if self.scenario in ("equilibrium", "dos") and not self.kappa_list:
            raise ValueError(f"{self.scenario} needs kappa_list")
        if self.scenario == "weak-limit" and not self.zeta_list:
            raise ValueError("weak-limit needs zeta_list")
        if self.scenario == "dos":
            if self.epsilon_reg <= 0:
                raise ValueError("epsilon_reg must be positive")
            if self.e_max <= 0:
                raise ValueError("e_max must be positive")


_MODEL_DEFAULTS = {"omega0": 1.0, "kappa": 0.25, "gamma": 0.1, "beta": 2.0}

# Per-scenario defaults for everything the config file may omit. The
# beta set {0.5, 1, 2} of the driven scenarios and the kappa set
# {0, 1/4, 1/2} of the equilibrium sweep are package choices, echoed as
# such in the manifest.
_DEFAULT_NOTES = {
    "equilibrium": ["kappa_list {0, 0.25, 0.5} is a package default"],
    "driven-damped": ["beta_list {0.5, 1, 2} is a package default"],
    "driven-periodic": ["beta_list {0.5, 1, 2} is a package default"],
}

_SCENARIO_DEFAULTS = {
    "equilibrium": {"kappa_list": (0.0, 0.25, 0.5),
                    "beta_list": tuple(1.0 / t for t in
                                       np.linspace(0.05, 5.0, 100))},
    "dos": {"kappa_list": (0.05, 0.5), "epsilon_reg": 1e-3},
    "relax": {"r": (0.0, 0.5, 1.0), "theta": 0.0,
              "t_max": 60.0, "dt_out": 0.1},
    "driven-damped": {"beta_list": (0.5, 1.0, 2.0),
                      "t_max": 500.0, "dt_out": 0.25,
                      "driving": {"lambda": 0.25, "Omega": 0.2,
                                  "eta": 0.025}},
    "driven-periodic": {"beta_list": (0.5, 1.0, 2.0),
                        "t_max": 250.0, "dt_out": 0.25,
                        "driving": {"lambda": 0.25, "Omega": 0.2,
                                    "eta": 0.0}},
    "weak-limit": {"zeta_list": (1.0, 2.0, 4.0, 8.0)},
    "petz-demo": {},
}

_KNOWN_KEYS = {"scenario", "model", "driving", "r", "theta", "t_max",
               "dt_out", "beta_list", "kappa_list", "zeta_list",
               "epsilon_reg", "e_max", "out"}


def _driving_from(payload):
    known = {"lambda", "lambda_", "Omega", "eta"}
    extra = set(payload) - known
    if extra:
        raise ValueError(f"unknown driving keys: {sorted(extra)}")
    lam = payload.get("lambda", payload.get("lambda_"))
    if lam is None:
        raise ValueError("driving needs a lambda amplitude")
    return DrivingParams(lambda_=float(lam),
                         Omega=float(payload.get("Omega", 0.2)),
                         eta=float(payload.get("eta", 0.0)))


def scenario_config(payload):
    """Build a ScenarioConfig from a plain dict (parsed JSON), filling
    scenario defaults for anything omitted."""
    payload = dict(payload)
    scenario = payload.get("scenario")
    if scenario not in SCENARIOS:
        raise ValueError(f"config needs a scenario, one of {SCENARIOS}")
    extra = set(payload) - _KNOWN_KEYS
    if extra:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    defaults = _SCENARIO_DEFAULTS[scenario]

    model_kwargs = dict(_MODEL_DEFAULTS)
    model_kwargs.update(payload.get("model", {}))
    model = ModelParams(**model_kwargs)

    driving = None
    drv = payload.get("driving", defaults.get("driving"))
    if drv is not None:
        driving = _driving_from(drv)

    def pick(key, fallback=None):
        return payload.get(key, defaults.get(key, fallback))

    e_max = pick("e_max")
    if scenario == "dos" and e_max is None:
        kappas = pick("kappa_list", ())
        e_max = 10.0 if any(k > 0.25 for k in kappas) else 8.0

    return ScenarioConfig(
        scenario=scenario,
        model=model,
        output_path=payload.get("out", "mforce-out"),
        driving=driving,
        r=pick("r", ()),
        theta=float(pick("theta", 0.0)),
        t_max=float(pick("t_max", 0.0)),
        dt_out=float(pick("dt_out", 0.0)),
        beta_list=pick("beta_list", ()),
        kappa_list=pick("kappa_list", ()),
        zeta_list=pick("zeta_list", ()),
        epsilon_reg=float(pick("epsilon_reg", 1e-3)),
        e_max=float(e_max if e_max is not None else 0.0),
    )


def _thread_count():
    env = os.environ.get("MFORCE_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("MFORCE_THREADS must be at least 1")
        return n
    return min(4, os.cpu_count() or 1)


def _fan_out(fn, items):
    items = list(items)
    workers = min(_thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _slug(x):
    return format(float(x), "g").replace(".", "p").replace("-", "m")


def _time_grid(config):
    n = int(round(config.t_max / config.dt_out))
    return np.linspace(0.0, n * config.dt_out, n + 1)


# Each panel builder returns (filename, unit_line, column_names, columns).

def _panels_equilibrium(config):
    betas = np.asarray(config.beta_list)
    names = ("beta", "nu", "S", "F_sharp", "E_sharp", "C_sharp",
             "E_star", "C_star")
    units = ("# beta [1/omega0], nu [1], S [nat], F_sharp [omega0], "
             "E_sharp [omega0], C_sharp [1], E_star [omega0], C_star [1]")

    def one(kappa):
        p = replace(config.model, kappa=kappa)
        mode = dressed_mode(p.omega0, p)
        cols = np.empty((len(names), len(betas)))
        for i, beta in enumerate(betas):
            pt = equilibrium_point(beta, mode)
            star = star_quantities(beta, p)
            cols[:, i] = (beta, pt.nu, pt.entropy, pt.free_energy_sharp,
                          pt.internal_energy_sharp, pt.heat_capacity_sharp,
                          star.internal_energy_star, star.heat_capacity_star)
        return (f"equilibrium_kappa{_slug(kappa)}.csv", units, names, cols)

    return _fan_out(one, config.kappa_list)


def _panels_dos(config):
    eps = config.epsilon_reg
    spacing = eps / 4.0
    n = int(round(config.e_max / spacing))
    grid = np.linspace(0.0, n * spacing, n + 1)
    names = ("energy", "rho_sharp", "rho_star")
    units = ("# energy [omega0], rho_sharp [1/omega0], "
             "rho_star [1/omega0]")

    def one(kappa):
        p = replace(config.model, kappa=kappa)
        dg = density_sharp(p, grid, reg_width=eps)
        star = density_closed_forms("star", p, grid, reg_width=eps)
        cols = np.vstack([grid, dg.values, star.values])
        return (f"dos_kappa{_slug(kappa)}.csv", units, names, cols)

    return _fan_out(one, config.kappa_list)


def _panels_relax(config):
    t = _time_grid(config)
    p = config.model
    names = ("t", "E_sharp", "S", "Sigma")
    units = "# t [1/omega0], E_sharp [omega0], S [nat], Sigma [nat]"

    def one(r):
        m0 = initial_moments_product(r, config.theta, p.beta, p)
        rec = trajectory_record(t, m0, p, protocol="quench")
        cols = np.vstack([t, rec.energy_sharp, rec.entropy,
                          rec.entropy_production])
        return (f"relax_r{_slug(r)}.csv", units, names, cols)

    return _fan_out(one, config.r)


def _panels_driven(config):
    t = _time_grid(config)
    d = config.driving
    names = ("t", "E_sharp", "W_sharp", "S", "Sigma")
    units = ("# t [1/omega0], E_sharp [omega0], W_sharp [omega0], "
             "S [nat], Sigma [nat]")
    stem = config.scenario.replace("-", "_")

    def one(beta):
        p = replace(config.model, beta=beta)
        m0 = initial_moments_joint_gibbs(beta, p)
        rec = trajectory_record(t, m0, p, d, protocol="driven")
        cols = np.vstack([t, rec.energy_sharp, rec.work_sharp, rec.entropy,
                          rec.entropy_production])
        return (f"{stem}_beta{_slug(beta)}.csv", units, names, cols)

    return _fan_out(one, config.beta_list)


def _panels_weak_limit(config):
    zetas = config.zeta_list
    names = ("zeta", "measure")
    units = "# zeta [1], measure [omega0]"

    def one(scenario):
        vals = weak_coupling_measure(scenario, zetas)
        cols = np.vstack([np.asarray(zetas), np.asarray(vals)])
        return (f"weak_limit_{scenario}.csv", units, names, cols)

    return _fan_out(one, ("relaxation", "periodic"))


def _rand_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(dim=dim, entries=m / np.trace(m).real)


def _gibbs_of(h):
    w, v = np.linalg.eigh(h)
    g = np.exp(-(w - w.min()))
    g /= g.sum()
    return DensityMatrix(dim=h.shape[0], entries=(v * g) @ v.conj().T)


def _rand_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def _petz_instance(rng):
    """One seeded round of the recoverability demonstrations.

    Returns the data-processing gap for a recovered state over a
    noninteracting reference (zero within roundoff), for a block-built
    state sharing the reference's conditional blocks (zero), for the
    same state with a cross-block coherence added (strictly positive),
    and the monotonicity margin of two random states under partial
    trace (nonnegative).
    """
    ds, dr = 3, 4
    hs = _rand_hermitian(rng, ds)
    hr = _rand_hermitian(rng, dr)
    ref = _gibbs_of(np.kron(hs, np.eye(dr)) + np.kron(np.eye(ds), hr))
    lifted = petz_map(_rand_density(rng, ds), ref)
    gap_recovered = verify_thermo_initial_condition(lifted, ref, dim_s=ds)

    dim_r = 3
    s_a1 = _gibbs_of(_rand_hermitian(rng, 2)).entries
    s_b1r = _gibbs_of(_rand_hermitian(rng, dim_r)).entries
    s_b2r = _gibbs_of(_rand_hermitian(rng, 2 * dim_r)).entries
    ref_block = build_block_state(BlockSpec(
        blocks=((2, 1, 0.7, s_a1, s_b1r), (1, 2, 0.3, np.eye(1), s_b2r)),
        dim_r=dim_r))
    rho_block = build_block_state(BlockSpec(
        blocks=((2, 1, 0.45, _rand_density(rng, 2).entries, s_b1r),
                (1, 2, 0.55, np.eye(1), s_b2r)),
        dim_r=dim_r))
    gap_block = verify_thermo_initial_condition(rho_block, ref_block,
                                                dim_s=4)

    dim = rho_block.dim
    pert = 0.25 * rho_block.entries + 0.75 * np.eye(dim) / dim
    pert[0, 2 * dim_r] += 0.05
    pert[2 * dim_r, 0] += 0.05
    pert = DensityMatrix(dim=dim, entries=pert / np.trace(pert).real)
    gap_perturbed = verify_thermo_initial_condition(pert, ref_block,
                                                    dim_s=4)

    rho, sig = _rand_density(rng, 16), _rand_density(rng, 16)
    margin = relative_entropy(rho, sig) - relative_entropy(
        DensityMatrix(dim=4, entries=partial_trace(rho.entries, 4, 4, "a")),
        DensityMatrix(dim=4, entries=partial_trace(sig.entries, 4, 4, "a")))
    return gap_recovered, gap_block, gap_perturbed, margin


def _panels_petz(config):
    rng = np.random.default_rng(_PETZ_SEED)
    rows = [_petz_instance(rng) for _ in range(_PETZ_INSTANCES)]
    cols = np.vstack([np.arange(1.0, _PETZ_INSTANCES + 1.0),
                      np.asarray(rows).T])
    names = ("instance", "gap_recovered", "gap_block", "gap_perturbed",
             "monotonicity_margin")
    units = ("# instance [1], gap_recovered [nat], gap_block [nat], "
             "gap_perturbed [nat], monotonicity_margin [nat]")
    return [("petz_gaps.csv", units, names, cols)]


_PANEL_BUILDERS = {
    "equilibrium": _panels_equilibrium,
    "dos": _panels_dos,
    "relax": _panels_relax,
    "driven-damped": _panels_driven,
    "driven-periodic": _panels_driven,
    "weak-limit": _panels_weak_limit,
    "petz-demo": _panels_petz,
}


def _write_csv(path, unit_line, names, cols):
    cols = np.atleast_2d(np.asarray(cols, dtype=float))
    if cols.shape[0] != len(names):
        raise ValueError("column count mismatch")
    if not np.all(np.isfinite(cols)):
        raise ValueError("non-finite value in output table")
    lines = [unit_line, ",".join(names)]
    for row in cols.T:
        lines.append(",".join(format(v, ".17g") for v in row))
    with open(path, "w", newline="") as f:
        f.write("\r\n".join(lines) + "\r\n")


def _config_echo(config):
    echo = asdict(config)
    echo["model"] = asdict(config.model)
    if config.driving is not None:
        echo["driving"] = asdict(config.driving)
    for key in ("r", "beta_list", "kappa_list", "zeta_list"):
        echo[key] = list(echo[key])
    return echo


def run(config):
    """Execute one scenario; returns the list of paths written."""
    start = time.monotonic()
    os.makedirs(config.output_path, exist_ok=True)
    written = []
    try:
        panels = _PANEL_BUILDERS[config.scenario](config)
        outputs = []
        for filename, unit_line, names, cols in panels:
            path = os.path.join(config.output_path, filename)
            written.append(path)
            _write_csv(path, unit_line, names, cols)
            outputs.append({"file": filename, "columns": list(names),
                            "units": unit_line[2:]})
    except Exception as exc:
        for path in written:
            if os.path.exists(path):
                os.remove(path)
        raise RuntimeError(
            f"scenario {config.scenario!r} failed: {exc}") from exc
    manifest = {
        "scenario": config.scenario,
        "package_version": __version__,
        "inputs": _config_echo(config),
        "outputs": outputs,
        "threads": _thread_count(),
        "notes": _DEFAULT_NOTES.get(config.scenario, []),
        "runtime_seconds": round(time.monotonic() - start, 3),
    }
    manifest_path = os.path.join(config.output_path, "manifest.json")
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return written + [manifest_path]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mforce",
        description="Run a thermodynamics scenario and write CSV series "
                    "plus a JSON manifest.")
    parser.add_argument("config", nargs="?",
                        help="JSON config file (flags override it)")
    parser.add_argument("--scenario", choices=SCENARIOS)
    parser.add_argument("--kappa", type=float,
                        help="coupling override (also replaces kappa_list)")
    parser.add_argument("--beta", type=float,
                        help="inverse temperature override (also replaces "
                             "beta_list)")
    parser.add_argument("--t-max", type=float, dest="t_max")
    parser.add_argument("--out", help="output directory")
    args = parser.parse_args(argv)

    payload = {}
    if args.config:
        with open(args.config) as f:
            payload = json.load(f)
    if args.scenario:
        payload["scenario"] = args.scenario
    if args.kappa is not None:
        payload.setdefault("model", {})["kappa"] = args.kappa
        payload["kappa_list"] = [args.kappa]
    if args.beta is not None:
        payload.setdefault("model", {})["beta"] = args.beta
        payload["beta_list"] = [args.beta]
    if args.t_max is not None:
        payload["t_max"] = args.t_max
    if args.out:
        payload["out"] = args.out
    if "scenario" not in payload:
        parser.error("a config file or --scenario is required")

    config = scenario_config(payload)
    paths = run(config)
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
