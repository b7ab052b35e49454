"""Configuration, orchestration and deterministic artifact emission.

A run plan is a flat key-value configuration (INI text, one section per
experiment) or an equivalent flag mapping.  Parsing materializes every
default and rejects unknown keys and inconsistent combinations before any
computation starts.  Suites write their outputs into an artifact directory:
a canonical config echo, CSV tables with a leading ``#`` schema line, JSON
verdicts, and a manifest with content hashes.  Identical plans produce
byte-identical CSV/JSON outputs; wall-clock timestamps exist only in the
manifest.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import airy, estimates, fields, normal_form, smoothing
from .evolve import PotentialSpec, SolverConfig, conservation_report
from .evolve import evolve as run_evolution

__all__ = ["ConfigError", "Plan", "parse_config", "run_suite", "EXPERIMENTS"]


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, (list, tuple)):
        return ", ".join(_fmt(v) for v in x)
    return str(x)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_value(kind, text):
    if isinstance(text, str):
        text = text.strip()
    if kind is float:
        return float(text)
    if kind is int:
        return int(text)
    if kind is bool:
        return _parse_bool(text) if isinstance(text, str) else bool(text)
    if kind is str:
        return str(text)
    if kind == "float_list":
        if isinstance(text, (list, tuple)):
            return [float(v) for v in text]
        return [float(v) for v in text.replace(",", " ").split()]
    if kind == "int_list":
        if isinstance(text, (list, tuple)):
            return [int(v) for v in text]
        return [int(v) for v in text.replace(",", " ").split()]
    raise AssertionError(kind)


# key -> (type, default); None default means "derived later"
_COMMON = {"seed": (int, 42), "out_dir": (str, "artifacts"), "threads": (int, 1)}

EXPERIMENTS: dict[str, dict] = {
    "evolve": {
        "N": (int, 128),
        "M": (int, 0),
        "dt": (float, 2.5e-4),
        "t_end": (float, 10.0),
        "beta": (float, 2.0),
        "scheme": (str, "IFRK4"),
        "datum": (str, "coswave"),
        "s": (float, 0.0),
        "amplitude": (float, 1.0),
        "mean": (float, 0.0),
        "homogeneous": (bool, True),
        "samples": (int, 5),
        "hs": ("float_list", [1.0]),
        "pot_amplitude": (float, 0.0),
        "pot_k": (int, 1),
        "pot_speed": (float, 1.0),
    },
    "smoothing": {
        "s": (float, 0.0),
        "s1": ("float_list", [0.9, 1.5]),
        "ladder": ("int_list", [256, 512]),
        "horizon": (float, 5.0),
        "dt": (float, 1e-4),
        "scheme": (str, "RESONANT"),
        "amplitude": (float, 1e-3),
        "samples": (int, 5),
        "diff_tol": (float, 0.05),
        "growth_min": (float, 0.25),
        "assert_smoothing": (bool, False),
    },
    "mkdv-smoothing": {
        "s": (float, 1.0),
        "s1": ("float_list", [1.8]),
        "ladder": ("int_list", [128, 256]),
        "horizon": (float, 2.0),
        "dt": (float, 1e-4),
        "amplitude": (float, 0.1),
        "method": (str, "miura"),
        "samples": (int, 4),
        "diff_tol": (float, 0.05),
        "growth_min": (float, 0.25),
        "assert_smoothing": (bool, False),
    },
    "normalform-check": {
        "modes": (int, 16),
        "support": (int, 5),
        "trials": (int, 20),
        "times": ("float_list", [0.0, 0.37, 1.9]),
        "sweep_bound": (int, 30),
        "max_residual": (float, 1e-11),
    },
    "multiplier-scan": {
        "s": (float, 0.0),
        "s1": (float, 0.9),
        "eps": (float, 0.01),
        "K": (int, 40),
    },
    "bilinear-ensemble": {
        "s": (float, 0.0),
        "s1": (float, 1.0),
        "trials": (int, 20),
        "modes": (int, 64),
        "amplitude": (float, 1.0),
    },
    "resonant-ladder": {
        "s": (float, 0.0),
        "s1": (float, 1.5),
        "ladder": ("int_list", [64, 128, 256, 512]),
    },
    "talbot": {
        "time": (float, 2.0 * np.pi / 3.0),
        "grid": (int, 16384),
        "modes": (int, 4096),
        "ladder": ("int_list", [1024, 2048, 4096]),
        "out": (str, "talbot.csv"),
    },
}

# measured step-size envelopes for the explicit schemes (free constants
# rounded down); the resonance-based scheme has no wavenumber ceiling
_IFRK4_STABILITY = 4.5     # dt * N^2
_STRANG_STABILITY = 0.25   # dt * N


@dataclass(frozen=True)
class Plan:
    experiment: str
    seed: int
    out_dir: str
    threads: int
    params: dict = field(default_factory=dict)

    def echo(self) -> str:
        """Canonical flat text representation; byte-stable for equal plans."""
        lines = ["[run]",
                 f"experiment = {self.experiment}",
                 f"seed = {self.seed}",
                 f"threads = {self.threads}",
                 "",
                 f"[{self.experiment}]"]
        for key in sorted(self.params):
            lines.append(f"{key} = {_fmt(self.params[key])}")
        return "\n".join(lines) + "\n"


def _validate(experiment: str, params: dict, seed: int) -> None:
    if experiment == "smoothing":
        s = params["s"]
        if params["assert_smoothing"]:
            for s1 in params["s1"]:
                if s1 > 3 * s + 1 or s1 > s + 1:
                    raise ConfigError(
                        f"key 's1': value {s1} lies outside the smoothing range "
                        f"min(3s+1, s+1) = {min(3 * s + 1, s + 1)} while "
                        "assert_smoothing is set"
                    )
        if len(params["ladder"]) < 2:
            raise ConfigError("key 'ladder': need at least two truncations")
    if experiment in ("evolve",):
        if params["mean"] != 0.0 and params["homogeneous"]:
            raise ConfigError(
                "key 'mean': homogeneous norms require a mean-zero datum; "
                "set homogeneous = false or mean = 0"
            )
    scheme = params.get("scheme")
    dt = params.get("dt")
    if scheme is not None and dt is not None:
        n_max = max(params.get("ladder", [params.get("N", 0)]))
        if scheme == "IFRK4" and dt * n_max ** 2 > _IFRK4_STABILITY:
            raise ConfigError(
                f"key 'dt': {dt:g} violates the IFRK4 stability envelope "
                f"dt*N^2 <= {_IFRK4_STABILITY:g} at N = {n_max}"
            )
        if scheme == "STRANG" and dt * n_max > _STRANG_STABILITY:
            raise ConfigError(
                f"key 'dt': {dt:g} violates the advective envelope "
                f"dt*N <= {_STRANG_STABILITY:g} at N = {n_max}"
            )


def parse_config(source) -> Plan:
    """Build a fully-resolved plan from an INI file path or a flag mapping.

    Every default is materialized, unknown keys are rejected by name, and
    inconsistent combinations fail before execution.
    """
    if isinstance(source, str):
        cp = configparser.ConfigParser()
        cp.optionxform = str
        read = cp.read(source)
        if not read:
            raise ConfigError(f"cannot read config file {source!r}")
        raw: dict[str, dict] = {sec: dict(cp[sec]) for sec in cp.sections()}
    elif isinstance(source, dict):
        raw = {"run": dict(source)}
    else:
        raise ConfigError("config source must be a path or a mapping")

    run = raw.pop("run", {})
    experiment = run.pop("experiment", None)
    if experiment is None:
        raise ConfigError("missing key 'experiment'")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")

    common = {}
    for key, (kind, default) in _COMMON.items():
        common[key] = _parse_value(kind, run.pop(key)) if key in run else default

    # experiment keys may come from the run section (flag style) or from a
    # section named after the experiment (file style)
    section = raw.pop(experiment, {})
    for extra in raw:
        raise ConfigError(f"unknown section {extra!r}")
    merged = dict(section)
    merged.update(run)

    schema = EXPERIMENTS[experiment]
    params = {}
    for key, (kind, default) in schema.items():
        if key in merged:
            try:
                params[key] = _parse_value(kind, merged.pop(key))
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"key {key!r}: {exc}") from exc
        else:
            params[key] = default
    for stray in merged:
        raise ConfigError(f"unknown key {stray!r} for experiment {experiment!r}")

    _validate(experiment, params, common["seed"])
    return Plan(experiment=experiment, seed=common["seed"], out_dir=common["out_dir"],
                threads=common["threads"], params=params)


# ----------------------------------------------------------------------
# emission helpers
# ----------------------------------------------------------------------


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write("#" + ",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _sample_times(horizon: float, n: int) -> list[float]:
    return [horizon * (i + 1) / n for i in range(n)]


# ----------------------------------------------------------------------
# experiment runners: each returns ({filename: text}, ok)
# ----------------------------------------------------------------------


def _build_datum(params: dict, N: int, seed: int) -> fields.FourierField:
    name = params.get("datum", "random")
    if name == "coswave":
        return fields.cosine_field(N, amplitude=params.get("amplitude", 1.0))
    if name == "squarewave":
        return fields.square_wave(N)
    if name == "random":
        return fields.random_sobolev_data(params["s"], N, seed, params["amplitude"])
    raise ConfigError(f"unknown datum {name!r}")


def _run_evolve(plan: Plan):
    p = plan.params
    g = _build_datum(p, p["N"], plan.seed)
    if p["pot_amplitude"] != 0.0:
        pot = PotentialSpec.traveling_cosine(p["pot_amplitude"], p["pot_k"], p["pot_speed"])
    else:
        pot = PotentialSpec.zero()
    cfg = SolverConfig(dt=p["dt"], beta=p["beta"], scheme=p["scheme"],
                       hs_norms=tuple(p["hs"]), M=p["M"] or None)
    times = _sample_times(p["t_end"], p["samples"])
    traj = run_evolution(g, pot, cfg, [0.0] + times)
    rep = conservation_report(traj, pot)
    header = ["t", "momentum", "l2"] + [f"h{s:g}" for s in p["hs"]]
    rows = [[s.t, s.momentum, s.l2] + [s.hs[h] for h in p["hs"]] for s in traj]
    files = {"evolve.csv": _csv(header, rows)}
    for s in traj:
        buf = io.StringIO()
        fields.dump_coefficients(s.state, buf)
        files[f"coeffs_t{s.t:g}.txt"] = buf.getvalue()
    verdict = {
        "momentum_max": rep.momentum_max,
        "l2_rel_drift": rep.l2_rel_drift,
        "gronwall_ok": rep.gronwall_ok,
        "gronwall_min_margin": rep.gronwall_min_margin,
    }
    files["conservation.json"] = _json(verdict)
    ok = rep.gronwall_ok is not False
    return files, ok


def _run_smoothing(plan: Plan, equation: str):
    p = plan.params
    cfg = SolverConfig(dt=p["dt"], scheme=p.get("scheme", "IFRK4"))
    times = _sample_times(p["horizon"], p["samples"])
    study = smoothing.resolution_stability_study(
        p["s"], p["s1"], p["ladder"], plan.seed, cfg, times,
        amplitude=p["amplitude"], equation=equation,
        diff_tol=p["diff_tol"], growth_min=p["growth_min"],
        mkdv_method=p.get("method", "direct"), threads=plan.threads,
    )
    header = ["t"]
    rows = [[t] for t in study.times]
    for s1 in study.s1_list:
        for N in study.sizes:
            header += [f"u_h{s1:g}_N{N}", f"diff_h{s1:g}_N{N}"]
            rep = study.reports[N]
            for i, _ in enumerate(study.times):
                rows[i] += [rep.norms_u[s1][i], rep.norms_diff[s1][i]]
    files = {f"{equation}_ladder.csv": _csv(header, rows)}
    verdict = {
        "s": p["s"],
        "ladder": list(study.sizes),
        "diff_tol": study.diff_tol,
        "growth_min": study.growth_min,
        "verdicts": {f"{s1:g}": bool(study.verdicts[s1]) for s1 in study.s1_list},
    }
    files["verdict.json"] = _json(verdict)
    ok = True
    if p["assert_smoothing"]:
        ok = all(study.verdicts.values())
    return files, ok


def _run_normalform(plan: Plan):
    p = plan.params
    worst = 0.0
    rng_base = plan.seed
    N = p["modes"]
    support = p["support"]
    for trial in range(p["trials"]):
        v = _random_supported(N, support, rng_base + trial, 1.0)
        lam = _random_supported(N, support, rng_base + 10_000 + trial, 0.5)
        dlam = _random_supported(N, support, rng_base + 20_000 + trial, 0.7)
        for t in p["times"]:
            res, scale = normal_form.normal_form_residual(v, lam, dlam, t)
            worst = max(worst, res / scale)
    cases, ok_sweep = normal_form.sweep_cubic_sum_identity(p["sweep_bound"])
    _, ok_bilinear = normal_form.sweep_bilinear_identity(100)
    result = {
        "max_residual": worst,
        "trials": p["trials"],
        "N": N,
        "identity_cases": cases,
        "identities_ok": bool(ok_sweep and ok_bilinear),
    }
    ok = worst <= p["max_residual"] and ok_sweep and ok_bilinear
    return {"normalform.json": _json(result)}, ok


def _random_supported(N: int, support: int, seed: int, scale: float) -> fields.FourierField:
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    mags = rng.normal(size=support) * scale
    phases = rng.uniform(0.0, 2.0 * np.pi, size=support)
    coeffs[N + 1 : N + 1 + support] = mags * np.exp(1j * phases)
    return fields.FourierField(fields._hermitize(coeffs), real=True, mean_zero=True)


def _run_multiplier(plan: Plan):
    p = plan.params
    r = estimates.multiplier_scan(p["s"], p["s1"], p["eps"], p["K"])
    out = {"max_ratio": r.max_ratio, "argmax": list(r.argmax), "K": r.K,
           "s": r.s, "s1": r.s1, "eps": r.eps, "evaluated": r.evaluated}
    return {"multiplier.json": _json(out)}, True


def _run_bilinear(plan: Plan):
    p = plan.params
    ratio = estimates.bilinear_ratio_ensemble(p["s"], p["s1"], p["trials"],
                                              p["modes"], plan.seed, p["amplitude"])
    out = {"max_ratio": ratio, "trials": p["trials"], "N": p["modes"],
           "s": p["s"], "s1": p["s1"]}
    return {"bilinear.json": _json(out)}, True


def _run_resonant_ladder(plan: Plan):
    p = plan.params
    lad = estimates.resonant_sharpness(p["s"], p["s1"], p["ladder"])
    out = {"s": lad.s, "s1": lad.s1, "sizes": list(lad.sizes),
           "norms": list(lad.norms), "slope": lad.slope}
    return {"resonant_ladder.json": _json(out)}, True


def _run_talbot(plan: Plan):
    p = plan.params
    N, M = p["modes"], p["grid"]
    if M < 3 * N + 1:
        M = fields._next_pow2(3 * N + 1)
    g = fields.square_wave(N)
    grid = fields.GridSpec(N, M)
    prof = airy.talbot_profile(g, p["time"], grid)
    jumps = airy.jump_metric(prof, p["ladder"])
    x = grid.x
    rows = [[x[i], prof[i]] for i in range(len(prof))]
    files = {p["out"]: _csv(["x", "value"], rows)}
    sidecar = {"time": p["time"], "modes": N, "grid": M,
               "jump_metric": {str(mm): jumps[mm] for mm in p["ladder"]}}
    files[p["out"] + ".json"] = _json(sidecar)
    return files, True


_RUNNERS = {
    "evolve": _run_evolve,
    "smoothing": lambda plan: _run_smoothing(plan, "kdv"),
    "mkdv-smoothing": lambda plan: _run_smoothing(plan, "mkdv"),
    "normalform-check": _run_normalform,
    "multiplier-scan": _run_multiplier,
    "bilinear-ensemble": _run_bilinear,
    "resonant-ladder": _run_resonant_ladder,
    "talbot": _run_talbot,
}


def run_suite(plan: Plan) -> int:
    """Execute a plan, write its artifact directory, return the exit status.

    The directory holds the canonical config echo, the experiment's CSV/JSON
    outputs, and a manifest with a sha256 per file.  Exit status 0 iff every
    asserted criterion of the plan passed.
    """
    os.makedirs(plan.out_dir, exist_ok=True)
    files, ok = _RUNNERS[plan.experiment](plan)
    files = {"config_echo.ini": plan.echo(), **files}
    hashes = {}
    for name, text in files.items():
        path = os.path.join(plan.out_dir, name)
        data = text.encode()
        with open(path, "wb") as fh:
            fh.write(data)
        hashes[name] = hashlib.sha256(data).hexdigest()
    import time as _time

    manifest = {
        "experiment": plan.experiment,
        "plan_sha256": hashlib.sha256(plan.echo().encode()).hexdigest(),
        "created": _time.strftime("%Y-%m-%dT%H:%M:%S"),
        "files": hashes,
        "ok": bool(ok),
    }
    with open(os.path.join(plan.out_dir, "manifest.json"), "w") as fh:
        fh.write(_json(manifest))
    return 0 if ok else 1
