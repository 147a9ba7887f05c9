"""Verification sweeps behind the command-line tool, with reproducible reports.

Each sweep takes an ExperimentConfig and returns a ReportBundle holding a
JSON summary, CSV tables and a manifest. Every verdict records the
tolerance it was judged against.
"""
import csv
import dataclasses
import json
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__, _backend
from .errors import ConfigError, LadderError
from .gamma import right_angle_symbol
from .geometry import build_boundary
from .quadrature import radial_cutoff
from .riesz import assemble_riesz, corner_continuity_ratio
from .sobolev import continuity_modulus_estimate, gram_matrices, polygon_space, stiffness_matrix
from .symbol import (MellinSymbol, continuity_moduli, decay_profile, nearest_pole, symbol)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

POLYGONS = {
    "square": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
    "L": [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]],
}


@dataclass
class ExperimentConfig:
    # symbol report
    alphas: list = field(default_factory=lambda: [np.pi / 4, np.pi / 2])
    Q: int = 3
    lines: list = field(default_factory=lambda: [0.0, 0.1])
    profile_powers: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    profile_xi_max: float = 1000.0
    profile_points: int = 401
    moduli_xi_max: float = 60.0
    moduli_points: int = 241
    oracle_samples: int = 100
    residue_tol: float = 1e-6
    oracle_tol: float = 1e-8
    decay_floor: float = 1e-6
    moduli_drift_tol: float = 0.01
    # continuity-modulus ladder
    polygon: object = "square"
    ladder: list = field(default_factory=lambda: [32, 64, 128, 256])
    plateau_tol: float = 0.05
    memory_limit_mb: float = 2048.0
    contrast: bool = True
    # corner continuity
    thetas: list = field(default_factory=lambda: [np.pi / 6, np.pi / 4, np.pi / 3, 3 * np.pi / 4])
    trials: int = 50
    resolutions: list = field(default_factory=lambda: [20, 40])
    cutoff_radius: float = 4.0
    drift_tol: float = 0.05
    zero_tol: float = 1e-10
    # shared
    seed: int = 0
    threads: int = 1
    out: Optional[str] = None

    @classmethod
    def load(cls, path=None, overrides=None):
        """Defaults, then a TOML file, then a dict of overrides."""
        data = {}
        if path is not None:
            try:
                with open(path, "rb") as fh:
                    data = tomllib.load(fh)
            except (OSError, tomllib.TOMLDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data.update(overrides or {})
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        return dataclasses.asdict(self)

    def validate(self, command):
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if command == "symbol":
            if len(self.alphas) == 0:
                raise ConfigError("alpha list is empty")
            for a in self.alphas:
                if not 0.0 < float(a) < np.pi:
                    raise ConfigError(f"alpha {a} outside (0, pi); angles are in radians")
            if self.Q < 1:
                raise ConfigError("Q must be at least 1")
        elif command == "theorem1":
            if len(self.ladder) < 3:
                raise ConfigError("refinement ladder needs at least 3 levels")
            if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
                raise ConfigError("ladder resolutions must be strictly increasing")
            polygon_vertices(self.polygon)
        elif command == "corner":
            if self.trials < 1:
                raise ConfigError("trials must be at least 1")
            if len(self.thetas) == 0:
                raise ConfigError("theta list is empty")
            for t in self.thetas:
                if not 0.0 < float(t) < np.pi:
                    raise ConfigError(f"theta {t} outside (0, pi); angles are in radians")
            if len(self.resolutions) < 2:
                raise ConfigError("need at least two resolutions for a drift verdict")
            if any(b <= a for a, b in zip(self.resolutions, self.resolutions[1:])):
                raise ConfigError("resolutions must be strictly increasing")


def polygon_vertices(spec):
    if isinstance(spec, str):
        if spec in POLYGONS:
            return POLYGONS[spec]
        if os.path.exists(spec):
            with open(spec) as fh:
                return json.load(fh)["vertices"]
        raise ConfigError(f"unknown polygon {spec!r}")
    if isinstance(spec, dict) and "vertices" in spec:
        return spec["vertices"]
    if isinstance(spec, (list, tuple)) and len(spec) >= 3:
        return [list(map(float, v)) for v in spec]
    raise ConfigError("polygon must be a preset name, a JSON path or a vertex list")


def _check(value, tol, passed):
    return {"value": value, "tolerance": tol, "passed": bool(passed)}


@dataclass
class ReportBundle:
    command: str
    config: ExperimentConfig
    results: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks.values())

    def summary(self):
        return {
            "command": self.command,
            "seed": self.config.seed,
            "results": self.results,
            "checks": self.checks,
            "passed": self.passed,
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }

    def manifest(self):
        return {
            "command": self.command,
            "config": self.config.to_dict(),
            "version": __version__,
            "backend": _backend.BACKEND,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "files": ["summary.json", "manifest.json"] + sorted(f"{k}.csv" for k in self.tables),
        }

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(_jsonable(self.summary()), fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
            json.dump(_jsonable(self.manifest()), fh, indent=2, sort_keys=True)
            fh.write("\n")
        for name, (header, rows) in self.tables.items():
            with open(os.path.join(out_dir, f"{name}.csv"), "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                for row in rows:
                    w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _pool_map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def oracle_points(n, seed, exclusion=0.05, im_max=3.0):
    """n points with |Re lam| <= 1, |Im lam| <= im_max kept at least ``exclusion`` from every pole.

    Off the strip the continuation sums terms of size 1/|lam| to a value of
    size exp(-pi |Im lam|), so relative accuracy degrades for large |Im lam|.
    """
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        lam = complex(rng.uniform(-1.0, 1.0), rng.uniform(-im_max, im_max))
        if abs(lam - nearest_pole(lam)) >= exclusion:
            pts.append(lam)
    return pts


def right_angle_oracle_error(points, Q=3):
    """Largest relative error of the symbol at alpha = pi/2 against the Gamma formula."""
    errs = []
    for lam in points:
        ref = right_angle_symbol(lam)
        errs.append(abs(symbol(np.pi / 2, lam, Q) - ref) / abs(ref))
    return float(max(errs))


def _symbol_item(cfg, alpha):
    sym = MellinSymbol(alpha, cfg.Q)
    res = sym.residues()
    xi = np.linspace(0.0, cfg.profile_xi_max, cfg.profile_points)
    profiles = {}
    rows = []
    for mu in cfg.lines:
        for p in cfg.profile_powers:
            prof = decay_profile(alpha, mu, p, xi)
            lw = prof.log_weighted
            peak = np.max(lw[np.isfinite(lw)])
            end = lw[-1] - peak
            profiles[f"mu={mu!r},p={p}"] = {
                "xi0": prof.xi0,
                "log10_end_over_peak": float(end / np.log(10.0)),
            }
            rows += [(alpha, mu, p, x, m, w) for x, m, w in prof.rows()]
    mods = [continuity_moduli(alpha, mu, cfg.moduli_xi_max, cfg.moduli_points) for mu in cfg.lines]
    fine = [continuity_moduli(alpha, mu, cfg.moduli_xi_max, 2 * cfg.moduli_points - 1) for mu in cfg.lines]
    return alpha, res, profiles, rows, mods, fine


def symbol_report(cfg):
    """Residues, decay profiles and moduli per angle; the Gamma oracle at pi/2."""
    cfg.validate("symbol")
    bundle = ReportBundle("symbol", cfg)
    items = _pool_map(lambda a: _symbol_item(cfg, float(a)), cfg.alphas, cfg.threads)
    prof_rows, mod_rows = [], []
    per_alpha = {}
    for alpha, res, profiles, rows, mods, fine in items:
        key = repr(alpha)
        r_plus = res[0.25]
        r_minus = res[-0.25]
        drift = 0.0
        for m, f in zip(mods, fine):
            for name in ("m0", "m1", "m_diff"):
                a, b = getattr(m, name), getattr(f, name)
                if a != 0 or b != 0:
                    drift = max(drift, abs(a - b) / max(abs(a), abs(b)))
            mod_rows.append((alpha, m.mu, m.m0, m.m1, m.m_diff, m.xi0))
        per_alpha[key] = {
            "residue_at_quarter": r_plus.real,
            "residue_at_minus_quarter": r_minus.real,
            "residues": {repr(k): [v.real, v.imag] for k, v in res.items()},
            "moduli": {repr(m.mu): {"m0": m.m0, "m1": m.m1, "m_diff": m.m_diff, "xi0": m.xi0}
                       for m in mods},
            "moduli_drift": drift,
            "profiles": profiles,
        }
        bundle.checks[f"residue_quarter[{key}]"] = _check(
            abs(r_plus + 1.0), cfg.residue_tol, abs(r_plus + 1.0) < cfg.residue_tol)
        bundle.checks[f"residue_minus_quarter[{key}]"] = _check(
            abs(r_minus - 1.0), cfg.residue_tol, abs(r_minus - 1.0) < cfg.residue_tol)
        worst_end = max(p["log10_end_over_peak"] for p in profiles.values())
        bundle.checks[f"decay[{key}]"] = _check(
            worst_end, float(np.log10(cfg.decay_floor)), worst_end < np.log10(cfg.decay_floor))
        onset = max(p["xi0"] for p in profiles.values())
        bundle.checks[f"decay_onset[{key}]"] = _check(onset, cfg.profile_xi_max, onset < cfg.profile_xi_max)
        bundle.checks[f"moduli_stability[{key}]"] = _check(drift, cfg.moduli_drift_tol, drift < cfg.moduli_drift_tol)
        prof_rows += rows
    bundle.results["alphas"] = per_alpha
    if any(abs(float(a) - np.pi / 2) < 1e-12 for a in cfg.alphas):
        err = right_angle_oracle_error(oracle_points(cfg.oracle_samples, cfg.seed), cfg.Q)
        bundle.results["oracle"] = {"samples": cfg.oracle_samples, "max_relative_error": err}
        bundle.checks["right_angle_oracle"] = _check(err, cfg.oracle_tol, err < cfg.oracle_tol)
    bundle.tables["profiles"] = (["alpha", "mu", "p", "xi", "abs_symbol", "weighted"], prof_rows)
    bundle.tables["moduli"] = (["alpha", "mu", "m0", "m1", "m_diff", "xi0"], mod_rows)
    return bundle


def _estimated_mb(n):
    # dense A, M, S, the solve and the generalized eigenproblem: about eight n x n arrays
    return 8.0 * n * n * 8.0 / 2 ** 20


def theorem1_level(boundary, n, contrast=True):
    """Discrete moduli L^2 -> H^(1/2) and, for contrast, L^2 -> H^1 at one mesh level."""
    sp = polygon_space(boundary, n)
    A = assemble_riesz(boundary, sp).matrix
    G = gram_matrices(sp)
    sigma = continuity_modulus_estimate(A, G.M, G.S)
    sigma1 = None
    if contrast:
        sigma1 = continuity_modulus_estimate(A, G.M, G.M + stiffness_matrix(sp))
    return {"dofs": sp.n_dofs, "h_max": float(sp.element_lengths.max()),
            "sigma": sigma, "sigma_h1": sigma1}


def theorem1_sweep(cfg, out_dir=None):
    """Continuity modulus along a refinement ladder; plateau and contrast verdicts.

    Completed levels are written to ``out_dir`` before a LadderError is raised.
    """
    cfg.validate("theorem1")
    bundle = ReportBundle("theorem1", cfg)
    boundary = build_boundary(polygon_vertices(cfg.polygon))
    levels = []
    bundle.results["polygon"] = boundary.vertices.tolist()
    for n in cfg.ladder:
        if _estimated_mb(n) > cfg.memory_limit_mb:
            bundle.results["levels"] = levels
            bundle.results["aborted_at"] = n
            bundle.checks["ladder_complete"] = _check(len(levels), len(cfg.ladder), False)
            bundle.tables["ladder"] = _ladder_table(levels)
            if out_dir is not None:
                bundle.write(out_dir)
            raise LadderError(
                f"level with {n} dofs needs about {_estimated_mb(n):.0f} MB, over the "
                f"{cfg.memory_limit_mb:.0f} MB limit", partial=levels)
        levels.append(theorem1_level(boundary, n, cfg.contrast))
    bundle.results["levels"] = levels
    s = [lv["sigma"] for lv in levels]
    steps = [(b - a) / a for a, b in zip(s, s[1:])]
    bundle.results["relative_steps"] = steps
    bundle.checks["increasing"] = _check(min(steps), 0.0, all(d > 0 for d in steps))
    bundle.checks["plateau"] = _check(abs(steps[-1]), cfg.plateau_tol, abs(steps[-1]) < cfg.plateau_tol)
    if cfg.contrast:
        s1 = [lv["sigma_h1"] for lv in levels]
        steps1 = [(b - a) / a for a, b in zip(s1, s1[1:])]
        bundle.results["relative_steps_h1"] = steps1
        # the H^1 target must keep growing: failing to saturate is the expected outcome
        bundle.checks["contrast_not_saturating"] = _check(
            steps1[-1], cfg.plateau_tol, steps1[-1] >= cfg.plateau_tol)
    bundle.tables["ladder"] = _ladder_table(levels)
    return bundle


def _ladder_table(levels):
    rows = [(lv["dofs"], lv["h_max"], lv["sigma"],
             "" if lv["sigma_h1"] is None else lv["sigma_h1"]) for lv in levels]
    return (["dofs", "h_max", "sigma_half", "sigma_h1"], rows)


def corner_continuity(cfg):
    """Sup ratios of the corner difference operator per angle and resolution."""
    cfg.validate("corner")
    bundle = ReportBundle("corner", cfg)
    radius = float(cfg.cutoff_radius)
    chi = lambda r: radial_cutoff(r, radius)
    work = [(float(th), int(res)) for th in cfg.thetas for res in cfg.resolutions]
    out = _pool_map(lambda it: corner_continuity_ratio(it[0], chi, cfg.trials, it[1], cfg.seed),
                    work, cfg.threads)
    by_theta = {}
    rows = []
    for (th, res), cr in zip(work, out):
        by_theta.setdefault(th, []).append((res, cr))
        rows.append((th, res, cr.ratio, cr.seed))
    results = {}
    for th, lst in by_theta.items():
        ratios = [cr.ratio for _, cr in lst]
        key = repr(th)
        finite = all(np.isfinite(ratios))
        if th == np.pi / 2:
            bundle.checks[f"zero[{key}]"] = _check(max(ratios), cfg.zero_tol, max(ratios) < cfg.zero_tol)
            drift = 0.0
        else:
            drift = abs(ratios[-1] - ratios[-2]) / ratios[-2]
            bundle.checks[f"drift[{key}]"] = _check(drift, cfg.drift_tol, finite and drift < cfg.drift_tol)
        results[key] = {"ratios": {str(res): cr.ratio for res, cr in lst},
                        "maximizing_seeds": {str(res): cr.seed for res, cr in lst},
                        "drift": drift}
    bundle.results["thetas"] = results
    bundle.results["cutoff_radius"] = radius
    bundle.tables["corner_ratios"] = (["theta", "per_decade", "ratio", "maximizing_seed"], rows)
    return bundle
