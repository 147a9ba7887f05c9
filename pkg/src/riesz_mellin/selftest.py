"""Quick invariant suite run by ``riesz-mellin selftest``."""
import contextlib
import time
from dataclasses import dataclass

import numpy as np

from . import mellin
from .experiments import oracle_points, right_angle_oracle_error
from .gamma import gamma
from .geometry import build_boundary
from .kernel import kernel_eval
from .quadrature import Bump, radial_cutoff
from .riesz import assemble_riesz, corner_identity_check
from .sobolev import continuity_modulus_estimate, polygon_space
from .symbol import residue_at


@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.module}.{self.name}: {self.value:.3e} (tol {self.tolerance:.0e}, {self.seconds:.2f}s)"


def _parseval():
    u = mellin.GridFunction.from_bump(Bump(1.5, 0.5, 1.0))
    lhs, _, diff = mellin.parseval_residual(u, 0.1)
    return diff / lhs, 1e-8


def _round_trip():
    b = Bump(1.5, 0.5, 1.0)
    u = mellin.GridFunction.from_bump(b)
    line = mellin.choose_line(u, 0.0)
    r = np.linspace(1.05, 1.95, 19)
    back = mellin.mellin_inverse(mellin.mellin_forward(u, line), r).real
    return float(np.max(np.abs(back - b(r)))), 1e-6


def _gamma_pair():
    # int_0^inf e^(-r) r^(-lam-1) dr = Gamma(-lam) on Re lam < 0
    g = mellin.LogGrid.from_r(1e-32, 60.0, 2001)
    u = mellin.GridFunction.from_callable(lambda r: np.exp(-r), g, left=mellin.Tail(0.0, 1.0))
    lam = -0.5 + 1j * np.linspace(-5.0, 5.0, 21)
    ref = np.array([gamma(-z) for z in lam])
    return float(np.max(np.abs(mellin.mellin_at(u, lam) - ref) / np.abs(ref))), 1e-8


def _gamma_oracle():
    return right_angle_oracle_error(oracle_points(20, 0)), 1e-8


def _residue():
    return abs(residue_at(np.pi / 4, 0.25) + 1.0), 1e-6


def _kernel_symmetry():
    rng = np.random.default_rng(1)
    alpha = rng.uniform(0.1, 3.0, 200)
    tau = np.exp(rng.uniform(-5, 5, 200))
    a = np.array([kernel_eval(x, t) for x, t in zip(alpha, tau)])
    b = np.array([kernel_eval(x, 1.0 / t) for x, t in zip(alpha, tau)])
    return float(np.max(np.abs(a - b) / a)), 1e-13


def _matrix_symmetry():
    bd = build_boundary([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])
    op = assemble_riesz(bd, polygon_space(bd, 48))
    return op.asymmetry / np.abs(op.matrix).max(), 1e-10


def _corner_identity():
    rng = np.random.default_rng(2)
    worst = 0.0
    for k in range(3):
        theta = rng.uniform(0.1, np.pi - 0.1)
        fs = [Bump.random(rng) for _ in range(4)]
        chi = (lambda r: radial_cutoff(r, 3.0)) if k == 2 else None
        lhs, _, res = corner_identity_check(theta, *fs, chi=chi)
        worst = max(worst, res / abs(lhs))
    return worst, 1e-8


def _estimator_2x2():
    # M = I, S = diag(1, 4), A = I: sigma^2 is the largest eigenvalue of S
    s = continuity_modulus_estimate(np.eye(2), np.eye(2), np.diag([1.0, 4.0]))
    return abs(s - 2.0), 1e-12


CHECKS = [
    ("mellin", "parseval", _parseval),
    ("mellin", "round_trip", _round_trip),
    ("mellin", "gamma_pair", _gamma_pair),
    ("symbol", "gamma_oracle", _gamma_oracle),
    ("symbol", "residue_quarter", _residue),
    ("kernel", "symmetry", _kernel_symmetry),
    ("riesz", "matrix_symmetry", _matrix_symmetry),
    ("riesz", "corner_identity", _corner_identity),
    ("sobolev", "estimator_2x2", _estimator_2x2),
]

FAULTS = ("quadrature",)


@contextlib.contextmanager
def injected_fault(name):
    """Corrupt a quadrature table for the duration of the block."""
    if name is None:
        yield
        return
    if name != "quadrature":
        raise ValueError(f"unknown fault {name!r}; choose from {FAULTS}")
    original = mellin.line_weights

    def corrupted(line):
        w = original(line)
        w[1::2] *= 1.01
        return w

    mellin.line_weights = corrupted
    try:
        yield
    finally:
        mellin.line_weights = original


def run(filter=None, fault=None, report=print):
    """Run the checks whose module or name contains ``filter``; returns the results."""
    results = []
    with injected_fault(fault):
        for module, name, fn in CHECKS:
            if filter and filter not in module and filter not in name:
                continue
            t0 = time.perf_counter()
            try:
                value, tol = fn()
                ok = bool(np.isfinite(value) and value < tol)
            except Exception as exc:  # a crashing check is a failing check
                report(f"ERROR {module}.{name}: {exc!r}")
                value, tol, ok = float("nan"), float("nan"), False
            res = CheckResult(module, name, ok, float(value), float(tol), time.perf_counter() - t0)
            report(res.line())
            results.append(res)
    return results
