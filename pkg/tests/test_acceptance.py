"""Acceptance criteria 1-9, one pass/fail line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest

from riesz_mellin.experiments import ExperimentConfig, corner_continuity, oracle_points, theorem1_sweep
from riesz_mellin.gamma import gamma, right_angle_symbol
from riesz_mellin.mellin import (GridFunction, LogGrid, Tail, choose_line, mellin_at, mellin_forward,
                                 mellin_inverse, parseval_residual)
from riesz_mellin.quadrature import Bump, radial_cutoff
from riesz_mellin.riesz import (apply_corner_difference, corner_identity_check, relative_l2_difference,
                                theta_norm_ratio)
from riesz_mellin.sobolev import (geometric_nodes, halfline_space, mellin_half_seminorm,
                                  slobodeckii_seminorm)
from riesz_mellin.symbol import (continuity_moduli, decay_profile, nearest_pole, residue_at,
                                 symbol_direct, symbol_extended)

# measured on the first run and locked; a later run must reproduce them
LOCKED_EQUIVALENCE = [7.106345147020124, 7.494759173867137, 7.643559115761636, 7.29832856387182,
                      7.58175264885628, 7.135715521951519, 7.514078040696014, 7.689507578274243,
                      7.639853734150702, 7.646958245287502]
LOCKED_THETA_RATIOS = [1.0841377722989276, 1.1247230642360722, 1.0712935417784437, 1.0374266910486347,
                       1.089904027682146, 1.1042566271851568, 1.0609229918407104, 1.052597602406093,
                       1.0383558100340458, 1.1594030671431517]
LOCK_RTOL = 1e-6


class Verdict:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures = []
        self.facts = []
        self.t0 = time.perf_counter()

    def need(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.facts.append(text)

    def finish(self, budget):
        dt = time.perf_counter() - self.t0
        self.need(dt < budget, f"runtime {dt:.1f}s over {budget}s")
        self.note(f"{dt:.1f}s")
        self.passed = not self.failures
        status = "PASS" if self.passed else "FAIL"
        detail = "; ".join(self.facts + [f"failed: {f}" for f in self.failures])
        self.line = f"criterion {self.number} [{status}] {self.title}: {detail}"
        return self


def criterion_1():
    v = Verdict(1, "closed-form symbol oracle at alpha = pi/2")
    outside = oracle_points(100, 1)
    rng = np.random.default_rng(2)
    inside = [complex(rng.uniform(-0.24, 0.24), rng.uniform(-3, 3)) for _ in range(100)]
    ext = max(abs(symbol_extended(np.pi / 2, z) - right_angle_symbol(z)) / abs(right_angle_symbol(z))
              for z in outside + inside)
    direct = max(abs(symbol_direct(np.pi / 2, z) - right_angle_symbol(z)) / abs(right_angle_symbol(z))
                 for z in inside)
    v.need(ext < 1e-8, f"extended error {ext:.2e}")
    v.need(direct < 1e-8, f"direct error {direct:.2e}")
    v.note(f"max rel err extended {ext:.1e}, direct {direct:.1e}")
    return v.finish(10)


def criterion_2():
    v = Verdict(2, "residues at +-1/4")
    angles = [np.pi / 6, np.pi / 4, np.pi / 2, 3 * np.pi / 4]
    plus = [residue_at(a, 0.25) for a in angles]
    minus = [residue_at(a, -0.25) for a in angles]
    spread = max(abs(x - y) for x in plus for y in plus)
    v.need(spread < 1e-6, f"pairwise spread {spread:.2e}")
    dev_p = max(abs(r + 1) for r in plus)
    dev_m = max(abs(r - 1) for r in minus)
    v.need(dev_p < 1e-6, f"|res(1/4) + 1| = {dev_p:.2e}")
    v.need(dev_m < 1e-6, f"|res(-1/4) - 1| = {dev_m:.2e}")
    v.note(f"|res+1| {dev_p:.1e}, |res-1| {dev_m:.1e}, spread {spread:.1e}")
    return v.finish(30)


def criterion_3():
    v = Verdict(3, "Mellin-diagonal vs direct corner difference")
    rng = np.random.default_rng(3)
    bumps = [Bump.random(rng) for _ in range(10)]
    worst = 0.0
    for theta in (np.pi / 6, np.pi / 4, 3 * np.pi / 4):
        for b in bumps:
            d = apply_corner_difference(theta, b, "direct")
            m = apply_corner_difference(theta, b, "mellin")
            worst = max(worst, relative_l2_difference(m, d))
    v.need(worst < 1e-6, f"relative L2 {worst:.2e}")
    v.note(f"max relative L2 {worst:.1e} over 30 cases")
    return v.finish(60)


def criterion_4():
    v = Verdict(4, "corner identity with and without cutoff")
    rng = np.random.default_rng(4)
    chi = lambda r: radial_cutoff(r, 3.0)
    worst = {False: 0.0, True: 0.0}
    for cut in (False, True):
        for _ in range(20):
            theta = rng.uniform(0.05, np.pi - 0.05)
            fs = [Bump.random(rng) for _ in range(4)]
            lhs, _, res = corner_identity_check(theta, *fs, chi=chi if cut else None)
            worst[cut] = max(worst[cut], res / abs(lhs))
    v.need(worst[False] < 1e-8, f"no cutoff {worst[False]:.2e}")
    v.need(worst[True] < 1e-8, f"cutoff {worst[True]:.2e}")
    v.note(f"max relative residual {worst[False]:.1e} plain, {worst[True]:.1e} with cutoff")
    return v.finish(60)


def criterion_5():
    v = Verdict(5, "Mellin engine")
    rng = np.random.default_rng(5)
    pars = 0.0
    trip = 0.0
    for _ in range(5):
        b = Bump.random(rng)
        u = GridFunction.from_bump(b)
        for beta in (-0.3, 0.0, 0.3):
            lhs, _, d = parseval_residual(u, beta)
            pars = max(pars, d / lhs)
        lo, hi = b.support
        r = np.linspace(lo, hi, 40)
        back = mellin_inverse(mellin_forward(u, choose_line(u, 0.0)), r).real
        trip = max(trip, np.max(np.abs(back - b(r))) / b.amplitude)
    g = LogGrid.from_r(1e-32, 60.0, 2001)
    e = GridFunction.from_callable(lambda x: np.exp(-x), g, left=Tail(0.0, 1.0))
    lam = -0.5 + 1j * np.linspace(-5.0, 5.0, 41)
    ref = np.array([gamma(-z) for z in lam])
    gpair = float(np.max(np.abs(mellin_at(e, lam) - ref) / np.abs(ref)))
    v.need(pars < 1e-8, f"Parseval {pars:.2e}")
    v.need(gpair < 1e-8, f"Gamma pair {gpair:.2e}")
    v.need(trip < 1e-6, f"round trip {trip:.2e}")
    v.note(f"Parseval {pars:.1e}, Gamma pair {gpair:.1e}, round trip {trip:.1e}")
    return v.finish(30)


def criterion_6():
    v = Verdict(6, "decay profiles and moduli")
    xi = np.linspace(0.0, 1000.0, 401)
    worst_end = -np.inf
    drift = 0.0
    for a in (np.pi / 6, np.pi / 4, np.pi / 2, 3 * np.pi / 4):
        for p in range(5):
            prof = decay_profile(a, 0.0, p, xi)
            lw = prof.log_weighted
            beyond = lw[xi >= prof.xi0]
            v.need(np.all(np.diff(beyond) < 0), f"not monotone beyond xi0 (alpha={a:.3f}, p={p})")
            v.need(prof.xi0 < 1000.0, f"no decay onset (alpha={a:.3f}, p={p})")
            end = (lw[-1] - np.max(lw[np.isfinite(lw)])) / np.log(10)
            worst_end = max(worst_end, end)
        coarse = continuity_moduli(a, 0.1, n=241)
        fine = continuity_moduli(a, 0.1, n=481)
        for name in ("m0", "m1", "m_diff"):
            x, y = getattr(coarse, name), getattr(fine, name)
            v.need(np.isfinite(x), f"{name} not finite")
            if max(x, y) > 0:
                drift = max(drift, abs(x - y) / max(x, y))
    v.need(worst_end < -6, f"profile at 1e3 only 10^{worst_end:.1f} of peak")
    v.need(drift < 0.01, f"moduli drift {drift:.2e}")
    v.note(f"profiles at xi=1e3 below 10^{worst_end:.0f} of peak, moduli drift {drift:.1e}")
    return v.finish(120)


def criterion_7():
    v = Verdict(7, "continuity modulus plateau with H^1 contrast")
    facts = []
    for name in ("square", "L"):
        b = theorem1_sweep(ExperimentConfig(polygon=name, ladder=[32, 64, 128, 256]))
        s = [lv["sigma"] for lv in b.results["levels"]]
        steps = b.results["relative_steps"]
        steps1 = b.results["relative_steps_h1"]
        v.need(all(d > 0 for d in steps), f"{name}: sigma not increasing {s}")
        v.need(abs(steps[-1]) < 0.05, f"{name}: last step {steps[-1]:.2e}")
        v.need(steps1[-1] >= 0.05, f"{name}: H^1 contrast saturates ({steps1[-1]:.2e})")
        facts.append(f"{name} sigma {s[-1]:.4f} last step {steps[-1]:.1e}, H^1 step {steps1[-1]:.2f}")
    v.note(", ".join(facts))
    return v.finish(600)


def criterion_8():
    v = Verdict(8, "corner continuity ratios")
    cfg = ExperimentConfig(thetas=[np.pi / 6, np.pi / 4, np.pi / 3, 3 * np.pi / 4, np.pi / 2],
                           trials=50, resolutions=[20, 40])
    b = corner_continuity(cfg)
    drifts = []
    for key, res in b.results["thetas"].items():
        ratios = list(res["ratios"].values())
        v.need(all(np.isfinite(ratios)), f"theta {key}: non-finite ratio")
        if float(key) == np.pi / 2:
            v.need(max(ratios) < 1e-10, f"right angle ratio {max(ratios):.2e}")
        else:
            v.need(res["drift"] < 0.05, f"theta {key}: drift {res['drift']:.2e}")
            drifts.append(res["drift"])
    v.note(f"max drift {max(drifts):.1e}, zero at pi/2")
    return v.finish(300)


def equivalence_ratios():
    """|phi|^2 by Slobodeckii quadrature over the Mellin-weighted integral, 10 bumps."""
    rng = np.random.default_rng(9)
    sp = halfline_space(geometric_nodes(1e-3, 8.0, 100))
    out = []
    for _ in range(10):
        b = Bump.random(rng)
        s = slobodeckii_seminorm(lambda p: b(p[..., 0]), sp) ** 2
        out.append(s / mellin_half_seminorm(GridFunction.from_bump(b)) ** 2)
    return out


def theta_ratios():
    """Cone norm of Theta(p, p~) over the product norm, 10 random pairs near the vertex."""
    rng = np.random.default_rng(36)
    out = []
    for _ in range(10):
        theta = rng.uniform(0.2, np.pi - 0.2)
        p = Bump.random(rng, center=(0.05, 2.0))
        q = Bump.random(rng, center=(0.05, 2.0))
        out.append(theta_norm_ratio(theta, p, q, per_decade=30))
    return out


def criterion_9():
    v = Verdict(9, "norm equivalences")
    eq = equivalence_ratios()
    th = theta_ratios()
    C, Cp = min(eq), max(eq)
    v.need(C > 1 and Cp > 1, f"measured pair ({C:.3f}, {Cp:.3f}) not above 1")
    v.need(0 < min(th) and max(th) < np.inf, "Theta ratios unbounded")
    for name, got, locked in (("equivalence", eq, LOCKED_EQUIVALENCE), ("Theta", th, LOCKED_THETA_RATIOS)):
        if locked is None:
            v.need(False, f"{name} ratios not locked yet: {got!r}")
        else:
            dev = max(abs(a - b) / b for a, b in zip(got, locked))
            v.need(dev < LOCK_RTOL, f"{name} ratios moved by {dev:.2e}")
    v.note(f"|phi|^2 / Mellin integral in [{C:.3f}, {Cp:.3f}], Theta ratio in [{min(th):.3f}, {max(th):.3f}]")
    return v.finish(120)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 10)])
def test_criterion(criterion, acceptance):
    v = criterion()
    print(v.line)
    acceptance(v.line)
    assert v.passed, v.line


if __name__ == "__main__":
    for crit in CRITERIA:
        print(crit().line, flush=True)
