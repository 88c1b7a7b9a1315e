"""Evaluate a scenario with several engines and collect comparable records."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import detector as _det
from . import perturbation, twolevel
from .config import ConfigError
from .exceptions import PerturbationValidityError, ZenoError
from .oracle import Oracle
from .system import omega_full

PERTURBATIVE = "perturbative"
TWOLEVEL = "twolevel_closed"
ASYMPTOTIC = "asymptotic"
ORACLE = "oracle"
ENGINES = (PERTURBATIVE, TWOLEVEL, ASYMPTOTIC, ORACLE)
AXES = ("T", "tau", "lambda", "delta")
FIELDS = ("w_free", "w_meas", "w_interf", "w_total", "survival", "R")


def two_level_params(sc):
    """:class:`TwoLevelParams` for a scenario, or ``ConfigError`` if it is not one."""
    if not sc.is_two_level():
        raise ConfigError("engine needs an RWA two-level system with a single drive element")
    lo, hi = sorted(sc.system.states, key=lambda s: sc.system.energy(s[0]))
    if sc.initial != lo:
        raise ConfigError("two-level engines describe the jump out of the lower level")
    omega = sc.system.energy(hi[0]) - sc.system.energy(lo[0])
    v = sc.drive.elements[hi + lo]
    return twolevel.TwoLevelParams(omega, v, sc.drive.omega_L, sc.detector, sc.schedule)


def _finish(rec, total, T):
    if total > 1.0:
        raise PerturbationValidityError(
            f"jump probability {total:.3g} > 1: parameters are outside the second-order regime"
        )
    rec["survival"] = 1.0 - total
    rec["R"] = total / T if T > 0 else 0.0
    return rec


def _perturbative(sc):
    res = perturbation.total_jump(sc.system, sc.drive, sc.schedule, sc.detector, sc.initial)
    return _finish(res.as_dict(), res.w_total, sc.schedule.T)


def _twolevel(sc):
    p = two_level_params(sc)
    res = perturbation.JumpResult(twolevel.wf_closed(p), twolevel.wm_semiclosed(p), twolevel.wint_semiclosed(p))
    return _finish(res.as_dict(), res.w_total, sc.schedule.T)


def _asymptotic(sc):
    p = two_level_params(sc)
    res = perturbation.JumpResult(twolevel.wf_closed(p), twolevel.wm_asymptotic(p), twolevel.wint_asymptotic(p))
    rec = _finish(res.as_dict(), res.w_total, sc.schedule.T)
    approx = twolevel.w_result_approx(p)
    rec["w_result"] = approx.total
    rec["w_result_instant"] = approx.instantaneous
    rec["w_result_correction"] = approx.correction
    return rec


def _oracle(sc):
    orc = Oracle(sc.system, sc.drive, sc.detector, sc.schedule, **sc.oracle)
    pops = orc.transition_probabilities(sc.initial)
    total = sum(p for s, p in pops.items() if s != sc.initial)
    rec = {"w_free": math.nan, "w_meas": math.nan, "w_interf": math.nan, "w_total": total}
    return _finish(rec, total, sc.schedule.T)


_RUNNERS = {PERTURBATIVE: _perturbative, TWOLEVEL: _twolevel, ASYMPTOTIC: _asymptotic, ORACLE: _oracle}
EXTRA = {ASYMPTOTIC: ("w_result", "w_result_instant", "w_result_correction")}


def columns(engines):
    cols = ["C", "Lambda"]
    for e in engines:
        cols += [f"{e}_{f}" for f in FIELDS + EXTRA.get(e, ())]
        cols.append(f"{e}_error")
    for a, b in deviation_pairs(engines):
        cols.append(f"dev_{a}_vs_{b}")
    return cols


def deviation_pairs(engines):
    return [(a, b) for k, a in enumerate(engines) for b in engines[k + 1 :]]


def relative_deviation(a, b):
    """``(a - b) / |b|``; zero when both vanish."""
    if a == b:
        return 0.0
    if b == 0:
        return math.copysign(math.inf, a - b)
    return (a - b) / abs(b)


def run_point(sc, engines):
    """One record with every engine's results plus pairwise deviations of ``w_total``.

    An engine that fails leaves NaNs and its message in ``<engine>_error``;
    the other engines still run.
    """
    rec = {"C": math.nan, "Lambda": math.nan}
    try:
        rec["C"] = _det.width_C(sc.detector)
        rec["Lambda"] = _det.lambda_eff(sc.detector)
    except ZenoError:
        pass
    for e in engines:
        try:
            out = _RUNNERS[e](sc)
            err = ""
        except ZenoError as exc:
            out, err = {}, f"{type(exc).__name__}: {exc}"
        for f in FIELDS + EXTRA.get(e, ()):
            rec[f"{e}_{f}"] = out.get(f, math.nan)
        rec[f"{e}_error"] = err
    for a, b in deviation_pairs(engines):
        rec[f"dev_{a}_vs_{b}"] = relative_deviation(rec[f"{a}_w_total"], rec[f"{b}_w_total"])
    return rec


def failed_engines(rec, engines):
    return [e for e in engines if rec.get(f"{e}_error")]


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    engines: tuple

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"sweep axis must be one of {AXES}, got {self.axis!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ConfigError("sweep needs at least one value")
        d = np.diff(vals)
        if len(vals) > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ConfigError("sweep values must be strictly monotone")
        if not self.engines:
            raise ConfigError("sweep needs at least one engine")
        bad = [e for e in self.engines if e not in ENGINES]
        if bad:
            raise ConfigError(f"unknown engines {bad}; choose from {ENGINES}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "engines", tuple(self.engines))

    @classmethod
    def from_range(cls, axis, start, stop, count, spacing, engines):
        if count < 1:
            raise ConfigError("sweep --count must be >= 1")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log spacing needs positive --from and --to")
            values = np.geomspace(start, stop, count)
        elif spacing == "linear":
            values = np.linspace(start, stop, count)
        else:
            raise ConfigError(f"spacing must be linear or log, got {spacing!r}")
        return cls(axis, tuple(values), tuple(engines))


def reference_frequency(sc):
    """``|omega_full|`` of the first driven channel; detuning sweeps are measured from it."""
    chans = sc.channels()
    if not chans:
        raise ConfigError("delta sweep needs at least one driven channel out of the initial state")
    return abs(omega_full(sc.system, chans[0]))


def apply_axis(sc, axis, value):
    """Scenario with one parameter replaced; validation errors surface as ``ConfigError``."""
    try:
        if axis == "T":
            return sc.replace(schedule=sc.schedule.replace(T=value))
        if axis == "tau":
            return sc.replace(schedule=sc.schedule.replace(tau=value))
        if axis == "lambda":
            return sc.replace(detector=sc.detector.with_lambda(value))
        return sc.replace(drive=sc.drive.with_carrier(reference_frequency(sc) - value))
    except ConfigError:
        raise
    except ZenoError as exc:
        raise ConfigError(f"{axis}={value!r}: {exc}") from None


def _sweep_row(args):
    sc, axis, value, engines = args
    try:
        point = apply_axis(sc, axis, value)
    except ConfigError as exc:
        rec = {"C": math.nan, "Lambda": math.nan}
        for e in engines:
            for f in FIELDS + EXTRA.get(e, ()):
                rec[f"{e}_{f}"] = math.nan
            rec[f"{e}_error"] = f"ConfigError: {exc}"
        for a, b in deviation_pairs(engines):
            rec[f"dev_{a}_vs_{b}"] = math.nan
        return rec
    return run_point(point, engines)


def run_sweep(sc, spec, jobs=1):
    """One record per axis value, in axis order regardless of completion order."""
    tasks = [(sc, spec.axis, v, spec.engines) for v in spec.values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    for v, rec in zip(spec.values, rows):
        rec[spec.axis] = v
    return rows


def sweep_summary(spec, rows):
    """Fitted ``R`` vs ``T`` slope and intercept per engine for period sweeps."""
    if spec.axis != "T":
        return {}
    out = {}
    for e in spec.engines:
        pts = [(r["T"], r[f"{e}_R"]) for r in rows if not r[f"{e}_error"] and math.isfinite(r[f"{e}_R"])]
        if len(pts) >= 2:
            t, rate = np.array(pts).T
            slope, intercept = np.polyfit(t, rate, 1)
            out[e] = (float(slope), float(intercept))
    return out
