"""Scenario files: one YAML document with system, drive, detector and schedule.

Example::

    system:
      levels: [[0, -0.5], [1, 0.5]]
      aux: []                      # optional [[n, alpha, E1], ...]
    drive:
      elements:
        - {f: 1, alpha1: 0, i: 0, alpha: 0, v: [0.02, 0.0]}
      omega_L: 1.0
      convention: rwa              # or full_cosine
    detector:
      kind: gaussian               # or tabulated, with `table: path`
      sigma: 1.0
      lambda: 1000.0
    schedule: {tau: 0.01, T: 1.0, N: 1, t0: 0.0}
    initial: [0, 0]                # optional; default is the lowest state
    oracle: {n_points: null, method: auto}   # optional
"""

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from . import detector as _det
from .exceptions import InvalidModelError, ZenoError
from .system import RWA, Drive, LevelSystem, Schedule

SECTIONS = ("system", "drive", "detector", "schedule")


class ConfigError(InvalidModelError):
    """Scenario file failed validation; the message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    system: LevelSystem
    drive: Drive
    detector: _det.DetectorModel
    schedule: Schedule
    initial: tuple = None
    table: str = None
    oracle: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.initial is None:
            energies = {s: self.system.energy(s[0]) + self.system.aux_energy(*s) for s in self.system.states}
            object.__setattr__(self, "initial", min(self.system.states, key=energies.__getitem__))
        else:
            object.__setattr__(self, "initial", tuple(self.initial))
            try:
                self.system.index(self.initial)
            except ZenoError as exc:
                raise ConfigError(f"initial: {exc}") from None

    def replace(self, **changes):
        return replace(self, **changes)

    def is_two_level(self):
        s = self.system
        return s.dim == 2 and not s.aux and self.drive.convention == RWA and len(self.drive.elements) == 2

    def channels(self):
        return self.drive.channels(self.system, self.initial)


def _section(doc, name):
    try:
        sec = doc[name]
    except (KeyError, TypeError):
        raise ConfigError(f"missing section [{name}]") from None
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a mapping")
    return sec


def _complex(value, where):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{where}: complex values are [re, im]")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _build(kind, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ZenoError, TypeError, ValueError) as exc:
        raise ConfigError(f"[{kind}] {exc}") from None


def parse_config(doc, base_dir="."):
    """Build a :class:`Scenario` from an already-loaded mapping."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping with sections " + ", ".join(SECTIONS))
    sys_sec = _section(doc, "system")
    if "levels" not in sys_sec:
        raise ConfigError("[system] levels: required")
    system = _build(
        "system",
        LevelSystem,
        [tuple(p) for p in sys_sec["levels"]],
        [tuple(p) for p in sys_sec.get("aux") or []],
    )

    drv = _section(doc, "drive")
    elements = {}
    for k, el in enumerate(drv.get("elements") or []):
        where = f"[drive] elements[{k}]"
        try:
            key = (el["f"], el.get("alpha1", 0), el["i"], el.get("alpha", 0))
        except (KeyError, TypeError, AttributeError):
            raise ConfigError(f"{where}: needs f, i and v (alpha, alpha1 default to 0)") from None
        if "v" not in el:
            raise ConfigError(f"{where}: v is required")
        elements[key] = _complex(el["v"], where)
    drive = _build(
        "drive", Drive, list(elements.items()), drv.get("omega_L", 0.0), drv.get("convention", RWA)
    )
    for f, a1, i, a in drive.elements:
        for state in ((f, a1), (i, a)):
            try:
                system.index(state)
            except ZenoError:
                raise ConfigError(f"[drive] elements: unknown state {state!r}") from None

    det_sec = _section(doc, "detector")
    kind = det_sec.get("kind", _det.GAUSSIAN)
    lam = det_sec.get("lambda", 0.0)
    table = None
    if kind == _det.TABULATED:
        table = det_sec.get("table")
        if not table:
            raise ConfigError("[detector] table: path required for tabulated pointers")
        path = Path(table)
        if not path.is_absolute():
            path = Path(base_dir) / path
        try:
            detector = _det.load_table(path, lam=lam)
        except OSError as exc:
            raise ConfigError(f"[detector] table: {exc}") from None
        except ZenoError as exc:
            raise ConfigError(f"[detector] {exc}") from None
    else:
        detector = _build("detector", _det.DetectorModel, kind, lam=lam, sigma=det_sec.get("sigma"))

    sch = _section(doc, "schedule")
    for key in ("tau", "T"):
        if key not in sch:
            raise ConfigError(f"[schedule] {key}: required")
    schedule = _build("schedule", Schedule, sch["tau"], sch["T"], sch.get("N", 1), sch.get("t0", 0.0))

    initial = doc.get("initial")
    oracle = dict(doc.get("oracle") or {})
    unknown = set(oracle) - {"n_points", "method", "max_step"}
    if unknown:
        raise ConfigError(f"[oracle] unknown keys {sorted(unknown)}")
    return Scenario(system, drive, detector, schedule, tuple(initial) if initial else None, table, oracle)


def load_config(path):
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    return parse_config(doc, base_dir=path.parent)


def _plain(x):
    """YAML-friendly scalar (numpy scalars and ints-as-floats tidied)."""
    if hasattr(x, "item"):
        x = x.item()
    return x


def to_dict(sc):
    """Resolved scenario as a plain mapping; ``parse_config(to_dict(sc))`` rebuilds it."""
    system = {
        "levels": [[_plain(n), float(e)] for n, e in sc.system.levels.items()],
        "aux": [[_plain(n), _plain(a), float(e)] for (n, a), e in sc.system.aux.items()],
    }
    elements = [
        {"f": _plain(f), "alpha1": _plain(a1), "i": _plain(i), "alpha": _plain(a), "v": [v.real, v.imag]}
        for (f, a1, i, a), v in sorted(sc.drive.elements.items(), key=repr)
    ]
    drive = {"elements": elements, "omega_L": sc.drive.omega_L, "convention": sc.drive.convention}
    det = sc.detector
    detector = {"kind": det.kind, "lambda": det.lam}
    if det.kind == _det.GAUSSIAN:
        detector["sigma"] = det.sigma
    else:
        detector["table"] = sc.table
    sched = sc.schedule
    out = {
        "system": system,
        "drive": drive,
        "detector": detector,
        "schedule": {"tau": sched.tau, "T": sched.T, "N": sched.N, "t0": sched.t0},
        "initial": [_plain(x) for x in sc.initial],
    }
    if sc.oracle:
        out["oracle"] = dict(sc.oracle)
    return out


def dump_config(sc):
    return yaml.safe_dump(to_dict(sc), sort_keys=False, default_flow_style=None)
