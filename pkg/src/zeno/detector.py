"""Measurement pointer: characteristic function, width and effective strength.

The pointer coordinate ``q`` couples to the system through ``lam * q * H0``.
Everything the second-order formulas need from the pointer is its
characteristic function ``F(x) = <Phi| exp(i x q) |Phi>``.  Two pointer kinds
are supported: a real Gaussian wavepacket (analytic ``F``) and a tabulated
``F`` sampled on a grid.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InvalidModelError

GAUSSIAN = "gaussian"
TABULATED = "tabulated"

_TAIL_TOL = 1e-3
_NORM_TOL = 1e-12


@dataclass(frozen=True)
class DetectorModel:
    """Pointer state plus coupling strength.

    Use :meth:`gaussian` or :meth:`tabulated` rather than the raw constructor.

    Parameters
    ----------
    kind : {"gaussian", "tabulated"}
    lam : float
        Coupling strength (dimensionless multiplier on ``q H0``).
    sigma : float, optional
        Coordinate standard deviation of ``|Phi(q)|^2`` (Gaussian kind).
    x, values : ndarray, optional
        Grid and complex samples of ``F`` (tabulated kind).
    """

    kind: str
    lam: float = 0.0
    sigma: float = None
    x: np.ndarray = field(default=None, repr=False, compare=False)
    values: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam < 0:
            raise InvalidModelError(f"coupling lambda must be finite and >= 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)
        if self.kind == GAUSSIAN:
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise InvalidModelError(f"Gaussian pointer requires sigma > 0, got {self.sigma!r}")
            object.__setattr__(self, "sigma", float(self.sigma))
        elif self.kind == TABULATED:
            x, values = _validate_table(self.x, self.values)
            object.__setattr__(self, "x", x)
            object.__setattr__(self, "values", values)
        else:
            raise InvalidModelError(f"unknown detector kind {self.kind!r}")

    @classmethod
    def gaussian(cls, sigma=1.0, lam=0.0):
        return cls(GAUSSIAN, lam=lam, sigma=sigma)

    @classmethod
    def tabulated(cls, x, values, lam=0.0):
        return cls(TABULATED, lam=lam, x=x, values=values)

    def with_lambda(self, lam):
        """Return a copy with a different coupling strength."""
        return DetectorModel(self.kind, lam=lam, sigma=self.sigma, x=self.x, values=self.values)

    def __call__(self, x):
        return characteristic_function(self, x)


def _validate_table(x, values):
    if x is None or values is None:
        raise InvalidModelError("tabulated pointer requires both x and F samples")
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=complex)
    if x.ndim != 1 or x.shape != values.shape or x.size < 2:
        raise InvalidModelError("tabulated F needs matching 1-D x and F arrays of length >= 2")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(values))):
        raise InvalidModelError("tabulated F contains non-finite entries")
    # Repeated abscissae are allowed and encode a jump discontinuity.
    if np.any(np.diff(x) < 0) or x[-1] <= x[0]:
        raise InvalidModelError("tabulated grid must be monotonically increasing in x")
    if np.any(np.abs(values) > 1 + _NORM_TOL):
        raise InvalidModelError("tabulated F violates |F(x)| <= 1")
    if x[0] <= 0 <= x[-1]:
        f0 = np.interp(0.0, x, values.real) + 1j * np.interp(0.0, x, values.imag)
        if abs(f0 - 1) > _NORM_TOL:
            raise InvalidModelError(f"tabulated F must satisfy F(0) = 1, got {f0}")
    else:
        raise InvalidModelError("tabulated grid must contain x = 0")
    if np.allclose(x[::-1], -x, rtol=0, atol=1e-12):
        mirrored = values[::-1]
    else:
        mirrored = np.interp(-x, x, values.real, left=0, right=0) + 1j * np.interp(
            -x, x, values.imag, left=0, right=0
        )
    if np.max(np.abs(mirrored - np.conj(values))) > 1e-6:
        raise InvalidModelError("tabulated F must satisfy F(-x) = conj(F(x)) (real pointer wavefunction)")
    return x, values


def load_table(path, lam=0.0):
    """Read a tabulated pointer from a ``x ReF [ImF]`` text file.

    Lines beginning with ``#`` are ignored.
    """
    data = np.loadtxt(Path(path), comments="#", ndmin=2)
    if data.shape[1] not in (2, 3):
        raise InvalidModelError(f"{path}: expected 2 or 3 columns, found {data.shape[1]}")
    values = data[:, 1].astype(complex)
    if data.shape[1] == 3:
        values = values + 1j * data[:, 2]
    return DetectorModel.tabulated(data[:, 0], values, lam=lam)


def save_table(path, model):
    """Write a tabulated pointer in the format read by :func:`load_table`."""
    rows = np.column_stack([model.x, model.values.real, model.values.imag])
    np.savetxt(Path(path), rows, fmt="%.17g", header="x ReF ImF")


def characteristic_function(model, x):
    """Evaluate ``F(x)``.

    Accepts a scalar or an array; returns the same shape, complex.  Outside a
    tabulated grid ``F`` is zero.
    """
    x = np.asarray(x, dtype=float)
    if model.kind == GAUSSIAN:
        out = np.exp(-0.5 * (model.sigma * x) ** 2).astype(complex)
    else:
        out = np.interp(x, model.x, model.values.real, left=0.0, right=0.0) + 1j * np.interp(
            x, model.x, model.values.imag, left=0.0, right=0.0
        )
    return out[()] if out.ndim == 0 else out


def width_C(model):
    """Width ``C = 1/2 * integral of F`` over the real line.

    Gaussian pointers use the analytic value ``sqrt(pi/2) / sigma``; tables use
    the trapezoidal rule on their own grid.
    """
    if model.kind == GAUSSIAN:
        return np.sqrt(np.pi / 2) / model.sigma
    if max(abs(model.values[0]), abs(model.values[-1])) > _TAIL_TOL:
        raise InvalidModelError(
            f"tabulated F does not decay at the grid ends (|F| > {_TAIL_TOL}); width is undefined"
        )
    total = 0.5 * np.trapezoid(model.values, model.x)
    if abs(total.imag) >= 1e-10 * abs(total.real):
        raise InvalidModelError(f"integral of F is not real (Im = {total.imag:.3e}); complex pointers unsupported")
    return float(total.real)


def lambda_eff(model):
    """Effective measurement strength ``lam / C``."""
    c = width_C(model)
    if c <= 0:
        raise InvalidModelError(f"degenerate detector: width C = {c} <= 0")
    return model.lam / c


def support_scale(model):
    """Argument beyond which ``|F|`` is negligible (< ~1e-20 for a Gaussian)."""
    if model.kind == GAUSSIAN:
        return 10.0 / model.sigma
    return float(max(abs(model.x[0]), abs(model.x[-1])))


def kinks(model):
    """Arguments where ``F`` is not smooth (table nodes); empty for a Gaussian."""
    if model.kind == GAUSSIAN:
        return ()
    return tuple(float(x) for x in np.unique(model.x))


def scalar_function(model):
    """Fast scalar callable ``x -> F(x)`` for use inside quadrature loops."""
    if model.kind == GAUSSIAN:
        half_var = 0.5 * model.sigma**2

        def gaussian(x):
            return complex(math.exp(-half_var * x * x))

        return gaussian
    return lambda x: complex(characteristic_function(model, x))
