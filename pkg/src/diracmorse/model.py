"""Problem definition for the one-dimensional Dirac equation with V(x) = -A exp(-omega x).

Units are atomic (hbar = m = 1); energies epsilon are in units of mc^2 = 1/lambda_c^2.
The global rotation angle obeys sin(angle) = +lambda_c * xi, so the upper
component phi+ is the one that survives the nonrelativistic limit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, PoleError


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of one problem instance.

    A: potential strength (nonzero, either sign); omega: range parameter (> 0);
    xi: coupling scale (> 0); lambda_c: Compton wavelength 1/c (> 0).
    """

    A: float
    omega: float
    xi: float
    lambda_c: float

    def __post_init__(self):
        for name in ("A", "omega", "xi", "lambda_c"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.A == 0:
            raise DomainError("A must be nonzero")
        if not self.omega > 0:
            raise DomainError(f"omega must be > 0, got {self.omega!r}")
        if not self.xi > 0:
            raise DomainError(f"xi must be > 0, got {self.xi!r}")
        if not self.lambda_c > 0:
            raise DomainError(f"lambda_c must be > 0, got {self.lambda_c!r}")
        if not self.lambda_c * self.xi < 1:
            raise DomainError(
                f"lambda_c * xi must be < 1 (got {self.lambda_c * self.xi!r}); C would not be real")

    @property
    def C(self) -> float:
        s = self.lambda_c * self.xi
        return math.sqrt((1.0 - s) * (1.0 + s))

    @property
    def rot_angle(self) -> float:
        return math.asin(self.lambda_c * self.xi)

    @property
    def sign(self) -> int:
        """+1 for A > 0, -1 for A < 0."""
        return 1 if self.A > 0 else -1

    def flipped(self) -> "ModelParams":
        """The same problem with A -> -A."""
        return ModelParams(-self.A, self.omega, self.xi, self.lambda_c)

    def to_dict(self) -> dict:
        return {"A": self.A, "omega": self.omega, "xi": self.xi, "lambda_c": self.lambda_c}


class Frame(enum.Enum):
    ORIGINAL = "original"  # (g, f)
    ROTATED = "rotated"  # (phi+, phi-)


@dataclass(frozen=True)
class SpinorSample:
    upper: float
    lower: float
    frame: Frame = Frame.ROTATED


@dataclass(frozen=True)
class NonRelMap:
    E: float
    B: float
    D: float


def potential(params: ModelParams, x):
    return -params.A * np.exp(-params.omega * np.asarray(x, dtype=float))


def z_scale(params: ModelParams) -> float:
    """2 C |A| / (omega xi), the value of z at x = 0."""
    return 2 * params.C * abs(params.A) / (params.omega * params.xi)


def z_of_x(params: ModelParams, x):
    return z_scale(params) * np.exp(-params.omega * np.asarray(x, dtype=float))


def x_of_z(params: ModelParams, z):
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("z must be > 0")
    return -np.log(z / z_scale(params)) / params.omega


def _half_angle(params: ModelParams):
    c = math.sqrt(0.5 * (1.0 + params.C))
    s = params.lambda_c * params.xi / (2 * c)
    return c, s


def rotate_spinor(params: ModelParams, s: SpinorSample) -> SpinorSample:
    """(g, f) -> (phi+, phi-) with the half-angle rotation."""
    if s.frame is not Frame.ORIGINAL:
        raise DomainError("rotate_spinor expects a sample in the original (g, f) frame")
    c, sn = _half_angle(params)
    return SpinorSample(c * s.upper + sn * s.lower, -sn * s.upper + c * s.lower, Frame.ROTATED)


def unrotate_spinor(params: ModelParams, s: SpinorSample) -> SpinorSample:
    """Inverse of rotate_spinor (applies the transpose)."""
    if s.frame is not Frame.ROTATED:
        raise DomainError("unrotate_spinor expects a sample in the rotated frame")
    c, sn = _half_angle(params)
    return SpinorSample(c * s.upper - sn * s.lower, sn * s.upper + c * s.lower, Frame.ORIGINAL)


def check_pole(params: ModelParams, epsilon: float):
    if epsilon == -params.C:
        raise PoleError("epsilon = -C is a pole of the kinetic-balance relation")


def five_point_derivative(fn: Callable, x, h=None):
    """First derivative by the 5-point central difference."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = np.maximum(1e-5, 1e-5 * np.abs(x))
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


def kinetic_balance_apply(params: ModelParams, epsilon: float, phi_plus_fn: Callable, x):
    """phi-(x) = lambda_c/(C+eps) * (-xi + (C/xi) V(x) + d/dx) phi+(x).

    The derivative is a 5-point central difference with h = max(1e-5, 1e-5|x|).
    """
    check_pole(params, epsilon)
    lc, xi, C = params.lambda_c, params.xi, params.C
    x = np.asarray(x, dtype=float)
    dphi = five_point_derivative(phi_plus_fn, x)
    return lc / (C + epsilon) * ((-xi + C / xi * potential(params, x)) * phi_plus_fn(x) + dphi)


def schrodinger_like_coeffs(params: ModelParams, epsilon: float):
    """(c2, c1, c0) of [-d2/dx2 + c2 e^{-2wx} + c1 e^{-wx} + c0] phi+ = 0."""
    k = params.C * params.A / params.xi
    c2 = k * k
    c1 = -k * (params.omega + 2 * params.xi * epsilon / params.C)
    c0 = -(epsilon * epsilon - 1) / params.lambda_c ** 2
    return c2, c1, c0


def effective_potential(params: ModelParams, epsilon: float, x):
    c2, c1, c0 = schrodinger_like_coeffs(params, epsilon)
    e = np.exp(-params.omega * np.asarray(x, dtype=float))
    return c2 * e * e + c1 * e + c0


def superpotential(params: ModelParams, epsilon: float, x):
    """W(x) = (C/xi) V(x) + (xi/C) epsilon."""
    return params.C / params.xi * potential(params, x) + params.xi / params.C * epsilon


def superpotential_derivative(params: ModelParams, x):
    """dW/dx = (C/xi) A omega e^{-omega x}."""
    return params.C / params.xi * params.A * params.omega * np.exp(-params.omega * np.asarray(x, dtype=float))


def partner_potentials(params: ModelParams, epsilon: float, x):
    """(W^2 - W', W^2 + W') shifted by -((eps/C)^2 - 1)/lambda_c^2.

    The first reproduces the upper-component operator, the second the lower one.
    """
    w = superpotential(params, epsilon, x)
    dw = superpotential_derivative(params, x)
    shift = ((epsilon / params.C) ** 2 - 1) / params.lambda_c ** 2
    return w * w - dw - shift, w * w + dw - shift


def nonrel_map(params: ModelParams, epsilon: float) -> NonRelMap:
    """Nonrelativistic Morse parameters (E, B, D) equivalent to the upper-component equation."""
    E = (epsilon * epsilon - 1) / (2 * params.lambda_c ** 2)
    B = abs(params.C * params.A / params.xi)
    t = params.xi * epsilon / params.C
    D = t if params.A > 0 else -params.omega - t
    return NonRelMap(E, B, D)
