"""Counter-rotating hybridized rotating wave (CHRW) frame for the driven
two-level system H(t) = (omega0/2) sigma_z + (A/2) cos(omega t) sigma_x.

A unitary exp(S) with S = i (A/2 omega) xi sin(omega t) sigma_x, followed by
the rotation exp(i omega t sigma_z / 2), maps the model onto a static
Hamiltonian (delta_tilde/2) sigma_z + (a_tilde/4) sigma_x once xi solves the
fixed point

    omega0 * J1(A xi / omega) = (A/2) (1 - xi).

xi = 0 recovers the plain rotating wave approximation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateInputError, DomainError, NoSignChangeError
from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    bessel_j,
    bessel_j0_minus_1,
    find_root_bracketed,
)

ArrayLike = Union[float, np.ndarray]


class FrameMode(enum.Enum):
    CHRW = "chrw"
    RWA = "rwa"


@dataclass(frozen=True)
class ModelParams:
    """Model inputs in units of omega0 (any consistent unit system works).

    omega0: level splitting, > 0
    amplitude: drive amplitude A, >= 0
    omega: drive frequency, > 0
    kappa: bare decay rate of the excited state, >= 0
    """

    omega0: float
    amplitude: float
    omega: float
    kappa: float = 0.0

    def __post_init__(self):
        for name in ("omega0", "amplitude", "omega", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.omega0 <= 0.0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.amplitude < 0.0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")

    def replace(self, **kw) -> "ModelParams":
        data = dict(
            omega0=self.omega0, amplitude=self.amplitude, omega=self.omega, kappa=self.kappa
        )
        data.update(kw)
        return ModelParams(**data)


@dataclass(frozen=True)
class ChrwFrame:
    """Static transformed-frame quantities.

    delta_tilde = omega0 J0(A xi/omega) - omega, a_tilde = 2A(1-xi),
    rabi_tilde = sqrt(delta_tilde^2 + a_tilde^2/4), and theta the dressing
    angle with tan(theta) = (rabi_tilde - delta_tilde)/(a_tilde/2).
    """

    xi: float
    a_tilde: float
    delta_tilde: float
    rabi_tilde: float
    theta: float
    mode: FrameMode

    @property
    def cos_2theta(self) -> float:
        return math.cos(2.0 * self.theta)

    @property
    def sin_2theta(self) -> float:
        return math.sin(2.0 * self.theta)


def xi_fixed_point_residual(params: ModelParams, xi: float) -> float:
    """Residual omega0*J1(A xi/omega) - (A/2)(1 - xi) of the xi equation."""
    return params.omega0 * bessel_j(1, params.amplitude * xi / params.omega) - 0.5 * params.amplitude * (1.0 - xi)


def solve_xi(params: ModelParams, tol: Tolerance = DEFAULT_TOL) -> float:
    """Solve the CHRW fixed point for xi on [0, 1].

    Returns the smallest root, which continues the weak-drive solution
    xi = omega/(omega + omega0); for A = 0 that limit must be applied by
    the caller (build_frame does) and a degenerate-input error is raised.

    Raises
    ------
    DegenerateInputError
        if amplitude is zero.
    NoSignChangeError
        if no root can be bracketed inside [0, 1].
    """
    a, w = params.amplitude, params.omega
    if a == 0.0:
        raise DegenerateInputError("xi fixed point is undefined at A=0; use xi = omega/(omega+omega0)")

    def g(xi: float) -> float:
        return xi_fixed_point_residual(params, xi)

    # J1(A xi / omega) oscillates in xi with period 2*pi*omega/A; sample it
    # well enough that the first upward crossing cannot be stepped over
    n = max(128, int(8.0 * a / w) + 128)
    grid = np.linspace(0.0, 1.0, n + 1)
    prev_x, prev_g = 0.0, -0.5 * a
    for x in grid[1:]:
        cur = g(float(x))
        if cur == 0.0:
            return float(x)
        if prev_g < 0.0 and cur > 0.0:
            return find_root_bracketed(g, prev_x, float(x), tol)
        prev_x, prev_g = float(x), cur
    raise NoSignChangeError(
        f"xi fixed point not bracketed in [0, 1] for A={a}, omega={w} (residual stays negative)"
    )


def _theta_from(delta: float, half_a: float) -> float:
    if half_a > 0.0:
        rabi = math.hypot(delta, half_a)
        return math.atan2(rabi - delta, half_a)
    # a_tilde = 0: dressing collapses onto the poles; resonant limit is pi/4
    if delta > 0.0:
        return 0.0
    if delta < 0.0:
        return 0.5 * math.pi
    return 0.25 * math.pi


def build_frame(
    params: ModelParams,
    mode: FrameMode = FrameMode.CHRW,
    tol: Tolerance = DEFAULT_TOL,
) -> ChrwFrame:
    """Construct the static transformed frame in the requested mode.

    CHRW solves the xi fixed point (A=0 falls back to the analytic limit
    xi = omega/(omega+omega0), where a_tilde = 0); RWA pins xi = 0 so that
    delta_tilde = omega0 - omega and a_tilde = A.
    """
    w0, a, w = params.omega0, params.amplitude, params.omega
    if mode is FrameMode.RWA:
        xi = 0.0
        delta = w0 - w
        a_tilde = a
    else:
        if a == 0.0:
            xi = w / (w + w0)
            delta = w0 - w
            a_tilde = 0.0
        else:
            xi = solve_xi(params, tol)
            z = a * xi / w
            # J0(z)*omega0 - omega, with the J0-1 series keeping the near-
            # resonant cancellation at full precision
            delta = bessel_j0_minus_1(z) * w0 + (w0 - w)
            a_tilde = 2.0 * a * (1.0 - xi)
    half_a = 0.5 * a_tilde
    rabi = math.hypot(delta, half_a)
    theta = _theta_from(delta, half_a)
    return ChrwFrame(
        xi=xi, a_tilde=a_tilde, delta_tilde=delta, rabi_tilde=rabi, theta=theta, mode=mode
    )


def bessel_argument(params: ModelParams, frame: ChrwFrame) -> float:
    """Argument A*xi/omega entering every Bessel factor of the frame."""
    return params.amplitude * frame.xi / params.omega


@dataclass(frozen=True)
class LabPopulationMap:
    """Coefficients mapping the transformed-frame <s_z> to the lab-frame
    excited population: rho_++ = constant + 0.5*<s_z>*(cos_term + sin_term).
    """

    constant: float
    cos_term: ArrayLike
    sin_term: ArrayLike

    def population(self, sz: float) -> ArrayLike:
        return self.constant + 0.5 * sz * (self.cos_term + self.sin_term)


def lab_population_map(params: ModelParams, frame: ChrwFrame, t: ArrayLike) -> LabPopulationMap:
    """Time-dependent weights of <s_z> in the lab-frame excited population.

    cos_term = cos(2 theta) cos(z sin(omega t)) and
    sin_term = sin(2 theta) sin(omega t) sin(z sin(omega t)) with
    z = A xi / omega; both reduce at z=0 (RWA or A=0) to the static
    dressing weights.  Accepts scalar or array t.
    """
    z = bessel_argument(params, frame)
    wt = params.omega * np.asarray(t, dtype=float)
    phase = z * np.sin(wt)
    cos_term = frame.cos_2theta * np.cos(phase)
    sin_term = frame.sin_2theta * np.sin(wt) * np.sin(phase)
    if np.ndim(t) == 0:
        cos_term = float(cos_term)
        sin_term = float(sin_term)
    return LabPopulationMap(constant=0.5, cos_term=cos_term, sin_term=sin_term)


def dressed_states(frame: ChrwFrame) -> tuple[np.ndarray, np.ndarray]:
    """Dressed kets (|+~>, |-~>) as columns in the bare {|+>, |->} basis.

    |+~> = sin(theta)|-> + cos(theta)|+>, |-~> = sin(theta)|+> - cos(theta)|->.
    """
    s, c = math.sin(frame.theta), math.cos(frame.theta)
    plus = np.array([c, s])
    minus = np.array([s, -c])
    return plus, minus
