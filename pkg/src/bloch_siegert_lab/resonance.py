"""Resonance location and Bloch-Siegert shift by five independent routes.

The shift is omega_res - omega0, where omega_res maximizes the
time-averaged transition probability at fixed drive amplitude.  Routes:

* chrw        -- stationarity of the squared counter-rotating hybridized
                 Rabi frequency with respect to omega0,
* floquet     -- minimum of |d q / d omega0| on the tracked Floquet branch,
* shirley     -- self-consistent iteration of the sixth-order quasienergy
                 crossing condition,
* pert6       -- closed sixth-order series in A/4,
* asymptotic  -- strong-drive limit omega_res = A / j01 with j01 the first
                 zero of J0.

All five agree on the leading (A/4)^2/omega0 behaviour; they differ in
range of validity, which is the point of keeping all of them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .chrw import ModelParams, solve_xi
from .errors import ConvergenceError, NoSignChangeError
from .floquet import default_truncation, solve_floquet
from .numerics import (
    Tolerance,
    bessel_j,
    bessel_j0_minus_1,
    find_root_bracketed,
    first_bessel_j0_zero,
    minimize_scalar_bracketed,
)


class Method(enum.Enum):
    CHRW = "chrw"
    FLOQUET = "floquet"
    SHIRLEY = "shirley"
    PERT6 = "pert6"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class ShiftResult:
    """Resonance location for one (omega0, A) point by one method.

    The shift is the stored quantity; omega_res = omega0 + shift is
    derived.  Storing omega_res instead would quantize weak-drive shifts
    (~1e-6 omega0) to the ulp of omega0 on the round trip.
    """

    method: Method
    omega0: float
    amplitude: float
    shift: float
    residual: float
    iterations: int

    @property
    def omega_res(self) -> float:
        return self.omega0 + self.shift

    @property
    def a_over_omega0(self) -> float:
        return self.amplitude / self.omega0


# tight scalar tolerances: the chrw root is smooth and cheap, so run the
# bracketing solver essentially to machine width in the shift variable.
# abs_tol sits far below any representable shift so the stopping rule is
# purely relative; weak drives (shift ~ A^2/16) stay fully resolved.
_CHRW_TOL = Tolerance(abs_tol=1e-18, rel_tol=1e-14, max_iter=300)
_XI_TOL = Tolerance(abs_tol=1e-22, rel_tol=2e-16, max_iter=200)


def _trivial_result(method: Method, omega0: float) -> ShiftResult:
    return ShiftResult(
        method=method,
        omega0=omega0,
        amplitude=0.0,
        shift=0.0,
        residual=0.0,
        iterations=0,
    )


def _chrw_stationarity(omega0: float, amplitude: float) -> Callable[[float], float]:
    """Residual of d(Rabi^2)/d omega0 = 0 as a function of s = omega - omega0.

    Working in the shift variable keeps the near-cancellation
    J0(z)*omega0 - omega = (J0(z) - 1)*omega0 - s free of subtractive
    error, so the root is resolved to machine precision even when the
    shift is ~1e-4 omega0.
    """

    def f(s: float) -> float:
        omega = omega0 + s
        params = ModelParams(omega0=omega0, amplitude=amplitude, omega=omega)
        xi = solve_xi(params, tol=_XI_TOL)
        z = amplitude * xi / omega
        j0m1 = bessel_j0_minus_1(z)
        j0 = 1.0 + j0m1
        j1 = bessel_j(1, z)
        j2 = bessel_j(2, z)
        delta = j0m1 * omega0 - s
        dxi = -2.0 * omega * j1 / (amplitude * (omega + omega0 * (j0 - j2)))
        ddelta = j0 - omega0 * (amplitude / omega) * j1 * dxi
        return 2.0 * delta * ddelta - 2.0 * amplitude * amplitude * (1.0 - xi) * dxi

    return f


def bs_chrw(
    omega0: float, amplitude: float, tol: Optional[Tolerance] = None
) -> ShiftResult:
    """Resonance from the counter-rotating hybridized rotating frame."""
    if amplitude == 0.0:
        return _trivial_result(Method.CHRW, omega0)
    if tol is None:
        tol = _CHRW_TOL
    evals = 0
    raw = _chrw_stationarity(omega0, amplitude)

    def f(s: float) -> float:
        nonlocal evals
        evals += 1
        return raw(s)

    j01 = first_bessel_j0_zero()
    s_lo = max(0.0, 0.9 * amplitude / j01 - omega0)
    s_hi = amplitude
    f_lo, f_hi = f(s_lo), f(s_hi)
    if f_lo == 0.0:
        root = s_lo
    elif f_hi == 0.0:
        root = s_hi
    elif f_lo * f_hi < 0.0:
        root = find_root_bracketed(f, s_lo, s_hi, tol)
    else:
        # scan for the first crossing; the stationarity curve is smooth and
        # has a single sign change on physical brackets
        grid = np.linspace(s_lo, s_hi, 257)
        vals = [f(float(s)) for s in grid]
        root = None
        for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
            if fa == 0.0:
                root = float(a)
                break
            if fa * fb < 0.0:
                root = find_root_bracketed(f, float(a), float(b), tol)
                break
        if root is None:
            raise NoSignChangeError(
                f"no stationarity crossing in s = [{s_lo:.6g}, {s_hi:.6g}] "
                f"for omega0={omega0}, A={amplitude}"
            )
    return ShiftResult(
        method=Method.CHRW,
        omega0=omega0,
        amplitude=amplitude,
        shift=root,
        residual=abs(raw(root)),
        iterations=evals,
    )


def bs_perturbative6(omega0: float, amplitude: float) -> ShiftResult:
    """Sixth-order weak-drive series for the resonance frequency."""
    if amplitude == 0.0:
        return _trivial_result(Method.PERT6, omega0)
    x = 0.25 * amplitude
    shift = (
        x * x / omega0
        + x**4 / (4.0 * omega0**3)
        - 35.0 * x**6 / (32.0 * omega0**5)
    )
    return ShiftResult(
        method=Method.PERT6,
        omega0=omega0,
        amplitude=amplitude,
        shift=shift,
        residual=0.0,
        iterations=0,
    )


def bs_asymptotic(omega0: float, amplitude: float) -> ShiftResult:
    """Strong-drive limit: the resonance tracks the first zero of J0."""
    if not (math.isfinite(omega0) and omega0 > 0.0):
        raise ValueError(f"omega0 must be positive and finite, got {omega0}")
    if not (math.isfinite(amplitude) and amplitude >= 0.0):
        raise ValueError(f"amplitude must be non-negative and finite, got {amplitude}")
    if amplitude == 0.0:
        return _trivial_result(Method.ASYMPTOTIC, omega0)
    omega_res = amplitude / first_bessel_j0_zero()
    return ShiftResult(
        method=Method.ASYMPTOTIC,
        omega0=omega0,
        amplitude=amplitude,
        shift=omega_res - omega0,
        residual=0.0,
        iterations=0,
    )


def _shirley_rhs(omega0: float, amplitude: float, omega: float) -> float:
    a2 = amplitude * amplitude
    s = omega + omega0
    term2 = omega * a2 / (4.0 * s * s)
    term4 = (2.0 * omega0 - omega) * a2 * a2 / (64.0 * s**4)
    poly = (
        9.0 * omega**5
        - 126.0 * omega**4 * omega0
        + 82.0 * omega**3 * omega0**2
        + 42.0 * omega**2 * omega0**3
        - 23.0 * omega * omega0**4
        - 8.0 * omega0**5
    )
    term6 = poly * a2**3 / (256.0 * s**6 * (9.0 * omega * omega - omega0 * omega0) ** 2)
    return omega0 + term2 + term4 + term6


def _damped_fixed_point(
    g: Callable[[float], float], start: float, tol: Tolerance
) -> tuple[float, int]:
    """Fixed point of g by damped iteration with backtracking.

    Full steps omega <- g(omega) whenever they shrink the defect
    |g(omega) - omega|; otherwise the update is halved, restarting from
    the current iterate, until the defect decreases.  Monotone in the
    defect, so it cannot orbit.
    """
    omega = start
    evals = 0
    for _ in range(tol.max_iter):
        target = g(omega)
        evals += 1
        defect = target - omega
        if abs(defect) <= tol.abs_tol + tol.rel_tol * abs(omega):
            return target, evals
        alpha = 1.0
        for _ in range(60):
            cand = omega + alpha * defect
            cand_defect = g(cand) - cand
            evals += 1
            if cand > 0.0 and math.isfinite(cand_defect) and abs(cand_defect) < abs(defect):
                omega = cand
                break
            alpha *= 0.5
        else:
            raise ConvergenceError(
                f"fixed-point backtracking stalled at omega={omega:.6g} "
                f"(defect {defect:.3e})"
            )
    raise ConvergenceError(
        f"fixed-point iteration did not settle in {tol.max_iter} sweeps "
        f"(omega={omega:.6g})"
    )


def bs_shirley_iterative(
    omega0: float, amplitude: float, tol: Optional[Tolerance] = None
) -> ShiftResult:
    """Self-consistent solution of the sixth-order crossing condition.

    The full map has a pole at omega = omega0/3 and is violently repulsive
    far from its fixed point, so the iteration is staged: first the
    quadratic truncation (globally tame) is iterated from omega0 to get
    into the basin, then the full sixth-order map is iterated from there.
    Both stages damp with backtracking whenever a step grows the defect.
    """
    if amplitude == 0.0:
        return _trivial_result(Method.SHIRLEY, omega0)
    if tol is None:
        tol = Tolerance(abs_tol=1e-14, rel_tol=1e-14, max_iter=200)

    def g_quadratic(omega: float) -> float:
        s = omega + omega0
        return omega0 + omega * amplitude * amplitude / (4.0 * s * s)

    def g_full(omega: float) -> float:
        return _shirley_rhs(omega0, amplitude, omega)

    seed_tol = Tolerance(
        abs_tol=1e-6 * omega0, rel_tol=1e-6, max_iter=tol.max_iter
    )
    seed, it1 = _damped_fixed_point(g_quadratic, omega0, seed_tol)
    omega_res, it2 = _damped_fixed_point(g_full, seed, tol)
    return ShiftResult(
        method=Method.SHIRLEY,
        omega0=omega0,
        amplitude=amplitude,
        shift=omega_res - omega0,
        residual=abs(_shirley_rhs(omega0, amplitude, omega_res) - omega_res),
        iterations=it1 + it2,
    )


def bs_floquet_numeric(
    omega0: float,
    amplitude: float,
    tol: Optional[Tolerance] = None,
    n_trunc: Optional[int] = None,
) -> ShiftResult:
    """Resonance from the Floquet spectrum: |dq/domega0| minimum over omega.

    At resonance the tracked quasienergy branch becomes stationary in
    omega0, so the derivative (computed exactly from eigenvector weights)
    passes through zero.  Because the branch choice keeps the derivative
    sign-definite near the crossing, the zero is located by minimizing its
    square: coarse scan, then golden-section refinement.  The truncation is
    frozen across the search so the objective stays smooth.
    """
    if amplitude == 0.0:
        return _trivial_result(Method.FLOQUET, omega0)
    if tol is None:
        tol = Tolerance(abs_tol=1e-11 * omega0, rel_tol=1e-13, max_iter=200)
    guess = bs_chrw(omega0, amplitude)
    half = max(0.06 * abs(guess.shift), 0.01 * omega0)
    lo = max(guess.omega_res - half, 0.25 * guess.omega_res)
    hi = guess.omega_res + half
    if n_trunc is None:
        n_trunc = default_truncation(
            ModelParams(omega0=omega0, amplitude=amplitude, omega=lo)
        )
    evals = 0

    def dq(omega: float) -> float:
        nonlocal evals
        evals += 1
        params = ModelParams(omega0=omega0, amplitude=amplitude, omega=omega)
        return solve_floquet(params, n_trunc).dq_domega0

    for _expand in range(4):
        grid = np.linspace(lo, hi, 25)
        vals = np.array([abs(dq(float(w))) for w in grid])
        k = int(np.argmin(vals))
        if 0 < k < len(grid) - 1:
            break
        width = hi - lo
        if k == 0:
            lo, hi = max(lo - width, 0.25 * lo), lo + 0.25 * width
        else:
            lo, hi = hi - 0.25 * width, hi + width
    else:
        raise ConvergenceError(
            f"|dq/domega0| minimum kept escaping the bracket for "
            f"omega0={omega0}, A={amplitude}"
        )

    omega_res = minimize_scalar_bracketed(
        lambda w: dq(w) ** 2, float(grid[k - 1]), float(grid[k + 1]), tol
    )
    return ShiftResult(
        method=Method.FLOQUET,
        omega0=omega0,
        amplitude=amplitude,
        shift=omega_res - omega0,
        residual=abs(dq(omega_res)),
        iterations=evals,
    )


_DISPATCH = {
    Method.CHRW: bs_chrw,
    Method.FLOQUET: bs_floquet_numeric,
    Method.SHIRLEY: bs_shirley_iterative,
    Method.PERT6: bs_perturbative6,
    Method.ASYMPTOTIC: bs_asymptotic,
}


def resonance_shift(method: Method, omega0: float, amplitude: float) -> ShiftResult:
    """Dispatch a single shift computation by method tag."""
    return _DISPATCH[method](omega0, amplitude)


@dataclass(frozen=True)
class DeviationRow:
    """Shifts of all methods at one amplitude, with relative deviations.

    Deviations are measured against the numerical Floquet shift, which is
    the reference: dev_x = |shift_x - shift_floquet| / shift_floquet.
    """

    a_over_omega0: float
    shift_floquet: float
    shift_chrw: float
    shift_shirley: float
    shift_pert6: float
    shift_asymptotic: float
    dev_chrw: float
    dev_shirley: float
    dev_asymptotic: float


def deviation_table(omega0: float, amplitudes: "np.ndarray | list[float]") -> list[DeviationRow]:
    """Shift comparison across methods for a grid of drive amplitudes."""
    rows = []
    for amp in amplitudes:
        amp = float(amp)
        num = bs_floquet_numeric(omega0, amp).shift
        chrw = bs_chrw(omega0, amp).shift
        shir = bs_shirley_iterative(omega0, amp).shift
        pert = bs_perturbative6(omega0, amp).shift
        asym = bs_asymptotic(omega0, amp).shift
        rows.append(
            DeviationRow(
                a_over_omega0=amp / omega0,
                shift_floquet=num,
                shift_chrw=chrw,
                shift_shirley=shir,
                shift_pert6=pert,
                shift_asymptotic=asym,
                dev_chrw=abs(chrw - num) / num if num != 0.0 else math.nan,
                dev_shirley=abs(shir - num) / num if num != 0.0 else math.nan,
                dev_asymptotic=abs(asym - num) / num if num != 0.0 else math.nan,
            )
        )
    return rows
