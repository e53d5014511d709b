"""Dissipation in the transformed frame, reduced to six rate constants.

The lab-frame master equation has a time-dependent Hamiltonian and a static
dissipator.  After the counter-rotating-hybridized transformation the roles
swap: the Hamiltonian is static (the dressed splitting rabi_tilde) and the
dissipator becomes time-dependent through the transformed lowering operator.
Expanding that operator in drive harmonics and keeping only the co-rotating
(n + n' = 0) pairs leaves a constant-coefficient master equation whose whole
content is a rank-4 tensor over the dressed indices, and ultimately six
scalar rates.  Validity requires the dressed splitting to dominate the decay
(rabi_tilde >> kappa); callers get a ValidityWarning when it does not.

oracle_lindblad integrates the untransformed lab-frame equation directly and
serves as the module's ground truth in tests; it shares no code with the
rate construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .chrw import ChrwFrame, ModelParams, bessel_argument, dressed_states
from .errors import ConvergenceError, DegenerateInputError, ValidityWarning
from .numerics import bessel_j

TRUNCATION_EPS = 1e-14
TRUNCATION_CAP = 61


def truncation_order(z: float, eps: float = TRUNCATION_EPS, cap: int = TRUNCATION_CAP) -> int:
    """Smallest odd order L with |J_{L-1}|, |J_L|, |J_{L+1}| all below eps at z.

    Bessel functions of order beyond their argument decay super-exponentially,
    so the harmonic expansion of the transformed lowering operator can be cut
    once three consecutive orders are negligible.  Capped because arguments
    this large (z ~ 50) sit far outside the frame's validity anyway.
    """
    z = abs(z)
    order = 1
    while order < cap:
        tail = max(abs(bessel_j(order - 1, z)), abs(bessel_j(order, z)), abs(bessel_j(order + 1, z)))
        if tail < eps:
            return order
        order += 2
    return cap


@dataclass(frozen=True)
class FourierCoefficients:
    """Harmonic coefficients of the transformed raising operator.

    Keys of the three maps are (l, sign) with l positive odd and sign +-1;
    values are real.  max_order is the truncation: every l beyond it
    contributes below TRUNCATION_EPS.
    """

    max_order: int
    f_plus: Dict[Tuple[int, int], float]
    f_minus: Dict[Tuple[int, int], float]
    f_z: Dict[Tuple[int, int], float]


def fourier_f(frame: ChrwFrame, params: ModelParams, l: int, sign: int) -> Tuple[float, float, float]:
    """(f_plus, f_minus, f_z) for one odd harmonic l and signature sign.

    The three numbers are the weights of the dressed raising, lowering, and
    population operators in the l-th harmonic of the transformed sigma_+.
    """
    if l < 1 or l % 2 == 0:
        raise ValueError(f"harmonic index must be positive odd, got {l}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    z = bessel_argument(params, frame)
    s = float(sign)
    delta_l1 = 1.0 if l == 1 else 0.0
    j_lm1 = bessel_j(l - 1, z)
    j_l = bessel_j(l, z)
    j_lp1 = bessel_j(l + 1, z)
    cos2 = math.cos(frame.theta) ** 2
    sin2 = math.sin(frame.theta) ** 2
    sin_2t = frame.sin_2theta
    cos_2t = frame.cos_2theta
    f_p = -(delta_l1 + s * j_lm1) * cos2 - s * j_lp1 * sin2 - s * j_l * sin_2t
    f_m = (delta_l1 + s * j_lm1) * sin2 + s * j_lp1 * cos2 - s * j_l * sin_2t
    f_z = 0.5 * (delta_l1 + s * j_lm1 - s * j_lp1) * sin_2t - s * j_l * cos_2t
    return f_p, f_m, f_z


def fourier_coefficients(frame: ChrwFrame, params: ModelParams) -> FourierCoefficients:
    """Tabulate fourier_f over all odd l up to the truncation order."""
    z = bessel_argument(params, frame)
    l_max = truncation_order(z)
    f_plus: Dict[Tuple[int, int], float] = {}
    f_minus: Dict[Tuple[int, int], float] = {}
    f_z: Dict[Tuple[int, int], float] = {}
    for l in range(1, l_max + 1, 2):
        for sign in (1, -1):
            fp, fm, fz = fourier_f(frame, params, l, sign)
            f_plus[(l, sign)] = fp
            f_minus[(l, sign)] = fm
            f_z[(l, sign)] = fz
    return FourierCoefficients(max_order=l_max, f_plus=f_plus, f_minus=f_minus, f_z=f_z)


def x_coefficients(
    frame: ChrwFrame,
    params: ModelParams,
    n: int,
    table: Optional[FourierCoefficients] = None,
) -> np.ndarray:
    """2x2 block of the n-th harmonic of the transformed sigma_+.

    Index order is dressed (+, -).  Even n and |n| beyond the truncation
    give the zero block.  Entries are real; the dtype is complex for
    uniformity with the tensor they feed.
    """
    if table is None:
        table = fourier_coefficients(frame, params)
    block = np.zeros((2, 2), dtype=np.complex128)
    if n == 0 or n % 2 == 0 or abs(n) > table.max_order:
        return block
    l = abs(n)
    if n > 0:
        fz = table.f_z[(l, 1)]
        upper = table.f_plus[(l, 1)]
        lower = table.f_minus[(l, 1)]
    else:
        fz = table.f_z[(l, -1)]
        upper = table.f_minus[(l, -1)]
        lower = table.f_plus[(l, -1)]
    block[0, 0] = 0.5 * fz
    block[0, 1] = 0.5 * upper
    block[1, 0] = 0.5 * lower
    block[1, 1] = -0.5 * fz
    return block


def x_minus_coefficients(
    frame: ChrwFrame,
    params: ModelParams,
    n: int,
    table: Optional[FourierCoefficients] = None,
) -> np.ndarray:
    """Transformed sigma_- harmonic: the adjoint relation to x_coefficients."""
    return x_coefficients(frame, params, -n, table=table).conj().T


def lindblad_tensor(frame: ChrwFrame, params: ModelParams) -> np.ndarray:
    """Rank-4 dissipator tensor over dressed indices, co-rotating pairs only.

    Element [alpha, beta, mu, nu] multiplies rho_{mu nu} in the equation for
    rho_{alpha beta}.  Linear in kappa; identically zero without decay.
    """
    tensor = np.zeros((2, 2, 2, 2), dtype=np.complex128)
    if params.kappa == 0.0:
        return tensor
    table = fourier_coefficients(frame, params)
    blocks = []
    for n in range(-table.max_order, table.max_order + 1):
        if n % 2 != 0:
            blocks.append(x_coefficients(frame, params, n, table=table))
    stack = np.array(blocks)
    # with real harmonics the sigma_- blocks are transposes, so the three
    # dissipator contractions reduce to two reusable sums over harmonics
    gram = np.einsum("kal,kml->am", stack, stack)
    cross = np.einsum("kma,knb->manb", stack, stack)
    delta = np.eye(2)
    tensor = (
        np.einsum("am,nb->abmn", gram, delta)
        + np.einsum("nb,ma->abmn", gram, delta)
        - 2.0 * np.einsum("manb->abmn", cross)
    )
    return 0.5 * params.kappa * tensor


@dataclass(frozen=True)
class RateSet:
    """The six scalars that fully parametrize the transformed dissipator.

    gamma_z damps the dressed population difference, gamma_0 sources it,
    gamma_1 couples population to coherence, gamma_2 sources coherence,
    gamma_minus mixes the two coherences, gamma_plus damps them.  Kept
    complex; with a real harmonic table they come out real.
    """

    gamma_z: complex
    gamma_0: complex
    gamma_1: complex
    gamma_2: complex
    gamma_minus: complex
    gamma_plus: complex

    @classmethod
    def from_tensor(cls, tensor: np.ndarray) -> "RateSet":
        # dressed index order: 0 = +, 1 = -
        return cls(
            gamma_z=tensor[0, 0, 0, 0] - tensor[0, 0, 1, 1],
            gamma_0=tensor[0, 0, 0, 0] + tensor[0, 0, 1, 1],
            gamma_1=tensor[0, 0, 0, 1],
            gamma_2=0.5 * (tensor[1, 0, 0, 0] + tensor[1, 0, 1, 1]),
            gamma_minus=tensor[1, 0, 0, 1],
            gamma_plus=tensor[1, 0, 1, 0],
        )


def rates(frame: ChrwFrame, params: ModelParams) -> RateSet:
    """Rate constants of the transformed master equation."""
    return RateSet.from_tensor(lindblad_tensor(frame, params))


def bloch_generator(rate_set: RateSet, rabi_tilde: float) -> Tuple[np.ndarray, np.ndarray]:
    """Affine generator dy/dt = M y + b for y = (s_plus, s_minus, s_z)."""
    g1 = rate_set.gamma_1
    gm = rate_set.gamma_minus
    gp = rate_set.gamma_plus
    m = np.array(
        [
            [1j * rabi_tilde - gp, -gm, -g1],
            [-gm, -1j * rabi_tilde - gp, -g1],
            [-2.0 * g1, -2.0 * g1, -rate_set.gamma_z],
        ],
        dtype=np.complex128,
    )
    b = np.array([-rate_set.gamma_2, -rate_set.gamma_2, -rate_set.gamma_0], dtype=np.complex128)
    return m, b


@dataclass(frozen=True)
class SteadyState:
    """Long-time dressed Bloch vector."""

    sz_ss: float
    splus_ss: complex

    @property
    def sminus_ss(self) -> complex:
        return self.splus_ss.conjugate()

    def as_initial(self) -> Tuple[float, complex, complex]:
        """(sz, s_plus, s_minus) tuple in the order bloch_evolve expects."""
        return (self.sz_ss, self.splus_ss, self.sminus_ss)


def steady_state(rate_set: RateSet, rabi_tilde: float) -> SteadyState:
    """Closed-form fixed point of the dressed Bloch equations."""
    g0 = rate_set.gamma_0
    g1 = rate_set.gamma_1
    g2 = rate_set.gamma_2
    gm = rate_set.gamma_minus
    gp = rate_set.gamma_plus
    gz = rate_set.gamma_z
    r2 = rabi_tilde * rabi_tilde
    denom = 4.0 * g1 * g1 * (gm - gp) + (r2 - gm * gm + gp * gp) * gz
    scale = abs(gz) * max(r2, 1.0)
    if abs(denom) <= 1e-300 or abs(denom) < 1e-14 * scale:
        raise DegenerateInputError(
            "steady-state denominator vanished; dressed relaxation does not "
            "single out a fixed point at these rates"
        )
    sz = (-r2 * g0 - 4.0 * g1 * g2 * (gm - gp) + g0 * (gm * gm - gp * gp)) / denom
    splus = (1j * rabi_tilde - gm + gp) * (g0 * g1 - g2 * gz) / denom
    if abs(sz.imag) > 1e-9 * max(1.0, abs(sz.real)):
        raise DegenerateInputError(
            f"steady population difference came out complex ({sz}); rate set is unphysical"
        )
    return SteadyState(sz_ss=float(sz.real), splus_ss=complex(splus))


def bloch_evolve(
    rate_set: RateSet,
    rabi_tilde: float,
    initial: Tuple[complex, complex, complex],
    t_grid: np.ndarray,
    kappa: Optional[float] = None,
) -> np.ndarray:
    """Dressed Bloch trajectory, rows (sz, s_plus, s_minus) per grid time.

    The generator is constant, so the trajectory is the exact affine
    propagation by eigendecomposition; there is no stepper and no
    accumulation of local error.  `initial` is ordered (sz, s_plus,
    s_minus) and so are the output rows.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d array")
    # the co-rotating reduction of the dissipator assumed the dressed
    # splitting dominates the decay; warn when that stops being true.
    kappa_scale = 2.0 * abs(rate_set.gamma_z) if kappa is None else kappa
    if abs(rabi_tilde) < 10.0 * kappa_scale:
        warnings.warn(
            f"dressed splitting {rabi_tilde:.3g} is not large against the decay "
            f"scale {kappa_scale:.3g}; the co-rotating reduction degrades here",
            ValidityWarning,
            stacklevel=2,
        )
    if t.size > 1:
        dt = float(np.max(np.diff(t)))
        if kappa_scale * dt > 0.1:
            warnings.warn(
                f"output grid spacing {dt:.3g} undersamples the relaxation "
                f"(kappa*dt = {kappa_scale * dt:.3g} > 0.1)",
                ValidityWarning,
                stacklevel=2,
            )
    sz0, sp0, sm0 = initial
    y0 = np.array([sp0, sm0, sz0], dtype=np.complex128)
    m, b = bloch_generator(rate_set, rabi_tilde)
    evals, evecs = np.linalg.eig(m)
    if np.min(np.abs(evals)) > 1e-300:
        y_fix = np.linalg.solve(m, -b)
        coeffs = np.linalg.solve(evecs, y0 - y_fix)
        modes = np.exp(np.outer(t, evals)) * coeffs
        traj = modes @ evecs.T + y_fix
    else:
        # singular generator (kappa = 0 edge): propagate the homogeneous
        # part exactly and add the drift integral mode by mode
        coeffs = np.linalg.solve(evecs, y0)
        beta = np.linalg.solve(evecs, b)
        phases = np.exp(np.outer(t, evals))
        drift = np.where(
            np.abs(evals) > 1e-300,
            (phases - 1.0) / np.where(np.abs(evals) > 1e-300, evals, 1.0),
            t[:, None],
        )
        traj = (phases * coeffs + drift * beta) @ evecs.T
    out = np.empty((t.size, 3), dtype=np.complex128)
    out[:, 0] = traj[:, 2]
    out[:, 1] = traj[:, 0]
    out[:, 2] = traj[:, 1]
    return out


def population_avg(frame: ChrwFrame, params: ModelParams, rate_set: RateSet) -> float:
    """Time-averaged lab-frame excited population in steady state.

    Only the zeroth harmonic of the projector map survives the average, so
    the result needs nothing beyond the steady population difference.
    """
    ss = steady_state(rate_set, frame.rabi_tilde)
    z = bessel_argument(params, frame)
    bracket = frame.cos_2theta * bessel_j(0, z) + frame.sin_2theta * bessel_j(1, z)
    return 0.5 * (1.0 + ss.sz_ss * bracket)


def population_avg_approx(frame: ChrwFrame, params: ModelParams, rate_set: RateSet) -> float:
    """Weak-decay shortcut for the averaged population.

    Uses the leading relations between gamma_0, gamma_z, and the projector
    bracket; kept as the diagnostic partner of population_avg, which is the
    one to quote.
    """
    if params.kappa == 0.0:
        raise DegenerateInputError("approximate population needs kappa > 0")
    g0 = rate_set.gamma_0.real
    gz = rate_set.gamma_z.real
    return 0.5 - g0 * g0 / (2.0 * params.kappa * gz)


def population_time(
    frame: ChrwFrame, params: ModelParams, steady: SteadyState, t: np.ndarray
) -> np.ndarray:
    """Steady-state lab population as a function of time within the cycle.

    Carries the even-harmonic ringing of the projector map; coherence
    contributions of order kappa/rabi_tilde are dropped, as in the
    time-average.
    """
    t_arr = np.asarray(t, dtype=float)
    z = bessel_argument(params, frame)
    l_max = truncation_order(z)
    cos_2t = frame.cos_2theta
    sin_2t = frame.sin_2theta
    base = cos_2t * bessel_j(0, z) + sin_2t * bessel_j(1, z)
    total = np.full(t_arr.shape, base, dtype=float)
    for n in range(1, l_max // 2 + 1):
        weight = 2.0 * cos_2t * bessel_j(2 * n, z) + sin_2t * (
            bessel_j(2 * n + 1, z) - bessel_j(2 * n - 1, z)
        )
        total += weight * np.cos(2.0 * n * params.omega * t_arr)
    return 0.5 * (1.0 + steady.sz_ss * total)


def _transform(params: ModelParams, frame: ChrwFrame, t: float) -> np.ndarray:
    """Unitary taking lab states to the transformed frame at time t."""
    phi = 0.5 * bessel_argument(params, frame) * math.sin(params.omega * t)
    half = 0.5 * params.omega * t
    rot = np.array([[np.exp(1j * half), 0.0], [0.0, np.exp(-1j * half)]])
    kick = np.array(
        [[math.cos(phi), 1j * math.sin(phi)], [1j * math.sin(phi), math.cos(phi)]]
    )
    return rot @ kick


def dressed_components(frame: ChrwFrame, rho: np.ndarray) -> Tuple[float, complex, complex]:
    """(sz, s_plus, s_minus) of a lab density matrix at t = 0.

    At t = 0 the frame transformation is the identity, so the dressed
    matrix elements are plain projections onto the dressed pair.
    """
    up, dn = dressed_states(frame)
    rho_pp = (up.conj() @ rho @ up).real
    rho_mm = (dn.conj() @ rho @ dn).real
    rho_mp = dn.conj() @ rho @ up
    return (rho_pp - rho_mm, complex(rho_mp), complex(rho_mp.conjugate()))


def dressed_to_lab_population(
    frame: ChrwFrame, params: ModelParams, state: Tuple[complex, complex, complex], t: float
) -> float:
    """Lab excited population of a dressed Bloch state at time t.

    Unlike population_time this keeps the coherences, which matter during
    transients; it rebuilds the 2x2 matrix in the dressed basis, undoes the
    frame transformation at time t, and reads off the excited element.
    """
    sz, sp, sm = state
    up, dn = dressed_states(frame)
    rho_pp = 0.5 * (1.0 + sz)
    rho_mm = 0.5 * (1.0 - sz)
    rho_tilde = (
        rho_pp * np.outer(up, up)
        + rho_mm * np.outer(dn, dn)
        + sm * np.outer(up, dn)
        + sp * np.outer(dn, up)
    ).astype(np.complex128)
    u = _transform(params, frame, t)
    rho_lab = u.conj().T @ rho_tilde @ u
    return float(rho_lab[0, 0].real)


def observation_grid(
    params: ModelParams,
    settle_factor: float = 25.0,
    periods: int = 20,
    samples_per_period: int = 96,
) -> np.ndarray:
    """Time grid spanning an integer number of cycles after transients die.

    Starts at settle_factor decay times, rounded up to a period boundary so
    that windowed averages over the grid cover whole cycles.
    """
    if params.kappa <= 0.0:
        raise DegenerateInputError("observation window needs kappa > 0")
    period = 2.0 * math.pi / params.omega
    start = math.ceil(settle_factor / (params.kappa * period)) * period
    return np.linspace(start, start + periods * period, periods * samples_per_period + 1)


def oracle_lindblad(
    params: ModelParams,
    rho0: np.ndarray,
    t_grid: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> np.ndarray:
    """Direct lab-frame integration of the driven, damped two-level system.

    Ground truth for everything above: no frame, no harmonic expansion, no
    co-rotating reduction.  Internally propagates the Bloch vector, which
    keeps the trace and Hermiticity exact by construction; positivity is
    checked on output.  Returns density matrices, shape (len(t_grid), 2, 2).
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (2, 2):
        raise ValueError(f"rho0 must be 2x2, got {rho0.shape}")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-12:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0).real - 1.0) > 1e-12:
        raise ValueError("rho0 must have unit trace")
    if np.min(np.linalg.eigvalsh(rho0)) < -1e-12:
        raise ValueError("rho0 must be positive semidefinite")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(np.diff(t) <= 0.0) or t[0] < 0.0:
        raise ValueError("t_grid must be strictly increasing and non-negative")

    omega0, amp, omega, kappa = params.omega0, params.amplitude, params.omega, params.kappa
    v0 = np.array(
        [2.0 * rho0[0, 1].real, -2.0 * rho0[0, 1].imag, (rho0[0, 0] - rho0[1, 1]).real]
    )

    def rhs(time: float, v: np.ndarray) -> np.ndarray:
        drive = amp * math.cos(omega * time)
        x, y, z = v
        return np.array(
            [
                -omega0 * y - 0.5 * kappa * x,
                omega0 * x - drive * z - 0.5 * kappa * y,
                drive * y - kappa * (z + 1.0),
            ]
        )

    sol = solve_ivp(
        rhs,
        (0.0, float(t[-1])),
        v0,
        method="DOP853",
        t_eval=t,
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise ConvergenceError(f"lab-frame integration failed: {sol.message}")
    v = sol.y.T
    norms = np.linalg.norm(v, axis=1)
    worst = float(np.max(norms))
    if worst > 1.0 + 2e-10:
        raise ConvergenceError(
            f"integrated state left the Bloch ball by {worst - 1.0:.2e}; tighten tolerances"
        )
    out = np.empty((t.size, 2, 2), dtype=np.complex128)
    out[:, 0, 0] = 0.5 * (1.0 + v[:, 2])
    out[:, 1, 1] = 0.5 * (1.0 - v[:, 2])
    out[:, 0, 1] = 0.5 * (v[:, 0] - 1j * v[:, 1])
    out[:, 1, 0] = 0.5 * (v[:, 0] + 1j * v[:, 1])
    return out
