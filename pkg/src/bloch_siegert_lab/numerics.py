"""Self-contained special functions and scalar solvers.

Everything downstream (frame construction, resonance searches, rate
tensors) funnels through the Bessel evaluator and the two bracketed
scalar solvers defined here, so they are kept dependency-free and are
cross-checked against scipy in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, NoSignChangeError

_EPS = float(np.finfo(float).eps)

# series/recurrence crossover for |x|; below this the alternating power
# series converges without destructive cancellation
_SERIES_CUTOFF = 8.0


@dataclass(frozen=True)
class Tolerance:
    """Convergence budget shared by the iterative solvers.

    abs_tol and rel_tol enter stopping rules of the form
    ``width <= rel_tol*|x| + abs_tol`` (and ``|f| <= abs_tol`` for root
    finding); max_iter bounds the iteration count.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0.0) or not math.isfinite(self.abs_tol):
            raise ValueError(f"abs_tol must be positive and finite, got {self.abs_tol}")
        if not (self.rel_tol > 0.0) or not math.isfinite(self.rel_tol):
            raise ValueError(f"rel_tol must be positive and finite, got {self.rel_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


DEFAULT_TOL = Tolerance()


def _bessel_series(n: int, x: float) -> float:
    # ascending series sum_k (-1)^k (x/2)^(n+2k) / (k! (n+k)!), |x| < 8
    half = 0.5 * x
    if half == 0.0:  # includes subnormal x that underflows the halving
        return 1.0 if n == 0 else 0.0
    # leading term via logs so large n cannot overflow the intermediate power
    log_t0 = n * math.log(half) - math.lgamma(n + 1.0)
    if log_t0 < -745.0:  # underflows to zero in double precision
        return 0.0
    term = math.exp(log_t0)
    total = term
    q = half * half
    for k in range(400):
        term *= -q / ((k + 1.0) * (n + k + 1.0))
        total += term
        if abs(term) <= 1e-17 * abs(total) + 5e-324:
            return total
    raise ConvergenceError(f"Bessel series stalled at n={n}, x={x}")


def _bessel_downward(n_max: int, x: float) -> np.ndarray:
    # Miller's algorithm: recur J_{k-1} = (2k/x) J_k - J_{k+1} downward from
    # a seed far above max(n_max, x), then scale with 1 = J0 + 2 sum J_{2m}
    m = max(n_max, int(math.ceil(x))) + 50
    m += m & 1
    out = np.zeros(n_max + 1)
    jp = 0.0
    jc = 1e-30
    norm = 0.0
    for k in range(m, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp = jc
        jc = jm
        order = k - 1
        if order <= n_max:
            out[order] = jc
        if order >= 2 and order % 2 == 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            norm *= 1e-250
            out *= 1e-250
    norm += jc  # jc now holds the unscaled J0
    return out / norm


def bessel_j_sequence(n_max: int, x: float) -> np.ndarray:
    """Return ``array([J_0(x), ..., J_{n_max}(x)])`` in one pass."""
    if n_max < 0:
        raise DomainError(f"order must be >= 0, got {n_max}")
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    ax = abs(x)
    if ax < _SERIES_CUTOFF:
        vals = np.array([_bessel_series(n, ax) for n in range(n_max + 1)])
    else:
        vals = _bessel_downward(n_max, ax)
    if x < 0.0:
        vals = vals * np.where(np.arange(n_max + 1) % 2 == 0, 1.0, -1.0)
    return vals


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) for integer n >= 0."""
    if n != int(n) or n < 0:
        raise DomainError(f"order must be a nonnegative integer, got {n}")
    n = int(n)
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    sign = -1.0 if (x < 0.0 and n % 2 == 1) else 1.0
    ax = abs(x)
    if ax < _SERIES_CUTOFF:
        return sign * _bessel_series(n, ax)
    return sign * float(_bessel_downward(n, ax)[n])


def bessel_j0_minus_1(x: float) -> float:
    """J_0(x) - 1 without cancellation for small |x|.

    The renormalized detuning subtracts quantities that agree to O(x^2);
    evaluating J0 - 1 by its own series keeps the difference accurate to
    machine precision relative to itself rather than to 1.
    """
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    ax = abs(x)
    if ax >= 1.0:
        return bessel_j(0, ax) - 1.0
    if ax == 0.0:
        return 0.0
    q = 0.25 * ax * ax
    term = -q
    total = term
    for k in range(1, 60):
        term *= -q / ((k + 1.0) * (k + 1.0))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


@lru_cache(maxsize=1)
def first_bessel_j0_zero() -> float:
    """Smallest positive zero of J_0, found by root bracketing on [2, 3]."""
    return find_root_bracketed(
        lambda t: bessel_j(0, t), 2.0, 3.0, Tolerance(1e-15, 1e-15, 200)
    )


def find_root_bracketed(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Brent's method on a sign-changing bracket [a, b].

    Combines inverse quadratic interpolation and secant steps with a
    bisection fallback, so convergence is guaranteed for any continuous f
    with f(a)*f(b) <= 0.  Stops when |f| <= abs_tol or the bracket has
    shrunk to rel_tol*|x| + abs_tol.
    """
    fa = f(a)
    fb = f(b)
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise DomainError(f"f is not finite at the bracket endpoints: f({a})={fa}, f({b})={fb}")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise NoSignChangeError(f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * (tol.rel_tol * abs(b) + tol.abs_tol)
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0 or abs(fb) <= tol.abs_tol:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                # secant step
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                # inverse quadratic interpolation
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if xm > 0.0 else -tol1
        fb = f(b)
        if not math.isfinite(fb):
            raise DomainError(f"f returned a non-finite value at {b}")
    raise ConvergenceError(f"root search did not converge in {tol.max_iter} iterations")


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_scalar_bracketed(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Golden-section minimum of f on [a, b].

    Assumes f is unimodal on the bracket; used where a derivative has no
    clean sign change and only the minimum position is meaningful.
    """
    if not (b > a):
        raise DomainError(f"invalid bracket [{a}, {b}]")
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    if not (math.isfinite(f1) and math.isfinite(f2)):
        raise DomainError("f is not finite inside the bracket")
    for _ in range(tol.max_iter):
        mid = 0.5 * (a + b)
        if (b - a) <= tol.rel_tol * abs(mid) + tol.abs_tol:
            return mid
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    raise ConvergenceError(f"minimization did not converge in {tol.max_iter} iterations")
