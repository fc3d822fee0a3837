"""Exact one-unitary-matrix reference: Bessel Toeplitz determinant and moment curve.

Integrating the triangle weight over two of its three unitaries leaves the
single-matrix integral over U(N) with weight exp(-N x Tr(U + U*)).  Its
partition function is the N x N Toeplitz determinant of modified Bessel
functions I_{k-m} evaluated at z = -2 x N, and the first moment follows by
differentiating the determinant in the coupling.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

_Z_GUARD = 700.0  # exp-scale overflow guard on the Bessel argument


def bessel_i(q: int, z: float) -> float:
    """Modified Bessel function of the first kind, integer order.

    Power series sum_k (z/2)^(2k+|q|) / (k! (k+|q|)!) with term-ratio
    stopping; all terms share one sign for real z, so the sum is stable.
    """
    q = abs(int(q))
    if abs(z) > _Z_GUARD:
        raise OverflowError(f"bessel_i argument |z|={abs(z):.3g} beyond guard {_Z_GUARD}")
    half = z / 2.0
    if half == 0.0:
        return 1.0 if q == 0 else 0.0
    # leading term (z/2)^q / q!
    term = 1.0
    for j in range(1, q + 1):
        term *= half / j
    total = term
    ratio = half * half
    for k in range(1, 600):
        term *= ratio / (k * (k + q))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def bessel_i_derivative(q: int, z: float) -> float:
    """d/dz I_q(z) = (I_{q-1}(z) + I_{q+1}(z)) / 2."""
    return 0.5 * (bessel_i(q - 1, z) + bessel_i(q + 1, z))


def _toeplitz_values(N: int, z: float, fn) -> np.ndarray:
    vals = np.array([fn(q, z) for q in range(N)])
    idx = np.arange(N)
    return vals[np.abs(idx[:, None] - idx[None, :])]


def partition_function(N: int, x: float) -> float:
    """det of the N x N Toeplitz matrix [I_{k-m}(-2 x N)] via dense LU."""
    if N < 1:
        raise ValueError("N must be >= 1")
    z = -2.0 * x * N
    return float(np.linalg.det(_toeplitz_values(N, z, bessel_i)))


@dataclass
class GwwCurve:
    """Sampled exact solution: partition function and first moment on an x grid."""

    dim: int
    x: np.ndarray
    z: np.ndarray  # partition-function values
    y: np.ndarray  # first moment, NaN where flagged
    flags: list[str]  # per-sample: "" | "near-singular" | "fd-fallback"

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "Z", "y"])
            for xi, zi, yi in zip(self.x, self.z, self.y):
                writer.writerow([repr(float(xi)), repr(float(zi)), repr(float(yi))])


def _bessel_i_long(q: int, z) -> np.longdouble:
    """Extended-precision twin of :func:`bessel_i` for the derivative path."""
    q = abs(int(q))
    half = np.longdouble(z) / 2
    if half == 0:
        return np.longdouble(1.0 if q == 0 else 0.0)
    term = np.longdouble(1.0)
    for j in range(1, q + 1):
        term *= half / j
    total = term
    ratio = half * half
    for k in range(1, 700):
        term *= ratio / (k * (k + q))
        total += term
        if abs(term) <= np.longdouble(1e-21) * abs(total):
            break
    return total


def _lu_trace_solve(m: np.ndarray, dm: np.ndarray) -> float | None:
    """trace(M^-1 dM) by partial-pivoting elimination; None on breakdown.

    Runs in longdouble: the Bessel Toeplitz matrices reach condition 1e9
    at strong coupling, where double precision costs eight digits.
    """
    n = m.shape[0]
    a = np.hstack([m, dm]).astype(np.longdouble)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            return None
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
        for row in range(col + 1, n):
            a[row, col:] -= (a[row, col] / a[col, col]) * a[col, col:]
    x = a[:, n:]
    for col in range(n - 1, -1, -1):
        x[col] /= a[col, col]
        for row in range(col):
            x[row] -= a[row, col] * x[col]
    return float(np.trace(x))


def _y_analytic(N: int, x: float) -> float | None:
    """Determinant-derivative identity dZ = Z tr(M^-1 dM); None if ill-conditioned."""
    z = -2.0 * x * N
    m = _toeplitz_values(N, z, bessel_i)
    if not np.isfinite(m).all():
        return None
    if np.linalg.cond(m) > 1e12:
        return None
    ml = _toeplitz_values(N, np.longdouble(z), _bessel_i_long)
    # dM/dx = dM/dz * dz/dx with dz/dx = -2N and I_q' = (I_{q-1} + I_{q+1})/2
    vals = [_bessel_i_long(q, np.longdouble(z)) for q in range(N + 1)]
    vals = [vals[1]] + vals  # I_{-1} = I_1 prepended at index 0 -> order -1
    dvals = np.array(
        [(vals[q] + vals[q + 2]) / 2 for q in range(N)], dtype=np.longdouble
    )
    idx = np.arange(N)
    dml = dvals[np.abs(idx[:, None] - idx[None, :])] * np.longdouble(-2.0 * N)
    dlog = _lu_trace_solve(ml, dml)  # (1/Z) dZ/dx
    if dlog is None:
        return None
    return -dlog / (2.0 * N * N)


def _y_finite_difference(N: int, x: float) -> tuple[float, bool]:
    h = 1e-5 * max(1.0, abs(x))
    zp = partition_function(N, x + h)
    zm = partition_function(N, x - h)
    z0 = partition_function(N, x)
    if z0 <= 0 or not np.isfinite([zp, zm, z0]).all():
        return math.nan, False
    return -(zp - zm) / (2.0 * h) / (2.0 * z0 * N * N), True


def first_moment_curve(N: int, x_grid: np.ndarray) -> GwwCurve:
    """y_N(x) = -(1 / (2 Z_N N^2)) dZ_N/dx on a grid, analytic derivative
    with a central finite-difference fallback."""
    xs = np.asarray(x_grid, dtype=float)
    zs = np.empty_like(xs)
    ys = np.empty_like(xs)
    flags: list[str] = []
    for i, x in enumerate(xs):
        zs[i] = partition_function(N, x)
        flag = ""
        if zs[i] <= 0 or not np.isfinite(zs[i]):
            ys[i] = math.nan
            flags.append("near-singular")
            continue
        y = _y_analytic(N, x)
        if y is None:
            y, ok = _y_finite_difference(N, x)
            flag = "fd-fallback" if ok else "near-singular"
        ys[i] = y
        flags.append(flag)
    return GwwCurve(dim=N, x=xs, z=zs, y=ys, flags=flags)


def curve_grid(xmin: float = -3.0, xmax: float = 3.0, points: int = 601) -> np.ndarray:
    if xmin == xmax:
        return np.array([xmin])
    return np.linspace(xmin, xmax, points)
