"""Triangle-model moment recursion, Toeplitz moment matrix and positivity scans.

The large-N loop equations of the triangle close on the moments
``m_j = lim <(1/N) Tr hol zeta^j>``: with ``m_0 = 1`` and ``m_1 = y`` free,

    m_{n+1} = m_{n-1} + (1/x) * sum_{l=0}^{n-1} m_l * m_{n-l}.

Reality (``m_{-j} = m_j``) arranges the moments into a symmetric Toeplitz
matrix whose positive semidefiniteness carves out the admissible (x, y)
region; scanning leading principal minors over a grid reproduces it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .laurent import YXPoly

_MOMENTS: list[YXPoly] = [YXPoly.one(), YXPoly.y()]


def moment(n: int) -> YXPoly:
    """Exact m_n(x, y); memoized.  m_{-n} equals m_n by reality."""
    n = abs(int(n))
    while len(_MOMENTS) <= n:
        k = len(_MOMENTS) - 1  # compute m_{k+1}
        s = YXPoly.zero()
        for l in range(0, k):
            s = s + _MOMENTS[l] * _MOMENTS[k - l]
        _MOMENTS.append(_MOMENTS[k - 1] + s * YXPoly.inv_x())
    return _MOMENTS[n]


def moment_matrix(order: int, x: float, y: float) -> np.ndarray:
    """Symmetric Toeplitz matrix with (i, j) entry m_{|i-j|}(x, y)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if x == 0:
        raise ValueError("moments are singular at x = 0")
    vals = [moment(k).evaluate(x, y) for k in range(order)]
    idx = np.arange(order)
    return np.array(vals)[np.abs(idx[:, None] - idx[None, :])]


def _minor_block(mvals: np.ndarray, order: int) -> np.ndarray:
    """Batched Toeplitz assembly: mvals (..., order) -> matrices (..., order, order)."""
    idx = np.abs(np.arange(order)[:, None] - np.arange(order)[None, :])
    return mvals[..., idx]


def leading_minors(mvals: np.ndarray, max_order: int) -> np.ndarray:
    """det M_1 .. det M_n for Toeplitz matrices built from m-values.

    ``mvals`` has shape (..., max_order); the result has shape
    (..., max_order).  Dense pivoted factorization per leading block keeps
    the computation robust for indefinite and near-singular matrices.
    """
    mats = _minor_block(mvals, max_order)
    out = np.empty(mvals.shape[:-1] + (max_order,))
    out[..., 0] = mvals[..., 0]
    for k in range(2, max_order + 1):
        out[..., k - 1] = np.linalg.det(mats[..., :k, :k])
    return out


def _first_failure(minors: np.ndarray, tol: float) -> np.ndarray:
    """First order whose minor drops below -tol or is non-finite; 0 if none."""
    bad = (minors < -tol) | ~np.isfinite(minors)
    any_bad = bad.any(axis=-1)
    first = bad.argmax(axis=-1) + 1
    return np.where(any_bad, first, 0)


def feasible(x: float, y: float, max_order: int, tol: float = 1e-10) -> tuple[bool, int | None]:
    """Whether all leading principal minors up to ``max_order`` stay >= -tol.

    Returns (feasible, first failing order or None).  Non-finite minors
    (overflow at extreme couplings) count as failures.
    """
    if x == 0:
        raise ValueError("moments are singular at x = 0")
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    mvals = np.array([moment(k).evaluate(x, y) for k in range(max_order)])
    minors = leading_minors(mvals, max_order)
    first = int(_first_failure(minors, tol))
    return (first == 0), (first or None)


@dataclass
class FeasibilityMap:
    """Per-cell positivity depth over an (x, y) grid.

    ``max_feasible[i, j]`` is the highest order n such that minors 1..n all
    pass (0 if even order 1 fails, -1 for undefined cells at x = 0);
    ``first_failing[i, j]`` is the first failing order (0 = none).
    """

    xs: np.ndarray
    ys: np.ndarray
    max_order: int
    tol: float
    max_feasible: np.ndarray
    first_failing: np.ndarray
    undefined: np.ndarray
    overflow: np.ndarray

    def feasible_cell_count(self, order: int) -> int:
        return int((self.max_feasible >= order).sum())

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "max_feasible_order", "first_failing_order"])
            for i, x in enumerate(self.xs):
                for j, y in enumerate(self.ys):
                    writer.writerow(
                        [repr(float(x)), repr(float(y)),
                         int(self.max_feasible[i, j]), int(self.first_failing[i, j])]
                    )

    def to_svg(self, path: str, cell: float = 2.0) -> None:
        """Compact heat map: one run-length-merged rect per row segment."""
        colors = _order_palette(self.max_order)
        rows = []
        for i in range(len(self.xs)):
            j = 0
            while j < len(self.ys):
                v = self.max_feasible[i, j]
                j2 = j
                while j2 + 1 < len(self.ys) and self.max_feasible[i, j2 + 1] == v:
                    j2 += 1
                color = "#888888" if v < 0 else colors[int(v)]
                rows.append(
                    f'<rect x="{i * cell:.1f}" y="{(len(self.ys) - 1 - j2) * cell:.1f}" '
                    f'width="{cell:.1f}" height="{(j2 - j + 1) * cell:.1f}" fill="{color}"/>'
                )
                j = j2 + 1
        w = len(self.xs) * cell
        h = len(self.ys) * cell
        with open(path, "w") as fh:
            fh.write(
                f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
                f'viewBox="0 0 {w:.0f} {h:.0f}">\n'
            )
            fh.write("\n".join(rows))
            fh.write("\n</svg>\n")


def _order_palette(max_order: int) -> list[str]:
    # light-to-dark ramp: deeper positivity = darker
    palette = []
    for k in range(max_order + 1):
        t = k / max_order if max_order else 0.0
        g = int(240 - 200 * t)
        palette.append(f"#{g:02x}{g:02x}{255 - int(120 * t):02x}")
    return palette


def scan_region(
    xs: np.ndarray,
    ys: np.ndarray,
    max_order: int,
    tol: float = 1e-10,
    threads: int = 1,
) -> FeasibilityMap:
    """Positivity depth of every grid cell; x = 0 columns are undefined.

    Deterministic row-major assembly regardless of ``threads``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    X = xs[:, None]
    Y = ys[None, :]
    undefined = np.broadcast_to(X == 0, (len(xs), len(ys))).copy()
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        mvals = np.stack(
            [moment(k).evaluate_grid(X, Y) for k in range(max_order)], axis=-1
        )
        if threads > 1:
            chunks = np.array_split(np.arange(len(xs)), threads)
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda ix: leading_minors(mvals[ix], max_order), chunks))
            minors = np.concatenate(parts, axis=0)
        else:
            minors = leading_minors(mvals, max_order)
    first = _first_failure(minors, tol)
    max_feasible = np.where(first == 0, max_order, first - 1)
    overflow = ~np.isfinite(minors).all(axis=-1) & ~undefined
    max_feasible = np.where(undefined, -1, max_feasible)
    first = np.where(undefined, 0, first)
    return FeasibilityMap(
        xs=xs,
        ys=ys,
        max_order=max_order,
        tol=tol,
        max_feasible=max_feasible.astype(np.int64),
        first_failing=first.astype(np.int64),
        undefined=undefined,
        overflow=overflow,
    )


def default_grid(
    xmin: float = -3.0,
    xmax: float = 3.0,
    ymin: float = -1.2,
    ymax: float = 1.2,
    xres: int = 300,
    yres: int = 300,
) -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(xmin, xmax, xres), np.linspace(ymin, ymax, yres)


def dump_moment_table(n_max: int) -> list[dict]:
    """JSON-ready moment table: [{n, terms: [{c, a, b}]}]."""
    table = []
    for n in range(n_max + 1):
        table.append(
            {"n": n, "terms": [{"c": c, "a": a, "b": b} for a, b, c in moment(n).terms]}
        )
    return table
