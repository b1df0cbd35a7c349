"""Derivative-free search for star-split metrics and parameter scans.

The objective is the defect ``|| del delbar (star rho) ||`` measured in the
norm of a fixed reference metric (the identity matrix), not of the candidate
metric itself: the trace scalar obeys f(lambda omega) = f(omega)/lambda, so
measuring in the moving metric would create spurious descent directions
along conformal rays.

Minimisation is simplex descent (reflection/expansion/contraction/shrink
coefficients 1, 2, 1/2, 1/2) with seeded random restarts; positive
definiteness violations are penalised with +inf.  Runs are deterministic
for a fixed seed, ties between restarts resolve to the earliest index.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import scipy.optimize

from . import analysis
from .complex_structure import InvariantComplexManifold
from .errors import InputError
from .metric import HermitianMetric, form_norm

DEFAULT_TOL = 1e-10


# ----------------------------------------------------------------------
# metric families
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class MetricFamily:
    """Parameterised family of candidate metrics.

    ``build`` must raise InputError on parameter vectors that do not give a
    positive definite matrix; the search turns that into an +inf penalty.
    """

    kind: str
    dim: int
    n_params: int
    build: Callable[[np.ndarray], HermitianMetric]
    start: np.ndarray


def diagonal_family(n: int) -> MetricFamily:
    """Diagonal metrics diag(x_1..x_n), positive cone."""
    def build(x: np.ndarray) -> HermitianMetric:
        if np.any(np.asarray(x) <= 0):
            raise InputError("diagonal entries must be positive")
        return HermitianMetric.diagonal(np.asarray(x, dtype=float))
    return MetricFamily("diagonal", n, n, build, np.ones(n))


def hermitian_family(n: int) -> MetricFamily:
    """Full Hermitian metrics: n diagonal entries plus re/im of the strict
    upper triangle."""
    n_off = n * (n - 1) // 2
    def build(x: np.ndarray) -> HermitianMetric:
        x = np.asarray(x, dtype=float)
        H = np.zeros((n, n), dtype=complex)
        H[np.diag_indices(n)] = x[:n]
        pos = n
        for j in range(n):
            for k in range(j + 1, n):
                H[j, k] = complex(x[pos], x[pos + 1])
                H[k, j] = H[j, k].conjugate()
                pos += 2
        return HermitianMetric(H)
    start = np.concatenate([np.ones(n), np.zeros(2 * n_off)])
    return MetricFamily("hermitian", n, n + 2 * n_off, build, start)


def family_by_name(kind: str, n: int) -> MetricFamily:
    if kind == "diagonal":
        return diagonal_family(n)
    if kind == "hermitian":
        return hermitian_family(n)
    raise InputError(f"unknown metric family {kind!r}")


# ----------------------------------------------------------------------
# the objective
# ----------------------------------------------------------------------
def pss_defect(M: InvariantComplexManifold, g: HermitianMetric, *,
               tol: float = DEFAULT_TOL) -> float:
    """|| del delbar (star rho) || in the identity reference metric; zero
    exactly on pluriclosed star split metrics."""
    sr = analysis.star_rho(M, g, tol=tol)
    defect_form = 1j * M.del_(M.delbar(sr))
    return form_norm(HermitianMetric.identity(M.dim), defect_form)


@dataclass
class SearchResult:
    best_params: np.ndarray
    best_defect: float
    report: analysis.MetricReport
    evaluations: int
    restarts: int
    f_signs_observed: List[int]
    f_sign_changed: bool

    def to_json_dict(self) -> dict:
        return {
            "best_params": [float(v) for v in self.best_params],
            "best_defect": self.best_defect,
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "f_signs_observed": list(self.f_signs_observed),
            "f_sign_changed": self.f_sign_changed,
            "report": self.report.to_json_dict(),
        }


def search_pss(M: InvariantComplexManifold, family: MetricFamily, *,
               budget: int = 2000, seed: int = 0, restarts: int = 4,
               tol: float = DEFAULT_TOL) -> SearchResult:
    """Minimise the star-split defect over the family by simplex descent
    with random restarts.

    Deterministic for fixed seed.  The winning metric is re-validated with
    a full classification report.  The sign of the trace scalar f seen at
    each feasible evaluation is recorded (not asserted), to surface sign
    changes along the family.
    """
    if budget < 1:
        raise InputError("budget must be at least 1")
    if M.dim != family.dim:
        raise InputError("family/manifold dimension mismatch")
    rng = np.random.default_rng(seed)
    signs_seen: set = set()
    evaluations = [0]

    def objective(x: np.ndarray) -> float:
        evaluations[0] += 1
        try:
            g = family.build(x)
        except InputError:
            return float("inf")
        value = pss_defect(M, g, tol=tol)
        f = analysis.f_scalar(M, g, tol=tol)
        signs_seen.add(0 if abs(f) < 1e-12 else (1 if f > 0 else -1))
        return value

    try:
        family.build(family.start)
    except InputError as exc:
        raise InputError(f"family start point is infeasible: {exc}") from exc

    starts = [np.asarray(family.start, dtype=float)]
    for _ in range(restarts - 1):
        starts.append(family.start * (1.0 + 0.5 * rng.standard_normal(family.n_params))
                      + 0.1 * rng.standard_normal(family.n_params))

    best_x: Optional[np.ndarray] = None
    best_val = float("inf")
    maxfev = max(family.n_params + 2, budget // max(1, len(starts)))
    for x0 in starts:
        res = scipy.optimize.minimize(
            objective, x0, method="Nelder-Mead",
            options={"maxfev": maxfev, "xatol": 1e-12, "fatol": 1e-14})
        val = float(res.fun)
        if np.isfinite(val) and val < best_val:
            best_val = val
            best_x = np.asarray(res.x, dtype=float)
        if evaluations[0] >= budget:
            break

    if best_x is None:
        raise InputError("search found no positive definite metric in the family")

    g_best = family.build(best_x)
    report = analysis.classify(M, g_best, tol=tol)
    signs = sorted(signs_seen)
    return SearchResult(
        best_params=best_x,
        best_defect=pss_defect(M, g_best, tol=tol),
        report=report,
        evaluations=evaluations[0],
        restarts=len(starts),
        f_signs_observed=signs,
        f_sign_changed=(1 in signs_seen and -1 in signs_seen),
    )


# ----------------------------------------------------------------------
# parameter scans
# ----------------------------------------------------------------------
@dataclass
class ScanRow:
    value: complex
    f: float
    flags: Dict[str, bool]
    eigenvalues: List[float]

    def to_json_dict(self) -> dict:
        return {"param": [self.value.real, self.value.imag], "f": self.f,
                "flags": dict(self.flags), "eigenvalues": list(self.eigenvalues)}


def scan(M: InvariantComplexManifold, param_name: str, values: Sequence[complex], *,
         metric: Union[HermitianMetric, Callable[[InvariantComplexManifold], HermitianMetric], None] = None,
         tol: float = DEFAULT_TOL) -> List[ScanRow]:
    """Re-bind one manifold parameter per value and classify each instance."""
    if param_name not in M.parameter_names():
        raise InputError(f"manifold {M.name!r} has no parameter {param_name!r}")
    rows: List[ScanRow] = []
    for value in values:
        bound = M.bind(**{param_name: complex(value)})
        bound.validate(tol)
        if metric is None:
            g = HermitianMetric.identity(M.dim)
        elif callable(metric):
            g = metric(bound)
        else:
            g = metric
        report = analysis.classify(bound, g, tol=tol)
        rows.append(ScanRow(
            value=complex(value),
            f=report.f,
            flags={k: v.holds for k, v in report.flags.items()},
            eigenvalues=report.eigenvalues,
        ))
    return rows


def scan_rows_to_csv(rows: List[ScanRow]) -> str:
    buf = io.StringIO()
    flag_names = list(analysis.FLAG_ORDER)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "f"] + flag_names + ["eigenvalues"])
    for row in rows:
        writer.writerow(
            [f"{row.value.real:.17g}{row.value.imag:+.17g}i", f"{row.f:.17g}"]
            + [str(row.flags.get(name, "")) for name in flag_names]
            + [";".join(f"{v:.17g}" for v in row.eigenvalues)])
    return buf.getvalue()


def scan_rows_to_json(rows: List[ScanRow]) -> list:
    return [row.to_json_dict() for row in rows]
