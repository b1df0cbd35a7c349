"""Metric invariants, classification and their pair/triple generalisations.

For a metric ``omega`` on an n-dimensional model (n >= 3) the basic objects
are:

    rho        unique (1,1)-form with  i del delbar omega_{n-2} = omega_{n-2} ^ rho
    star_rho   its Hodge dual, also given in closed form by
               (f/(n-1)) omega_{n-1} - i del delbar omega_{n-2}
    f          the real scalar  (omega ^ i del delbar omega_{n-2}) / omega_n,
               equal to (n-1) * Lambda(rho)

Both redundant routes are computed and their agreement recorded; on an
invariant model f is automatically constant, and is checked to be real.

A metric is classified by the vanishing of: d omega (kahler),
del delbar omega (SKT), del delbar omega_{n-2} (astheno),
omega ^ del delbar omega_{n-2} (n2_gauduchon), d omega_{n-1} (balanced),
del delbar omega_{n-1} (gauduchon), del delbar star_rho
(pluriclosed_star_split) and d star_rho (closed_star_split).  Each flag
carries its defect residual; a flag holds when the defect is below
tol * (1 + scale of the differentiated form).

Pairs (omega, gamma) divide i del delbar omega_{n-2} by gamma_{n-2} instead
and star with gamma; triples (phi, omega, gamma) run the pair pipeline on
the pulled-back metric phi* omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .complex_structure import (InvariantComplexManifold, PullbackMap, pullback,
                                pullback_metric, structure_compatibility,
                                total_volume)
from .errors import AlgebraError, InputError
from .forms import Form
from .metric import (HermitianMetric, divide_by_power, form_norm, hodge_star,
                     inner_product, lefschetz_lambda, omega_form, omega_power)

DEFAULT_TOL = 1e-10

FLAG_ORDER = ("kahler", "balanced", "gauduchon", "SKT", "astheno_kahler",
              "n2_gauduchon", "pluriclosed_star_split", "closed_star_split")


@dataclass(frozen=True)
class FlagResult:
    holds: bool
    defect: float
    threshold: float

    def to_json_dict(self) -> dict:
        return {"holds": self.holds, "defect": self.defect, "threshold": self.threshold}


def _flag(defect: float, scale: float, tol: float) -> FlagResult:
    threshold = tol * (1.0 + scale)
    return FlagResult(defect < threshold, defect, threshold)


def _form_json(u: Form) -> dict:
    out = {}
    for holo, anti, c in u.terms():
        key = ",".join(str(k) for k in holo) + "|" + ",".join(str(k) for k in anti)
        out[key] = [c.real, c.imag]
    return out


@dataclass
class MetricReport:
    manifold: str
    dim: int
    metric: str
    f: float
    rho: Form
    star_rho: Form
    eigenvalues: List[float]
    flags: Dict[str, FlagResult]
    del_omega_norm_sq: float
    integral_f: float
    f_cross_residual: float
    star_rho_cross_residual: float
    pss_cross_defect: float
    tolerance: float
    notes: List[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "dim": self.dim,
            "metric": self.metric,
            "f": self.f,
            "flags": {k: v.to_json_dict() for k, v in self.flags.items()},
            "eigenvalues": list(self.eigenvalues),
            "rho": _form_json(self.rho),
            "star_rho": _form_json(self.star_rho),
            "norms": {"del_omega_sq": self.del_omega_norm_sq,
                      "integral_f": self.integral_f},
            "residuals": {"f_cross": self.f_cross_residual,
                          "star_rho_cross": self.star_rho_cross_residual,
                          "pss_cross_defect": self.pss_cross_defect},
            "tolerance": self.tolerance,
            "notes": list(self.notes),
        }


# ----------------------------------------------------------------------
# core invariants
# ----------------------------------------------------------------------
def _laplacian_source(M: InvariantComplexManifold, u: Form) -> Form:
    """i del delbar u."""
    return 1j * M.del_(M.delbar(u))


def _real_scalar(value: complex, tol: float, what: str) -> float:
    if abs(value.imag) > tol * (1.0 + abs(value)):
        raise AlgebraError(f"{what} must be real, got {value}")
    return float(value.real)


def _require_n3(M: InvariantComplexManifold) -> None:
    if M.dim < 3:
        raise InputError(f"invariants need complex dimension >= 3, got {M.dim}")


def rho(M: InvariantComplexManifold, g: HermitianMetric, *, tol: float = DEFAULT_TOL) -> Form:
    """The (1,1)-form with i del delbar omega_{n-2} = omega_{n-2} ^ rho."""
    _require_n3(M)
    n = M.dim
    src = _laplacian_source(M, omega_power(g, n - 2))
    return divide_by_power(g, n - 2, src, tol=tol)


def f_scalar(M: InvariantComplexManifold, g: HermitianMetric, *, tol: float = DEFAULT_TOL) -> float:
    """(omega ^ i del delbar omega_{n-2}) / omega_n as a real constant."""
    _require_n3(M)
    n = M.dim
    src = _laplacian_source(M, omega_power(g, n - 2))
    num = M.integrate(omega_form(g).wedge(src))
    den = M.integrate(omega_power(g, n))
    return _real_scalar(num / den, tol, "the trace scalar f")


def star_rho(M: InvariantComplexManifold, g: HermitianMetric, *,
             tol: float = DEFAULT_TOL) -> Form:
    """Hodge dual of rho, via the closed form cross-checked against the
    direct star (agreement enforced at ``tol``)."""
    closed, direct, resid = _star_rho_routes(M, g, tol)
    if resid > tol * (1.0 + closed.max_abs()):
        raise AlgebraError(f"star-rho routes disagree (residual {resid:.3e})")
    return closed


def _star_rho_routes(M: InvariantComplexManifold, g: HermitianMetric, tol: float
                     ) -> Tuple[Form, Form, float]:
    n = M.dim
    src = _laplacian_source(M, omega_power(g, n - 2))
    f = f_scalar(M, g, tol=tol)
    closed = (f / (n - 1)) * omega_power(g, n - 1) - src
    direct = hodge_star(g, rho(M, g, tol=tol))
    return closed, direct, (closed - direct).max_abs()


def eigenvalues_rel_omega(g: HermitianMetric, gamma_form: Form, *,
                          tol: float = DEFAULT_TOL) -> List[float]:
    """Spectrum of a real (n-1,n-1)-form relative to the metric: the
    generalized eigenvalues, against the metric matrix, of the coefficient
    matrix of its Hodge dual (a (1,1)-form)."""
    n = g.dim
    if gamma_form.is_zero():
        return [0.0] * n
    if gamma_form.bidegree() != (n - 1, n - 1):
        raise InputError("eigenvalue report expects an (n-1,n-1)-form")
    alpha = hodge_star(g, gamma_form)
    return eigenvalues_of_11(g, alpha, tol=tol)


def eigenvalues_of_11(g: HermitianMetric, alpha: Form, *, tol: float = DEFAULT_TOL
                      ) -> List[float]:
    """Generalized eigenvalues of a real (1,1)-form against the metric."""
    R = matrix_of_11(alpha)
    scale = max(1.0, float(np.abs(R).max()))
    if np.abs(R - R.conj().T).max() > tol * scale:
        raise InputError("eigenvalue report expects a real form")
    R = 0.5 * (R + R.conj().T)
    return [float(v) for v in scipy.linalg.eigh(R, g.H, eigvals_only=True)]


def matrix_of_11(alpha: Form) -> np.ndarray:
    """Coefficient matrix R with alpha = i sum R[j,k] phi_j ^ phibar_k."""
    n = alpha.dim
    if not alpha.is_zero() and alpha.bidegree() != (1, 1):
        raise InputError("expected a (1,1)-form")
    R = np.zeros((n, n), dtype=complex)
    for (imask, jmask), c in alpha._terms.items():
        j = imask.bit_length() - 1
        k = jmask.bit_length() - 1
        R[j, k] = c / 1j
    return R


# ----------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------
def classify(M: InvariantComplexManifold, g: HermitianMetric, *,
             tol: float = DEFAULT_TOL, notes: Optional[List[str]] = None) -> MetricReport:
    _require_n3(M)
    n = M.dim
    w = omega_form(g)
    w_nm2 = omega_power(g, n - 2)
    w_nm1 = omega_power(g, n - 1)
    src = _laplacian_source(M, w_nm2)

    f = f_scalar(M, g, tol=tol)
    rho_form = rho(M, g, tol=tol)
    f_lambda = (n - 1) * lefschetz_lambda(g, rho_form).coefficient((), ())
    f_cross = abs(f - f_lambda)

    sr_closed, sr_direct, sr_resid = _star_rho_routes(M, g, tol)

    pss_defect_primary = form_norm(g, _laplacian_source(M, sr_closed))
    pss_defect_cross = form_norm(g, _laplacian_source(M, f * w_nm1))

    defects = {
        "kahler": (form_norm(g, M.d(w)), form_norm(g, w)),
        "balanced": (form_norm(g, M.d(w_nm1)), form_norm(g, w_nm1)),
        "gauduchon": (form_norm(g, _laplacian_source(M, w_nm1)), form_norm(g, w_nm1)),
        "SKT": (form_norm(g, _laplacian_source(M, w)), form_norm(g, w)),
        "astheno_kahler": (form_norm(g, src), form_norm(g, w_nm2)),
        "n2_gauduchon": (form_norm(g, w.wedge(src)), form_norm(g, w_nm1)),
        "pluriclosed_star_split": (pss_defect_primary, form_norm(g, sr_closed)),
        "closed_star_split": (form_norm(g, M.d(sr_closed)), form_norm(g, sr_closed)),
    }
    flags = {key: _flag(defect, scale, tol) for key, (defect, scale) in defects.items()}

    vol = total_volume(M, g)
    del_w = M.del_(w)
    del_norm_sq = float((inner_product(g, del_w, del_w) * vol).real) if not del_w.is_zero() else 0.0

    report = MetricReport(
        manifold=M.name,
        dim=n,
        metric=g.describe(),
        f=f,
        rho=rho_form,
        star_rho=sr_closed,
        eigenvalues=eigenvalues_of_11(g, rho_form, tol=tol),
        flags=flags,
        del_omega_norm_sq=del_norm_sq,
        integral_f=f * vol,
        f_cross_residual=f_cross,
        star_rho_cross_residual=sr_resid,
        pss_cross_defect=pss_defect_cross,
        tolerance=tol,
        notes=list(notes or []),
    )
    return report


# ----------------------------------------------------------------------
# pairs and triples
# ----------------------------------------------------------------------
@dataclass
class PairReport:
    manifold: str
    dim: int
    omega: str
    gamma: str
    f: float
    rho: Form
    star_rho: Form
    pluriclosed: FlagResult
    closed: FlagResult
    integral_f: float
    f_cross_residual: float
    star_rho_cross_residual: float
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "manifold": self.manifold, "dim": self.dim,
            "omega": self.omega, "gamma": self.gamma,
            "f": self.f,
            "rho": _form_json(self.rho), "star_rho": _form_json(self.star_rho),
            "pluriclosed": self.pluriclosed.to_json_dict(),
            "closed": self.closed.to_json_dict(),
            "integral_f": self.integral_f,
            "residuals": {"f_cross": self.f_cross_residual,
                          "star_rho_cross": self.star_rho_cross_residual},
            "tolerance": self.tolerance,
        }


def pair_analysis(M: InvariantComplexManifold, omega_m: HermitianMetric,
                  gamma_m: HermitianMetric, *, tol: float = DEFAULT_TOL) -> PairReport:
    """Divide i del delbar omega_{n-2} by gamma_{n-2} and classify the result."""
    _require_n3(M)
    n = M.dim
    src = _laplacian_source(M, omega_power(omega_m, n - 2))
    rho_pair = divide_by_power(gamma_m, n - 2, src, tol=tol)

    gamma = omega_form(gamma_m)
    num = M.integrate(gamma.wedge(src))
    den = M.integrate(omega_power(gamma_m, n))
    f_pair = _real_scalar(num / den, tol, "the pair trace scalar")

    f_lambda = ((n - 1) * lefschetz_lambda(gamma_m, rho_pair).coefficient((), ())
                if not rho_pair.is_zero() else 0j)
    f_cross = abs(f_pair - f_lambda)

    sr_closed = (f_pair / (n - 1)) * omega_power(gamma_m, n - 1) - src
    sr_direct = hodge_star(gamma_m, rho_pair) if not rho_pair.is_zero() else Form.zero(n)
    sr_resid = (sr_closed - sr_direct).max_abs()

    scale = form_norm(gamma_m, sr_closed)
    pluri = _flag(form_norm(gamma_m, _laplacian_source(M, sr_closed)), scale, tol)
    closed = _flag(form_norm(gamma_m, M.d(sr_closed)), scale, tol)

    return PairReport(
        manifold=M.name, dim=n,
        omega=omega_m.describe(), gamma=gamma_m.describe(),
        f=f_pair, rho=rho_pair, star_rho=sr_closed,
        pluriclosed=pluri, closed=closed,
        integral_f=f_pair * total_volume(M, gamma_m),
        f_cross_residual=f_cross, star_rho_cross_residual=sr_resid,
        tolerance=tol,
    )


@dataclass
class TripleReport:
    pair: PairReport
    pullback_metric: HermitianMetric
    structure_residual: float
    structure_compatible: bool
    gamma_isometric: bool
    rho_pullback_residual: Optional[float]

    @property
    def pluriclosed(self) -> FlagResult:
        return self.pair.pluriclosed

    @property
    def f(self) -> float:
        return self.pair.f

    @property
    def rho(self) -> Form:
        return self.pair.rho

    def to_json_dict(self) -> dict:
        out = self.pair.to_json_dict()
        out["structure_residual"] = self.structure_residual
        out["structure_compatible"] = self.structure_compatible
        out["gamma_isometric"] = self.gamma_isometric
        out["rho_pullback_residual"] = self.rho_pullback_residual
        return out


def triple_analysis(M: InvariantComplexManifold, phi: PullbackMap,
                    omega_m: HermitianMetric, gamma_m: HermitianMetric, *,
                    tol: float = DEFAULT_TOL) -> TripleReport:
    """Pair pipeline applied to (phi* omega, gamma).

    A structure-incompatible phi is flagged, not fatal; a degenerate
    pulled-back metric is.  When phi preserves gamma and the plain pair
    (omega, gamma) is pluriclosed star split, the division form of the
    triple must be the pullback of the pair's division form; the residual
    of that identity is recorded.
    """
    _require_n3(M)
    omega_tilde = pullback_metric(M, phi, omega_m)
    pair = pair_analysis(M, omega_tilde, gamma_m, tol=tol)

    struct_resid = structure_compatibility(M, phi)
    A = phi.matrix
    gamma_iso = bool(np.abs(A.T @ gamma_m.H @ A.conj() - gamma_m.H).max()
                     <= tol * (1.0 + float(np.abs(gamma_m.H).max())))

    rho_pb_resid = None
    if gamma_iso and struct_resid <= tol:
        base = pair_analysis(M, omega_m, gamma_m, tol=tol)
        if base.pluriclosed.holds:
            rho_pb_resid = (pair.rho - pullback(M, phi, base.rho)).max_abs()

    return TripleReport(
        pair=pair,
        pullback_metric=omega_tilde,
        structure_residual=struct_resid,
        structure_compatible=struct_resid <= tol,
        gamma_isometric=gamma_iso,
        rho_pullback_residual=rho_pb_resid,
    )


# ----------------------------------------------------------------------
# conformal variation and rescaling (closed-form evaluators)
# ----------------------------------------------------------------------
def conformal_f(f_base: float, g_val: float, laplacian_g_val: float) -> float:
    """Trace scalar of g * omega for balanced omega in dimension 3:
    f_base / g - 2 * Lap(g) / g^2, with Lap(h) = -Lambda(i del delbar h)."""
    if g_val <= 0:
        raise InputError("conformal factor must be positive")
    return f_base / g_val - 2.0 * laplacian_g_val / (g_val * g_val)


def rescale_f(f_base: float, lam: float) -> float:
    """Trace scalar of lambda * omega: f / lambda."""
    if lam <= 0:
        raise InputError("rescaling factor must be positive")
    return f_base / lam


def gauduchon_adjoint_on_constant(M: InvariantComplexManifold, g: HermitianMetric,
                                  c: float) -> Form:
    """c * i star delbar del omega_{n-1}: the adjoint Laplace operator applied
    to the constant c.  Vanishes iff c = 0 or the metric is Gauduchon."""
    n = M.dim
    if c == 0:
        return Form.zero(n)
    w_nm1 = omega_power(g, n - 1)
    inner = M.delbar(M.del_(w_nm1))
    if inner.is_zero():
        return Form.zero(n)
    return c * 1j * hodge_star(g, inner)
