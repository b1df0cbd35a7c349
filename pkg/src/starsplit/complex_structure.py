"""Invariant complex manifold models given by structure constants.

A model is the complexified exterior algebra of a fixed coframe together
with a differential determined by the values of ``d`` on the generators:

    d phi_k = sum_{i<j} c2[k,i,j] phi_i ^ phi_j  +  sum_{i,j} c11[k,i,j] phi_i ^ phibar_j

(the (0,2)-part of ``d phi_k`` is excluded by integrability of the complex
structure, and the storage format cannot express one).  ``d`` extends by
C-linearity, the graded Leibniz rule and ``d phibar_k = conj(d phi_k)``;
``del`` and ``delbar`` are its bidegree components.

Coefficients may be expressions over named complex parameters (see
``exprs``); binding parameters produces a new, immutable instance whose
generator differentials are evaluated once and cached.

Validity of a model is quantified, not assumed: ``check_integrability``
measures ``d(d phi_k)`` and ``check_stokes`` measures the top-degree part
of ``d`` on all (2n-1)-monomials.  When both vanish, integration of
invariant top forms against the canonical orientation form
``i phi_1 phibar_1 ^ ... ^ i phi_n phibar_n`` (total volume normalised
to 1) satisfies ``integral(d beta) = 0``, which is what makes the formal
adjoints below genuine L2 adjoints on invariant forms.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import exprs
from .errors import DimensionMismatchError, InputError, UnboundParameterError
from .forms import Form, basis_masks, mask_to_indices
from .metric import HermitianMetric, hodge_star, inner_product, omega_power

DEFAULT_TOL = 1e-10


class IntegrationWarning(UserWarning):
    """Integrand had components below top degree; they were ignored."""


# structure entry: (i, j, coefficient-expression-string)
StructureTable = Dict[int, Dict[str, List[Tuple[int, int, str]]]]


class InvariantComplexManifold:
    """Coframe model with parameterised constant structure coefficients."""

    __slots__ = ("name", "dim", "structure", "params", "_d_gen", "_d_gen_bar",
                 "_vol_coeff", "_op_mats")

    def __init__(self, name: str, dim: int, structure: StructureTable,
                 params: Optional[Mapping[str, complex]] = None):
        if dim < 1:
            raise InputError("dimension must be positive")
        self.name = name
        self.dim = dim
        self.structure = {k: {"(2,0)": list(structure.get(k, {}).get("(2,0)", ())),
                              "(1,1)": list(structure.get(k, {}).get("(1,1)", ()))}
                          for k in range(1, dim + 1)}
        for k, parts in self.structure.items():
            for slot, entries in parts.items():
                for (i, j, _) in entries:
                    if not (1 <= i <= dim and 1 <= j <= dim):
                        raise InputError(f"structure index out of range in d(phi_{k})")
                    if slot == "(2,0)" and i >= j:
                        raise InputError(f"(2,0) entries need i < j, got ({i},{j})")
        self.params: Dict[str, complex] = dict(params or {})
        self._d_gen: Optional[List[Form]] = None
        self._d_gen_bar: Optional[List[Form]] = None
        self._vol_coeff: Optional[complex] = None
        self._op_mats: Dict = {}

    # ------------------------------------------------------------------
    def parameter_names(self) -> set:
        """Names usable in bind(): those appearing in coefficient
        expressions plus any already carrying a bound value."""
        names = set(self.params)
        for parts in self.structure.values():
            for entries in parts.values():
                for (_, _, expr) in entries:
                    names |= exprs.parameter_names(expr)
        return names

    def bind(self, **values: complex) -> "InvariantComplexManifold":
        known = self.parameter_names()
        for key in values:
            if key not in known:
                raise UnboundParameterError(
                    f"manifold {self.name!r} has no parameter {key!r}")
        merged = dict(self.params)
        merged.update({k: complex(v) for k, v in values.items()})
        return InvariantComplexManifold(self.name, self.dim, self.structure, merged)

    def _generators(self) -> Tuple[List[Form], List[Form]]:
        if self._d_gen is None:
            n = self.dim
            gens = [Form.zero(n)]  # 1-based padding
            for k in range(1, n + 1):
                total = Form.zero(n)
                for (i, j, expr) in self.structure[k]["(2,0)"]:
                    c = exprs.evaluate(expr, self.params)
                    total = total + Form.monomial(n, (i, j), (), c)
                for (i, j, expr) in self.structure[k]["(1,1)"]:
                    c = exprs.evaluate(expr, self.params)
                    total = total + Form.monomial(n, (i,), (j,), c)
                gens.append(total)
            self._d_gen = gens
            self._d_gen_bar = [f.conjugate() for f in gens]
        return self._d_gen, self._d_gen_bar

    # ------------------------------------------------------------------
    # the differential and its bidegree parts
    # ------------------------------------------------------------------
    def d(self, u: Form) -> Form:
        """Exterior differential, extended from the generators by the
        graded Leibniz rule."""
        if u.dim != self.dim:
            raise DimensionMismatchError("form/manifold dimension mismatch")
        dgen, dgen_bar = self._generators()
        n = self.dim
        out = Form.zero(n)
        for (imask, jmask), c in u._terms.items():
            factors = ([(k, False) for k in mask_to_indices(imask)]
                       + [(k, True) for k in mask_to_indices(jmask)])
            for t, (k, barred) in enumerate(factors):
                dg = dgen_bar[k] if barred else dgen[k]
                if not dg._terms:
                    continue
                coeff = -c if t & 1 else c
                pre_h = tuple(kk for kk, b in factors[:t] if not b)
                pre_a = tuple(kk for kk, b in factors[:t] if b)
                suf_h = tuple(kk for kk, b in factors[t + 1:] if not b)
                suf_a = tuple(kk for kk, b in factors[t + 1:] if b)
                piece = Form.monomial(n, pre_h, pre_a, coeff).wedge(dg).wedge(
                    Form.monomial(n, suf_h, suf_a, 1.0))
                out = out + piece
        return out

    def del_(self, u: Form) -> Form:
        """(1,0)-part of d."""
        out = Form.zero(self.dim)
        for p, q in u.bidegrees():
            if p + 1 <= self.dim:
                out = out + self.d(u.bidegree_component(p, q)).bidegree_component(p + 1, q)
        return out

    def delbar(self, u: Form) -> Form:
        """(0,1)-part of d."""
        out = Form.zero(self.dim)
        for p, q in u.bidegrees():
            if q + 1 <= self.dim:
                out = out + self.d(u.bidegree_component(p, q)).bidegree_component(p, q + 1)
        return out

    # ------------------------------------------------------------------
    # sanity residuals
    # ------------------------------------------------------------------
    def check_integrability(self) -> float:
        """max over generators of the coefficients of d(d phi_k)."""
        dgen, dgen_bar = self._generators()
        res = 0.0
        for k in range(1, self.dim + 1):
            res = max(res, self.d(dgen[k]).max_abs(), self.d(dgen_bar[k]).max_abs())
        return res

    def check_stokes(self) -> float:
        """max over (2n-1)-monomials of the top-degree coefficient of d."""
        n = self.dim
        res = 0.0
        for (p, q) in ((n, n - 1), (n - 1, n)):
            for key in basis_masks(n, p, q):
                du = self.d(Form(n, {key: 1.0}))
                top = du.bidegree_component(n, n)
                res = max(res, top.max_abs())
        return res

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        r = self.check_integrability()
        if r > tol:
            raise InputError(
                f"invalid structure constants: d² ≠ 0 (residual {r:.3e})")
        r = self.check_stokes()
        if r > tol:
            raise InputError(
                f"invalid structure constants: a top-degree exact form has "
                f"nonzero integral (residual {r:.3e})")

    # ------------------------------------------------------------------
    # integration
    # ------------------------------------------------------------------
    def _volume_coefficient(self) -> complex:
        if self._vol_coeff is None:
            n = self.dim
            vol = Form.scalar(n, 1.0)
            for k in range(1, n + 1):
                vol = vol.wedge(Form.monomial(n, (k,), (k,), 1j))
            full = (1 << n) - 1
            self._vol_coeff = vol._terms[(full, full)]
        return self._vol_coeff

    def integrate(self, u: Form) -> complex:
        """Integral of the (n,n)-part of ``u`` against the canonical
        orientation form ``prod_k (i phi_k ^ phibar_k)``, total volume 1."""
        n = self.dim
        if any((p, q) != (n, n) for (p, q) in u.bidegrees()):
            warnings.warn("integrand has components below top degree; ignored",
                          IntegrationWarning, stacklevel=2)
        full = (1 << n) - 1
        return u._terms.get((full, full), 0j) / self._volume_coefficient()

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def to_json_dict(self) -> dict:
        struct = {}
        for k in range(1, self.dim + 1):
            entry: dict = {}
            if self.structure[k]["(2,0)"]:
                entry["(2,0)"] = [{"i": i, "j": j, "coeff": c}
                                  for (i, j, c) in self.structure[k]["(2,0)"]]
            if self.structure[k]["(1,1)"]:
                entry["(1,1)"] = [{"i": i, "jbar": j, "coeff": c}
                                  for (i, j, c) in self.structure[k]["(1,1)"]]
            struct[f"phi{k}"] = entry
        params = {name: {"default": [v.real, v.imag]} for name, v in self.params.items()}
        return {"name": self.name, "dim": self.dim, "parameters": params,
                "structure": struct}

    @classmethod
    def from_json_dict(cls, data: dict) -> "InvariantComplexManifold":
        try:
            name = data.get("name", "unnamed")
            dim = int(data["dim"])
            params = {}
            for pname, spec in data.get("parameters", {}).items():
                default = spec.get("default")
                if default is not None:
                    params[pname] = complex(default[0], default[1])
            structure: StructureTable = {}
            for key, parts in data.get("structure", {}).items():
                if not key.startswith("phi"):
                    raise InputError(f"bad structure key {key!r}")
                k = int(key[3:])
                entry = {"(2,0)": [], "(1,1)": []}
                for item in parts.get("(2,0)", ()):
                    entry["(2,0)"].append((int(item["i"]), int(item["j"]), str(item["coeff"])))
                for item in parts.get("(1,1)", ()):
                    entry["(1,1)"].append((int(item["i"]), int(item["jbar"]), str(item["coeff"])))
                structure[k] = entry
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed manifold description: {exc}") from exc
        return cls(name, dim, structure, params)

    @classmethod
    def from_json_file(cls, path: str) -> "InvariantComplexManifold":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read manifold file {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"manifold file {path!r} is not valid JSON: {exc}") from exc
        return cls.from_json_dict(data)

    def __repr__(self) -> str:
        return f"InvariantComplexManifold({self.name!r}, n={self.dim})"


# ----------------------------------------------------------------------
# metric-dependent operators
# ----------------------------------------------------------------------
def total_volume(M: InvariantComplexManifold, g: HermitianMetric) -> float:
    vol = M.integrate(omega_power(g, g.dim))
    return float(vol.real)


def l2_pairing(M: InvariantComplexManifold, g: HermitianMetric, u: Form, v: Form) -> complex:
    """Global pairing <<u, v>> = integral of <u, v> against the volume form.

    On invariant forms the pointwise product is constant, so this is the
    pointwise inner product times the total volume, summed over matching
    bidegree components.
    """
    vol = total_volume(M, g)
    out = 0j
    common = set(u.bidegrees()) & set(v.bidegrees())
    for p, q in common:
        out += inner_product(g, u.bidegree_component(p, q), v.bidegree_component(p, q))
    return out * vol


def adjoint_del(M: InvariantComplexManifold, g: HermitianMetric, u: Form) -> Form:
    """del* = -star delbar star; the L2 adjoint of del when Stokes holds."""
    if u.is_zero():
        return Form.zero(g.dim)
    return -hodge_star(g, M.delbar(hodge_star(g, u)))


def adjoint_delbar(M: InvariantComplexManifold, g: HermitianMetric, u: Form) -> Form:
    """delbar* = -star del star."""
    if u.is_zero():
        return Form.zero(g.dim)
    return -hodge_star(g, M.del_(hodge_star(g, u)))


def laplacian_delbar(M: InvariantComplexManifold, g: HermitianMetric, u: Form) -> Form:
    """delbar-Laplacian: delbar delbar* + delbar* delbar."""
    return M.delbar(adjoint_delbar(M, g, u)) + adjoint_delbar(M, g, M.delbar(u))


# ----------------------------------------------------------------------
# linear pullback maps of the model
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class PullbackMap:
    """Linear coframe substitution phi*_k = sum_j A[k,j] phi_j."""

    matrix: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError("pullback matrix must be square")
        if abs(np.linalg.det(A)) < 1e-12:
            raise InputError("pullback matrix is singular")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "PullbackMap":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, coeffs: Sequence[complex]) -> "PullbackMap":
        return cls(np.diag(np.asarray(coeffs, dtype=complex)))

    def compose(self, other: "PullbackMap") -> "PullbackMap":
        """Pullback of the composition: (self o other)* = other* o self*."""
        return PullbackMap(self.matrix @ other.matrix)

    def inverse(self) -> "PullbackMap":
        return PullbackMap(np.linalg.inv(self.matrix))

    @classmethod
    def from_json_dict(cls, data: dict) -> "PullbackMap":
        try:
            entries = data["matrix"]
            n = round(len(entries) ** 0.5)
            if n * n != len(entries):
                raise InputError("pullback matrix needs n^2 [re,im] entries")
            flat = [complex(re, im) for re, im in entries]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed pullback description: {exc}") from exc
        return cls(np.array(flat, dtype=complex).reshape(n, n))

    def to_json_dict(self) -> dict:
        return {"matrix": [[z.real, z.imag] for z in self.matrix.reshape(-1)]}


def _minor(mat: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> complex:
    if not rows:
        return 1.0 + 0j
    return complex(np.linalg.det(mat[np.ix_(rows, cols)]))


def pullback(M: InvariantComplexManifold, phi: PullbackMap, u: Form) -> Form:
    """Algebra homomorphism determined by the coframe substitution."""
    n = M.dim
    if phi.dim != n or u.dim != n:
        raise DimensionMismatchError("pullback dimension mismatch")
    A = phi.matrix
    out: Dict = {}
    index_sets = {p: [c for c in combinations(range(n), p)] for p in range(n + 1)}
    for (imask, jmask), c in u._terms.items():
        rows_i = [k - 1 for k in mask_to_indices(imask)]
        rows_j = [k - 1 for k in mask_to_indices(jmask)]
        for cols_i in index_sets[len(rows_i)]:
            di = _minor(A, rows_i, cols_i)
            if abs(di) < 1e-16:
                continue
            ikey = sum(1 << k for k in cols_i)
            for cols_j in index_sets[len(rows_j)]:
                dj = _minor(A, rows_j, cols_j)
                if abs(dj) < 1e-16:
                    continue
                jkey = sum(1 << k for k in cols_j)
                key = (ikey, jkey)
                out[key] = out.get(key, 0j) + c * di * dj.conjugate()
    return Form(n, out)


def structure_compatibility(M: InvariantComplexManifold, phi: PullbackMap) -> float:
    """Residual of commutation of the pullback with d on the generators."""
    n = M.dim
    res = 0.0
    for k in range(1, n + 1):
        gen = Form.monomial(n, (k,), (), 1.0)
        diff = pullback(M, phi, M.d(gen)) - M.d(pullback(M, phi, gen))
        res = max(res, diff.max_abs())
    return res


def is_structure_compatible(M: InvariantComplexManifold, phi: PullbackMap,
                            tol: float = DEFAULT_TOL) -> bool:
    return structure_compatibility(M, phi) <= tol


def pullback_metric(M: InvariantComplexManifold, phi: PullbackMap,
                    g: HermitianMetric) -> HermitianMetric:
    """Metric of the pulled-back form phi* omega; rejects degenerate results."""
    A = phi.matrix
    Ht = A.T @ g.H @ A.conj()
    try:
        return HermitianMetric(Ht)
    except InputError as exc:
        raise InputError(f"pullback metric is degenerate: {exc}") from exc
