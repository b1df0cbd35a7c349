"""Hermitian metrics in the coframe and the pointwise operator toolkit.

A metric is a positive definite Hermitian matrix ``H`` with
``omega = i * sum_jk H[j,k] phi_j ^ phibar_k``.  All pointwise constructions
(inner product, Hodge star, Lefschetz L and its adjoint, division by powers
of omega, primitive decomposition) are computed in the orthonormal coframe
``e = C * phi`` obtained from a Cholesky-type factor of ``H``: the monomials
``e_I ^ ebar_J`` are declared an orthonormal basis and the volume form is
``omega_n = omega^n / n!``.

That normalisation is the one convention under which all of the classical
anchors hold simultaneously: ``star 1 = omega_n``, ``star omega =
omega_{n-1}``, ``[Lambda, L] = (n-k) Id`` on k-forms, and the primitive-form
star formula.  The per-bidegree operators are small dense matrices (at most
``C(n,p) * C(n,q)`` with n <= 6), cached per dimension in the orthonormal
frame where they do not depend on the metric.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import AlgebraError, DimensionMismatchError, InputError
from .forms import Form, MaskKey, basis_masks, mask_to_indices, space_dim

DEFAULT_TOL = 1e-10

_FULL = lambda n: (1 << n) - 1


# ----------------------------------------------------------------------
# orthonormal-frame combinatorics (metric independent, cached per dimension)
# ----------------------------------------------------------------------
@lru_cache(maxsize=None)
def _basis(n: int, p: int, q: int) -> Tuple[MaskKey, ...]:
    return tuple(basis_masks(n, p, q))


@lru_cache(maxsize=None)
def _index(n: int, p: int, q: int) -> Dict[MaskKey, int]:
    return {key: k for k, key in enumerate(_basis(n, p, q))}


def form_to_vec(u: Form, p: int, q: int) -> np.ndarray:
    """Coefficient vector of the (p,q)-component of ``u`` in basis order."""
    idx = _index(u.dim, p, q)
    vec = np.zeros(len(idx), dtype=complex)
    for key, c in u._terms.items():
        if key[0].bit_count() == p and key[1].bit_count() == q:
            vec[idx[key]] = c
    return vec


def vec_to_form(n: int, p: int, q: int, vec: np.ndarray) -> Form:
    basis = _basis(n, p, q)
    return Form(n, {basis[k]: vec[k] for k in range(len(basis))})


@lru_cache(maxsize=None)
def _std_omega(n: int) -> Form:
    terms = {((1 << k), (1 << k)): 1j for k in range(n)}
    return Form(n, terms)


@lru_cache(maxsize=None)
def _std_omega_power(n: int, r: int) -> Form:
    if r == 0:
        return Form.scalar(n, 1.0)
    prev = _std_omega_power(n, r - 1)
    return prev.wedge(_std_omega(n)) / r


@lru_cache(maxsize=None)
def _volume_coeff(n: int) -> complex:
    vol = _std_omega_power(n, n)
    return vol._terms[(_FULL(n), _FULL(n))]


@lru_cache(maxsize=None)
def _wedge_power_mat(n: int, r: int, p: int, q: int) -> np.ndarray:
    """Matrix of ``omega_r ^ .`` from the (p,q)-slot to the (p+r,q+r)-slot,
    standard frame."""
    src = _basis(n, p, q)
    tgt_idx = _index(n, p + r, q + r)
    wr = _std_omega_power(n, r)
    out = np.zeros((len(tgt_idx), len(src)), dtype=complex)
    for s, key in enumerate(src):
        prod = wr.wedge(Form(n, {key: 1.0}))
        for tkey, c in prod._terms.items():
            out[tgt_idx[tkey], s] = c
    out.setflags(write=False)
    return out


def _l_mat(n: int, p: int, q: int) -> np.ndarray:
    return _wedge_power_mat(n, 1, p, q)


@lru_cache(maxsize=None)
def _star_mat(n: int, p: int, q: int) -> np.ndarray:
    """Matrix of the Hodge star from the (p,q)-slot to the (n-q,n-p)-slot
    in the orthonormal frame, obtained by solving the defining pairing
    ``u ^ star(w) = <u, conj(w)> dV`` over the monomial bases."""
    src = _basis(n, p, q)
    tgt = _basis(n, n - q, n - p)
    pair = _basis(n, q, p)
    full = (_FULL(n), _FULL(n))
    c_vol = _volume_coeff(n)
    P = np.zeros((len(pair), len(tgt)), dtype=complex)
    for a, akey in enumerate(pair):
        ua = Form(n, {akey: 1.0})
        for t, tkey in enumerate(tgt):
            prod = ua.wedge(Form(n, {tkey: 1.0}))
            P[a, t] = prod._terms.get(full, 0j)
    rhs = np.zeros((len(pair), len(src)), dtype=complex)
    pair_index = _index(n, q, p)
    sign = -1.0 if (p * q) & 1 else 1.0
    for b, (imask, jmask) in enumerate(src):
        rhs[pair_index[(jmask, imask)], b] = sign * c_vol
    mat = np.linalg.solve(P, rhs)
    mat.setflags(write=False)
    return mat


# ----------------------------------------------------------------------
# the metric itself
# ----------------------------------------------------------------------
class HermitianMetric:
    """Positive definite Hermitian coefficient matrix in the coframe.

    Immutable after construction; the orthonormal-frame factor and all
    per-bidegree conversion matrices are cached on the instance.
    """

    __slots__ = ("dim", "H", "chol", "_inv_chol", "_minors_B", "_minors_G",
                 "_to_e", "_from_e", "_powers")

    def __init__(self, H, *, tol: float = DEFAULT_TOL):
        H = np.array(H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise InputError(f"metric matrix must be square, got shape {H.shape}")
        n = H.shape[0]
        scale = max(1.0, float(np.abs(H).max()))
        if np.abs(H - H.conj().T).max() > tol * scale:
            raise InputError("metric matrix is not Hermitian to tolerance")
        H = 0.5 * (H + H.conj().T)
        eigs = np.linalg.eigvalsh(H)
        if eigs.min() <= 1e-14 * max(1.0, eigs.max()):
            raise InputError(
                f"metric matrix is not positive definite (eigenvalues {eigs})")
        L = np.linalg.cholesky(H)
        self.dim = n
        self.H = H
        self.chol = L.T.copy()            # upper triangular; e = chol * phi
        self._inv_chol = np.linalg.inv(self.chol)
        self.H.setflags(write=False)
        self.chol.setflags(write=False)
        self._minors_B: Dict[int, np.ndarray] = {}
        self._minors_G: Dict[int, np.ndarray] = {}
        self._to_e: Dict[Tuple[int, int], np.ndarray] = {}
        self._from_e: Dict[Tuple[int, int], np.ndarray] = {}
        self._powers: Dict[int, Form] = {}

    # -- constructors ---------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "HermitianMetric":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, coeffs: Sequence[float]) -> "HermitianMetric":
        arr = np.asarray(coeffs, dtype=float)
        if arr.ndim != 1 or np.any(arr <= 0):
            raise InputError("diagonal metric needs a list of positive reals")
        return cls(np.diag(arr.astype(complex)))

    def scaled(self, s: float) -> "HermitianMetric":
        if s <= 0:
            raise InputError("metric scale must be positive")
        return HermitianMetric(self.H * s)

    @classmethod
    def from_json_dict(cls, data: dict) -> "HermitianMetric":
        try:
            kind = data["type"]
            if kind == "diagonal":
                g = cls.diagonal([float(c) for c in data["coeffs"]])
            elif kind == "hermitian":
                entries = data["matrix"]
                n = round(len(entries) ** 0.5)
                if n * n != len(entries):
                    raise InputError("hermitian matrix needs n^2 [re,im] entries")
                flat = [complex(re, im) for re, im in entries]
                g = cls(np.array(flat, dtype=complex).reshape(n, n))
            else:
                raise InputError(f"unknown metric type {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed metric description: {exc}") from exc
        scale = data.get("scale")
        if scale is not None:
            g = g.scaled(float(scale))
        return g

    def to_json_dict(self) -> dict:
        return {
            "type": "hermitian",
            "matrix": [[z.real, z.imag] for z in self.H.reshape(-1)],
        }

    def describe(self) -> str:
        if np.abs(self.H - np.diag(np.diag(self.H))).max() < 1e-15:
            vals = ", ".join(f"{v.real:g}" for v in np.diag(self.H))
            return f"diagonal({vals})"
        return f"hermitian(n={self.dim})"

    # -- frame conversions ----------------------------------------------
    def _minor_matrix(self, mat: np.ndarray, r: int) -> np.ndarray:
        """All r x r minors of ``mat``: out[t, s] = det(mat[rows(s), cols(t)])."""
        n = self.dim
        masks = [sum(1 << (k - 1) for k in cmb) for cmb in combinations(range(1, n + 1), r)]
        rows = [np.array([k - 1 for k in mask_to_indices(m)], dtype=int) for m in masks]
        out = np.zeros((len(masks), len(masks)), dtype=complex)
        for s, rs in enumerate(rows):
            for t, ct in enumerate(rows):
                if r == 0:
                    out[t, s] = 1.0
                else:
                    out[t, s] = np.linalg.det(mat[np.ix_(rs, ct)])
        return out

    def _minors(self, which: str, r: int) -> np.ndarray:
        cache = self._minors_B if which == "B" else self._minors_G
        if r not in cache:
            mat = self._inv_chol if which == "B" else self.chol
            cache[r] = self._minor_matrix(mat, r)
        return cache[r]

    def to_e_matrix(self, p: int, q: int) -> np.ndarray:
        """Coefficients in the orthonormal frame from coefficients in phi."""
        if (p, q) not in self._to_e:
            mat = np.kron(self._minors("B", p), self._minors("B", q).conj())
            mat.setflags(write=False)
            self._to_e[(p, q)] = mat
        return self._to_e[(p, q)]

    def from_e_matrix(self, p: int, q: int) -> np.ndarray:
        if (p, q) not in self._from_e:
            mat = np.kron(self._minors("G", p), self._minors("G", q).conj())
            mat.setflags(write=False)
            self._from_e[(p, q)] = mat
        return self._from_e[(p, q)]

    def to_e_vec(self, u: Form, p: int, q: int) -> np.ndarray:
        return self.to_e_matrix(p, q) @ form_to_vec(u, p, q)

    def from_e_vec(self, vec: np.ndarray, p: int, q: int) -> Form:
        return vec_to_form(self.dim, p, q, self.from_e_matrix(p, q) @ vec)

    def __repr__(self) -> str:
        return f"HermitianMetric({self.describe()})"


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------
def omega_form(g: HermitianMetric) -> Form:
    n = g.dim
    terms = {}
    for j in range(n):
        for k in range(n):
            c = 1j * g.H[j, k]
            if c != 0:
                terms[((1 << j), (1 << k))] = c
    return Form(n, terms)


def omega_power(g: HermitianMetric, p: int) -> Form:
    """``omega^p / p!``; p = 0 gives the scalar 1, p = n the volume form."""
    if not 0 <= p <= g.dim:
        raise InputError(f"power {p} outside 0..{g.dim}")
    if p not in g._powers:
        if p == 0:
            g._powers[0] = Form.scalar(g.dim, 1.0)
        else:
            g._powers[p] = omega_power(g, p - 1).wedge(omega_form(g)) / p
    return g._powers[p]


def _require_bidegree(u: Form) -> Tuple[int, int]:
    if not u.is_homogeneous():
        raise InputError(f"operation needs a homogeneous form, got bidegrees {u.bidegrees()}")
    return u.bidegree()


def inner_product(g: HermitianMetric, u: Form, v: Form) -> complex:
    """Pointwise sesquilinear inner product of forms of equal bidegree."""
    if u.dim != g.dim or v.dim != g.dim:
        raise DimensionMismatchError("form/metric dimension mismatch")
    if u.is_zero() or v.is_zero():
        return 0j
    pu, qu = _require_bidegree(u)
    pv, qv = _require_bidegree(v)
    if (pu, qu) != (pv, qv):
        raise InputError(f"inner product of mixed bidegrees ({pu},{qu}) vs ({pv},{qv})")
    return complex(np.vdot(g.to_e_vec(v, pv, qv), g.to_e_vec(u, pu, qu)))


def form_norm(g: HermitianMetric, u: Form) -> float:
    """Pointwise norm; inhomogeneous forms are summed over components."""
    total = 0.0
    for p, q in u.bidegrees():
        vec = g.to_e_vec(u, p, q)
        total += float(np.vdot(vec, vec).real)
    return total ** 0.5


def hodge_star(g: HermitianMetric, u: Form) -> Form:
    """The unique (n-q,n-p)-form with ``w ^ star(conj u) = <w,u> omega_n``."""
    n = g.dim
    if u.is_zero():
        return Form.zero(n)
    p, q = _require_bidegree(u)
    vec = _star_mat(n, p, q) @ g.to_e_vec(u, p, q)
    return g.from_e_vec(vec, n - q, n - p)


def lefschetz_L(g: HermitianMetric, u: Form) -> Form:
    return omega_form(g).wedge(u)


def lefschetz_lambda(g: HermitianMetric, u: Form) -> Form:
    """Pointwise adjoint of ``omega ^ .`` (contraction with omega)."""
    n = g.dim
    if u.is_zero():
        return Form.zero(n)
    p, q = _require_bidegree(u)
    if p == 0 or q == 0:
        return Form.zero(n)
    lam = _l_mat(n, p - 1, q - 1).conj().T
    return g.from_e_vec(lam @ g.to_e_vec(u, p, q), p - 1, q - 1)


def divide_by_power(g: HermitianMetric, k: int, y: Form, *, tol: float = DEFAULT_TOL) -> Form:
    """Solve ``omega_k ^ x = y`` for a (1,1)-form ``x``.

    For k = n-2 the multiplication map is bijective and the solve is exact;
    for other k the input must lie in the image, otherwise the residual
    check rejects it.
    """
    n = g.dim
    if not 0 <= k <= n - 2:
        raise InputError(f"power {k} outside 0..{n - 2}")
    if y.is_zero():
        return Form.zero(n)
    p, q = _require_bidegree(y)
    if (p, q) != (k + 1, k + 1):
        raise InputError(f"divide_by_power({k}) expects bidegree ({k + 1},{k + 1}), got ({p},{q})")
    W = _wedge_power_mat(n, k, 1, 1)
    ye = g.to_e_vec(y, p, q)
    xe, *_ = np.linalg.lstsq(W, ye, rcond=None)
    resid = float(np.abs(W @ xe - ye).max())
    if resid > tol * (1.0 + float(np.abs(ye).max())):
        raise InputError(
            f"form is not in the image of multiplication by omega_{k} "
            f"(residual {resid:.3e})")
    return g.from_e_vec(xe, 1, 1)


def lefschetz_decompose(g: HermitianMetric, u: Form, *, tol: float = DEFAULT_TOL
                        ) -> List[Tuple[int, Form]]:
    """Primitive decomposition ``u = sum_r omega_r ^ u_r`` with every ``u_r``
    annihilated by the Lefschetz adjoint.  Degree must not exceed n."""
    n = g.dim
    if u.is_zero():
        return []
    p, q = _require_bidegree(u)
    k = p + q
    if k > n:
        raise InputError(f"decomposition not supported above middle degree (k={k} > n={n})")
    rmax = min(p, q)
    ue = g.to_e_vec(u, p, q)
    dims = [space_dim(n, p - r, q - r) for r in range(rmax + 1)]
    wedge_blocks = [_wedge_power_mat(n, r, p - r, q - r) for r in range(rmax + 1)]
    top = np.hstack(wedge_blocks)
    constraint_rows = []
    offset = 0
    total = sum(dims)
    for r in range(rmax + 1):
        pr, qr = p - r, q - r
        if pr >= 1 and qr >= 1:
            lam = _l_mat(n, pr - 1, qr - 1).conj().T
            block = np.zeros((lam.shape[0], total), dtype=complex)
            block[:, offset:offset + dims[r]] = lam
            constraint_rows.append(block)
        offset += dims[r]
    system = np.vstack([top] + constraint_rows)
    rhs = np.concatenate([ue, np.zeros(system.shape[0] - len(ue), dtype=complex)])
    sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    recon = top @ sol[:total]
    resid = float(np.abs(recon - ue).max())
    if resid > tol * (1.0 + float(np.abs(ue).max())):
        raise AlgebraError(f"primitive decomposition failed (residual {resid:.3e})")
    out = []
    offset = 0
    for r in range(rmax + 1):
        vec = sol[offset:offset + dims[r]]
        out.append((r, g.from_e_vec(vec, p - r, q - r)))
        offset += dims[r]
    return out
