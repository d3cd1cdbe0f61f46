"""Finite sums of multivariate Gaussians in precision form.

Every term is ``coeff * exp(-(x - mu)^T A (x - mu))``. Products, partial
integrals and translations of such sums stay inside the family and are done
in closed form, which is how the wavefunctions and RDM kernels of this
package are manipulated without any grid.

Terms are stored batched (``coeff`` shape ``(T,)``, ``mu`` shape ``(T, d)``,
``prec`` shape ``(T, d, d)``) so the algebra vectorizes over terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class DimensionError(ValueError):
    pass


class NonIntegrableError(ValueError):
    """An integrated block of a term is not positive definite."""


@dataclass(frozen=True)
class GaussianTerm:
    coeff: float
    mu: np.ndarray
    A: np.ndarray

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    def __call__(self, x) -> np.ndarray:
        return GaussianSum.from_terms([self])(x)


@dataclass(frozen=True)
class GaussianSum:
    coeff: np.ndarray
    mu: np.ndarray
    prec: np.ndarray

    def __post_init__(self):
        coeff = np.asarray(self.coeff, dtype=float).reshape(-1)
        mu = np.asarray(self.mu, dtype=float)
        prec = np.asarray(self.prec, dtype=float)
        if mu.ndim != 2 or prec.ndim != 3:
            raise DimensionError("mu must be (T, d) and prec (T, d, d)")
        t, d = mu.shape
        if coeff.shape[0] != t or prec.shape != (t, d, d):
            raise DimensionError(
                f"inconsistent term arrays: coeff {coeff.shape}, mu {mu.shape}, prec {prec.shape}"
            )
        # symmetrize; asymmetric parts do not contribute to the quadratic form
        prec = 0.5 * (prec + np.swapaxes(prec, 1, 2))
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "prec", prec)

    # -- construction -----------------------------------------------------

    @classmethod
    def single(cls, A, mu=None, coeff: float = 1.0) -> "GaussianSum":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        d = A.shape[0]
        mu = np.zeros(d) if mu is None else np.asarray(mu, dtype=float).reshape(d)
        return cls(np.array([coeff]), mu[None, :], A[None, :, :])

    @classmethod
    def from_terms(cls, terms: Sequence[GaussianTerm]) -> "GaussianSum":
        if not terms:
            raise DimensionError("use GaussianSum.zero(dim) for an empty sum")
        dims = {t.dim for t in terms}
        if len(dims) != 1:
            raise DimensionError(f"terms have mixed dimensions {sorted(dims)}")
        return cls(
            np.array([t.coeff for t in terms], dtype=float),
            np.stack([np.asarray(t.mu, dtype=float) for t in terms]),
            np.stack([np.asarray(t.A, dtype=float) for t in terms]),
        )

    @classmethod
    def zero(cls, dim: int) -> "GaussianSum":
        return cls(np.zeros(0), np.zeros((0, dim)), np.zeros((0, dim, dim)))

    @classmethod
    def constant(cls, value: float, dim: int) -> "GaussianSum":
        return cls.single(np.zeros((dim, dim)), coeff=value)

    # -- basic properties -------------------------------------------------

    @property
    def dim(self) -> int:
        return self.mu.shape[1]

    def __len__(self) -> int:
        return self.coeff.shape[0]

    @property
    def terms(self) -> list[GaussianTerm]:
        return list(self)

    def __iter__(self) -> Iterator[GaussianTerm]:
        for c, m, a in zip(self.coeff, self.mu, self.prec):
            yield GaussianTerm(float(c), m.copy(), a.copy())

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def __add__(self, other: "GaussianSum") -> "GaussianSum":
        _check_dims(self, other)
        return GaussianSum(
            np.concatenate([self.coeff, other.coeff]),
            np.concatenate([self.mu, other.mu]),
            np.concatenate([self.prec, other.prec]),
        )

    def __mul__(self, other):
        if isinstance(other, GaussianSum):
            return product(self, other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def scale(self, factor: float) -> "GaussianSum":
        return GaussianSum(self.coeff * factor, self.mu, self.prec)


def _check_dims(a: GaussianSum, b: GaussianSum) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def evaluate(s: GaussianSum, x) -> np.ndarray:
    """Evaluate at points ``x`` of shape ``(..., dim)``; returns shape ``(...)``."""
    x = np.asarray(x, dtype=float)
    if s.dim == 0:
        if x.shape and x.shape[-1] != 0:
            raise DimensionError("dimension-0 sum takes empty points")
        return np.full(x.shape[:-1] if x.shape else (), s.coeff.sum())
    if x.shape[-1] != s.dim:
        raise DimensionError(f"point has length {x.shape[-1]}, sum has dim {s.dim}")
    lead = x.shape[:-1]
    pts = x.reshape(-1, s.dim)
    out = np.zeros(pts.shape[0])
    # chunk over terms to bound memory for large grids
    chunk = max(1, 2_000_000 // max(1, pts.shape[0] * s.dim))
    for start in range(0, len(s), chunk):
        sl = slice(start, start + chunk)
        diff = pts[:, None, :] - s.mu[None, sl, :]
        quad = np.einsum("ptk,tkl,ptl->pt", diff, s.prec[sl], diff)
        out += np.exp(-quad) @ s.coeff[sl]
    return out.reshape(lead)


def product(a: GaussianSum, b: GaussianSum) -> GaussianSum:
    """Pointwise product; ``len(a) * len(b)`` terms, ordered a-major."""
    _check_dims(a, b)
    d = a.dim
    A1 = a.prec[:, None]
    A2 = b.prec[None, :]
    A = (A1 + A2).reshape(-1, d, d)
    A1f = np.broadcast_to(A1, (len(a), len(b), d, d)).reshape(-1, d, d)
    A2f = np.broadcast_to(A2, (len(a), len(b), d, d)).reshape(-1, d, d)
    m1 = np.broadcast_to(a.mu[:, None], (len(a), len(b), d)).reshape(-1, d)
    m2 = np.broadcast_to(b.mu[None, :], (len(a), len(b), d)).reshape(-1, d)
    coeff = np.outer(a.coeff, b.coeff).reshape(-1)
    if A.shape[0] == 0:
        return GaussianSum(coeff, np.zeros((0, d)), A)
    Apinv = np.linalg.pinv(A, rcond=1e-13, hermitian=True)
    rhs = np.einsum("tkl,tl->tk", A1f, m1) + np.einsum("tkl,tl->tk", A2f, m2)
    mu = np.einsum("tkl,tl->tk", Apinv, rhs)
    # constant remainder via the parallel sum A1 (A1+A2)^+ A2; avoids cancellation
    dm = m1 - m2
    par = A1f @ Apinv @ A2f
    const = np.einsum("tk,tkl,tl->t", dm, par, dm)
    return GaussianSum(coeff * np.exp(-const), mu, A)


def marginalize(s: GaussianSum, keep: Sequence[int]) -> GaussianSum:
    """Integrate out every variable not listed in ``keep`` (over the real line).

    The result's variables follow the order of ``keep``.
    """
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep) or any(k < 0 or k >= s.dim for k in keep):
        raise DimensionError(f"invalid keep set {keep} for dim {s.dim}")
    drop = [i for i in range(s.dim) if i not in keep]
    if not drop:
        return permute(s, keep)
    m = len(drop)
    Aii = s.prec[:, drop][:, :, drop]
    try:
        chol = np.linalg.cholesky(Aii)
    except np.linalg.LinAlgError as exc:
        raise NonIntegrableError("integrated block is not positive definite") from exc
    logdet = 2.0 * np.log(np.diagonal(chol, axis1=1, axis2=2)).sum(axis=1)
    factor = np.exp(0.5 * m * np.log(np.pi) - 0.5 * logdet)
    mu_k = s.mu[:, keep]
    if keep:
        Akk = s.prec[:, keep][:, :, keep]
        Aki = s.prec[:, keep][:, :, drop]
        schur = Akk - Aki @ np.linalg.solve(Aii, np.swapaxes(Aki, 1, 2))
    else:
        schur = np.zeros((len(s), 0, 0))
    return GaussianSum(s.coeff * factor, mu_k, schur)


def integral(s: GaussianSum) -> float:
    """Integral over all of R^dim."""
    return float(marginalize(s, []).coeff.sum())


def shift(s: GaussianSum, t) -> GaussianSum:
    """Return ``x -> s(x - t)``."""
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.shape[0] != s.dim:
        raise DimensionError(f"translation has length {t.shape[0]}, sum has dim {s.dim}")
    return GaussianSum(s.coeff, s.mu + t[None, :], s.prec)


def permute(s: GaussianSum, perm: Sequence[int]) -> GaussianSum:
    """Return ``x -> s(x[perm])``."""
    perm = np.asarray(perm, dtype=int)
    if sorted(perm.tolist()) != list(range(s.dim)):
        raise DimensionError(f"{perm.tolist()} is not a permutation of range({s.dim})")
    inv = np.argsort(perm)
    return GaussianSum(s.coeff, s.mu[:, inv], s.prec[:, inv][:, :, inv])


def embed(s: GaussianSum, dim: int, positions: Sequence[int]) -> GaussianSum:
    """Lift into ``dim`` variables; variable ``k`` of ``s`` becomes ``positions[k]``.

    The result is constant along the new variables.
    """
    positions = list(positions)
    if len(positions) != s.dim or len(set(positions)) != s.dim or max(positions, default=-1) >= dim:
        raise DimensionError(f"cannot embed dim {s.dim} at {positions} into dim {dim}")
    mu = np.zeros((len(s), dim))
    prec = np.zeros((len(s), dim, dim))
    idx = np.array(positions, dtype=int)
    mu[:, idx] = s.mu
    prec[:, idx[:, None], idx[None, :]] = s.prec
    return GaussianSum(s.coeff, mu, prec)


def prune(s: GaussianSum, rel: float = 1e-16) -> GaussianSum:
    """Drop terms whose peak magnitude is below ``rel`` times the largest."""
    if len(s) == 0:
        return s
    peak = np.abs(s.coeff)
    mask = peak >= rel * peak.max()
    return GaussianSum(s.coeff[mask], s.mu[mask], s.prec[mask])


def laplacian_ratio(s: GaussianSum, x) -> np.ndarray:
    """Exact ``(nabla^2 s)(x) / s(x)`` from the quadratic forms.

    For one term ``f = c exp(-d^T A d)``: ``nabla^2 f = (4 d^T A^2 d - 2 tr A) f``.
    """
    x = np.asarray(x, dtype=float)
    pts = x.reshape(-1, s.dim)
    diff = pts[:, None, :] - s.mu[None, :, :]
    quad = np.einsum("ptk,tkl,ptl->pt", diff, s.prec, diff)
    grad = np.einsum("tkl,ptl->ptk", s.prec, diff)
    lap = 4.0 * np.einsum("ptk,ptk->pt", grad, grad) - 2.0 * np.trace(s.prec, axis1=1, axis2=2)[None, :]
    w = np.exp(-quad) * s.coeff[None, :]
    return ((w * lap).sum(axis=1) / w.sum(axis=1)).reshape(x.shape[:-1])
