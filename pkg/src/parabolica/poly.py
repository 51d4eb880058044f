"""Complex polynomial arithmetic and root finding.

The shared numerical substrate: every germ, fixed-point divisor and jet in
the package is carried by :class:`CPoly`, a dense complex polynomial in one
variable with ascending coefficients. Arithmetic is exact on the stored
coefficients (machine complex numbers); degrees are capped at
:data:`MAX_DEGREE` and operations refuse rather than silently truncate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Degrees in this artifact stay small (quadratic iterates up to n=5 give 32);
# refuse anything past this rather than truncate.
MAX_DEGREE = 64

_TRIM_TOL = 0.0  # exact trailing-zero trim; callers chop explicitly if needed


class PolyError(ValueError):
    pass


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        return c[:1] * 0
    return c[: nz[-1] + 1]


@dataclass(frozen=True)
class CPoly:
    """Dense complex polynomial, coeffs[j] multiplies z**j."""

    coeffs: np.ndarray

    def __init__(self, coeffs) -> None:
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
        object.__setattr__(self, "coeffs", _trim(c))

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient (0 for the zero polynomial)."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        return eval_poly(self, z)

    def __add__(self, other: "CPoly") -> "CPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=np.complex128)
        out[: len(a)] += a
        out[: len(b)] += b
        return CPoly(out)

    def __sub__(self, other: "CPoly") -> "CPoly":
        return self + CPoly(-other.coeffs)

    def __mul__(self, other) -> "CPoly":
        if np.isscalar(other) or isinstance(other, complex):
            return CPoly(self.coeffs * other)
        out = np.convolve(self.coeffs, other.coeffs)
        if len(out) - 1 > MAX_DEGREE:
            raise PolyError(f"product degree {len(out) - 1} exceeds cap {MAX_DEGREE}")
        return CPoly(out)

    __rmul__ = __mul__

    def shifted(self, a: complex) -> "CPoly":
        """p(z + a), coefficient-exact (Taylor shift by synthetic division)."""
        c = self.coeffs.copy()
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] += a * c[j + 1]
        return CPoly(c)


def from_coeffs(*coeffs) -> CPoly:
    return CPoly(np.array(coeffs, dtype=np.complex128))


def monomial(j: int, c: complex = 1.0) -> CPoly:
    out = np.zeros(j + 1, dtype=np.complex128)
    out[j] = c
    return CPoly(out)


def identity() -> CPoly:
    return from_coeffs(0, 1)


def eval_poly(p: CPoly, z):
    """Horner evaluation, vectorized over z."""
    z = np.asarray(z, dtype=np.complex128)
    acc = np.full(z.shape, p.coeffs[-1])
    for c in p.coeffs[-2::-1]:
        acc = acc * z + c
    return acc if acc.shape else complex(acc)


def derivative(p: CPoly) -> CPoly:
    c = p.coeffs
    if len(c) == 1:
        return CPoly([0.0])
    return CPoly(c[1:] * np.arange(1, len(c), dtype=np.float64))


def compose(p: CPoly, q: CPoly) -> CPoly:
    """p(q(z)), coefficient-exact. Refuses degrees past MAX_DEGREE."""
    dp, dq = p.degree, q.degree
    if dp * dq > MAX_DEGREE:
        raise PolyError(f"composition degree {dp * dq} exceeds cap {MAX_DEGREE}")
    acc = CPoly([p.coeffs[-1]])
    for c in p.coeffs[-2::-1]:
        acc = acc * q + CPoly([c])
    return acc


def conj_coeffs(p: CPoly) -> CPoly:
    """Coefficientwise complex conjugate (realizes sigma∘p∘sigma on jets)."""
    return CPoly(np.conj(p.coeffs))


def from_roots(roots, leading: complex = 1.0) -> CPoly:
    out = np.array([leading], dtype=np.complex128)
    for r in roots:
        out = np.convolve(out, np.array([-r, 1.0], dtype=np.complex128))
    return CPoly(out)


def roots(p: CPoly, tol: float = 1e-7) -> list[tuple[complex, int]]:
    """All roots with multiplicities by companion-matrix eigenvalues.

    Clusters closer than ``tol`` are merged into a single root (cluster
    centroid, summed multiplicity). Simple roots get one Newton polish.
    Raises on constant input; a residual bound derived from ``tol`` and the
    coefficient scale guards against garbage eigenvalues.
    """
    if p.degree < 1:
        raise PolyError("constant polynomial has no roots")
    c = p.coeffs
    raw = np.roots(c[::-1])
    dp = derivative(p)
    scale = float(np.max(np.abs(c)))
    polished = []
    for z in raw:
        for _ in range(2):
            pv = eval_poly(p, z)
            dv = eval_poly(dp, z)
            if abs(dv) > 1e-12 * scale:
                step = pv / dv
                if abs(step) < 10 * tol:
                    z = z - step
        polished.append(z)
    clusters: list[list[complex]] = []
    for z in sorted(polished, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            if abs(z - np.mean(cl)) < tol * max(1.0, abs(z)):
                cl.append(z)
                break
        else:
            clusters.append([z])
    out = []
    for cl in clusters:
        center = complex(np.mean(cl))
        resid = abs(eval_poly(p, center))
        bound = scale * max(1.0, abs(center)) ** p.degree
        if resid > (10 * tol) ** len(cl) * bound * 1e3:
            raise PolyError(
                f"root residual {resid:.3e} exceeds bound for cluster at {center}"
            )
        out.append((center, len(cl)))
    return out


def polydiv(p: CPoly, d: CPoly) -> tuple[CPoly, CPoly]:
    """Quotient and remainder of p by d."""
    q, r = np.polydiv(p.coeffs[::-1], d.coeffs[::-1])
    return CPoly(q[::-1]), CPoly(r[::-1])


# --- truncated jet (power series) utilities -------------------------------
#
# Jets are CPoly values read modulo z**(order+1). Used for conjugating germ
# families by polynomial changes of variable and for Hermite data at
# confluent interpolation nodes.


def jet_truncate(p: CPoly, order: int) -> CPoly:
    return CPoly(p.coeffs[: order + 1])


def jet_mul(p: CPoly, q: CPoly, order: int) -> CPoly:
    n = order + 1
    a = np.zeros(n, dtype=np.complex128)
    a[: min(n, len(p.coeffs))] = p.coeffs[:n]
    b = np.zeros(n, dtype=np.complex128)
    b[: min(n, len(q.coeffs))] = q.coeffs[:n]
    return CPoly(np.convolve(a, b)[:n])


def jet_compose(p: CPoly, q: CPoly, order: int) -> CPoly:
    """p(q(z)) mod z^(order+1); q must have q(0)=0."""
    if abs(q.coeffs[0]) != 0:
        raise PolyError("jet_compose needs q(0) = 0")
    acc = CPoly([p.coeffs[-1]])
    for c in p.coeffs[-2::-1]:
        acc = jet_mul(acc, q, order) + CPoly([c])
    return jet_truncate(acc, order)


def jet_inverse(q: CPoly, order: int) -> CPoly:
    """Compositional inverse jet of q (q(0)=0, q'(0)!=0), Newton iteration."""
    if abs(q.coeffs[0]) != 0 or len(q.coeffs) < 2 or q.coeffs[1] == 0:
        raise PolyError("jet_inverse needs q(0)=0 and q'(0) != 0")
    inv = CPoly([0.0, 1.0 / q.coeffs[1]])
    n = 2
    while n <= order + 1:
        n = min(2 * n, order + 1 + 1)
        # inv <- inv - (q∘inv - id)/ (q'∘inv)  on jets
        qi = jet_compose(q, inv, n - 1) - identity()
        dq = jet_compose(derivative(q), inv, n - 1)
        corr = jet_mul(qi, jet_recip(dq, n - 1), n - 1)
        inv = jet_truncate(inv - corr, n - 1)
        if n == order + 2:
            break
    return jet_truncate(inv, order)


def jet_recip(p: CPoly, order: int) -> CPoly:
    """1/p as a jet; needs p(0) != 0."""
    c0 = p.coeffs[0]
    if c0 == 0:
        raise PolyError("jet_recip at a zero constant term")
    out = np.zeros(order + 1, dtype=np.complex128)
    out[0] = 1.0 / c0
    a = np.zeros(order + 1, dtype=np.complex128)
    a[: min(order + 1, len(p.coeffs))] = p.coeffs[: order + 1]
    for n in range(1, order + 1):
        out[n] = -np.dot(a[1 : n + 1], out[n - 1 :: -1][: n]) / c0
    return CPoly(out)


def jet_log1p(p: CPoly, order: int) -> CPoly:
    """log(1 + p) as a jet; needs p(0) = 0."""
    if p.coeffs[0] != 0:
        raise PolyError("jet_log1p needs p(0) = 0")
    out = CPoly([0.0])
    term = CPoly([0.0, ])
    # log(1+x) = sum (-1)^(n+1) x^n / n on jets
    power = CPoly([1.0])
    for n in range(1, order + 1):
        power = jet_mul(power, p, order)
        if power.is_zero():
            break
        out = out + (((-1) ** (n + 1)) / n) * power
    return jet_truncate(out, order)


def jet_sqrt1p(p: CPoly, order: int) -> CPoly:
    """sqrt(1 + p) as a jet; needs p(0) = 0. Principal branch."""
    if p.coeffs[0] != 0:
        raise PolyError("jet_sqrt1p needs p(0) = 0")
    out = CPoly([1.0])
    power = CPoly([1.0])
    coef = 1.0
    for n in range(1, order + 1):
        coef *= (0.5 - (n - 1)) / n
        power = jet_mul(power, p, order)
        if power.is_zero():
            break
        out = out + coef * power
    return jet_truncate(out, order)
