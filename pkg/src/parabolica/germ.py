"""Germ families, second iterates, and fixed-point data.

An antiholomorphic family f_eps is stored through its holomorphic companion
h_eps (f = sigma∘h, sigma the complex conjugation), so compositions reduce to
polynomial composition plus coefficient conjugation and no zbar bookkeeping
is ever needed. Parameters are a real k-vector, complexified by evaluating
the same coefficient polynomials at complex arguments; with h holomorphic in
eps, f = sigma∘h depends antiholomorphically on eps, and the second iterate

    g_eps = f_{conj(eps)} ∘ f_eps = conj_coeffs(h_{conj(eps)}) ∘ h_eps

is a holomorphic family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import poly
from .poly import CPoly

ANTIHOLOMORPHIC = "antiholomorphic"
HOLOMORPHIC = "holomorphic"


class GermError(ValueError):
    pass


def _eval_param_poly(terms, eps: np.ndarray) -> complex:
    """terms: iterable of (exponent tuple, coefficient)."""
    acc = 0j
    for expo, c in terms:
        v = complex(c)
        for e, x in zip(expo, eps):
            if e:
                v *= x ** e
        acc += v
    return acc


@dataclass(frozen=True)
class FamilySpec:
    """A parametrized germ family evaluable at any parameter value.

    ``table`` maps the z-power j to the coefficient polynomial of the
    holomorphic companion jet: a tuple of (exponent multi-index over the k
    parameters, complex coefficient) pairs. ``validity`` is the max-norm
    radius of the parameter polydisk the family is trusted on.
    """

    kind: str
    k: int
    table: tuple[tuple[int, tuple[tuple[tuple[int, ...], complex], ...]], ...]
    validity: float = 0.1

    def __post_init__(self):
        if self.kind not in (ANTIHOLOMORPHIC, HOLOMORPHIC):
            raise GermError(f"unknown kind {self.kind!r}")

    def _check_eps(self, eps) -> np.ndarray:
        eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
        if len(eps) != self.k:
            raise GermError(f"expected {self.k} parameter components, got {len(eps)}")
        if np.max(np.abs(eps)) > self.validity * (1 + 1e-12):
            raise GermError(
                f"parameter {eps} outside validity polydisk radius {self.validity}"
            )
        return eps

    def h_jet(self, eps) -> CPoly:
        """Holomorphic companion jet h_eps as a polynomial in z."""
        eps = self._check_eps(eps)
        jmax = max(j for j, _ in self.table)
        c = np.zeros(jmax + 1, dtype=np.complex128)
        for j, terms in self.table:
            c[j] = _eval_param_poly(terms, eps)
        return CPoly(c)

    def h_prime_at(self, eps, w: complex) -> complex:
        return complex(poly.derivative(self.h_jet(eps))(w))

    def base_jet(self) -> CPoly:
        return self.h_jet(np.zeros(self.k))


def family_from_jets(kind: str, k: int, jet_of_eps, validity: float = 0.1,
                     deg: int | None = None) -> FamilySpec:
    """Build a FamilySpec table by probing a jet-valued callable.

    Only exact when every coefficient is affine in eps, which is how the
    helper is used (hand-stated test families).
    """
    zero = np.zeros(k)
    base = jet_of_eps(zero)
    n = (deg if deg is not None else base.degree) + 1
    t = validity / 2
    table = []
    for j in range(n):
        terms = []
        c0 = base.coeffs[j] if j < len(base.coeffs) else 0.0
        if c0 != 0:
            terms.append(((0,) * k, complex(c0)))
        for i in range(k):
            e = np.zeros(k)
            e[i] = t
            jet = jet_of_eps(e)
            ci = ((jet.coeffs[j] if j < len(jet.coeffs) else 0.0) - c0) / t
            if abs(ci) > 1e-14:
                expo = tuple(1 if m == i else 0 for m in range(k))
                terms.append((expo, complex(ci)))
        if terms:
            table.append((j, tuple(terms)))
    return FamilySpec(kind=kind, k=k, table=tuple(table), validity=validity)


@dataclass(frozen=True)
class JetFamily:
    """Family defined by a jet-valued closure; same protocol as FamilySpec.

    Used for families whose coefficients are not polynomial in the parameter
    (e.g. a family transported by a change of variable).
    """

    kind: str
    k: int
    jet_fn: object
    validity: float = 0.1

    def h_jet(self, eps) -> CPoly:
        eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
        if len(eps) != self.k:
            raise GermError(f"expected {self.k} parameter components")
        if np.max(np.abs(eps)) > self.validity * (1 + 1e-12):
            raise GermError("parameter outside validity polydisk")
        return self.jet_fn(eps)

    def h_prime_at(self, eps, w: complex) -> complex:
        return complex(poly.derivative(self.h_jet(eps))(w))

    def base_jet(self) -> CPoly:
        return self.h_jet(np.zeros(self.k))


def evaluate_f(fam, eps, z: complex) -> complex:
    """f_eps(z): conj(h_eps(z)) for antiholomorphic kind, h_eps(z) otherwise."""
    h = fam.h_jet(eps)
    v = h(complex(z))
    return np.conj(v) if fam.kind == ANTIHOLOMORPHIC else v


def second_iterate(fam, eps) -> CPoly:
    """g_eps = f_{conj(eps)} ∘ f_eps as a holomorphic polynomial.

    Exact coefficient composition for polynomial families; jet families are
    already truncations and compose as jets (order 32).
    """
    if fam.kind == HOLOMORPHIC:
        return fam.h_jet(eps)
    eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
    h1 = fam.h_jet(eps)
    h2 = poly.conj_coeffs(fam.h_jet(np.conj(eps)))
    if h1.degree * h2.degree > poly.MAX_DEGREE:
        if not isinstance(fam, JetFamily):
            raise GermError("second iterate degree exceeds cap")
        return _compose_allow_const(h2, h1, poly.MAX_DEGREE // 2)
    return poly.compose(h2, h1)


@dataclass(frozen=True)
class FixedPoint:
    location: complex
    multiplicity: int
    multiplier_g: complex
    orbit_kind: str           # 'fixed_of_f' | 'period2'
    partner: int | None = None


@dataclass(frozen=True)
class FixedPointData:
    points: tuple[FixedPoint, ...]

    def locations(self) -> np.ndarray:
        return np.array([p.location for p in self.points])

    def multipliers(self) -> np.ndarray:
        return np.array([p.multiplier_g for p in self.points])

    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.points)


def classify_fixed_points(fam, eps, radius: float, tol: float = 1e-7,
                          margin: float = 0.1) -> FixedPointData:
    """Roots of g_eps - z inside the radius disk, tagged by f-orbit kind.

    A root w is a fixed point of f when f(w) returns to w; otherwise it is
    paired with the root nearest to f(w) as a period-2 orbit. Roots within
    ``margin``-relative distance of the disk boundary raise.
    """
    g = second_iterate(fam, eps)
    fp_poly = g - poly.identity()
    all_roots = poly.roots(fp_poly, tol=tol)
    inside = [(w, m) for w, m in all_roots if abs(w) < radius * (1 + margin)]
    kept = []
    for w, m in inside:
        if abs(w) > radius * (1 - margin):
            raise GermError(
                f"fixed point {w} within margin of the working boundary "
                f"|z|={radius}; shrink eps or grow r")
        kept.append((w, m))
    dg = poly.derivative(g)
    locs = [w for w, _ in kept]
    f_img = [evaluate_f(fam, eps, w) for w in locs]
    pts = []
    for i, (w, m) in enumerate(kept):
        dists = [abs(f_img[i] - u) for u in locs]
        j = int(np.argmin(dists))
        if j == i:
            kind, partner = "fixed_of_f", None
        else:
            kind, partner = "period2", j
        pts.append(FixedPoint(location=complex(w), multiplicity=m,
                              multiplier_g=complex(dg(w)),
                              orbit_kind=kind, partner=partner))
    return FixedPointData(points=tuple(pts))


def formal_invariant_b(fp: FixedPointData, conf_tol: float = 1e-10) -> complex:
    """b = sum over fixed points of 1/log(multiplier), principal branch.

    Pointwise-undefined at confluence (some multiplier at 1); multipliers on
    or near the negative real axis are outside the small-parameter regime
    where the principal branch is trustworthy, and are rejected.
    """
    total = 0j
    for p in fp.points:
        if p.multiplicity != 1:
            raise GermError("confluent point; b undefined pointwise")
        m = p.multiplier_g
        if abs(m - 1.0) < conf_tol:
            raise GermError("confluent point; b undefined pointwise")
        if m.real <= 0 and abs(m.imag) < 1e-9:
            raise GermError(f"multiplier {m} near the negative axis; "
                            "principal log branch unreliable")
        total += 1.0 / np.log(m)
    return complex(total)


def auto_radius(fam, eps, margin_factor: float = 2.0) -> float:
    """Working radius with the k+1 local fixed points inside the half disk."""
    k = fam.k
    g = second_iterate(fam, eps)
    rts = poly.roots(g - poly.identity(), tol=1e-9)
    expanded = sorted((w for w, m in rts for _ in range(m)), key=abs)
    if len(expanded) < k + 1:
        raise GermError("fewer fixed points than codimension + 1")
    local = expanded[: k + 1]
    r = margin_factor * max(max(abs(w) for w in local), 1e-3)
    if len(expanded) > k + 1:
        nxt = abs(expanded[k + 1])
        if nxt < 2.0 * r:
            r = max(1.25 * max(abs(w) for w in local), 0.45 * nxt)
    return float(r)


def formal_invariant_b_extrapolated(fam, radius: float | None = None,
                                    direction: Sequence[float] | None = None,
                                    delta: float = 4e-3) -> complex:
    """b at a confluent parameter by Richardson extrapolation along a ray.

    Samples b at delta, delta/2, delta/4 along ``direction`` (first
    coordinate axis by default) and eliminates the two leading Taylor terms.
    Each sample sizes its own working disk so the unfolded points stay well
    inside it.
    """
    d = np.zeros(fam.k)
    if direction is None:
        d[0] = 1.0
    else:
        d[:] = np.asarray(direction, dtype=float)
        d /= np.max(np.abs(d))
    delta = min(delta, fam.validity / 2)
    vals = []
    for t in (delta, delta / 2, delta / 4):
        r_t = auto_radius(fam, t * d)
        fp = classify_fixed_points(fam, t * d, r_t)
        vals.append(formal_invariant_b(fp))
    b1, b2, b3 = vals
    # two Richardson levels on the expansion b(h) = b0 + c1 h + c2 h^2 + ...
    r1 = 2 * b2 - b1
    r2 = 2 * b3 - b2
    return complex((4 * r2 - r1) / 3)


def genericity_determinant(fam, h: float = 1e-6) -> float:
    """Finite-difference Jacobian determinant of eta -> Re(a_j(eta)) at 0.

    a_j are the zbar-jet coefficients of f (conjugates of the companion's);
    the family is generic when this map is invertible. The determinant is
    exposed raw: thresholds are the caller's business.
    """
    k = fam.k

    def re_a(eta: np.ndarray) -> np.ndarray:
        jet = fam.h_jet(eta)
        a = np.conj(jet.coeffs)
        out = np.zeros(k)
        out[: min(k, len(a))] = np.real(a[:k])
        return out

    J = np.zeros((k, k))
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        J[:, i] = (re_a(e) - re_a(-e)) / (2 * h)
    return float(np.linalg.det(J))


def check_parabolic_base(fam, tol: float = 1e-9) -> list[str]:
    """Diagnostics for the parabolic normal-form pattern at eps = 0.

    Empty list means the base germ is parabolic in reduced form: h(0)=0,
    h'(0)=1, vanishing intermediate orders, and leading nonlinearity 1/2 at
    order k+1 (antiholomorphic kind).
    """
    jet = fam.base_jet()
    c = np.zeros(max(len(jet.coeffs), fam.k + 2), dtype=np.complex128)
    c[: len(jet.coeffs)] = jet.coeffs
    problems = []
    if abs(c[0]) > tol:
        problems.append(f"constant term {c[0]} nonzero at eps=0")
    if abs(abs(c[1]) - 1.0) > tol:
        problems.append(f"linear coefficient {c[1]} not of modulus 1")
    if fam.kind == ANTIHOLOMORPHIC and abs(c[1] - 1.0) > tol:
        problems.append(f"linear coefficient {c[1]} not tangent to conjugation")
    for j in range(2, fam.k + 1):
        if abs(c[j]) > tol:
            problems.append(f"order-{j} coefficient {c[j]} nonzero at eps=0")
    lead = c[fam.k + 1]
    want = 0.5 if fam.kind == ANTIHOLOMORPHIC else 1.0
    if abs(lead - want) > 1e-6:
        problems.append(
            f"order-{fam.k + 1} coefficient {lead} != {want} at eps=0")
    return problems


def conjugate_family(fam, phi: CPoly, order: int = 16) -> "JetFamily":
    """Transport the family by a polynomial change of variable phi.

    Returns the family of phi^{-1} ∘ f_eps ∘ phi as jets truncated at
    ``order`` (the truncation error is far below every tolerance used at the
    working scales). For antiholomorphic f = sigma∘h the companion transports
    to conj_coeffs(phi^{-1}) ∘ h ∘ phi.
    """
    if abs(phi.coeffs[0]) != 0 or phi.coeffs[1] != 1.0:
        raise GermError("change of variable must be tangent to the identity")
    inv = poly.jet_inverse(phi, order)

    def transported(eps):
        h = fam.h_jet(eps)
        outer = poly.conj_coeffs(inv) if fam.kind == ANTIHOLOMORPHIC else inv
        inner = poly.jet_compose(h, phi, order)
        return _compose_allow_const(outer, inner, order)

    return JetFamily(kind=fam.kind, k=fam.k, jet_fn=transported,
                     validity=fam.validity)


def _compose_allow_const(p: CPoly, q: CPoly, order: int) -> CPoly:
    """Jet composition p(q(z)) allowing q(0) != 0 (shifts p first)."""
    c0 = complex(q.coeffs[0])
    if c0 == 0:
        return poly.jet_compose(p, q, order)
    return poly.jet_compose(p.shifted(c0), q - CPoly([c0]), order)
