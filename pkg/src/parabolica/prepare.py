"""Preparation of a family at a sampled parameter value.

Realizes the observable output of the preparation theorem pointwise in eps:
the monic centered fixed-point divisor P (vanishing z^k coefficient), the
canonical parameters (its lower coefficients), the formal invariant b, the
eigenvalue-fit polynomial S with log g'(w_j) = P'(w_j)(1 + S(w_j)), and the
multiplier-symmetrizing polynomial K with u' = 1 + P'K matching
sqrt(h'(w_j)) at the nodes. Confluent nodes switch to Hermite data computed
from jets, which is exactly the coalescence limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import germ, poly
from .germ import GermError
from .poly import CPoly

CLUSTER_TOL = 1e-5


class PrepareError(ValueError):
    pass


def lagrange_fit(nodes, values, max_degree: int) -> CPoly:
    """Unique polynomial of degree <= max_degree through (node, value) pairs.

    Requires len(nodes) == max_degree + 1 and nodes pairwise distinct beyond
    the clustering tolerance; confluent data must come through
    :func:`hermite_fit` with jet values instead.
    """
    nodes = np.asarray(nodes, dtype=np.complex128)
    values = np.asarray(values, dtype=np.complex128)
    if len(nodes) != max_degree + 1 or len(values) != len(nodes):
        raise PrepareError(
            f"need {max_degree + 1} nodes/values, got {len(nodes)}/{len(values)}")
    for i in range(len(nodes)):
        for j in range(i):
            if abs(nodes[i] - nodes[j]) < CLUSTER_TOL:
                raise PrepareError("confluent nodes; use hermite_fit with jets")
    return hermite_fit([(z, [v]) for z, v in zip(nodes, values)])


def hermite_fit(groups) -> CPoly:
    """Newton divided-difference interpolation with confluent (jet) data.

    ``groups``: list of (node, taylor) where taylor[i] = f^(i)(node)/i!.
    Repeated-node divided differences are filled from the Taylor data, which
    is the coalescence limit of the Lagrange formula.
    """
    zs, taylor_of = [], []
    for z, taylor in groups:
        for i in range(len(taylor)):
            zs.append(complex(z))
            taylor_of.append((complex(z), tuple(taylor)))
    n = len(zs)
    dd = [[0j] * n for _ in range(n)]
    for i in range(n):
        dd[i][0] = taylor_of[i][1][0]
    for j in range(1, n):
        for i in range(n - j):
            if zs[i + j] == zs[i]:
                dd[i][j] = taylor_of[i][1][j]
            else:
                dd[i][j] = (dd[i + 1][j - 1] - dd[i][j - 1]) / (zs[i + j] - zs[i])
    # Newton form -> monomial coefficients
    out = CPoly([dd[0][n - 1]])
    for i in range(n - 2, -1, -1):
        out = out * poly.from_coeffs(-zs[i], 1) + CPoly([dd[0][i]])
    return out


@dataclass(frozen=True)
class PreparedFamily:
    k: int
    eps_canonical: np.ndarray
    b: complex
    P: CPoly
    S: CPoly
    K: CPoly
    changes: dict = field(default_factory=dict)

    @property
    def translation(self) -> complex:
        return self.changes.get("translation", 0j)

    def nodes(self) -> np.ndarray:
        """Transported fixed points (roots of P), one entry per multiplicity."""
        return np.array(self.changes["nodes"])


def canonical_involution(eps, k: int | None = None) -> np.ndarray:
    """Parameter action of conjugating a prepared family by z -> -z (k even).

    Componentwise eps_j -> (-1)^(j+1) eps_j: the centered divisor transforms
    as P(z) -> -P(-z). For odd k the canonical parameter is unique and the
    involution is undefined.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
    if k is None:
        k = len(eps)
    if k % 2 == 1:
        raise PrepareError("involution undefined; canonical parameter unique")
    signs = np.array([(-1.0) ** (j + 1) for j in range(k)])
    return eps * signs


def _jet_div_vanishing(num: CPoly, den: CPoly, order: int) -> CPoly:
    """num/den as a jet when both vanish to compatible order at 0."""
    a, b = num.coeffs, den.coeffs
    va = next((i for i, c in enumerate(a) if abs(c) > 0), len(a))
    vb = next((i for i, c in enumerate(b) if abs(c) > 0), len(b))
    if vb > va:
        raise PrepareError("jet division not analytic (denominator vanishes deeper)")
    num2, den2 = CPoly(a[vb:] if va >= vb else a), CPoly(b[vb:])
    return poly.jet_mul(num2, poly.jet_recip(den2, order), order)


def _log_jet(p: CPoly, order: int) -> CPoly:
    """log(p) - log(p(0)) + log(p(0)) as a jet; needs p(0) not near 0."""
    c0 = p.coeffs[0]
    rel = CPoly(p.coeffs / c0) - CPoly([1.0])
    return CPoly([np.log(c0)]) + poly.jet_log1p(rel, order)


def _cluster(points, tol: float = CLUSTER_TOL):
    """Group a multiset of complex points into tol-clusters (center, count)."""
    groups: list[list[complex]] = []
    for z in sorted(points, key=lambda w: (w.real, w.imag)):
        for g in groups:
            if abs(z - np.mean(g)) < tol:
                g.append(z)
                break
        else:
            groups.append([z])
    return [(complex(np.mean(g)), len(g)) for g in groups]


auto_radius = germ.auto_radius


def prepare_at(fam, eps_input, radius: float | None = None,
               tol: float = 1e-7) -> PreparedFamily:
    """Run the preparation pipeline at one parameter value.

    Steps: fixed-point divisor of the second iterate, barycentric
    centering (the tangent-to-identity choice), formal invariant from the
    multipliers, then the two interpolation fits S and K. Multiplicities in
    the divisor trigger Hermite data; b falls back to series extrapolation
    at a fully confluent parameter.
    """
    eps_input = np.atleast_1d(np.asarray(eps_input, dtype=np.complex128))
    k = fam.k
    if radius is None:
        radius = auto_radius(fam, eps_input)
    fp = germ.classify_fixed_points(fam, eps_input, radius, tol=tol)
    if fp.total_multiplicity() != k + 1:
        raise PrepareError(
            f"expected {k + 1} fixed points in the disk, found "
            f"{fp.total_multiplicity()}")
    w_list = [p.location for p in fp.points for _ in range(p.multiplicity)]
    T = complex(np.mean(w_list))
    shifted = [w - T for w in w_list]
    P = poly.from_roots(shifted)
    if abs(P.coeffs[k]) > 1e-10 * max(1.0, float(np.max(np.abs(P.coeffs)))):
        raise PrepareError("centering failed: z^k coefficient survives")
    coeffs = np.zeros(k + 2, dtype=np.complex128)
    coeffs[: len(P.coeffs)] = P.coeffs
    coeffs[k] = 0.0
    P = CPoly(coeffs)
    eps_canonical = P.coeffs[:k].copy()

    simple = all(p.multiplicity == 1 for p in fp.points)
    near_one = any(abs(p.multiplier_g - 1.0) < 1e-10 for p in fp.points)
    if simple and not near_one:
        b = germ.formal_invariant_b(fp)
    else:
        b = germ.formal_invariant_b_extrapolated(fam, radius)

    g = germ.second_iterate(fam, eps_input)
    gp = poly.derivative(g)
    h = fam.h_jet(eps_input)
    hp = poly.derivative(h)
    Pp = poly.derivative(P)

    jet_order = k + 2
    s_groups, k_groups = [], []
    for center, mult in _cluster(shifted):
        if mult == 1:
            w_orig = center + T
            m_val = np.log(gp(w_orig)) / Pp(center) - 1.0
            hpw = hp(w_orig)
            w_val = (hpw - 1.0) / (Pp(center) * (1.0 + np.sqrt(hpw)))
            s_groups.append((center, [m_val]))
            k_groups.append((center, [w_val]))
        else:
            # Hermite data from jets at the cluster center
            gp_jet = poly.jet_truncate(gp.shifted(center + T), jet_order + mult)
            log_gp = _log_jet(gp_jet, jet_order + mult)
            Pp_jet = poly.jet_truncate(Pp.shifted(center), jet_order + mult)
            m_jet = _jet_div_vanishing(log_gp, Pp_jet, mult - 1) - CPoly([1.0])
            hp_jet = poly.jet_truncate(hp.shifted(center + T), jet_order + mult)
            sq = poly.jet_sqrt1p(hp_jet - CPoly([1.0]), jet_order + mult)
            denom = poly.jet_mul(Pp_jet, sq + CPoly([1.0]), jet_order + mult)
            w_jet = _jet_div_vanishing(hp_jet - CPoly([1.0]), denom, mult - 1)
            s_groups.append((center, list(m_jet.coeffs[:mult]) +
                             [0j] * (mult - len(m_jet.coeffs))))
            k_groups.append((center, list(w_jet.coeffs[:mult]) +
                             [0j] * (mult - len(w_jet.coeffs))))

    S = hermite_fit(s_groups)
    K = hermite_fit(k_groups)
    if S.degree > k or K.degree > k:
        raise PrepareError("interpolation degree escaped the k bound")

    changes = {"translation": T, "radius": float(radius),
               "nodes": tuple(shifted)}
    return PreparedFamily(k=k, eps_canonical=eps_canonical, b=complex(b),
                          P=P, S=S, K=K, changes=changes)


def eigenvalue_residuals(prep: PreparedFamily, fam, eps_input) -> np.ndarray:
    """|log g'(w_j) - P'(w_j)(1 + S(w_j))| at the simple nodes."""
    g = germ.second_iterate(fam, eps_input)
    gp = poly.derivative(g)
    Pp = poly.derivative(prep.P)
    T = prep.translation
    out = []
    for center, mult in _cluster(list(prep.nodes())):
        if mult > 1:
            continue
        lhs = np.log(gp(center + T))
        rhs = Pp(center) * (1.0 + prep.S(center))
        out.append(abs(lhs - rhs))
    return np.array(out)


def f_multiplier_symmetry_residual(prep: PreparedFamily, fam, eps_input) -> float:
    """Residual of F'(w_j) = conj(F'(conj(w_j))) after the u-change.

    F' at the transported points is u'(conj w) / conj(u'(w)) * f'(w), with
    u' = 1 + P'K and f'(w) the conjugate-linear derivative conj(h'(w)).
    Pairs each node with the node nearest its conjugate (exact for real
    parameters of real-coefficient families).
    """
    h = fam.h_jet(eps_input)
    hp = poly.derivative(h)
    Pp = poly.derivative(prep.P)
    T = prep.translation
    nodes = prep.nodes()

    def uprime(w):
        return 1.0 + Pp(w) * prep.K(w)

    def Fprime(w):
        fpw = np.conj(hp(w + T))
        return uprime(np.conj(w)) / np.conj(uprime(w)) * fpw

    worst = 0.0
    for w in nodes:
        j = int(np.argmin(np.abs(nodes - np.conj(w))))
        wbar = nodes[j]
        worst = max(worst, abs(Fprime(w) - np.conj(Fprime(wbar))))
    return float(worst)


def prepared_residual(fam, eps_input, prep: PreparedFamily,
                      order: int = 12) -> CPoly:
    """Companion jet of (transported f minus zbar + P(zbar)/2), centered.

    The transported companion is h(z+T) - conj(T); subtracting id + P/2
    leaves P(Q + PR) whose Q/R splitting is a division by P the caller can
    perform; it is not fixed here.
    """
    h = fam.h_jet(eps_input)
    T = prep.translation
    h_c = poly.jet_truncate(h.shifted(T) - CPoly([np.conj(T)]), order)
    target = poly.identity() + 0.5 * poly.jet_truncate(prep.P, order)
    return poly.jet_truncate(h_c - target, order)
