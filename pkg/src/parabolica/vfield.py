"""The rational vector field P/(1 + b z^k): periods, time charts, flows.

The time coordinate is the multivalued primitive of (1 + b z^k)/P. Two exact
evaluation modes cover everything downstream needs: partial fractions over
simple roots, and the monomial primitive -1/(k z^k) + b log z at the fully
confluent parameter. Branches are never globalized; consumers track
increments along their own paths (principal log of ratios per small step).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from . import poly
from .poly import CPoly

TWO_PI_I = 2j * np.pi


class VFieldError(ValueError):
    pass


@dataclass(frozen=True)
class VectorField:
    """dz/dt = P(z)/(1 + b z^k) with P monic, degree k+1, no z^k term."""

    P: CPoly
    b: complex
    k: int

    def __post_init__(self):
        if self.P.degree != self.k + 1:
            raise VFieldError(f"deg P = {self.P.degree}, expected {self.k + 1}")
        c = self.P.coeffs
        scale = float(np.max(np.abs(c)))
        if abs(c[-1] - 1.0) > 1e-12 * scale:
            raise VFieldError("P must be monic")
        if abs(c[self.k]) > 1e-10 * scale:
            raise VFieldError("z^k coefficient of P must vanish")

    def value(self, z):
        return poly.eval_poly(self.P, z) / (1.0 + self.b * np.asarray(z) ** self.k)

    def eigenvalue(self, root: complex) -> complex:
        """v'(z_s) at a simple root: P'(z_s)/(1 + b z_s^k)."""
        return complex(poly.derivative(self.P)(root) / (1.0 + self.b * root ** self.k))


def from_eps(eps, b: complex) -> VectorField:
    """VectorField for P = z^(k+1) + sum eps_j z^j."""
    eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
    k = len(eps)
    coeffs = np.zeros(k + 2, dtype=np.complex128)
    coeffs[:k] = eps
    coeffs[k + 1] = 1.0
    return VectorField(P=CPoly(coeffs), b=complex(b), k=k)


def simple_roots(vf: VectorField, tol: float = 1e-7) -> np.ndarray:
    rts = poly.roots(vf.P, tol=tol)
    if any(m > 1 for _, m in rts):
        raise VFieldError("period infinite at confluence")
    return np.array([z for z, _ in rts])


def periods(vf: VectorField, tol: float = 1e-7) -> np.ndarray:
    """2*pi*i times the residues of (1 + b z^k)/P at the simple roots."""
    zs = simple_roots(vf, tol)
    dP = poly.derivative(vf.P)
    return np.array([TWO_PI_I * (1.0 + vf.b * z ** vf.k) / dP(z) for z in zs])


def residues(vf: VectorField, tol: float = 1e-7):
    """(roots, rho) with rho_s the residue of the time form at root s."""
    zs = simple_roots(vf, tol)
    dP = poly.derivative(vf.P)
    rho = np.array([(1.0 + vf.b * z ** vf.k) / dP(z) for z in zs])
    return zs, rho


def is_monomial(vf: VectorField, tol: float = 1e-13) -> bool:
    return bool(np.all(np.abs(vf.P.coeffs[: vf.k + 1]) <= tol))


def time_form(vf: VectorField):
    """The integrand (1 + b z^k)/P as a callable."""
    def w(z):
        return (1.0 + vf.b * z ** vf.k) / poly.eval_poly(vf.P, z)
    return w


# --- exact primitives and branch-tracked increments ------------------------

def primitive_principal(vf: VectorField, z: complex) -> complex:
    """A fixed principal-branch primitive of the time form at z.

    Only the increments of the tracked continuation are intrinsic; this
    value fixes the anchor convention deterministically.
    """
    if is_monomial(vf):
        return -1.0 / (vf.k * z ** vf.k) + vf.b * cmath.log(z)
    zs, rho = residues(vf)
    return complex(sum(r * cmath.log(z - s) for s, r in zip(zs, rho)))


def time_increment(vf: VectorField, z0: complex, z1: complex,
                   roots_rho=None) -> complex:
    """Integral of the time form from z0 to z1 along a short arc.

    Exact (closed form) and cancellation-free; correct as the analytic
    continuation whenever the step stays small relative to the distance to
    the singular points.
    """
    d = z1 - z0
    if is_monomial(vf):
        k = vf.k
        num = z1 ** k - z0 ** k
        return num / (k * z0 ** k * z1 ** k) + vf.b * cmath.log(z1 / z0)
    if roots_rho is None:
        roots_rho = residues(vf)
    zs, rho = roots_rho
    acc = 0j
    for s, r in zip(zs, rho):
        acc += r * cmath.log(1.0 + d / (z0 - s))
    return complex(acc)


def track_path(vf: VectorField, path) -> complex:
    """Branch-tracked integral along a polyline.

    Segments are bisected until each step is short relative to the local
    distance to the singular set, which keeps the principal-log increments
    on the continued branch.
    """
    rr = None if is_monomial(vf) else residues(vf)
    zs = np.array([0j]) if rr is None else rr[0]

    def dist(z):
        return min(abs(z - s) for s in zs)

    def piece(a, b, depth=0):
        d = min(dist(a), dist(b))
        if d < 1e-12:
            raise VFieldError("path touches a singular point")
        if abs(b - a) <= 0.2 * d or depth > 48:
            return time_increment(vf, a, b, rr)
        m = 0.5 * (a + b)
        return piece(a, m, depth + 1) + piece(m, b, depth + 1)

    pts = [complex(p) for p in path]
    return complex(sum(piece(a, b) for a, b in zip(pts[:-1], pts[1:])))


# --- quadrature along polylines --------------------------------------------

def _segment_pole_distance(a: complex, b: complex, z: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(z - a)
    t = np.clip(((z - a) * np.conj(ab)).real / denom, 0.0, 1.0)
    return abs(a + t * ab - z)


def time_integral(vf: VectorField, path, delta: float | None = None,
                  abs_tol: float = 1e-10) -> complex:
    """Adaptive Gauss-Kronrod quadrature of the time form along a polyline.

    Every segment must stay more than ``delta`` away from every singular
    point (default 1e-3 times the path scale); violations report the
    offending segment index.
    """
    pts = [complex(p) for p in path]
    if len(pts) < 2:
        return 0j
    rts = [z for z, _ in poly.roots(vf.P, tol=1e-9)]
    if delta is None:
        delta = 1e-3 * max(abs(p) for p in pts)
    w = time_form(vf)
    total = 0j
    for i, (a, b) in enumerate(zip(pts[:-1], pts[1:])):
        for z in rts:
            if _segment_pole_distance(a, b, z) <= delta:
                raise VFieldError(
                    f"path segment {i} enters the {delta:g}-exclusion zone of "
                    f"singular point {z}")
        seg = b - a
        val, _ = quad(lambda t: w(a + t * seg) * seg, 0.0, 1.0,
                      epsabs=abs_tol, epsrel=1e-12, limit=200,
                      complex_func=True)
        total += val
    return complex(total)


# --- time charts ------------------------------------------------------------

@dataclass(frozen=True)
class TimeChart:
    """One branch of the time coordinate, anchored near the boundary circle.

    Chart functions are normalized to the displayed inter-chart offset:
    Z_j = Z_0 - j * 2*pi*i*b/k, with Z_0 the tracked primitive from the base
    point zeta_0 = r. The base point marks the sector the chart covers.
    """

    j: int
    base_point: complex
    vf: VectorField
    r: float

    @property
    def paper_index(self) -> int:
        two_k = 2 * self.vf.k
        return self.j if self.j <= self.vf.k else self.j - two_k

    def time(self, z: complex) -> complex:
        """Z_j(z) along the arc-then-radial route from zeta_0 = r."""
        vf = self.vf
        r = self.r
        z = complex(z)
        ang = cmath.phase(z) if z != 0 else 0.0
        n_arc = max(2, int(abs(ang) / 0.2) + 1)
        arc = [r * cmath.exp(1j * ang * i / n_arc) for i in range(n_arc + 1)]
        base = track_path(vf, arc + [z])
        return base - self.j * TWO_PI_I * vf.b / vf.k


def _arc_integral_tracked(vf: VectorField, r: float, th0: float, th1: float,
                          n: int = 96) -> complex:
    rr = None if is_monomial(vf) else residues(vf)
    total = 0j
    prev = r * cmath.exp(1j * th0)
    for i in range(1, n + 1):
        cur = r * cmath.exp(1j * (th0 + (th1 - th0) * i / n))
        total += time_increment(vf, prev, cur, rr)
        prev = cur
    return total


def chart_base_points(vf: VectorField, r: float) -> list[TimeChart]:
    """Base points zeta_0..zeta_{2k-1} by 1-D solves along the circle.

    zeta_0 = r; each next zeta_j solves Im(arc integral from zeta_{j-1}) =
    pi Re(b)/k inside the sector around angle pi j/k (at the confluent
    parameter the solution is exactly r e^{i pi j / k}). The loop closes on
    the full residue 2*pi*i*b.
    """
    k = vf.k
    if not is_monomial(vf):
        zs = simple_roots(vf)
        if np.max(np.abs(zs)) > r / 2:
            raise VFieldError("r too small: singular points outside half disk")
    target = np.pi * vf.b.real / k
    charts = [TimeChart(j=0, base_point=complex(r), vf=vf, r=r)]
    th_prev = 0.0
    for j in range(1, 2 * k):
        center = np.pi * j / k
        lo, hi = center - np.pi / (2 * k) * 0.98, center + np.pi / (2 * k) * 0.98

        def f(th):
            return (_arc_integral_tracked(vf, r, th_prev, th).imag - target)

        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:
            raise VFieldError(f"r too small for this parameter: no base point "
                              f"bracket in sector {j}")
        th = brentq(f, lo, hi, xtol=1e-13)
        charts.append(TimeChart(j=j, base_point=r * cmath.exp(1j * th),
                                vf=vf, r=r))
        th_prev = th
    return charts


# --- flow --------------------------------------------------------------------

def flow(vf: VectorField, z0: complex, T: complex, tol: float = 1e-12,
         r_max: float | None = None, delta: float | None = None) -> complex:
    """Time-T map of the field by DOP853 along the straight time segment.

    Guards: the trajectory must stay inside |z| < r_max and outside the
    delta-disks around the singular points; violations report the time
    reached.
    """
    if T == 0:
        return complex(z0)
    if r_max is None:
        r_max = 20.0 * max(1.0, abs(z0))
    rts = [z for z, _ in poly.roots(vf.P, tol=1e-9)]
    if delta is None:
        delta = 1e-3 * max(abs(z0), max((abs(z) for z in rts), default=1.0))

    Tc = complex(T)

    def rhs(s, y):
        z = y[0] + 1j * y[1]
        w = Tc * vf.value(z)
        return [w.real, w.imag]

    def hit_pole(s, y):
        z = y[0] + 1j * y[1]
        return min(abs(z - p) for p in rts) - delta

    def escaped(s, y):
        z = y[0] + 1j * y[1]
        return abs(z) - r_max

    hit_pole.terminal = True
    escaped.terminal = True
    sol = solve_ivp(rhs, (0.0, 1.0), [z0.real, z0.imag], method="DOP853",
                    rtol=max(tol, 1e-13), atol=tol, dense_output=False,
                    events=[hit_pole, escaped])
    if sol.status == 1:
        t_reached = sol.t[-1] * Tc
        raise VFieldError(
            f"trajectory left the safe domain at time {t_reached}")
    if not sol.success:
        raise VFieldError(f"integration failed: {sol.message}")
    return complex(sol.y[0, -1] + 1j * sol.y[1, -1])


@dataclass(frozen=True)
class NormalFormFamily:
    """sigma ∘ v^(1/2) exposed with the germ-family evaluation protocol.

    The antiholomorphic normal form of the prepared classification; its
    second iterate at real parameters is the time-one map of v. b may be a
    constant or a callable of eps.
    """

    k: int
    b: object = 0.0
    validity: float = 0.1
    kind: str = "antiholomorphic"

    def b_at(self, eps) -> complex:
        return complex(self.b(eps)) if callable(self.b) else complex(self.b)

    def vf(self, eps) -> VectorField:
        return from_eps(eps, self.b_at(eps))

    def f(self, eps, z: complex) -> complex:
        return complex(np.conj(flow(self.vf(eps), z, 0.5)))

    def g(self, eps, z: complex) -> complex:
        """Second iterate at real eps: the time-one map."""
        eps = np.atleast_1d(np.asarray(eps, dtype=np.complex128))
        if np.max(np.abs(eps.imag)) > 1e-14:
            raise VFieldError("normal-form second iterate wired for real eps")
        return flow(self.vf(eps), z, 1.0)

    def g_inverse(self, eps, z: complex) -> complex:
        return flow(self.vf(eps), z, -1.0)

    def multiplier(self, eps, root: complex) -> complex:
        """g'(root) = exp(v'(root)) at a fixed point."""
        return cmath.exp(self.vf(eps).eigenvalue(root))

    def h_prime_at(self, eps, root: complex) -> complex:
        """Derivative of the holomorphic companion v^(1/2) at a fixed point."""
        return cmath.exp(0.5 * self.vf(eps).eigenvalue(root))
