import numpy as np
import pytest

from parabolica import poly
from parabolica.germ import ANTIHOLOMORPHIC, FamilySpec, family_from_jets
from parabolica.poly import CPoly, from_coeffs


def quad_prepared_family(validity: float = 0.05) -> FamilySpec:
    """f_eps(z) = conj(z) + (conj(z)^2 - eps0)/2, the prepared k=1 workhorse."""
    def jet(eps):
        return from_coeffs(-eps[0] / 2, 1, 0.5)
    return family_from_jets(ANTIHOLOMORPHIC, 1, jet, validity=validity)


def cubic_prepared_family(validity: float = 0.02) -> FamilySpec:
    """k=2: f_eps(z) = conj(z) + (conj(z)^3 - eps1 conj(z) - eps0)/2."""
    def jet(eps):
        return from_coeffs(-eps[0] / 2, 1 - eps[1] / 2, 0, 0.5)
    return family_from_jets(ANTIHOLOMORPHIC, 2, jet, validity=validity)


def random_real_family(k: int, rng: np.random.Generator,
                       validity: float = 0.02,
                       amp: float = 0.3) -> FamilySpec:
    """Random real-coefficient antiholomorphic unfolding of codimension k.

    Coefficients of the companion are affine in eps with real weights, the
    base germ is the reduced parabolic z + z^{k+1}/2, so the real axis is an
    invariant curve at real eps.
    """
    coeffs0 = np.zeros(k + 2)
    coeffs0[1] = 1.0
    coeffs0[k + 1] = 0.5
    lin = rng.uniform(-amp, amp, size=(k + 2, k))
    # make the unfolding generic: eps_j feeds a_j at order one
    for j in range(k):
        lin[j, j] = rng.uniform(0.5, 1.0) * rng.choice([-1.0, 1.0])

    def jet(eps):
        eps = np.asarray(eps)
        c = coeffs0.astype(np.complex128).copy()
        c += lin @ eps
        return CPoly(c)

    return family_from_jets(ANTIHOLOMORPHIC, k, jet, validity=validity)


def random_tangent_change(rng: np.random.Generator, deg: int = 3,
                          amp: float = 0.1, real: bool = False) -> CPoly:
    c = np.zeros(deg + 1, dtype=np.complex128)
    c[1] = 1.0
    for j in range(2, deg + 1):
        if real:
            c[j] = rng.uniform(-amp, amp)
        else:
            c[j] = rng.uniform(-amp, amp) + 1j * rng.uniform(-amp, amp)
    return CPoly(c)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
