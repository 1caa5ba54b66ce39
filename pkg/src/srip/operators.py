"""Unitary operator realizations of the Heisenberg and Weil group actions.

Operators act on C(F_p), realized as dense p x p complex matrices built
entrywise from integer exponent arithmetic and a single character table
lookup, so every matrix entry is an exact root of unity (up to one
complex exponential evaluation).

The symplectic operators are assembled by generator decomposition; their
global phase is arbitrary and all consumers are phase-invariant.  The
conjugation identity U(g) pi(h) U(g)^{-1} = pi(g h), which is phase-free,
is the correctness oracle exercised by the test battery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotUnimodularError, ZeroScalingError
from .field import PrimeField


@dataclass(frozen=True)
class HeisenbergElement:
    """Group element (v, z) with v = (tau, w), twisted product via the symplectic form."""

    tau: int
    w: int
    z: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "tau", self.tau % self.p)
        object.__setattr__(self, "w", self.w % self.p)
        object.__setattr__(self, "z", self.z % self.p)

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        if other.p != self.p:
            raise ValueError("group elements live over different primes")
        p = self.p
        inv2 = pow(2, p - 2, p)
        omega = self.tau * other.w - self.w * other.tau
        z = (self.z + other.z + inv2 * omega) % p
        return HeisenbergElement(self.tau + other.tau, self.w + other.w, z, p)

    @classmethod
    def identity(cls, p: int) -> "HeisenbergElement":
        return cls(0, 0, 0, p)


@dataclass(frozen=True)
class SL2Element:
    """Matrix [[a, b], [c, d]] over F_p with det = 1 (checked exactly)."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        p = self.p
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) % p)
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise NotUnimodularError(
                f"det([[{self.a},{self.b}],[{self.c},{self.d}]]) != 1 mod {p}"
            )

    def __mul__(self, other: "SL2Element") -> "SL2Element":
        if other.p != self.p:
            raise ValueError("group elements live over different primes")
        p = self.p
        return SL2Element(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            p,
        )

    def inverse(self) -> "SL2Element":
        return SL2Element(self.d, -self.b, -self.c, self.a, self.p)

    @classmethod
    def identity(cls, p: int) -> "SL2Element":
        return cls(1, 0, 0, 1, p)

    def apply(self, v: tuple[int, int]) -> tuple[int, int]:
        """Tautological action on the plane: (tau, w) -> (a*tau + b*w, c*tau + d*w)."""
        tau, w = v
        return ((self.a * tau + self.b * w) % self.p, (self.c * tau + self.d * w) % self.p)

    def act_heisenberg(self, h: HeisenbergElement) -> HeisenbergElement:
        """Automorphism of the Heisenberg group fixing the center."""
        tau, w = self.apply((h.tau, h.w))
        return HeisenbergElement(tau, w, h.z, self.p)


def heisenberg_operator(field: PrimeField, h: HeisenbergElement) -> np.ndarray:
    """The translation-modulation operator of a Heisenberg group element.

    Realized on C(F_p) by (U f)(t) = psi(z - tau*w/2 + w*(t+tau)) f(t+tau),
    which makes the map an exact (not just projective) homomorphism.
    """
    p = field.p
    t = np.arange(p)
    cols = (t + h.tau) % p
    expo = (h.z - field.inv2 * h.tau * h.w + h.w * (t + h.tau)) % p
    M = np.zeros((p, p), dtype=np.complex128)
    M[t, cols] = field.char_table[expo]
    return M


def scaling_operator(field: PrimeField, a: int) -> np.ndarray:
    """(S_a f)(t) = legendre(a) * f(a^{-1} t), for nonzero a."""
    p = field.p
    if a % p == 0:
        raise ZeroScalingError("scaling requires a nonzero field element")
    ainv = field.inv(a)
    t = np.arange(p)
    M = np.zeros((p, p), dtype=np.complex128)
    M[t, (ainv * t) % p] = field.legendre(a)
    return M


def chirp_operator(field: PrimeField, u: int) -> np.ndarray:
    """(M_u f)(t) = psi(-u t^2 / 2) f(t): diagonal quadratic phase."""
    p = field.p
    t = np.arange(p)
    expo = (-field.inv2 * u * t * t) % p
    return np.diag(field.char_table[expo])


def fourier_operator(field: PrimeField) -> np.ndarray:
    """(F f)(w) = p^{-1/2} sum_t psi(w t) f(t): the discrete Fourier matrix."""
    p = field.p
    t = np.arange(p)
    return field.char_table[np.outer(t, t) % p] / np.sqrt(p)


def weil_operator(field: PrimeField, g: SL2Element) -> np.ndarray:
    """Unitary operator of g in SL_2(F_p), fixed up to a global unit phase.

    Built from the decomposition g = diag(b, 1/b) u(b d) w u(a/b) when
    b != 0 (u(s) strictly lower triangular, w the Weyl element) and
    g = u(c/a) diag(a, 1/a) when b = 0.  Rather than multiplying four
    generator matrices, the closed-form entries are produced directly from
    integer exponent arithmetic.
    """
    p = field.p
    if g.p != p:
        raise ValueError("element and field use different primes")
    a, b, c, d = g.a, g.b, g.c, g.d
    t = np.arange(p)
    if b % p == 0:
        # chirp(c/a) applied after scaling by a
        ainv = field.inv(a)
        expo = (-field.inv2 * c * ainv * t * t) % p
        M = np.zeros((p, p), dtype=np.complex128)
        M[t, (ainv * t) % p] = field.legendre(a) * field.char_table[expo]
        return M
    binv = field.inv(b)
    # entry (x, t): legendre(b)/sqrt(p) * psi(-d*binv*x^2/2 + binv*x*t - a*binv*t^2/2)
    tsq = (t * t) % p
    row_expo = ((-field.inv2 * d * binv) % p) * tsq
    col_expo = ((-field.inv2 * a * binv) % p) * tsq
    cross = np.outer((binv * t) % p, t)
    expo = (row_expo[:, None] + cross + col_expo[None, :]) % p
    return field.legendre(b) * field.char_table[expo] / np.sqrt(p)


def jacobi_operator(field: PrimeField, g: SL2Element, h: HeisenbergElement) -> np.ndarray:
    """Operator of the pair (g, h) in the semidirect product: U(g) pi(h)."""
    return weil_operator(field, g) @ heisenberg_operator(field, h)


def jacobi_multiply(
    j1: tuple[SL2Element, HeisenbergElement],
    j2: tuple[SL2Element, HeisenbergElement],
) -> tuple[SL2Element, HeisenbergElement]:
    """Group law of SL_2 x| H matching the operator product U(g) pi(h)."""
    g1, h1 = j1
    g2, h2 = j2
    return g1 * g2, g2.inverse().act_heisenberg(h1) * h2
