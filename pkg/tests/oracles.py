"""Independent reference computations used by the tests."""

import math

import numpy as np


def product_oracle(n: int = 64) -> float:
    """prod_{m<n} (1 + 2^-m): the (1, 0) quotient of w = 1 + z along z/2."""
    p = 1.0
    for m in range(n):
        p *= 1 + 2.0 ** -m
    return p


def naive_quotient(phi, w, f, z1, z2, n):
    """Q_n by plain multiplication, no logs."""
    a, b = complex(z1), complex(z2)
    num = den = 1 + 0j
    out = []
    for _ in range(n + 1):
        out.append(num * f(a) / (den * f(b)))
        num *= w(a)
        den *= w(b)
        a, b = phi(a), phi(b)
    return np.array(out)


def trig_polynomial(coeffs: dict) -> str:
    """Source text for sum c_k z^k."""
    terms = []
    for k, c in sorted(coeffs.items()):
        c = complex(c)
        terms.append(f"({float(c.real)!r}+({float(c.imag)!r})*i)*z^({k})")
    return "+".join(terms) if terms else "0"


def random_trig_coeffs(rng: np.random.Generator, degree: int) -> dict:
    ks = range(-degree, degree + 1)
    return {k: complex(rng.normal(), rng.normal()) for k in ks}


def arnold_rotation_oracle(omega: float, k: float = 0.05, steps: int = 10 ** 6) -> float:
    """Mean displacement of theta -> theta + omega + k sin(2 pi theta)/(2 pi) from 0."""
    x = 0.0
    c = k / (2 * math.pi)
    tp = 2 * math.pi
    for _ in range(steps):
        x = x + omega + c * math.sin(tp * x)
    return x / steps
