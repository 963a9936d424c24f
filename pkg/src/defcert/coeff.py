"""Exact arithmetic in the coefficient rings used by the workbench.

Every ring here is a finite local ring presented as truncated polynomials
in one variable t, where the degree-i coefficient is an integer modulo a
level modulus m_i:

    PrimeField(p)          m = (p,)
    TruncPoly(p, N)        m = (p,) * N              F_p[t]/(t^N)
    TruncWitt(p, n)        m = (p^n,)                Z/p^n
    MixedDeform(p, n, N)   m = (p^n, p, ..., p)      Z_p[[t]]/(p*t, t^N) truncated
    ObstructionRing(p)     m = (p^3, p^2, p)         Z[t]/(p^3, t^3, p^2*t, p*t^2)

Multiplication is polynomial convolution with the degree-i sum reduced mod
m_i.  This is well defined because m_i divides m_j whenever j <= i, which
holds in every kind above.  A single implementation therefore serves all
five rings, and matrices over them vectorize as integer arrays with one
slice per t-degree.

>>> d = mixed_deform(3, 2, 3)
>>> print((d.from_int(3) + d.t()) * d.t())
t^2 mod MixedDeform(p=3,n=2,N=3)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonUnitError(ZeroDivisionError):
    """Raised when inverting an element whose residue mod p is zero."""


class DescriptorMismatch(ValueError):
    """Raised when operands belong to different coefficient rings."""


def _check_prime(p: int) -> None:
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise ValueError(f"p must be prime, got {p}")


@dataclass(frozen=True)
class RingDescriptor:
    """Identifies one of the five supported coefficient rings."""

    kind: str
    p: int
    n: int = 1
    N: int = 1

    def __post_init__(self):
        _check_prime(self.p)
        if self.n < 1 or self.N < 1:
            raise ValueError("n and N must be >= 1")

    @property
    def moduli(self) -> tuple[int, ...]:
        if self.kind == "prime_field":
            return (self.p,)
        if self.kind == "trunc_poly":
            return (self.p,) * self.N
        if self.kind == "trunc_witt":
            return (self.p**self.n,)
        if self.kind == "mixed_deform":
            return (self.p**self.n,) + (self.p,) * (self.N - 1)
        if self.kind == "obstruction":
            return (self.p**3, self.p**2, self.p)
        raise ValueError(f"unknown ring kind {self.kind!r}")

    @property
    def levels(self) -> int:
        return len(self.moduli)

    def zero(self) -> "RingElem":
        return RingElem(self, (0,) * self.levels)

    def one(self) -> "RingElem":
        return self.from_int(1)

    def from_int(self, k: int) -> "RingElem":
        c = [0] * self.levels
        c[0] = k % self.moduli[0]
        return RingElem(self, tuple(c))

    def t(self, degree: int = 1) -> "RingElem":
        if degree >= self.levels:
            return self.zero()
        c = [0] * self.levels
        c[degree] = 1 % self.moduli[degree]
        return RingElem(self, tuple(c))

    def from_coeffs(self, coeffs) -> "RingElem":
        m = self.moduli
        c = [0] * self.levels
        for i, v in enumerate(coeffs):
            if i >= self.levels:
                if int(v) != 0:
                    raise ValueError("coefficient beyond truncation degree")
                continue
            c[i] = int(v) % m[i]
        return RingElem(self, tuple(c))

    def __str__(self):
        if self.kind == "prime_field":
            return f"PrimeField(p={self.p})"
        if self.kind == "trunc_poly":
            return f"TruncPoly(p={self.p},N={self.N})"
        if self.kind == "trunc_witt":
            return f"TruncWitt(p={self.p},n={self.n})"
        if self.kind == "mixed_deform":
            return f"MixedDeform(p={self.p},n={self.n},N={self.N})"
        return f"ObstructionRing(p={self.p})"


def prime_field(p: int) -> RingDescriptor:
    return RingDescriptor("prime_field", p)


def trunc_poly(p: int, N: int) -> RingDescriptor:
    return RingDescriptor("trunc_poly", p, N=N)


def trunc_witt(p: int, n: int) -> RingDescriptor:
    return RingDescriptor("trunc_witt", p, n=n)


def mixed_deform(p: int, n: int, N: int) -> RingDescriptor:
    return RingDescriptor("mixed_deform", p, n=n, N=N)


def obstruction_ring(p: int) -> RingDescriptor:
    return RingDescriptor("obstruction", p)


def convolve_levels(moduli, a_levels, b_levels, mul):
    """C_l = sum_{i+j=l} A_i*B_j reduced mod moduli[l], for any `mul`.

    Works for scalars and for stacked numpy arrays alike; `mul` supplies the
    level-slice product (plain int multiply, np.matmul, ...).
    """
    L = len(moduli)
    out = []
    for l in range(L):
        acc = None
        for i in range(l + 1):
            term = mul(a_levels[i], b_levels[l - i])
            acc = term if acc is None else acc + term
        out.append(acc % moduli[l])
    return out


@dataclass(frozen=True)
class RingElem:
    """An element of a RingDescriptor ring, canonical coefficient tuple."""

    desc: RingDescriptor
    coeffs: tuple[int, ...]

    def _match(self, other) -> "RingElem":
        if isinstance(other, int):
            return self.desc.from_int(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        if other.desc != self.desc:
            raise DescriptorMismatch(f"{self.desc} vs {other.desc}")
        return other

    def __add__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        m = self.desc.moduli
        return RingElem(
            self.desc,
            tuple((a + b) % mi for a, b, mi in zip(self.coeffs, o.coeffs, m)),
        )

    __radd__ = __add__

    def __neg__(self):
        m = self.desc.moduli
        return RingElem(self.desc, tuple((-a) % mi for a, mi in zip(self.coeffs, m)))

    def __sub__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        m = self.desc.moduli
        out = convolve_levels(m, self.coeffs, o.coeffs, lambda x, y: x * y)
        return RingElem(self.desc, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.invert() ** (-e)
        acc = self.desc.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.desc.p != 0

    def residue(self) -> int:
        """Image in the residue field F_p, as a canonical integer."""
        return self.coeffs[0] % self.desc.p

    def invert(self) -> "RingElem":
        """Newton iteration from the residue inverse; units only.

        The maximal ideal is nilpotent, so x -> x(2 - ax) squares the error
        1 - ax into zero after a few steps.
        """
        if not self.is_unit():
            raise NonUnitError(f"{self} is not a unit")
        x = self.desc.from_int(pow(self.residue(), -1, self.desc.p))
        one = self.desc.one()
        for _ in range(12):
            err = one - self * x
            if err.is_zero():
                return x
            x = x * (2 - self * x)
        raise AssertionError("Newton inversion failed to converge")

    def convert(self, target: RingDescriptor) -> "RingElem":
        return RingElem(target, _convert_levels(self.desc, target, self.coeffs))

    def __str__(self):
        return f"{poly_str(self.coeffs)} mod {self.desc}"

    __repr__ = __str__


def poly_str(coeffs) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            tpow = "t" if i == 1 else f"t^{i}"
            terms.append(tpow if c == 1 else f"{c}*{tpow}")
    return " + ".join(terms) if terms else "0"


def _convert_levels(src: RingDescriptor, dst: RingDescriptor, coeffs):
    """Coefficientwise reduction along a legal ring surjection.

    Legal when dst has at most as many t-levels and each dst modulus divides
    the corresponding src modulus (quotient by (p^k, t^N') ideals).
    """
    ms, md = src.moduli, dst.moduli
    if len(md) > len(ms) or any(ms[i] % md[i] for i in range(len(md))):
        raise DescriptorMismatch(f"no ring surjection {src} -> {dst}")
    return tuple(coeffs[i] % md[i] for i in range(len(md)))


def teichmuller(p: int, n: int, a: int) -> RingElem:
    """Teichmuller lift of a mod p into Z/p^n: a^(p^(n-1)) mod p^n.

    The unique lift with x^(p-1) = 1 (for a not divisible by p).
    """
    d = trunc_witt(p, n)
    return d.from_int(pow(a % p**n, p ** (n - 1), p**n))


class Matrix:
    """Dense matrix over a RingDescriptor ring.

    Backed by an int64 array of shape (rows, cols, levels) holding canonical
    coefficients; the level axis is the t-degree.  Products convolve the
    level slices and reduce each mod its level modulus, which is exact.
    """

    __slots__ = ("desc", "arr")

    def __init__(self, desc: RingDescriptor, arr: np.ndarray):
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim != 3 or arr.shape[2] != desc.levels:
            raise ValueError(f"expected (rows, cols, {desc.levels}) array")
        arr = arr % np.array(desc.moduli, dtype=np.int64)
        arr.flags.writeable = False
        self.desc = desc
        self.arr = arr

    @classmethod
    def zeros(cls, desc, rows, cols):
        return cls(desc, np.zeros((rows, cols, desc.levels), dtype=np.int64))

    @classmethod
    def identity(cls, desc, dim):
        a = np.zeros((dim, dim, desc.levels), dtype=np.int64)
        a[np.arange(dim), np.arange(dim), 0] = 1
        return cls(desc, a)

    @classmethod
    def from_int_array(cls, desc, mat2d, level: int = 0):
        """Embed a plain integer matrix at the given t-degree."""
        m = np.asarray(mat2d, dtype=np.int64)
        a = np.zeros(m.shape + (desc.levels,), dtype=np.int64)
        if level < desc.levels:
            a[:, :, level] = m
        return cls(desc, a)

    @classmethod
    def from_entries(cls, desc, rows):
        data = np.zeros((len(rows), len(rows[0]), desc.levels), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                e = desc.from_int(v) if isinstance(v, int) else v
                if e.desc != desc:
                    raise DescriptorMismatch(f"{e.desc} vs {desc}")
                data[i, j] = e.coeffs
        return cls(desc, data)

    @property
    def shape(self):
        return self.arr.shape[:2]

    def entry(self, i, j) -> RingElem:
        return RingElem(self.desc, tuple(int(v) for v in self.arr[i, j]))

    def _match(self, other) -> "Matrix":
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other)!r}")
        if other.desc != self.desc:
            raise DescriptorMismatch(f"{self.desc} vs {other.desc}")
        return other

    def __add__(self, other):
        o = self._match(other)
        return Matrix(self.desc, self.arr + o.arr)

    def __sub__(self, other):
        o = self._match(other)
        return Matrix(self.desc, self.arr - o.arr)

    def __neg__(self):
        return Matrix(self.desc, -self.arr)

    def scale(self, c) -> "Matrix":
        e = self.desc.from_int(c) if isinstance(c, int) else c
        levels = [self.arr[:, :, i] for i in range(self.desc.levels)]
        out = convolve_levels(
            self.desc.moduli, e.coeffs, levels, lambda x, y: int(x) * y
        )
        return Matrix(self.desc, np.stack(out, axis=-1))

    def __matmul__(self, other):
        o = self._match(other)
        a = [self.arr[:, :, i] for i in range(self.desc.levels)]
        b = [o.arr[:, :, i] for i in range(self.desc.levels)]
        out = convolve_levels(self.desc.moduli, a, b, np.matmul)
        return Matrix(self.desc, np.stack(out, axis=-1))

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        acc = Matrix.identity(self.desc, self.shape[0])
        base = self
        while e:
            if e & 1:
                acc = acc @ base
            base = base @ base
            e >>= 1
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.desc == self.desc
            and self.shape == other.shape
            and bool(np.array_equal(self.arr, other.arr))
        )

    def is_zero(self) -> bool:
        return not self.arr.any()

    def residue(self) -> np.ndarray:
        """Entrywise residue mod p as a plain 2d int64 array."""
        return self.arr[:, :, 0] % self.desc.p

    def convert(self, target: RingDescriptor) -> "Matrix":
        _convert_levels(self.desc, target, (0,) * self.desc.levels)  # validate
        md = np.array(target.moduli, dtype=np.int64)
        return Matrix(target, self.arr[:, :, : target.levels] % md)

    def inv(self) -> "Matrix":
        """Newton lift of the residue inverse; requires unit determinant."""
        from . import flinalg

        r = flinalg.inv(self.residue(), self.desc.p)
        if r is None:
            raise NonUnitError("matrix is not invertible over the residue field")
        x = Matrix.from_int_array(self.desc, r)
        ident = Matrix.identity(self.desc, self.shape[0])
        for _ in range(12):
            if (self @ x - ident).is_zero():
                return x
            x = x @ (ident + ident - self @ x)
        raise AssertionError("Newton matrix inversion failed to converge")

    def __str__(self):
        rows = []
        for i in range(self.shape[0]):
            rows.append(
                "[" + ", ".join(poly_str(self.arr[i, j]) for j in range(self.shape[1])) + "]"
            )
        return f"Matrix over {self.desc}\n" + "\n".join(rows)

    __repr__ = __str__
