"""円分体 ℚ(ζ_n) の厳密演算

元は ζ_n の冪基底 1, ζ, …, ζ^{φ(n)-1} に関する有理係数ベクトルで持つ。
異なる導手どうしの演算は最小公倍数の導手へ持ち上げて行う。
浮動小数点は一切使わない。
"""
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Tuple, Union

from sympy import Matrix, cyclotomic_poly, divisors, symbols, totient

Rational = Union[int, Fraction]

_x = symbols("x")


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def power_table(n: int) -> Tuple[Tuple[int, ...], ...]:
    """ζ_n^m (0 ≤ m < n) を冪基底で表した整数係数の表"""
    degree = phi(n)
    poly = [int(c) for c in cyclotomic_poly(n, _x, polys=True).all_coeffs()]
    # poly は最高次から並ぶモニック多項式
    lower = poly[1:][::-1]  # 定数項から
    rows = []
    current = [0] * degree
    current[0] = 1
    for _ in range(n):
        rows.append(tuple(current))
        top = current[-1]
        shifted = [0] + current[:-1]
        if top:
            shifted = [shifted[i] - top * lower[i] for i in range(degree)]
        current = shifted
    return tuple(rows)


@lru_cache(maxsize=None)
def _lift_columns(n: int, m: int) -> Tuple[Tuple[int, ...], ...]:
    """ζ_n^i (i < φ(n)) を ℚ(ζ_m) の冪基底で表したもの（n | m）"""
    table = power_table(m)
    step = m // n
    return tuple(table[(i * step) % m] for i in range(phi(n)))


def _reduce_powers(n: int, values: Dict[int, Fraction]) -> Tuple[Fraction, ...]:
    """Σ values[e]·ζ_n^e を冪基底に直す"""
    table = power_table(n)
    degree = phi(n)
    out = [Fraction(0)] * degree
    for exponent, value in values.items():
        if not value:
            continue
        row = table[exponent % n]
        for i in range(degree):
            if row[i]:
                out[i] += value * row[i]
    return tuple(out)


class CyclotomicNumber:
    """ℚ(ζ_n) の元"""

    __slots__ = ("n", "coeffs", "_canonical")

    def __bool__(self):
        return any(self.coeffs)

    def __init__(self, n: int, coeffs: Iterable[Rational]):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if n < 1 or len(coeffs) != phi(n):
            raise ValueError(f"導手 {n} の係数は {phi(n)} 個必要です: {len(coeffs)} 個")
        self.n = n
        self.coeffs = coeffs
        self._canonical = None

    # ------------------------------------------------------------------
    # 生成
    # ------------------------------------------------------------------
    @classmethod
    def rational(cls, value: Rational) -> "CyclotomicNumber":
        return cls(1, (value,))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CyclotomicNumber":
        return cls.from_powers(n, {k: 1})

    @classmethod
    def from_powers(cls, n: int, multiplicities: Dict[int, Rational]) -> "CyclotomicNumber":
        """Σ m_e ζ_n^e から生成"""
        merged: Dict[int, Fraction] = {}
        for e, m in multiplicities.items():
            merged[e % n] = merged.get(e % n, Fraction(0)) + Fraction(m)
        return cls(n, _reduce_powers(n, merged))

    # ------------------------------------------------------------------
    # 基本操作
    # ------------------------------------------------------------------
    def lift(self, m: int) -> "CyclotomicNumber":
        """ℚ(ζ_m) へ持ち上げる（n | m）"""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"導手 {self.n} は {m} を割り切りません")
        columns = _lift_columns(self.n, m)
        out = [Fraction(0)] * phi(m)
        for c, column in zip(self.coeffs, columns):
            if not c:
                continue
            for i, entry in enumerate(column):
                if entry:
                    out[i] += c * entry
        return CyclotomicNumber(m, out)

    def coeffs_at(self, m: int) -> Tuple[Fraction, ...]:
        return self.lift(m).coeffs

    @staticmethod
    def _coerce(other) -> "CyclotomicNumber":
        if isinstance(other, CyclotomicNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber.rational(other)
        return NotImplemented

    def _aligned(self, other: "CyclotomicNumber"):
        m = lcm(self.n, other.n)
        return m, self.lift(m).coeffs, other.lift(m).coeffs

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        # 冪基底では有理数は定数項のみで表される
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"有理数ではありません: {self}")
        return self.coeffs[0]

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.n == other.n:
            return CyclotomicNumber(self.n, (a + b for a, b in zip(self.coeffs, other.coeffs)))
        m, a, b = self._aligned(other)
        return CyclotomicNumber(m, (x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.n, (-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.n, (c * other for c in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.n == 1:
            return other * self.coeffs[0]
        if other.n == 1:
            return self * other.coeffs[0]
        if self.n == other.n:
            m, a, b = self.n, self.coeffs, other.coeffs
        else:
            m, a, b = self._aligned(other)
        products: Dict[int, Fraction] = {}
        for i, ai in enumerate(a):
            if not ai:
                continue
            for k, bk in enumerate(b):
                if bk:
                    products[i + k] = products.get(i + k, Fraction(0)) + ai * bk
        return CyclotomicNumber(m, _reduce_powers(m, products))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CyclotomicNumber.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def galois(self, k: int) -> "CyclotomicNumber":
        """σ_k: ζ_n ↦ ζ_n^k（gcd(k, n) = 1）"""
        if gcd(k, self.n) != 1:
            raise ValueError(f"k={k} は導手 {self.n} と互いに素ではありません")
        return CyclotomicNumber.from_powers(
            self.n, {(i * k) % self.n: c for i, c in enumerate(self.coeffs) if c}
        )

    def conjugate(self) -> "CyclotomicNumber":
        return self.galois(-1)

    def norm(self) -> Fraction:
        """ℚ への体ノルム"""
        result = CyclotomicNumber.rational(1)
        for k in range(1, self.n + 1):
            if gcd(k, self.n) == 1:
                result = result * self.galois(k)
        return result.to_fraction()

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise ZeroDivisionError("0 の逆元")
        if self.n == 1:
            return CyclotomicNumber.rational(1 / self.coeffs[0])
        others = CyclotomicNumber.rational(1)
        for k in range(2, self.n + 1):
            if gcd(k, self.n) == 1:
                others = others * self.galois(k)
        total = (self * others).to_fraction()
        return others * (1 / total)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        if self.n == other.n:
            return self.coeffs == other.coeffs
        _, a, b = self._aligned(other)
        return a == b

    def __hash__(self):
        canonical = self.canonical()
        return hash((canonical.n, canonical.coeffs))

    # ------------------------------------------------------------------
    # 導手の簡約（正規形）
    # ------------------------------------------------------------------
    def canonical(self) -> "CyclotomicNumber":
        """同じ数を最小の導手で表したもの"""
        if self._canonical is not None:
            return self._canonical
        if not any(self.coeffs[1:]):
            result = CyclotomicNumber.rational(self.coeffs[0])
        else:
            result = self
            for d in divisors(self.n):
                if d == 1 or d == self.n or d % 4 == 2:
                    continue
                if self._fixed_by_subfield(d):
                    result = self._descend(d)
                    break
        self._canonical = result
        return result

    def _fixed_by_subfield(self, d: int) -> bool:
        for k in range(1, self.n + 1, d):
            if gcd(k, self.n) == 1 and self.galois(k) != self:
                return False
        return True

    def _descend(self, d: int) -> "CyclotomicNumber":
        columns = _lift_columns(d, self.n)
        system = Matrix([[columns[i][r] for i in range(len(columns))] for r in range(phi(self.n))])
        target = Matrix([[c] for c in self.coeffs])
        solution, params = system.gauss_jordan_solve(target)
        if params.shape[0]:
            solution = solution.subs({t: 0 for t in params})
        coeffs = [Fraction(int(v.p), int(v.q)) for v in solution]
        return CyclotomicNumber(d, coeffs)

    # ------------------------------------------------------------------
    # 表示・直列化
    # ------------------------------------------------------------------
    def to_json(self):
        canonical = self.canonical()
        if canonical.n == 1:
            return format_fraction(canonical.coeffs[0])
        return {"conductor": canonical.n, "coeffs": [format_fraction(c) for c in canonical.coeffs]}

    @classmethod
    def from_json(cls, data) -> "CyclotomicNumber":
        if isinstance(data, (int, str)):
            return cls.rational(Fraction(data))
        return cls(int(data["conductor"]), [Fraction(c) for c in data["coeffs"]])

    def __str__(self):
        canonical = self.canonical()
        terms = []
        for i, c in enumerate(canonical.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(format_fraction(c))
                continue
            power = f"z{canonical.n}" if i == 1 else f"z{canonical.n}^{i}"
            if c == 1:
                terms.append(power)
            elif c == -1:
                terms.append(f"-{power}")
            else:
                terms.append(f"{format_fraction(c)}*{power}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    def __repr__(self):
        return f"CyclotomicNumber({self})"


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def as_cyclotomic(value) -> CyclotomicNumber:
    if isinstance(value, CyclotomicNumber):
        return value
    return CyclotomicNumber.rational(Fraction(value))


ZERO = CyclotomicNumber.rational(0)
ONE = CyclotomicNumber.rational(1)
