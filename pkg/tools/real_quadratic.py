"""実二次体の狭義イデアル類と部分ゼータ値 ζ(0, 𝔄)

判別式 D > 0 の二次形式 (a, b, c) を w = (b + √D)/(2a) で表し、w ↦ 1/(⌈w⌉ − w)
（SL₂(ℤ) の作用なので狭義の類を保つ）で Zagier 簡約形 a > 0, c > 0, b > a + c に落とす。
簡約形の巡回が狭義イデアル類と一対一に対応し、巡回の部分商 B_1, …, B_r から

    ζ(0, 𝔄) = Σ_i (B_i − 3) / 12

が厳密に得られる。形式 (a, b, c)（a > 0）はイデアル aℤ + ((b + √D)/2)ℤ の類を表す。
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import List, Sequence, Tuple

from sympy import divisors

from utils.debug import debug_log
from utils.errors import InputError

MAX_REDUCTION_STEPS = 100000


@dataclass(frozen=True, order=True)
class QuadraticForm:
    """ax² + bxy + cy²"""
    a: int
    b: int
    c: int

    @classmethod
    def from_json(cls, data: Sequence[int], path: str = "") -> "QuadraticForm":
        if len(data) != 3:
            raise InputError("二次形式は [a, b, c] で与えてください", path)
        return cls(*(int(x) for x in data))

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        """w > 1 > w' > 0"""
        return self.a > 0 and self.c > 0 and self.b > self.a + self.c

    def ceiling(self) -> int:
        """⌈w⌉（D は平方数でないので w は無理数）"""
        s = isqrt(self.discriminant)
        if self.a > 0:
            return (self.b + s) // (2 * self.a) + 1
        return (-self.b - s - 1) // (-2 * self.a) + 1

    def step(self) -> Tuple[int, "QuadraticForm"]:
        """(B, w ↦ 1/(B − w) で移った形式)"""
        B = self.ceiling()
        a, b, c = self.a, self.b, self.c
        return B, QuadraticForm(a * B * B - b * B + c, 2 * a * B - b, a)

    def to_json(self) -> List[int]:
        return [self.a, self.b, self.c]


def check_real_discriminant(D: int, path: str = "") -> None:
    if D <= 0 or D % 4 not in (0, 1):
        raise InputError(f"実二次体の判別式ではありません: {D}", path)
    if isqrt(D) ** 2 == D:
        raise InputError(f"判別式 {D} が平方数です", path)


def principal_form(D: int) -> QuadraticForm:
    b = D % 2
    return QuadraticForm(1, b, (b * b - D) // 4)


def reduce_form(form: QuadraticForm) -> QuadraticForm:
    current = form
    for _ in range(MAX_REDUCTION_STEPS):
        if current.is_reduced():
            return current
        _, current = current.step()
    raise InputError(f"二次形式 {form.to_json()} が {MAX_REDUCTION_STEPS} 回で簡約形に達しません")


def reduced_forms(D: int) -> List[QuadraticForm]:
    """判別式 D の原始的な簡約形すべて（D ≥ (b − a − c)(b + a + c) から b + a + c ≤ D）"""
    out = []
    for b in range(isqrt(D) + 1, D + 1):
        n = b * b - D
        if n % 4:
            continue
        for a in divisors(n // 4):
            c = n // 4 // a
            if a + c < b and gcd(gcd(a, b), c) == 1:
                out.append(QuadraticForm(a, b, c))
    return sorted(out)


def _cycle_from(start: QuadraticForm, pool: set) -> Tuple[QuadraticForm, ...]:
    cycle = [start]
    _, current = start.step()
    while current != start:
        if current not in pool:
            raise AssertionError(f"簡約形 {start.to_json()} の巡回が簡約形の外に出ました")
        cycle.append(current)
        _, current = current.step()
    return tuple(cycle)


def zeta_of_cycle(cycle: Sequence[QuadraticForm]) -> Fraction:
    """ζ(0, 𝔄) = Σ (B_i − 3)/12"""
    return Fraction(sum(form.ceiling() - 3 for form in cycle), 12)


@dataclass
class NarrowClassGroup:
    """狭義イデアル類（簡約形の巡回）と各類の ζ(0, 𝔄)"""
    discriminant: int
    cycles: Tuple[Tuple[QuadraticForm, ...], ...]
    zeta_values: Tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.cycles)

    def class_of(self, form: QuadraticForm, path: str = "") -> int:
        if form.discriminant != self.discriminant:
            raise InputError(f"形式 {form.to_json()} の判別式 {form.discriminant} が {self.discriminant} ではありません",
                             path)
        reduced = reduce_form(form)
        for i, cycle in enumerate(self.cycles):
            if reduced in cycle:
                return i
        raise AssertionError(f"簡約形 {reduced.to_json()} がどの巡回にもありません")

    @property
    def principal(self) -> int:
        return self.class_of(principal_form(self.discriminant))

    def summary(self) -> dict:
        return {
            "discriminant": self.discriminant,
            "narrow_class_number": self.order,
            "classes": [
                {"form": cycle[0].to_json(), "period": len(cycle), "zeta_at_zero": str(z)}
                for cycle, z in zip(self.cycles, self.zeta_values)
            ],
        }


@lru_cache(maxsize=None)
def narrow_class_group(D: int) -> NarrowClassGroup:
    check_real_discriminant(D)
    forms = reduced_forms(D)
    pool = set(forms)
    seen = set()
    cycles = []
    for form in forms:
        if form in seen:
            continue
        cycle = _cycle_from(form, pool)
        seen.update(cycle)
        cycles.append(cycle)
    zeta_values = tuple(zeta_of_cycle(c) for c in cycles)
    if sum(zeta_values) != 0:
        # ζ_F(0) = 0
        raise AssertionError(f"判別式 {D}: Σ ζ(0, 𝔄) = {sum(zeta_values)} ≠ 0")
    debug_log(f"狭義類群: D={D}, h⁺={len(cycles)}, 簡約形 {len(forms)} 個")
    return NarrowClassGroup(D, tuple(cycles), zeta_values)
