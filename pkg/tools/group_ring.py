"""群環 K[G]・(ℤ/p^k)[G] の演算、中心、被約ノルム、一般化余因子行列

係数環は次の2種類を同じインターフェースで扱う。
    cyclotomic(n): 円分体 ℚ(ζ_n)（n = 1 は有理数体で Fraction を使う）
    zmod(p,k):     ℤ/p^kℤ（0 以上 p^k 未満の整数で保持）
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import primitive_root

from tools.characters import Character, CharacterTable, character_table, class_constants
from tools.cyclotomic import CyclotomicNumber, ONE, ZERO, as_cyclotomic, format_fraction, lcm
from tools.groups import CentralInvolution, FiniteGroup, SubgroupHandle
from tools.padic import rank_mod, reduce_rational, valuation
from utils.debug import debug_log
from utils.errors import CoefficientFieldTooSmall, InputError, NotCheckable, PresentationError

_RING_PATTERN = re.compile(r"^\s*(cyclotomic)\((\d+)\)\s*$|^\s*(zmod)\((\d+)\s*,\s*(\d+)\)\s*$")


# ============================================================================
# 係数環
# ============================================================================
@dataclass(frozen=True)
class CoefficientRing:
    kind: str
    conductor: int = 1
    p: int = 0
    k: int = 0

    @classmethod
    def rational(cls) -> "CoefficientRing":
        return cls("cyclotomic", 1)

    @classmethod
    def cyclotomic(cls, n: int) -> "CoefficientRing":
        return cls("cyclotomic", int(n))

    @classmethod
    def zmod(cls, p: int, k: int) -> "CoefficientRing":
        return cls("zmod", 1, int(p), int(k))

    @classmethod
    def parse(cls, text: str, path: str = "") -> "CoefficientRing":
        match = _RING_PATTERN.match(text or "")
        if not match:
            raise InputError(f"係数環の指定が不正です: {text!r}", path)
        if match.group(1):
            n = int(match.group(2))
            if n < 1:
                raise InputError("導手は正の整数です", path)
            return cls.cyclotomic(n)
        return cls.zmod(int(match.group(4)), int(match.group(5)))

    def __str__(self):
        if self.kind == "zmod":
            return f"zmod({self.p},{self.k})"
        return f"cyclotomic({self.conductor})"

    @property
    def is_exact(self) -> bool:
        return self.kind == "cyclotomic"

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    def zero(self):
        if self.kind == "zmod":
            return 0
        return Fraction(0) if self.conductor == 1 else ZERO

    def one(self):
        if self.kind == "zmod":
            return 1
        return Fraction(1) if self.conductor == 1 else ONE

    def coerce(self, value):
        """値をこの環の表現に変換（入らなければ例外）"""
        if self.kind == "zmod":
            if isinstance(value, CyclotomicNumber):
                if not value.is_rational():
                    raise CoefficientFieldTooSmall(f"{value} は {self} に入りません")
                value = value.to_fraction()
            return reduce_rational(Fraction(value), self.p, self.k)
        if isinstance(value, CyclotomicNumber):
            canonical = value.canonical()
            if self.conductor % canonical.n:
                raise CoefficientFieldTooSmall(f"{value} は {self} に入りません")
            if self.conductor == 1:
                return canonical.coeffs[0]
            return value
        value = Fraction(value)
        return value if self.conductor == 1 else CyclotomicNumber.rational(value)

    def normalize(self, value):
        return value % self.modulus if self.kind == "zmod" else value

    def join(self, other: "CoefficientRing") -> "CoefficientRing":
        if self == other:
            return self
        if self.kind == "cyclotomic" and other.kind == "cyclotomic":
            return CoefficientRing.cyclotomic(lcm(self.conductor, other.conductor))
        if self.kind == "zmod" and other.kind == "cyclotomic" and other.conductor == 1:
            return self
        if other.kind == "zmod" and self.kind == "cyclotomic" and self.conductor == 1:
            return other
        raise CoefficientFieldTooSmall(f"{self} と {other} を同じ環で扱えません")

    def format(self, value):
        if self.kind == "zmod":
            return int(value)
        if isinstance(value, CyclotomicNumber):
            return value.to_json()
        return format_fraction(value)


def _zeros(ring: CoefficientRing, n: int) -> np.ndarray:
    out = np.empty(n, dtype=object)
    for i in range(n):
        out[i] = ring.zero()
    return out


# ============================================================================
# 群環の元
# ============================================================================
class GroupRingElement:
    """群環の元（係数は群の元の添字順の密な配列）"""

    __slots__ = ("group", "ring", "coeffs")

    def __init__(self, group: FiniteGroup, ring: CoefficientRing, coeffs):
        self.group = group
        self.ring = ring
        arr = np.empty(group.order, dtype=object)
        values = list(coeffs)
        if len(values) != group.order:
            raise ValueError("係数の個数が群の位数と一致しません")
        for i, c in enumerate(values):
            arr[i] = ring.coerce(c)
        self.coeffs = arr

    @classmethod
    def _raw(cls, group: FiniteGroup, ring: CoefficientRing, arr: np.ndarray) -> "GroupRingElement":
        obj = cls.__new__(cls)
        obj.group = group
        obj.ring = ring
        if ring.kind == "zmod":
            arr = arr % ring.modulus
        obj.coeffs = arr
        return obj

    # ------------------------------------------------------------------
    # 生成
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, group: FiniteGroup, ring: CoefficientRing) -> "GroupRingElement":
        return cls._raw(group, ring, _zeros(ring, group.order))

    @classmethod
    def one(cls, group: FiniteGroup, ring: CoefficientRing) -> "GroupRingElement":
        return cls.basis(group, 0, ring)

    @classmethod
    def basis(cls, group: FiniteGroup, g: int, ring: CoefficientRing) -> "GroupRingElement":
        arr = _zeros(ring, group.order)
        arr[g] = ring.one()
        return cls._raw(group, ring, arr)

    @classmethod
    def from_terms(cls, group: FiniteGroup, terms: Dict[int, object], ring: CoefficientRing) -> "GroupRingElement":
        arr = _zeros(ring, group.order)
        for g, c in terms.items():
            arr[int(g)] = arr[int(g)] + ring.coerce(c)
        return cls._raw(group, ring, arr)

    @classmethod
    def from_subset(cls, group: FiniteGroup, members, ring: CoefficientRing, scalar=1) -> "GroupRingElement":
        return cls.from_terms(group, {g: scalar for g in members}, ring)

    # ------------------------------------------------------------------
    # 演算
    # ------------------------------------------------------------------
    def _align(self, other: "GroupRingElement"):
        if other.group is not self.group:
            raise InputError("異なる群の群環の元です")
        ring = self.ring.join(other.ring)
        return ring, self.to_ring(ring).coeffs, other.to_ring(ring).coeffs

    def to_ring(self, ring: CoefficientRing) -> "GroupRingElement":
        if ring == self.ring:
            return self
        arr = np.empty(self.group.order, dtype=object)
        for i, c in enumerate(self.coeffs):
            arr[i] = ring.coerce(c)
        return GroupRingElement._raw(self.group, ring, arr)

    def lift(self) -> "GroupRingElement":
        """ℤ/p^k 係数を 0 以上 p^k 未満の整数として有理係数に持ち上げる"""
        if self.ring.kind != "zmod":
            return self
        return GroupRingElement._raw(self.group, CoefficientRing.rational(),
                                     np.array([Fraction(int(c)) for c in self.coeffs], dtype=object))

    def __add__(self, other):
        if not isinstance(other, GroupRingElement):
            other = GroupRingElement.basis(self.group, 0, self.ring).scale(other)
        ring, a, b = self._align(other)
        return GroupRingElement._raw(self.group, ring, a + b)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement._raw(self.group, self.ring, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, scalar) -> "GroupRingElement":
        if isinstance(scalar, CyclotomicNumber) and self.ring.kind == "cyclotomic":
            ring = self.ring.join(CoefficientRing.cyclotomic(scalar.canonical().n))
            base = self.to_ring(ring)
            return GroupRingElement._raw(self.group, ring, base.coeffs * ring.coerce(scalar))
        return GroupRingElement._raw(self.group, self.ring, self.coeffs * self.ring.coerce(scalar))

    def __mul__(self, other):
        if not isinstance(other, GroupRingElement):
            return self.scale(other)
        ring, a, b = self._align(other)
        table = self.group.table
        out = _zeros(ring, self.group.order)
        for g in range(self.group.order):
            c = a[g]
            if not c:
                continue
            out[table[g]] += c * b
        return GroupRingElement._raw(self.group, ring, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        ring, a, b = self._align(other)
        if ring.kind == "zmod":
            return all((x - y) % ring.modulus == 0 for x, y in zip(a, b))
        return all(x == y for x, y in zip(a, b))

    def __hash__(self):
        return hash(tuple(self.coeffs.tolist()))

    def is_zero(self) -> bool:
        return not any(bool(c) for c in self.coeffs)

    def coefficient(self, g: int):
        return self.coeffs[g]

    def support(self) -> List[int]:
        return [g for g, c in enumerate(self.coeffs) if c]

    def augmentation(self):
        total = self.ring.zero()
        for c in self.coeffs:
            total = total + c
        return self.ring.normalize(total)

    def sharp(self) -> "GroupRingElement":
        """g ↦ g⁻¹ で誘導される反自己同型"""
        return GroupRingElement._raw(self.group, self.ring, self.coeffs[self.group.inverse])

    def is_central(self) -> bool:
        for g in self.group.generators:
            basis = GroupRingElement.basis(self.group, g, self.ring)
            if basis * self != self * basis:
                return False
        return True

    def is_rational(self) -> bool:
        if self.ring.kind == "zmod":
            return True
        return all(not isinstance(c, CyclotomicNumber) or c.is_rational() for c in self.coeffs)

    def to_rational(self) -> "GroupRingElement":
        return self.to_ring(CoefficientRing.rational())

    def is_p_integral(self, p: int) -> bool:
        if self.ring.kind == "zmod":
            return True
        for c in self.coeffs:
            if isinstance(c, CyclotomicNumber) and not c.is_rational():
                raise NotCheckable(f"係数 {c} が有理数ではありません")
            value = c.to_fraction() if isinstance(c, CyclotomicNumber) else Fraction(c)
            if value.denominator % p == 0:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "ring": {"coeff": str(self.ring)},
            "terms": [{"g": self.group.label(g), "c": self.ring.format(self.coeffs[g])} for g in self.support()],
        }

    def __str__(self):
        terms = []
        for g in self.support():
            c = self.ring.format(self.coeffs[g])
            label = "1" if g == 0 else self.group.label(g)
            terms.append(f"{c}*{label}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"GroupRingElement({self})"


def group_ring_element_from_json(group: FiniteGroup, data: dict, path: str = "") -> GroupRingElement:
    """{"ring": {"coeff": ...}, "terms": [{"g": "(1,2)", "c": "3/2"}]} 形式を読む"""
    ring = CoefficientRing.parse(data.get("ring", {}).get("coeff", "cyclotomic(1)"), f"{path}/ring/coeff")
    terms: Dict[int, object] = {}
    for i, term in enumerate(data.get("terms", [])):
        index = group.element(term["g"], f"{path}/terms/{i}/g")
        value = term["c"]
        c = CyclotomicNumber.from_json(value) if isinstance(value, dict) else Fraction(value)
        terms[index] = terms.get(index, 0) + c
    return GroupRingElement.from_terms(group, terms, ring)


def sharp(x: GroupRingElement) -> GroupRingElement:
    return x.sharp()


def twist(x: GroupRingElement, epsilon: Character) -> GroupRingElement:
    """g ↦ ε(g)g で誘導される環自己同型（ε は一次指標）"""
    if not epsilon.is_linear():
        raise InputError("ε は一次指標でなければなりません")
    G = x.group
    values = [epsilon(g) for g in range(G.order)]
    if x.ring.kind == "zmod" and any(v not in (ONE, -ONE) for v in values):
        raise CoefficientFieldTooSmall("ℤ/p^k 係数では ±1 値の ε のみ扱えます")
    ring = x.ring
    if ring.kind == "cyclotomic":
        conductor = 1
        for v in values:
            conductor = lcm(conductor, v.canonical().n)
        if ring.conductor % conductor:
            raise CoefficientFieldTooSmall(f"ε の値が {ring} に入りません")
    arr = np.empty(G.order, dtype=object)
    for g in range(G.order):
        arr[g] = x.coeffs[g] * ring.coerce(values[g])
    return GroupRingElement._raw(G, ring, arr)


# ============================================================================
# 行列
# ============================================================================
class GroupRingMatrix:
    """群環上の行列"""

    def __init__(self, rows: Sequence[Sequence[GroupRingElement]]):
        self.rows: List[List[GroupRingElement]] = [list(r) for r in rows]
        if not self.rows or not self.rows[0]:
            raise ValueError("空の行列は扱いません")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("行の長さが揃っていません")
        self.group = self.rows[0][0].group
        ring = self.rows[0][0].ring
        for r in self.rows:
            for x in r:
                ring = ring.join(x.ring)
        self.ring = ring

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def __getitem__(self, idx) -> GroupRingElement:
        i, j = idx
        return self.rows[i][j]

    @classmethod
    def identity(cls, group: FiniteGroup, n: int, ring: CoefficientRing) -> "GroupRingMatrix":
        return cls([[GroupRingElement.one(group, ring) if i == j else GroupRingElement.zero(group, ring)
                     for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence[GroupRingElement]) -> "GroupRingMatrix":
        group, ring = entries[0].group, entries[0].ring
        n = len(entries)
        return cls([[entries[i] if i == j else GroupRingElement.zero(group, ring) for j in range(n)]
                    for i in range(n)])

    @classmethod
    def block_diagonal(cls, A: "GroupRingMatrix", B: "GroupRingMatrix") -> "GroupRingMatrix":
        ring = A.ring.join(B.ring)
        zero = GroupRingElement.zero(A.group, ring)
        (a1, b1), (a2, b2) = A.shape, B.shape
        rows = [list(r) + [zero] * b2 for r in A.rows]
        rows += [[zero] * b1 + list(r) for r in B.rows]
        return cls(rows)

    def map(self, fn) -> "GroupRingMatrix":
        return GroupRingMatrix([[fn(x) for x in r] for r in self.rows])

    def to_ring(self, ring: CoefficientRing) -> "GroupRingMatrix":
        return self.map(lambda x: x.to_ring(ring))

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        (a, b), (b2, c) = self.shape, other.shape
        if b != b2:
            raise ValueError(f"行列の形が合いません: {self.shape} と {other.shape}")
        ring = self.ring.join(other.ring)
        rows = []
        for i in range(a):
            row = []
            for j in range(c):
                total = GroupRingElement.zero(self.group, ring)
                for t in range(b):
                    total = total + self.rows[i][t] * other.rows[t][j]
                row.append(total)
            rows.append(row)
        return GroupRingMatrix(rows)

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        return GroupRingMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, element) -> "GroupRingMatrix":
        """各成分に左から element（群環の元またはスカラー）を掛ける"""
        return self.map(lambda x: element * x if isinstance(element, GroupRingElement) else x.scale(element))

    def submatrix(self, rows: Sequence[int], cols: Optional[Sequence[int]] = None) -> "GroupRingMatrix":
        cols = range(self.shape[1]) if cols is None else cols
        return GroupRingMatrix([[self.rows[i][j] for j in cols] for i in rows])

    def lift(self) -> "GroupRingMatrix":
        return self.map(lambda x: x.lift())

    def __eq__(self, other):
        if not isinstance(other, GroupRingMatrix) or self.shape != other.shape:
            return False
        return all(x == y for r, s in zip(self.rows, other.rows) for x, y in zip(r, s))

    def is_rational(self) -> bool:
        return all(x.is_rational() for r in self.rows for x in r)

    def to_json(self) -> dict:
        return {"ring": str(self.ring), "rows": [[x.to_json()["terms"] for x in r] for r in self.rows]}


def matrix_from_json(group: FiniteGroup, data: dict, path: str = "") -> GroupRingMatrix:
    coeff = data.get("coeff", "cyclotomic(1)")
    rows = []
    for i, row in enumerate(data.get("rows", [])):
        entries = []
        for j, terms in enumerate(row):
            entries.append(group_ring_element_from_json(
                group, {"ring": {"coeff": coeff}, "terms": terms}, f"{path}/rows/{i}/{j}"))
        rows.append(entries)
    if not rows:
        raise InputError("行列が空です", f"{path}/rows")
    return GroupRingMatrix(rows)


# ============================================================================
# 中心の元
# ============================================================================
class CenterElement:
    """中心 ζ(K[G]) の元（指標ごとの成分で保持）"""

    __slots__ = ("group", "components", "_class_coordinates")

    def __init__(self, group: FiniteGroup, components: Sequence):
        self.group = group
        self.components: Tuple[CyclotomicNumber, ...] = tuple(as_cyclotomic(c) for c in components)
        if len(self.components) != len(group.classes):
            raise ValueError("成分の個数が既約指標の個数と一致しません")
        self._class_coordinates = None

    @property
    def table(self) -> CharacterTable:
        return character_table(self.group)

    @classmethod
    def scalar(cls, group: FiniteGroup, value) -> "CenterElement":
        return cls(group, [as_cyclotomic(value)] * len(group.classes))

    @classmethod
    def from_class_coordinates(cls, group: FiniteGroup, coords: Sequence) -> "CenterElement":
        """Σ_i z_i C_i（C_i は類和）から ω_χ(z) = Σ_i z_i h_i χ(g_i)/χ(1)"""
        table = character_table(group)
        sizes = group.class_sizes
        coords = [as_cyclotomic(z) for z in coords]
        components = []
        for chi in table:
            total = ZERO
            for i, z in enumerate(coords):
                if z:
                    total = total + z * chi.values[i] * sizes[i]
            components.append(total / chi.degree)
        obj = cls(group, components)
        obj._class_coordinates = tuple(coords)
        return obj

    @classmethod
    def from_element(cls, x: GroupRingElement) -> "CenterElement":
        if not x.is_central():
            raise InputError("中心の元ではありません")
        G = x.group
        base = x.lift() if x.ring.kind == "zmod" else x
        coords = [base.coeffs[members[0]] for members in G.classes]
        return cls.from_class_coordinates(G, coords)

    @classmethod
    def class_sum(cls, group: FiniteGroup, i: int) -> "CenterElement":
        coords = [int(i == k) for k in range(len(group.classes))]
        return cls.from_class_coordinates(group, coords)

    def class_coordinates(self) -> Tuple[CyclotomicNumber, ...]:
        """z_i = Σ_χ v_χ χ(1)/|G| · χ(g_i⁻¹)"""
        if self._class_coordinates is None:
            G = self.group
            table = self.table
            coords = []
            for i in range(len(G.classes)):
                inv = G.inverse_class[i]
                total = ZERO
                for v, chi in zip(self.components, table):
                    if v:
                        total = total + v * chi.values[inv] * chi.degree
                coords.append(total / G.order)
            self._class_coordinates = tuple(coords)
        return self._class_coordinates

    def rational_class_coordinates(self) -> Tuple[Fraction, ...]:
        coords = self.class_coordinates()
        if not all(c.is_rational() for c in coords):
            raise NotCheckable("類和座標が有理数ではありません")
        return tuple(c.to_fraction() for c in coords)

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.class_coordinates())

    def is_p_integral(self, p: int) -> bool:
        if not self.is_rational():
            return False
        return all(c.denominator % p for c in self.rational_class_coordinates())

    def to_element(self, ring: Optional[CoefficientRing] = None) -> GroupRingElement:
        G = self.group
        coords = self.class_coordinates()
        if ring is None:
            ring = CoefficientRing.rational() if self.is_rational() else \
                CoefficientRing.cyclotomic(character_table(G).value_conductor)
        terms = {}
        for i, members in enumerate(G.classes):
            for g in members:
                terms[g] = coords[i]
        return GroupRingElement.from_terms(G, terms, ring)

    # ------------------------------------------------------------------
    # 演算
    # ------------------------------------------------------------------
    def _other(self, other) -> "CenterElement":
        if isinstance(other, CenterElement):
            return other
        return CenterElement.scalar(self.group, other)

    def __add__(self, other):
        other = self._other(other)
        return CenterElement(self.group, [a + b for a, b in zip(self.components, other.components)])

    __radd__ = __add__

    def __neg__(self):
        return CenterElement(self.group, [-a for a in self.components])

    def __sub__(self, other):
        return self + (-self._other(other))

    def __mul__(self, other):
        other = self._other(other)
        return CenterElement(self.group, [a * b for a, b in zip(self.components, other.components)])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return CenterElement(self.group, [a ** n for a in self.components])

    def inverse(self) -> "CenterElement":
        if any(not a for a in self.components):
            raise PresentationError("成分に 0 があるため逆元がありません")
        return CenterElement(self.group, [a.inverse() for a in self.components])

    def sharp(self) -> "CenterElement":
        """χ 成分 ↦ χ̌ 成分"""
        table = self.table
        out = []
        for chi in table:
            dual = [chi.values[i] for i in self.group.inverse_class]
            index = next(i for i, psi in enumerate(table) if all(a == b for a, b in zip(psi.values, dual)))
            out.append(self.components[index])
        return CenterElement(self.group, out)

    def times_class_sum(self, i: int) -> "CenterElement":
        """類座標で C_i を掛ける"""
        a = class_constants(self.group)
        coords = self.class_coordinates()
        r = len(coords)
        out = []
        for l in range(r):
            total = ZERO
            for k in range(r):
                if a[i, k, l] and coords[k]:
                    total = total + coords[k] * int(a[i, k, l])
            out.append(total)
        return CenterElement.from_class_coordinates(self.group, out)

    def is_zero(self) -> bool:
        return all(not a for a in self.components)

    def __eq__(self, other):
        if not isinstance(other, CenterElement):
            other = CenterElement.scalar(self.group, other)
        return all(a == b for a, b in zip(self.components, other.components))

    def __hash__(self):
        return hash(self.components)

    def to_json(self) -> dict:
        table = self.table
        return {
            "class_sums": [c.to_json() for c in self.class_coordinates()],
            "components": {chi.label: v.to_json() for chi, v in zip(table, self.components)},
        }

    def __str__(self):
        G = self.group
        parts = []
        for i, c in enumerate(self.class_coordinates()):
            if not c:
                continue
            label = "1" if i == 0 else f"C[{G.label(G.classes[i][0])}]"
            parts.append(f"({c})*{label}")
        return " + ".join(parts) if parts else "0"


# ============================================================================
# 冪等元
# ============================================================================
def central_idempotent(chi: Character) -> CenterElement:
    G = chi.group
    table = character_table(G)
    return CenterElement(G, [ONE if psi == chi else ZERO for psi in table])


def central_idempotents(G: FiniteGroup, ring: Optional[CoefficientRing] = None) -> List[GroupRingElement]:
    """e(χ) = χ(1)|G|⁻¹ Σ_g χ(g⁻¹) g を群環の元として"""
    table = character_table(G)
    out = []
    for chi in table:
        e = central_idempotent(chi)
        target = ring or (CoefficientRing.rational() if e.is_rational()
                          else CoefficientRing.cyclotomic(table.value_conductor))
        out.append(e.to_element(target))
    return out


def trace_idempotent(N: SubgroupHandle, ring: Optional[CoefficientRing] = None) -> GroupRingElement:
    """e_N = |N|⁻¹ Σ_{σ∈N} σ"""
    ring = ring or CoefficientRing.rational()
    if ring.kind == "zmod" and N.order % ring.p == 0:
        raise CoefficientFieldTooSmall(f"p = {ring.p} が |N| = {N.order} を割るので e_N は整でありません")
    return GroupRingElement.from_subset(N.group, N.elements, ring, Fraction(1, N.order))


def e_minus(j: CentralInvolution, ring: Optional[CoefficientRing] = None) -> GroupRingElement:
    """(1 − j)/2"""
    ring = ring or CoefficientRing.rational()
    G = j.group
    return GroupRingElement.from_terms(G, {0: Fraction(1, 2), j.index: Fraction(-1, 2)}, ring)


def e_minus_center(j: CentralInvolution) -> CenterElement:
    return CenterElement.from_element(e_minus(j))


# ============================================================================
# 被約ノルム・一般化余因子行列
# ============================================================================
def _class_trace(x: GroupRingElement, G: FiniteGroup) -> List:
    out = []
    for members in G.classes:
        total = x.ring.zero()
        for g in members:
            total = total + x.coeffs[g]
        out.append(total)
    return out


def _check_field(H: GroupRingMatrix, table: CharacterTable, field: Optional[int]) -> None:
    if field is None:
        return
    needed = table.value_conductor
    ring_conductor = H.ring.conductor if H.ring.kind == "cyclotomic" else 1
    if field % needed or field % ring_conductor:
        raise CoefficientFieldTooSmall(
            f"係数体 ℚ(ζ_{field}) は指標値（導手 {needed}）と係数（導手 {ring_conductor}）を含みません"
        )


def _power_sums(H: GroupRingMatrix, n_max: int) -> Tuple[List[List], List[GroupRingMatrix]]:
    """m = 1..n_max について H^m の対角成分の類和トレースと H^m を返す"""
    G = H.group
    b = H.shape[0]
    powers = [GroupRingMatrix.identity(G, b, H.ring), H]
    for _ in range(2, n_max + 1):
        powers.append(powers[-1] @ H)
    traces = [None]
    for m in range(1, n_max + 1):
        diag_total = [H.ring.zero()] * len(G.classes)
        for i in range(b):
            classes = _class_trace(powers[m][i, i], G)
            diag_total = [a + c for a, c in zip(diag_total, classes)]
        traces.append(diag_total)
    return traces, powers


def elementary_from_power_sums(power_sums: List[CyclotomicNumber], n: int) -> List[CyclotomicNumber]:
    """Newton の恒等式 k e_k = Σ_{i=1}^k (−1)^{i−1} e_{k−i} p_i"""
    e = [ONE]
    for k in range(1, n + 1):
        total = ZERO
        for i in range(1, k + 1):
            term = e[k - i] * power_sums[i]
            total = total + (term if i % 2 == 1 else -term)
        e.append(total / k)
    return e


def _characteristic_data(H: GroupRingMatrix, field: Optional[int] = None):
    if not H.is_square:
        raise PresentationError(f"正方行列ではありません: {H.shape}")
    if H.ring.kind == "zmod":
        H = H.lift()
    G = H.group
    table = character_table(G)
    _check_field(H, table, field)
    b = H.shape[0]
    n_max = b * max(table.degrees)
    traces, powers = _power_sums(H, n_max)
    per_character = []
    for chi in table:
        n = b * chi.degree
        sums = [None]
        for m in range(1, n + 1):
            total = ZERO
            for k, t in enumerate(traces[m]):
                if t:
                    total = total + chi.values[k] * t
            sums.append(total)
        per_character.append(elementary_from_power_sums(sums, n))
    return table, per_character, powers


def reduced_norm(H: GroupRingMatrix, field: Optional[int] = None) -> CenterElement:
    """nr(H): χ 成分は ρ_χ(H)（b·χ(1) 次正方行列）の行列式"""
    table, elementary, _ = _characteristic_data(H, field)
    components = [e[-1] for e in elementary]
    debug_log(f"被約ノルム: 行列サイズ {H.shape}, 成分数 {len(components)}")
    return CenterElement(H.group, components)


def reduced_norm_of_element(x: GroupRingElement) -> CenterElement:
    return reduced_norm(GroupRingMatrix([[x]]))


def reduced_norm_of_scalar(G: FiniteGroup, r) -> CenterElement:
    """スカラー r の被約ノルム（χ 成分 r^{χ(1)}）"""
    table = character_table(G)
    return CenterElement(G, [as_cyclotomic(r) ** chi.degree for chi in table])


def generalized_adjoint(H: GroupRingMatrix, field: Optional[int] = None) -> GroupRingMatrix:
    """H* = Σ_χ e(χ)·adj(ρ_χ(H)) で H*H = HH* = nr(H)·1

    各ブロックでは Cayley–Hamilton から adj = (−1)^{n−1} Σ_{k<n} c_k H^{n−1−k}
    （c_k は特性多項式の係数）を使うので、H が特異でもよい。
    """
    table, elementary, powers = _characteristic_data(H, field)
    G = H.group
    b = H.shape[0]
    base = H.lift() if H.ring.kind == "zmod" else H
    ring = base.ring.join(CoefficientRing.cyclotomic(table.value_conductor))
    result = None
    for chi, e in zip(table, elementary):
        n = b * chi.degree
        combo = None
        for k in range(n):
            c = e[k] if k % 2 == 0 else -e[k]
            if not c:
                continue
            term = powers[n - 1 - k].to_ring(ring).map(lambda x, c=c: x.scale(c))
            combo = term if combo is None else combo + term
        if combo is None:
            continue
        if (n - 1) % 2:
            combo = combo.map(lambda x: -x)
        idem = central_idempotent(chi).to_element(ring)
        block = combo.scale(idem)
        result = block if result is None else result + block
    if result is None:
        result = GroupRingMatrix([[GroupRingElement.zero(G, ring)] * b for _ in range(b)])
    if result.is_rational():
        result = result.to_ring(CoefficientRing.rational())
    return result


def center_to_matrix(z: CenterElement, b: int, ring: Optional[CoefficientRing] = None) -> GroupRingMatrix:
    x = z.to_element(ring)
    return GroupRingMatrix.diagonal([x] * b)


# ============================================================================
# マイナス商 ℤ_p[G]_− = ℤ_p[G]/(1+j)
# ============================================================================
class MinusRing:
    """ℤ/p^k[G]/(1+j)。基底は G/⟨j⟩ の代表元（j ↦ −1）"""

    def __init__(self, j: CentralInvolution, p: int, k: int):
        if p == 2:
            raise InputError("マイナス商は p が奇素数のときのみ扱います")
        if j.is_trivial:
            raise InputError("j が自明なのでマイナス商は 0 です")
        self.group = j.group
        self.j = j
        self.p = p
        self.k = k
        self.modulus = p ** k
        G = self.group
        self.representatives: List[int] = []
        self.position: Dict[int, Tuple[int, int]] = {}
        for g in range(G.order):
            if g in self.position:
                continue
            i = len(self.representatives)
            self.representatives.append(g)
            self.position[g] = (i, 1)
            self.position[G.mul(j.index, g)] = (i, -1)

    @property
    def rank(self) -> int:
        return len(self.representatives)

    def project(self, x: GroupRingElement) -> List[int]:
        ring = CoefficientRing.zmod(self.p, self.k)
        base = x if x.ring == ring else x.to_ring(ring)
        out = [0] * self.rank
        for g, c in enumerate(base.coeffs):
            if c:
                i, sign = self.position[g]
                out[i] = (out[i] + sign * int(c)) % self.modulus
        return out

    def lift(self, v: Sequence[int]) -> GroupRingElement:
        terms = {self.representatives[i]: int(c) for i, c in enumerate(v) if int(c) % self.modulus}
        return GroupRingElement.from_terms(self.group, terms, CoefficientRing.rational())

    def action(self, g: int) -> np.ndarray:
        """g を左から掛ける写像の行列（列ベクトル）"""
        G = self.group
        M = np.zeros((self.rank, self.rank), dtype=object)
        for i, rep in enumerate(self.representatives):
            target, sign = self.position[G.mul(g, rep)]
            M[target, i] = sign
        return M

    def multiply(self, u: Sequence[int], v: Sequence[int]) -> List[int]:
        return self.project(self.lift(u) * self.lift(v))

    def is_unit(self, v: Sequence[int]) -> bool:
        """左乗法写像が mod p で可逆か"""
        columns = []
        for i in range(self.rank):
            basis = [int(t == i) for t in range(self.rank)]
            columns.append(self.multiply(v, basis))
        M = np.array(columns, dtype=np.int64).T % self.p
        return rank_mod(M, self.p) == self.rank

    def e_minus(self) -> GroupRingElement:
        return e_minus(self.j, CoefficientRing.zmod(self.p, self.k))

    def center_ambient(self) -> List[Tuple[Fraction, ...]]:
        """e_−·C_i（C_i と jC_i を同一視、jC_i = C_i のものは 0）の類座標"""
        G = self.group
        r = len(G.classes)
        basis = []
        for i, members in enumerate(G.classes):
            partner = int(G.class_of[G.mul(self.j.index, members[0])])
            if partner <= i:
                continue
            coords = [Fraction(0)] * r
            coords[i] = Fraction(1, 2)
            coords[partner] = Fraction(-1, 2)
            basis.append(tuple(coords))
        return basis


def minus_quotient(x: GroupRingElement, j: CentralInvolution, p: int, k: int = 20) -> Tuple[MinusRing, List[int]]:
    ring = MinusRing(j, p, k)
    return ring, ring.project(x)


# ============================================================================
# 単元探索用の被約ノルム
# ============================================================================
def nr_unit_generators(G: FiniteGroup, p: int) -> List[Tuple[str, CenterElement]]:
    """nr(g)（g は生成元）と nr(r)（r は mod p の原始根）およびその逆元"""
    units: List[Tuple[str, CenterElement]] = []
    rational = CoefficientRing.rational()
    for g in G.generators:
        u = reduced_norm_of_element(GroupRingElement.basis(G, g, rational))
        units.append((f"nr({G.label(g)})", u))
        units.append((f"nr({G.label(g)})^-1", u.inverse()))
    r = int(primitive_root(p)) if p > 2 else 1
    if r != 1:
        u = reduced_norm_of_scalar(G, r)
        units.append((f"nr({r})", u))
        units.append((f"nr({r})^-1", u.inverse()))
    return units


def p_valuation_of_center(z: CenterElement, p: int) -> Optional[int]:
    coords = z.rational_class_coordinates()
    values = [valuation(c, p) for c in coords if c]
    return min(values) if values else None
