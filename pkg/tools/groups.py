"""有限群（置換群）と構造計算

群は置換の生成元で与え、構築時に元の一覧と乗積表（Cayley 表）を作る。
元は配列表示の辞書式順に並べるので、単位元は常に添字 0 になる。
積の規約は sympy と同じく「左の置換を先に作用させる」。
"""
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from sympy import primefactors
from sympy.combinatorics import Permutation, PermutationGroup

from utils.debug import debug_log
from utils.errors import InputError, NotASubgroup, NotNormalSubgroup, OrderBoundExceeded

DEFAULT_ORDER_BOUND = 2000

_CYCLE = re.compile(r"\(([^()]*)\)")


# ============================================================================
# 巡回記法
# ============================================================================
def parse_cycles(text: str, degree: int, path: str = "") -> Permutation:
    """"(1,2,3)(4,5)" 形式（1 始まり）を置換に変換"""
    stripped = text.replace(" ", "")
    if stripped in ("", "()"):
        return Permutation(list(range(degree)))
    if _CYCLE.sub("", stripped):
        raise InputError(f"巡回記法として解釈できません: {text!r}", path)
    cycles = []
    seen = set()
    for body in _CYCLE.findall(stripped):
        if not body:
            continue
        try:
            points = [int(token) - 1 for token in re.split(r"[,\s]+", body) if token]
        except ValueError:
            raise InputError(f"点の番号が整数ではありません: {text!r}", path)
        for point in points:
            if point < 0 or point >= degree:
                raise InputError(f"点 {point + 1} は次数 {degree} の範囲外です", path)
            if point in seen:
                raise InputError(f"点 {point + 1} が重複しています: {text!r}", path)
            seen.add(point)
        cycles.append(points)
    perm = Permutation(list(range(degree)))
    for cycle in cycles:
        perm = perm * Permutation([cycle], size=degree)
    return perm


def format_cycles(perm: Permutation) -> str:
    cycles = [c for c in perm.cyclic_form if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(p + 1) for p in c) + ")" for c in cycles)


# ============================================================================
# 有限群
# ============================================================================
class FiniteGroup:
    """置換群として表した有限群"""

    def __init__(self, generators: Sequence[Permutation], degree: int,
                 order_bound: int = DEFAULT_ORDER_BOUND, name: Optional[str] = None):
        self.degree = degree
        self.name = name
        identity = Permutation(list(range(degree)))
        gens = [g for g in generators if g != identity] or [identity]
        self.permutation_group = PermutationGroup(gens)
        order = int(self.permutation_group.order())
        if order > order_bound:
            raise OrderBoundExceeded(f"群の位数 {order} が上限 {order_bound} を超えています")
        self.order_bound = order_bound
        self.cache: Dict[str, object] = {}

        forms = sorted(tuple(p.array_form) for p in self.permutation_group.generate())
        self._arrays = np.array(forms, dtype=np.int64).reshape(len(forms), degree)
        self.elements: List[Permutation] = [Permutation(list(f)) for f in forms]
        self._index: Dict[bytes, int] = {row.tobytes(): i for i, row in enumerate(self._arrays)}
        self.generators: Tuple[int, ...] = tuple(self.index_of(g) for g in gens if g != identity)
        debug_log(f"群を構築: 位数={order}, 次数={degree}, 生成元={len(self.generators)}")

    @classmethod
    def from_cycles(cls, degree: int, generators: Sequence[str],
                    order_bound: int = DEFAULT_ORDER_BOUND, name: Optional[str] = None) -> "FiniteGroup":
        perms = [parse_cycles(g, degree, f"/generators/{i}") for i, g in enumerate(generators)]
        return cls(perms, degree, order_bound=order_bound, name=name)

    # ------------------------------------------------------------------
    # 元と乗積表
    # ------------------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    def index_of(self, perm: Permutation) -> int:
        form = list(perm.array_form)
        form += list(range(len(form), self.degree))
        key = np.array(form, dtype=np.int64).tobytes()
        if key not in self._index:
            raise NotASubgroup(f"{format_cycles(perm)} は群の元ではありません")
        return self._index[key]

    def label(self, index: int) -> str:
        return format_cycles(self.elements[index])

    @cached_property
    def table(self) -> np.ndarray:
        """table[a, b] = a·b の添字"""
        n = self.order
        table = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            products = self._arrays[:, self._arrays[a]]
            table[a] = [self._index[row.tobytes()] for row in products]
        return table

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(self.table == 0)
        inv[rows] = cols
        return inv

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def conj(self, x: int, g: int) -> int:
        """g x g⁻¹"""
        return int(self.table[self.table[g, x], self.inverse[g]])

    def power(self, x: int, k: int) -> int:
        k %= self.element_orders[x]
        result = 0
        for _ in range(k):
            result = int(self.table[result, x])
        return result

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        current = np.arange(self.order)
        identity_reached = np.zeros(self.order, dtype=bool)
        k = 1
        while not identity_reached.all():
            hit = (current == 0) & ~identity_reached
            orders[hit] = k
            identity_reached |= hit
            current = self.table[current, np.arange(self.order)]
            k += 1
        return orders

    @cached_property
    def exponent(self) -> int:
        result = 1
        for o in set(int(o) for o in self.element_orders):
            result = result // gcd(result, o) * o
        return result

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    # ------------------------------------------------------------------
    # 共役類
    # ------------------------------------------------------------------
    @cached_property
    def classes(self) -> List[Tuple[int, ...]]:
        """共役類（各類は元の添字の昇順タプル）。単位元の類が先頭"""
        raw = []
        for cls in self.permutation_group.conjugacy_classes():
            raw.append(tuple(sorted(self.index_of(p) for p in cls)))

        def key(members):
            rep = members[0]
            support = int((self._arrays[rep] != np.arange(self.degree)).sum())
            return (int(self.element_orders[rep]), support, rep)

        ordered = sorted(raw, key=key)
        if sum(len(c) for c in ordered) != self.order:
            raise AssertionError("共役類が群を分割していません")
        return ordered

    @cached_property
    def class_of(self) -> np.ndarray:
        lookup = np.empty(self.order, dtype=np.int64)
        for i, members in enumerate(self.classes):
            lookup[list(members)] = i
        return lookup

    @property
    def class_sizes(self) -> List[int]:
        return [len(c) for c in self.classes]

    @property
    def class_representatives(self) -> List[int]:
        return [c[0] for c in self.classes]

    @cached_property
    def inverse_class(self) -> List[int]:
        return [int(self.class_of[self.inverse[c[0]]]) for c in self.classes]

    def power_class(self, class_index: int, k: int) -> int:
        return int(self.class_of[self.power(self.classes[class_index][0], k)])

    # ------------------------------------------------------------------
    # 部分群
    # ------------------------------------------------------------------
    def closure(self, generators: Sequence[int]) -> FrozenSet[int]:
        elements = {0}
        frontier = [0]
        gens = [int(g) for g in generators]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in elements:
                        elements.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(elements)

    def subgroup(self, generators: Sequence[int]) -> "SubgroupHandle":
        return SubgroupHandle.from_elements(self, self.closure(generators), generators)

    def element(self, text: str, path: str = "") -> int:
        """巡回記法で与えた元の添字"""
        try:
            return self.index_of(parse_cycles(text, self.degree, path))
        except NotASubgroup as exc:
            raise InputError(str(exc), path)

    def subgroup_from_cycles(self, cycles: Sequence[str], path: str = "") -> "SubgroupHandle":
        gens = [self.index_of(parse_cycles(c, self.degree, f"{path}/{i}")) for i, c in enumerate(cycles)]
        return self.subgroup(gens)

    def whole(self) -> "SubgroupHandle":
        return SubgroupHandle.from_elements(self, frozenset(range(self.order)), self.generators)

    def trivial(self) -> "SubgroupHandle":
        return SubgroupHandle.from_elements(self, frozenset({0}), ())

    def is_normal_set(self, elements: FrozenSet[int]) -> bool:
        for g in self.generators:
            for x in elements:
                if self.conj(x, g) not in elements:
                    return False
        return True

    def centralizer(self, x: int) -> FrozenSet[int]:
        column = self.table[:, x]
        row = self.table[x, :]
        return frozenset(int(g) for g in np.nonzero(column == row)[0])

    @cached_property
    def center(self) -> "SubgroupHandle":
        members = frozenset(c[0] for c in self.classes if len(c) == 1)
        return SubgroupHandle.from_elements(self, members, tuple(sorted(members)))

    def normal_closure(self, elements: Sequence[int]) -> FrozenSet[int]:
        conjugates = set()
        for x in elements:
            conjugates.update(self.classes[int(self.class_of[x])])
        return self.closure(sorted(conjugates))

    def __repr__(self):
        return f"FiniteGroup(order={self.order}, degree={self.degree}, name={self.name!r})"


@dataclass(frozen=True)
class SubgroupHandle:
    """部分群（元の添字集合と生成元）"""
    group: FiniteGroup = field(repr=False, compare=False)
    elements: FrozenSet[int]
    generators: Tuple[int, ...] = field(compare=False)

    @classmethod
    def from_elements(cls, group: FiniteGroup, elements: FrozenSet[int],
                      generators: Sequence[int] = ()) -> "SubgroupHandle":
        gens = tuple(int(g) for g in generators if int(g) != 0)
        if not gens and len(elements) > 1:
            gens = _small_generating_set(group, elements)
        for x in elements:
            for g in gens:
                if int(group.table[x, g]) not in elements:
                    raise NotASubgroup("生成された集合が積で閉じていません")
        return cls(group, frozenset(int(x) for x in elements), gens)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.group.order // self.order

    @cached_property
    def is_normal(self) -> bool:
        return self.group.is_normal_set(self.elements)

    def __contains__(self, x: int) -> bool:
        return int(x) in self.elements

    def is_subgroup_of(self, other: "SubgroupHandle") -> bool:
        return self.elements <= other.elements

    def permutations(self) -> List[Permutation]:
        return [self.group.elements[g] for g in self.generators]

    @cached_property
    def view(self) -> FiniteGroup:
        """部分群を独立した FiniteGroup として構築したもの"""
        return FiniteGroup(self.permutations(), self.group.degree, order_bound=self.group.order_bound)

    @cached_property
    def embedding(self) -> np.ndarray:
        """view の添字 → 親群の添字"""
        return np.array([self.group.index_of(p) for p in self.view.elements], dtype=np.int64)

    def as_group(self) -> FiniteGroup:
        return self.view

    def as_permutation_group(self) -> PermutationGroup:
        perms = self.permutations() or [Permutation(list(range(self.group.degree)))]
        return PermutationGroup(perms)

    def to_cycles(self) -> List[str]:
        return [self.group.label(g) for g in self.generators]

    def summary(self) -> dict:
        return {
            "order": self.order,
            "index": self.index,
            "is_normal": self.is_normal,
            "generators": self.to_cycles(),
            "label": group_label_for_subgroup(self),
        }


def _small_generating_set(group: FiniteGroup, elements: FrozenSet[int]) -> Tuple[int, ...]:
    gens: List[int] = []
    current = frozenset({0})
    for x in sorted(elements):
        if x not in current:
            gens.append(x)
            current = group.closure(gens)
            if current == elements:
                break
    return tuple(gens)


@dataclass(frozen=True)
class CentralInvolution:
    """複素共役 j（位数 2 以下の中心元）"""
    group: FiniteGroup = field(repr=False, compare=False)
    index: int

    @classmethod
    def from_index(cls, group: FiniteGroup, index: int) -> "CentralInvolution":
        if group.mul(index, index) != 0:
            raise InputError("j² ≠ 1 です", "/j")
        for g in group.generators:
            if group.mul(index, g) != group.mul(g, index):
                raise InputError("j が中心元ではありません", "/j")
        return cls(group, int(index))

    @property
    def is_trivial(self) -> bool:
        return self.index == 0


# ============================================================================
# 構造に関する問い合わせ
# ============================================================================
def conjugacy_classes(G: FiniteGroup) -> List[Tuple[Permutation, int]]:
    """(代表元, 類の大きさ) のリスト。単位元の類が先頭"""
    return [(G.elements[c[0]], len(c)) for c in G.classes]


def commutator_subgroup(G: FiniteGroup) -> SubgroupHandle:
    derived = G.permutation_group.derived_subgroup()
    gens = [G.index_of(p) for p in derived.generators]
    return G.subgroup(gens)


def sylow_subgroup(G: FiniteGroup, p: int) -> SubgroupHandle:
    if G.order % p:
        return G.trivial()
    sylow = G.permutation_group.sylow_subgroup(p)
    return G.subgroup([G.index_of(q) for q in sylow.generators])


def is_nilpotent(H: SubgroupHandle) -> bool:
    return bool(H.as_permutation_group().is_nilpotent)


def is_p_group(order: int, p: Optional[int] = None) -> bool:
    """位数が素数冪（p 指定時は p の冪）か"""
    if order == 1:
        return True
    primes = primefactors(order)
    if len(primes) != 1:
        return False
    return p is None or primes[0] == p


def normal_subgroups(G: FiniteGroup) -> List[SubgroupHandle]:
    """全正規部分群（類の正規閉包の積で生成）"""
    found = {frozenset({0})}
    for members in G.classes:
        found.add(G.normal_closure([members[0]]))
    changed = True
    while changed:
        changed = False
        current = sorted(found, key=lambda s: (len(s), sorted(s)))
        for i, A in enumerate(current):
            for B in current[i + 1:]:
                if A <= B or B <= A:
                    continue
                product = frozenset(int(G.table[a, b]) for a in A for b in B)
                if product not in found:
                    found.add(product)
                    changed = True
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    return [SubgroupHandle.from_elements(G, s) for s in ordered]


def all_subgroups(G: FiniteGroup, cap: int = 5000) -> List[SubgroupHandle]:
    """全部分群（巡回部分群の結びを繰り返して列挙）"""
    cyclic = {}
    for x in range(G.order):
        s = G.closure([x])
        cyclic.setdefault(s, x)
    found = {s: (x,) if x else () for s, x in cyclic.items()}
    queue = list(found)
    while queue:
        current = queue.pop()
        gens = found[current]
        for s, x in cyclic.items():
            if s <= current:
                continue
            joined = G.closure(list(gens) + [x])
            if joined not in found:
                found[joined] = tuple(gens) + (x,)
                if len(found) > cap:
                    raise OrderBoundExceeded(f"部分群の数が上限 {cap} を超えました")
                queue.append(joined)
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    return [SubgroupHandle.from_elements(G, s, found[s]) for s in ordered]


def quotient(G: FiniteGroup, N: SubgroupHandle) -> Tuple[FiniteGroup, np.ndarray]:
    """剰余群 G/N（右剰余類への右乗法作用）と射影（G の添字 → G/N の添字）"""
    if not N.is_normal:
        raise NotNormalSubgroup("N は正規部分群ではありません")
    coset_of = np.full(G.order, -1, dtype=np.int64)
    cosets = []
    for x in range(G.order):
        if coset_of[x] >= 0:
            continue
        members = sorted(int(G.table[n, x]) for n in N.elements)
        coset_of[members] = len(cosets)
        cosets.append(members)
    degree = len(cosets)

    def image(g: int) -> Permutation:
        return Permutation([int(coset_of[G.table[c[0], g]]) for c in cosets])

    Q = FiniteGroup([image(g) for g in G.generators], degree,
                    order_bound=G.order_bound, name=None)
    projection = np.array([Q.index_of(image(g)) for g in range(G.order)], dtype=np.int64)
    if Q.order * N.order != G.order:
        raise AssertionError("剰余群の位数が一致しません")
    return Q, projection


# ============================================================================
# フロベニウス群
# ============================================================================
@dataclass(frozen=True)
class FrobeniusStructure:
    kernel: SubgroupHandle
    complement: SubgroupHandle

    def summary(self) -> dict:
        return {"kernel": self.kernel.summary(), "complement": self.complement.summary()}


def _is_frobenius_complement(G: FiniteGroup, H: FrozenSet[int]) -> bool:
    if len(H) in (1, G.order):
        return False
    for g in range(G.order):
        if g in H:
            continue
        conjugate = {G.conj(h, g) for h in H}
        if len(conjugate & H) != 1:
            return False
    return True


def _find_complement(G: FiniteGroup, N: SubgroupHandle) -> Optional[FrozenSet[int]]:
    target = N.index
    H = frozenset({0})
    gens: List[int] = []
    for x in range(1, G.order):
        if target % int(G.element_orders[x]) or x in H:
            continue
        candidate = G.closure(gens + [x])
        if target % len(candidate) == 0:
            gens.append(x)
            H = candidate
            if len(H) == target:
                return H
    return H if len(H) == target else None


def frobenius_structure(G: FiniteGroup) -> Optional[FrobeniusStructure]:
    """フロベニウス群なら (核 N, 補群 H) を返す。そうでなければ None"""
    for N in normal_subgroups(G):
        if N.order in (1, G.order) or gcd(N.order, N.index) != 1:
            continue
        if any(not G.centralizer(n) <= N.elements for n in N.elements if n != 0):
            continue
        H = _find_complement(G, N)
        if H is None or H & N.elements != frozenset({0}):
            continue
        if _is_frobenius_complement(G, H):
            complement = SubgroupHandle.from_elements(G, H)
            debug_log(f"フロベニウス構造を検出: |N|={N.order}, |H|={complement.order}")
            return FrobeniusStructure(N, complement)
    return None


def frobenius_by_definition(G: FiniteGroup, cap: int = 5000) -> Optional[SubgroupHandle]:
    """定義どおりの判定（全部分群を調べる）。補群を一つ返す"""
    for H in all_subgroups(G, cap):
        if _is_frobenius_complement(G, H.elements):
            return H
    return None


def direct_complement_of(G: FiniteGroup, j: CentralInvolution) -> Optional[SubgroupHandle]:
    """G ≃ ⟨j⟩ × G⁺ となる指数 2 の正規部分群（j を含まない）"""
    if j.is_trivial:
        return None
    for N in normal_subgroups(G):
        if N.index == 2 and j.index not in N.elements:
            return N
    return None


# ============================================================================
# 同型の目安（指紋）
# ============================================================================
def group_fingerprint(G: FiniteGroup) -> Tuple:
    pairs = sorted((len(c), int(G.element_orders[c[0]])) for c in G.classes)
    return (G.order, tuple(pairs))


def _fingerprint_of_small(degree: int, gens: Sequence[str]) -> Tuple:
    return group_fingerprint(FiniteGroup.from_cycles(degree, gens))


KNOWN_GROUP_SPECS = {
    "C1": (1, ["()"]),
    "C2": (2, ["(1,2)"]),
    "C3": (3, ["(1,2,3)"]),
    "C4": (4, ["(1,2,3,4)"]),
    "V4": (4, ["(1,2)(3,4)", "(1,3)(2,4)"]),
    "C5": (5, ["(1,2,3,4,5)"]),
    "C6": (5, ["(1,2,3)(4,5)"]),
    "S3": (3, ["(1,2)", "(1,2,3)"]),
    "D4": (4, ["(1,2,3,4)", "(1,3)"]),
    "Q8": (8, ["(1,2,3,4)(5,6,7,8)", "(1,5,3,7)(2,8,4,6)"]),
    "A4": (4, ["(1,2)(3,4)", "(1,2,3)"]),
    "S4": (4, ["(1,2)", "(1,2,3,4)"]),
    "C7:C3": (7, ["(1,2,3,4,5,6,7)", "(2,3,5)(4,7,6)"]),
    "Aff(5)": (5, ["(1,2,3,4,5)", "(2,3,5,4)"]),
    "SL(2,3)": (8, ["(3,5,8)(4,6,7)", "(1,5,7)(2,6,8)"]),
    "C2xS3": (5, ["(1,2)", "(3,4)", "(3,4,5)"]),
}

_known_fingerprints: Dict[Tuple, str] = {}


def known_group_name(G: FiniteGroup) -> Optional[str]:
    """指紋が既知の小さな群と一致すればその名前（同型判定ではない）"""
    if not _known_fingerprints:
        for name, (degree, gens) in KNOWN_GROUP_SPECS.items():
            _known_fingerprints.setdefault(_fingerprint_of_small(degree, gens), name)
    return _known_fingerprints.get(group_fingerprint(G))


def group_label_for_subgroup(H: SubgroupHandle) -> str:
    if H.order == 1:
        return "1"
    if H.order == H.group.order:
        return known_group_name(H.group) or f"order {H.order}"
    name = known_group_name(H.as_group())
    return name or f"order {H.order}"
