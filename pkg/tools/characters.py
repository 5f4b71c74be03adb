"""複素指標表と指標の操作

指標表は類代数の同時固有ベクトルを有限体 F_p 上で求め（Dixon–Schneider 法）、
固有値の重複度から円分体の値へ持ち上げたうえで直交関係を厳密に検証する。
"""
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix, Poly, isprime, multiplicity, primitive_root, symbols

from tools.cyclotomic import CyclotomicNumber, ONE, ZERO, format_fraction, lcm
from tools.padic import nullspace_mod, rref_mod
from tools.groups import CentralInvolution, FiniteGroup, FrobeniusStructure, SubgroupHandle, all_subgroups
from utils.debug import debug_log
from utils.errors import InputError, NotIrreducible, NotNormalSubgroup

_x = symbols("x")


# ============================================================================
# 指標
# ============================================================================
class Character:
    """共役類ごとの値で与える類関数（既約とは限らない）"""

    def __init__(self, group: FiniteGroup, values: Sequence, label: str = ""):
        if len(values) != len(group.classes):
            raise ValueError("値の個数が共役類の個数と一致しません")
        self.group = group
        self.values: Tuple[CyclotomicNumber, ...] = tuple(
            v if isinstance(v, CyclotomicNumber) else CyclotomicNumber.rational(v) for v in values
        )
        self.label = label

    @property
    def degree(self) -> int:
        value = self.values[0].to_fraction()
        return int(value) if value.denominator == 1 else value

    def value(self, class_index: int) -> CyclotomicNumber:
        return self.values[class_index]

    def __call__(self, element: int) -> CyclotomicNumber:
        return self.values[int(self.group.class_of[element])]

    def __eq__(self, other):
        if not isinstance(other, Character) or other.group is not self.group:
            return NotImplemented
        return all(a == b for a, b in zip(self.values, other.values))

    def __hash__(self):
        return hash(tuple(hash(v) for v in self.values))

    def __add__(self, other: "Character") -> "Character":
        return Character(self.group, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "Character") -> "Character":
        return Character(self.group, [a - b for a, b in zip(self.values, other.values)])

    def __mul__(self, other):
        if isinstance(other, Character):
            return Character(self.group, [a * b for a, b in zip(self.values, other.values)])
        return Character(self.group, [a * other for a in self.values])

    __rmul__ = __mul__

    def is_linear(self) -> bool:
        return self.values[0] == ONE

    def is_trivial(self) -> bool:
        return all(v == ONE for v in self.values)

    def to_json(self) -> dict:
        return {"label": self.label, "values": [v.to_json() for v in self.values]}

    def __repr__(self):
        shown = ", ".join(str(v) for v in self.values)
        return f"Character({self.label or '?'}: {shown})"


def inner_product(chi: Character, psi: Character) -> CyclotomicNumber:
    """⟨χ, ψ⟩ = |G|⁻¹ Σ_g χ(g) ψ(g⁻¹)"""
    G = chi.group
    total = ZERO
    for k, size in enumerate(G.class_sizes):
        total = total + chi.values[k] * psi.values[G.inverse_class[k]] * size
    return total / G.order


def contragredient(chi: Character) -> Character:
    """χ̌(g) = χ(g⁻¹)"""
    G = chi.group
    label = chi.label
    return Character(G, [chi.values[G.inverse_class[k]] for k in range(len(G.classes))], label=label)


def galois_conjugate(chi: Character, k: int) -> Character:
    return Character(chi.group, [v.galois(k) for v in chi.values])


def parity(chi: Character, j: Union[CentralInvolution, int]) -> str:
    """中心対合 j に関する偶奇（"even" / "odd"）。j は CentralInvolution か元の番号"""
    if isinstance(j, CentralInvolution):
        if j.group is not chi.group:
            raise InputError("j と χ の群が異なります")
        j = j.index
    value = chi(j)
    if value == chi.values[0]:
        return "even"
    if value == -chi.values[0]:
        return "odd"
    raise NotIrreducible(f"χ(j) = {value} が ±χ(1) ではありません（既約でない入力）")


def kernel(chi: Character) -> SubgroupHandle:
    G = chi.group
    members = []
    for k, cls in enumerate(G.classes):
        if chi.values[k] == chi.values[0]:
            members.extend(cls)
    return SubgroupHandle.from_elements(G, frozenset(members))


def defect_zero(chi: Character, p: int) -> bool:
    """v_p(χ(1)) = v_p(|G|) か"""
    order = chi.group.order
    if order % p:
        return True
    return multiplicity(p, int(chi.degree)) == multiplicity(p, order)


def character_fingerprint(chi: Character) -> str:
    """証明書のキーに使う安定なハッシュ"""
    G = chi.group
    payload = {
        "order": G.order,
        "class_sizes": G.class_sizes,
        "class_representatives": [G.label(r) for r in G.class_representatives],
        "values": [v.to_json() for v in chi.values],
    }
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ============================================================================
# 指標表
# ============================================================================
@dataclass
class CharacterTable:
    group: FiniteGroup = field(repr=False)
    characters: List[Character]
    conductor: int
    prime: int = 0

    def __iter__(self):
        return iter(self.characters)

    def __len__(self):
        return len(self.characters)

    def __getitem__(self, i) -> Character:
        return self.characters[i]

    @property
    def degrees(self) -> List[int]:
        return [chi.degree for chi in self.characters]

    @property
    def value_conductor(self) -> int:
        """指標値がすべて入る最小の円分体 ℚ(ζ_n) の n"""
        n = 1
        for chi in self.characters:
            for v in chi.values:
                n = lcm(n, v.canonical().n)
        return n

    def by_label(self, label: str) -> Character:
        for chi in self.characters:
            if chi.label == label:
                return chi
        raise InputError(f"指標 {label} はありません")

    def by_fingerprint(self, fingerprint: str) -> Optional[Character]:
        for chi in self.characters:
            if character_fingerprint(chi) == fingerprint:
                return chi
        return None

    def trivial(self) -> Character:
        return self.characters[0]

    def decompose(self, f: Character) -> List[CyclotomicNumber]:
        """類関数 f の既約指標への分解係数"""
        return [inner_product(f, chi) for chi in self.characters]

    def index_of(self, chi: Character) -> int:
        for i, candidate in enumerate(self.characters):
            if candidate == chi:
                return i
        raise NotIrreducible("既約指標ではありません")


def _restrict(M: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """不変部分空間（列基底 B）への M の制限"""
    d = B.shape[1]
    _, rows = rref_mod(B.T, p)
    aug = np.concatenate([B[rows], np.eye(d, dtype=np.int64)], axis=1)
    R, _ = rref_mod(aug, p)
    MB = (M @ B) % p
    return (R[:, d:] @ MB[rows]) % p


def _eigenvalues_mod(A: np.ndarray, p: int) -> List[int]:
    charpoly = Matrix(A.tolist()).charpoly(_x).as_expr()
    roots = set()
    for factor, _ in Poly(charpoly, _x, modulus=p).factor_list()[1]:
        if factor.degree() != 1:
            raise AssertionError(f"特性多項式が F_{p} 上で一次式に分解しません")
        a, b = (int(c) % p for c in factor.all_coeffs())
        roots.add((-b * pow(a, -1, p)) % p)
    return sorted(roots)


def _choose_prime(G: FiniteGroup) -> int:
    e = G.exponent
    p = e + 1
    while not (isprime(p) and p * p > 4 * G.order):
        p += e
    return p


def class_constants(G: FiniteGroup) -> np.ndarray:
    """a[j, k, l] = #{x ∈ C_j : x⁻¹z ∈ C_k}（z ∈ C_l 固定）"""
    cached = G.cache.get("class_constants")
    if cached is not None:
        return cached
    r = len(G.classes)
    a = np.zeros((r, r, r), dtype=np.int64)
    for l, members in enumerate(G.classes):
        ys = G.table[G.inverse, members[0]]
        np.add.at(a, (G.class_of, G.class_of[ys], l), 1)
    G.cache["class_constants"] = a
    return a


def _central_characters_mod(G: FiniteGroup, p: int) -> List[np.ndarray]:
    r = len(G.classes)
    constants = class_constants(G)
    spaces = [np.eye(r, dtype=np.int64)]
    for j in range(1, r):
        if all(B.shape[1] == 1 for B in spaces):
            break
        refined = []
        for B in spaces:
            if B.shape[1] == 1:
                refined.append(B)
                continue
            A = _restrict(constants[j], B, p)
            d = A.shape[0]
            for lam in _eigenvalues_mod(A, p):
                N = nullspace_mod((A - lam * np.eye(d, dtype=np.int64)) % p, p)
                refined.append((B @ N) % p)
        spaces = refined
    if any(B.shape[1] != 1 for B in spaces) or len(spaces) != r:
        raise AssertionError("同時固有空間が一次元に分解されませんでした")
    vectors = []
    for B in spaces:
        v = B[:, 0] % p
        vectors.append((v * pow(int(v[0]), -1, p)) % p)
    return vectors


def _lift_character(G: FiniteGroup, omega: np.ndarray, p: int, z: int) -> Character:
    sizes = G.class_sizes
    inv_cls = G.inverse_class
    s = 0
    for k, h in enumerate(sizes):
        s = (s + int(omega[k]) * int(omega[inv_cls[k]]) * pow(h, -1, p)) % p
    target = (G.order * pow(s, -1, p)) % p
    degree = next((d for d in range(1, isqrt(G.order) + 1) if (d * d - target) % p == 0), None)
    if degree is None:
        raise AssertionError("次数を復元できません")
    modular = [(int(omega[k]) * degree * pow(h, -1, p)) % p for k, h in enumerate(sizes)]

    e = G.exponent
    e_inv = pow(e, -1, p)
    values = []
    for members in G.classes:
        g = members[0]
        power_classes = []
        current = 0
        for _ in range(e):
            power_classes.append(int(G.class_of[current]))
            current = int(G.table[current, g])
        multiplicities = {}
        for l in range(e):
            m = 0
            for t in range(e):
                m = (m + modular[power_classes[t]] * pow(z, (-t * l) % e, p)) % p
            m = (m * e_inv) % p
            if m > degree:
                raise AssertionError("固有値の重複度が次数を超えました")
            if m:
                multiplicities[l] = m
        values.append(CyclotomicNumber.from_powers(e, multiplicities))
    return Character(G, values)


def _sort_key(chi: Character, conductor: int):
    coeffs = tuple(tuple(v.coeffs_at(conductor)) for v in chi.values)
    return (chi.degree, 0 if chi.is_trivial() else 1, coeffs)


def verify_table(table: CharacterTable) -> None:
    """行・列の直交関係と Σχ(1)² = |G| を厳密に検証"""
    G = table.group
    chars = table.characters
    if sum(chi.degree ** 2 for chi in chars) != G.order:
        raise AssertionError("Σχ(1)² ≠ |G|")
    for a, chi in enumerate(chars):
        for b in range(a, len(chars)):
            expected = ONE if a == b else ZERO
            if inner_product(chi, chars[b]) != expected:
                raise AssertionError(f"行の直交関係が成り立ちません: {chi.label}, {chars[b].label}")
    r = len(G.classes)
    for k in range(r):
        for l in range(k, r):
            total = ZERO
            for chi in chars:
                total = total + chi.values[k] * chi.values[G.inverse_class[l]]
            expected = CyclotomicNumber.rational(G.order // G.class_sizes[k]) if k == l else ZERO
            if total != expected:
                raise AssertionError(f"列の直交関係が成り立ちません: 類 {k}, {l}")


def character_table(G: FiniteGroup) -> CharacterTable:
    """既約指標の一覧（次数順、自明指標が先頭）"""
    cached = G.cache.get("character_table")
    if cached is not None:
        return cached
    e = G.exponent
    if G.order == 1:
        table = CharacterTable(G, [Character(G, [1], label="chi1")], conductor=1, prime=0)
        G.cache["character_table"] = table
        return table
    p = _choose_prime(G)
    z = pow(int(primitive_root(p)), (p - 1) // e, p)
    debug_log(f"指標表を計算: |G|={G.order}, 類の数={len(G.classes)}, 導手={e}, p={p}")
    omegas = _central_characters_mod(G, p)
    chars = [_lift_character(G, omega, p, z) for omega in omegas]
    chars.sort(key=lambda chi: _sort_key(chi, e))
    for i, chi in enumerate(chars):
        chi.label = f"chi{i + 1}"
    table = CharacterTable(G, chars, conductor=e, prime=p)
    verify_table(table)
    G.cache["character_table"] = table
    return table


def linear_characters(G: FiniteGroup) -> List[Character]:
    return [chi for chi in character_table(G) if chi.degree == 1]


# ============================================================================
# 誘導・インフレーション・制限
# ============================================================================
def restrict(chi: Character, U: SubgroupHandle) -> Character:
    """χ を U に制限した類関数（U.view 上の指標）"""
    V = U.view
    embedding = U.embedding
    return Character(V, [chi(int(embedding[c[0]])) for c in V.classes])


def induce(lam: Character, U: SubgroupHandle) -> Character:
    """ind_U^G λ(g) = |U|⁻¹ Σ_{x∈G} λ°(x g x⁻¹)"""
    G = U.group
    V = U.view
    if lam.group is not V:
        raise InputError("λ は U 上の指標ではありません")
    to_view = {int(g): i for i, g in enumerate(U.embedding)}
    values = []
    for members in G.classes:
        g = members[0]
        conjugates = G.table[G.table[:, g], G.inverse]
        counts: Dict[int, int] = {}
        for y in conjugates:
            local = to_view.get(int(y))
            if local is not None:
                c = int(V.class_of[local])
                counts[c] = counts.get(c, 0) + 1
        total = ZERO
        for c, n in counts.items():
            total = total + lam.values[c] * n
        values.append(total / U.order)
    return Character(G, values)


def inflate(phi: Character, G: FiniteGroup, projection: np.ndarray) -> Character:
    """G/N の指標を射影で G に引き戻す"""
    Q = phi.group
    if len(projection) != G.order:
        raise NotNormalSubgroup("射影の定義域が G ではありません")
    return Character(G, [phi(int(projection[c[0]])) for c in G.classes])


# ============================================================================
# 単項性
# ============================================================================
@dataclass
class MonomialWitness:
    is_monomial: bool
    witnesses: Dict[str, Optional[dict]]

    def to_json(self) -> dict:
        return {"is_monomial": self.is_monomial, "witnesses": self.witnesses}


def is_monomial(G: FiniteGroup, subgroup_cap: int = 5000) -> MonomialWitness:
    """全既約指標が部分群の一次指標からの誘導で得られるか"""
    cached = G.cache.get("monomial")
    if cached is not None:
        return cached
    table = character_table(G)
    witnesses: Dict[str, Optional[dict]] = {}
    pending = []
    for chi in table:
        if chi.degree == 1:
            witnesses[chi.label] = {"subgroup": [G.label(g) for g in G.generators], "index": 1,
                                    "linear_character": chi.to_json()["values"]}
        else:
            pending.append(chi)
            witnesses[chi.label] = None
    if pending:
        degrees = {chi.degree for chi in pending}
        for U in all_subgroups(G, subgroup_cap):
            if U.index not in degrees:
                continue
            targets = [chi for chi in pending if chi.degree == U.index and witnesses[chi.label] is None]
            if not targets:
                continue
            for lam in linear_characters(U.view):
                induced = induce(lam, U)
                for chi in targets:
                    if witnesses[chi.label] is None and induced == chi:
                        witnesses[chi.label] = {
                            "subgroup": U.to_cycles(),
                            "index": U.index,
                            "linear_character": lam.to_json()["values"],
                        }
            if all(witnesses[chi.label] is not None for chi in pending):
                break
    result = MonomialWitness(all(w is not None for w in witnesses.values()), witnesses)
    debug_log(f"単項性判定: |G|={G.order} -> {result.is_monomial}")
    G.cache["monomial"] = result
    return result


def verify_monomial_witness(G: FiniteGroup, label: str, witness: dict) -> bool:
    """証拠 (部分群, 一次指標) から誘導し直して一致を確認"""
    chi = character_table(G).by_label(label)
    U = G.subgroup_from_cycles(witness["subgroup"])
    values = [CyclotomicNumber.from_json(v) for v in witness["linear_character"]]
    lam = Character(U.view, values)
    return induce(lam, U) == chi


def frobenius_induction_check(G: FiniteGroup, structure: FrobeniusStructure) -> bool:
    """N ⊄ ker χ の既約指標がすべて N の非自明既約指標から誘導されるか"""
    N = structure.kernel
    inductions = [induce(psi, N) for psi in character_table(N.view) if not psi.is_trivial()]
    for chi in character_table(G):
        if N.elements <= kernel(chi).elements:
            continue
        if not any(ind == chi for ind in inductions):
            return False
    return True


# ============================================================================
# JSON 入出力
# ============================================================================
def table_to_json(table: CharacterTable) -> dict:
    G = table.group
    e = table.conductor
    return {
        "conductor": e,
        "class_sizes": G.class_sizes,
        "class_representatives": [G.label(r) for r in G.class_representatives],
        "characters": [
            {
                "label": chi.label,
                "values": [[format_fraction(c) for c in v.coeffs_at(e)] for v in chi.values],
            }
            for chi in table
        ],
    }


def table_from_json(G: FiniteGroup, data: dict) -> CharacterTable:
    e = int(data["conductor"])
    reps = [G.label(r) for r in G.class_representatives]
    if data.get("class_representatives") and data["class_representatives"] != reps:
        raise InputError("共役類の代表元が群と一致しません", "/class_representatives")
    chars = []
    for i, entry in enumerate(data["characters"]):
        values = [CyclotomicNumber(e, [Fraction(c) for c in v]) for v in entry["values"]]
        if len(values) != len(reps):
            raise InputError("値の個数が共役類の個数と一致しません", f"/characters/{i}/values")
        chars.append(Character(G, values, label=entry.get("label", f"chi{i + 1}")))
    table = CharacterTable(G, chars, conductor=e)
    verify_table(table)
    return table
