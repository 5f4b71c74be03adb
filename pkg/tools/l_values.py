"""s = 0 での Artin L 値・オイラー因子・Stickelberger 元

基礎体が ℚ で一次指標の場合はアルティン写像からディリクレ指標を作り、
一般ベルヌーイ数で厳密に計算する。それ以外の指標は証明書（JSON で取り込んだ値）を使う。

規約:
    θ_S^T の χ 成分 = δ_T(0, χ)·L_S(0, χ̌)
    δ_T(0, χ) = Π_{v∈T} det(1 − N(v)·φ_w⁻¹ | V_χ^{I_w})
    L_S(0, χ̌) = L(0, χ̌)·Π_{v∈S 有限} det(1 − φ_w⁻¹ | V_χ^{I_w})
φ_w は算術的フロベニウスの持ち上げ。値はすべて一つの円分体の中で扱う。
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Dict, List, Optional, Tuple

from sympy import divisors, factorint, isprime, jacobi_symbol, primefactors, primitive_root

from tools.characters import (
    Character,
    character_fingerprint,
    character_table,
    contragredient,
    induce,
    inner_product,
    is_monomial,
    linear_characters,
    parity,
)
from tools.cyclotomic import ONE, ZERO, CyclotomicNumber, lcm
from tools.group_ring import CenterElement, elementary_from_power_sums, reduced_norm_of_scalar
from tools.groups import CentralInvolution, FiniteGroup, SubgroupHandle, commutator_subgroup, quotient
from tools.real_quadratic import NarrowClassGroup, QuadraticForm, check_real_discriminant, narrow_class_group
from utils.debug import debug_log
from utils.errors import (
    EvenCharacterError,
    IdentityUnproven,
    InconsistentPlaceData,
    InputError,
    MissingLValue,
    NotCheckable,
)

PROVENANCE_VANISHING = "vanishing-order"
PROVENANCE_NATIVE = "native-dirichlet"
PROVENANCE_CERTIFICATE = "certificate"
PROVENANCE_INDUCED = "monomial-induction"
PROVENANCE_MONOMIAL = "identity-via-monomial-G+"
PROVENANCE_ABELIAN = "abelian-interpolation"
PROVENANCE_P_ADIC = "p-adic-certificate"


# ============================================================================
# ディリクレ指標
# ============================================================================
def _units(modulus: int) -> List[int]:
    return [a for a in range(modulus) if gcd(a, modulus) == 1]


@dataclass
class DirichletCharacter:
    """(ℤ/fℤ)^× 上の指標（f と互いに素でない整数では 0）"""
    modulus: int
    values: Dict[int, CyclotomicNumber]
    label: str = ""

    def __call__(self, a: int) -> CyclotomicNumber:
        a %= self.modulus
        if gcd(a, self.modulus) != 1:
            return ZERO
        return self.values[a]

    @cached_property
    def conductor(self) -> int:
        units = _units(self.modulus)
        for d in divisors(self.modulus):
            if all(self(a) == ONE for a in units if a % d == 1 % d):
                return int(d)
        return self.modulus

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def is_trivial(self) -> bool:
        return all(v == ONE for v in self.values.values())

    def is_odd(self) -> bool:
        return self(-1) == -ONE

    def primitive(self) -> "DirichletCharacter":
        """導手 mod の原始指標"""
        d = self.conductor
        if d == self.modulus:
            return self
        values = {}
        for b in _units(d):
            for t in range(self.modulus // d):
                a = b + d * t
                if gcd(a, self.modulus) == 1:
                    values[b] = self(a)
                    break
        return DirichletCharacter(d, values, self.label)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        m = lcm(self.modulus, other.modulus)
        label = f"{self.label}·{other.label}" if self.label and other.label else ""
        return DirichletCharacter(m, {a: self(a) * other(a) for a in _units(m)}, label)

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, {a: v.conjugate() for a, v in self.values.items()}, self.label)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "modulus": self.modulus,
            "conductor": self.conductor,
            "values": {str(a): v.to_json() for a, v in sorted(self.values.items())},
        }


def bernoulli_L0(psi: DirichletCharacter) -> CyclotomicNumber:
    """L(0, ψ) = −B_{1,ψ} = −(1/f) Σ_{a=1}^{f} ψ(a)·a（奇な原始指標のみ）"""
    if not psi.is_primitive:
        raise InputError(f"原始的な指標ではありません（mod {psi.modulus}, 導手 {psi.conductor}）")
    if not psi.is_odd():
        raise EvenCharacterError(f"偶指標です（mod {psi.modulus}）")
    f = psi.modulus
    total = ZERO
    for a in range(1, f + 1):
        value = psi(a)
        if value:
            total = total + value * a
    return -total / f


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return all(e == 1 for e in factorint(abs(d)).values())
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorint(abs(m)).values())
    return False


def _kronecker(d: int, a: int) -> int:
    """(d/a)（a > 0）"""
    sign = 1
    while a % 2 == 0:
        if d % 2 == 0:
            return 0
        sign *= 1 if d % 8 in (1, 7) else -1
        a //= 2
    if a == 1:
        return sign
    return sign * int(jacobi_symbol(d % a, a))


def kronecker_character(d: int) -> DirichletCharacter:
    """基本判別式 d に付随する二次指標 χ_d（mod |d|）"""
    if not is_fundamental_discriminant(d):
        raise InputError(f"{d} は基本判別式ではありません")
    f = abs(d)
    values = {a: CyclotomicNumber.rational(_kronecker(d, a)) for a in _units(f)}
    return DirichletCharacter(f, values, label=f"chi_{d}")


def teichmuller(p: int) -> DirichletCharacter:
    """ω mod p: 原始根 g に ζ_{p−1} を対応させる"""
    if p == 2 or not isprime(p):
        raise InputError(f"奇素数ではありません: {p}")
    g = int(primitive_root(p))
    values = {}
    a = 1
    for i in range(p - 1):
        values[a] = CyclotomicNumber.zeta(p - 1, i)
        a = a * g % p
    return DirichletCharacter(p, values, label=f"omega_{p}")


# ============================================================================
# アルティン写像（基礎体 ℚ）
# ============================================================================
@dataclass
class ArtinMap:
    """(ℤ/fℤ)^× → G/G'（剰余 a の像として G の元を一つ持つ）"""
    group: FiniteGroup
    modulus: int
    images: Dict[int, int]

    @classmethod
    def from_generators(cls, group: FiniteGroup, modulus: int, generators: Dict[int, int],
                        path: str = "") -> "ArtinMap":
        for a in generators:
            if gcd(a, modulus) != 1:
                raise InputError(f"剰余 {a} は法 {modulus} と互いに素ではありません", path)
        start = 1 % modulus
        images = {start: 0}
        frontier = [start]
        while frontier:
            a = frontier.pop()
            for b, g in sorted(generators.items()):
                c = a * b % modulus
                if c not in images:
                    images[c] = group.mul(images[a], g)
                    frontier.append(c)
        missing = [a for a in _units(modulus) if a not in images]
        if missing:
            raise InputError(f"剰余 {missing[:5]} の像が生成元から決まりません", path)
        artin = cls(group, modulus, images)
        artin.check_homomorphism(path)
        return artin

    def check_homomorphism(self, path: str = "") -> None:
        G = self.group
        derived = commutator_subgroup(G)
        for a, x in self.images.items():
            for b, y in self.images.items():
                z = self.images[a * b % self.modulus]
                if G.mul(int(G.inverse[z]), G.mul(x, y)) not in derived:
                    raise InputError(f"G/G' への準同型になっていません（{a}·{b}）", path)
        reached = G.closure(sorted(set(self.images.values()) | set(derived.generators)))
        if len(reached) != G.order:
            raise InputError("アルティン写像の像が G/G' を生成しません", path)

    def frobenius(self, ell: int) -> Optional[int]:
        if gcd(ell, self.modulus) != 1:
            return None
        return self.images[ell % self.modulus]

    def dirichlet(self, chi: Character) -> DirichletCharacter:
        if not chi.is_linear():
            raise InputError(f"一次指標ではありません: {chi.label}")
        values = {a: chi(g) for a, g in self.images.items()}
        return DirichletCharacter(self.modulus, values, label=chi.label)


# ============================================================================
# 拡大データ
# ============================================================================
@dataclass
class PlaceDatum:
    label: str
    norm: int = 0
    frobenius: Optional[int] = None
    inertia: Optional[SubgroupHandle] = None
    in_s: bool = False
    in_t: bool = False
    infinite: bool = False

    @property
    def residue_characteristic(self) -> Optional[int]:
        if self.infinite:
            return None
        return int(primefactors(self.norm)[0])

    def inertia_of(self, G: FiniteGroup) -> SubgroupHandle:
        return self.inertia if self.inertia is not None else G.trivial()

    def to_json(self) -> dict:
        data = {"label": self.label, "infinite": self.infinite, "in_S": self.in_s, "in_T": self.in_t}
        if not self.infinite:
            data["norm"] = self.norm
            if self.inertia is not None:
                data["inertia"] = self.inertia.to_cycles()
        return data


@dataclass
class LValueCertificate:
    """L(0, χ)（原始 Artin L 関数、p 進なら L_{p,S}(0, χ)）の厳密値"""
    character: str
    value: CyclotomicNumber
    kind: str = "complex"
    p: Optional[int] = None
    fingerprint: str = ""
    provenance: str = "ingested"
    source_hash: str = ""
    source: str = ""

    def matches(self, chi: Character) -> bool:
        if self.fingerprint:
            return self.fingerprint == character_fingerprint(chi)
        return self.character == chi.label

    def to_json(self) -> dict:
        data = {"character": self.character, "value": self.value.to_json(), "kind": self.kind,
                "provenance": self.provenance}
        if self.p is not None:
            data["p"] = self.p
        if self.source_hash:
            data["source_hash"] = self.source_hash
        return data


@dataclass
class InductionDatum:
    """実二次体 F ⊂ L⁺ 上の誘導データ（U = Gal(L/F)、狭義類の代表形式と U でのアルティン像）

    L/F が有限素点で不分岐なら、χ = ind_U^G λ に対して L(0, χ) = Σ_𝔄 λ(σ_𝔄)·ζ(0, 𝔄)。
    """
    subgroup: SubgroupHandle
    discriminant: int
    classes: List[Tuple[QuadraticForm, int]]
    source: str = ""

    @cached_property
    def class_group(self) -> NarrowClassGroup:
        return narrow_class_group(self.discriminant)

    @cached_property
    def class_images(self) -> Dict[int, int]:
        """狭義類の番号 → U の元"""
        return {self.class_group.class_of(form): g for form, g in self.classes}

    def validate(self, G: FiniteGroup, path: str = "") -> None:
        """読み込み時の形式チェック（判別式・指数・類の網羅・像の所属）"""
        D = self.discriminant
        check_real_discriminant(D, f"{path}/discriminant")
        if not is_fundamental_discriminant(D):
            raise InputError(f"{D} は基本判別式ではありません", f"{path}/discriminant")
        U = self.subgroup
        if U.index != 2:
            raise InputError(f"U の指数が 2 ではありません（{U.index}）", f"{path}/subgroup")
        Cl = self.class_group
        seen: Dict[int, int] = {}
        for k, (form, g) in enumerate(self.classes):
            if g not in U:
                raise InputError(f"像 {G.label(g)} が U に入っていません", f"{path}/classes/{k}/image")
            i = Cl.class_of(form, f"{path}/classes/{k}/form")
            if i in seen:
                raise InputError(f"形式 {form.to_json()} は {seen[i]} 番目と同じ狭義類です",
                                 f"{path}/classes/{k}/form")
            seen[i] = k
        if len(seen) != Cl.order:
            raise InputError(f"狭義類数 {Cl.order} に対して代表が {len(seen)} 個です", f"{path}/classes")
        reached = G.closure(sorted(set(self.class_images.values())))
        if len(reached) != U.order:
            raise InputError("アルティン像が U を生成しません", f"{path}/classes")

    def inducing_characters(self, chi: Character) -> List[Character]:
        """ind_U^G λ = χ となる U の一次指標 λ すべて"""
        if chi.degree != 2:
            return []
        U = self.subgroup
        return [lam for lam in linear_characters(U.view) if induce(lam, U) == chi]

    def sign_character(self, G: FiniteGroup) -> Character:
        """G/U の符号指標 ε_U"""
        return Character(G, [1 if members[0] in self.subgroup else -1 for members in G.classes],
                         label="eps_U")

    def l_value(self, lam: Character) -> CyclotomicNumber:
        """Σ_𝔄 λ(σ_𝔄)·ζ(0, 𝔄)（λ は U.view か G の指標）"""
        to_view = {int(g): i for i, g in enumerate(self.subgroup.embedding)}
        on_view = lam.group is self.subgroup.view
        total = ZERO
        for i, g in sorted(self.class_images.items()):
            value = lam(to_view[g]) if on_view else lam(g)
            total = total + value * self.class_group.zeta_values[i]
        return total


@dataclass
class ExtensionDatum:
    """CM 拡大 L/K のデータ（群・複素共役・素点・L 値証明書・類群加群）"""
    name: str
    group: FiniteGroup
    j: CentralInvolution
    places: List[PlaceDatum]
    mu_order: int
    base_field: str = "Q"
    artin_map: Optional[ArtinMap] = None
    certificates: List[LValueCertificate] = field(default_factory=list)
    inductions: List[InductionDatum] = field(default_factory=list)
    class_group: Optional[dict] = None
    ray_class_group: Optional[dict] = None
    minus_module: Optional[dict] = None
    bs_data: Optional[dict] = None
    t_sets: List[List[str]] = field(default_factory=list)
    assumptions: List[dict] = field(default_factory=list)
    description: str = ""
    source_hash: str = ""

    @property
    def s_places(self) -> List[PlaceDatum]:
        return [v for v in self.places if v.in_s]

    @property
    def t_places(self) -> List[PlaceDatum]:
        return [v for v in self.places if v.in_t]

    @property
    def finite_s_places(self) -> List[PlaceDatum]:
        return [v for v in self.places if v.in_s and not v.infinite]

    def certificate_for(self, chi: Character, kind: str = "complex",
                        p: Optional[int] = None) -> Optional[LValueCertificate]:
        for cert in self.certificates:
            if cert.kind == kind and (p is None or cert.p == p) and cert.matches(chi):
                return cert
        return None

    def place(self, label: str) -> PlaceDatum:
        for v in self.places:
            if v.label == label:
                return v
        raise InputError(f"素点 {label} はありません", "/places")

    def summary(self) -> dict:
        return {
            "name": self.name,
            "base_field": self.base_field,
            "group_order": self.group.order,
            "j": self.group.label(self.j.index),
            "mu_order": self.mu_order,
            "S": [v.label for v in self.s_places],
            "T": [v.label for v in self.t_places],
            "induction": [{"discriminant": ind.discriminant, "subgroup": ind.subgroup.to_cycles(),
                           "narrow_class_number": ind.class_group.order} for ind in self.inductions],
            "source_hash": self.source_hash,
        }


def check_place_consistency(datum: ExtensionDatum) -> None:
    """不分岐な次数 1 の素点のフロベニウスがアルティン写像の像と G/G' で一致するか"""
    G = datum.group
    for v in datum.places:
        if v.infinite:
            continue
        inertia = v.inertia_of(G)
        if v.frobenius is not None:
            for i in inertia.elements:
                if G.conj(i, v.frobenius) not in inertia:
                    raise InconsistentPlaceData(f"素点 {v.label}: φ_w が I_w を正規化しません")
        if datum.artin_map is None or v.frobenius is None or inertia.order > 1:
            continue
        ell = v.residue_characteristic
        if v.norm != ell:
            continue
        image = datum.artin_map.frobenius(ell)
        if image is None:
            continue
        derived = commutator_subgroup(G)
        if G.mul(int(G.inverse[image]), v.frobenius) not in derived:
            raise InconsistentPlaceData(
                f"素点 {v.label}: フロベニウス {G.label(v.frobenius)} がアルティン写像の像 {G.label(image)} と合いません")


# ============================================================================
# オイラー因子
# ============================================================================
def _projected_trace(chi: Character, inertia: SubgroupHandle, g: int) -> CyclotomicNumber:
    """tr(g·e_I | V_χ) = |I|⁻¹ Σ_{i∈I} χ(g i)"""
    G = chi.group
    total = ZERO
    for i in inertia.elements:
        total = total + chi(G.mul(g, i))
    return total / inertia.order


def invariant_dimension(chi: Character, members) -> int:
    """dim V_χ^H（H は元の集合で与えた部分群）"""
    total = ZERO
    for g in members:
        total = total + chi(g)
    value = (total / len(members)).to_fraction()
    return int(value)


def euler_factor_at_zero(chi: Character, place: PlaceDatum, q: int) -> CyclotomicNumber:
    """det(1 − q·φ_w⁻¹ | V_χ^{I_w})

    q = N(v) で δ_T の因子、q = 1 で S 切断の因子になる。
    """
    G = chi.group
    inertia = place.inertia_of(G)
    d = int(_projected_trace(chi, inertia, 0).to_fraction())
    if d == 0:
        return ONE
    phi = place.frobenius
    if phi is None:
        raise InconsistentPlaceData(f"素点 {place.label}: フロベニウスが与えられていません")
    for i in inertia.elements:
        if G.conj(i, phi) not in inertia:
            raise InconsistentPlaceData(f"素点 {place.label}: φ_w が I_w を正規化しません")
    phi_inv = int(G.inverse[phi])
    sums: List[Optional[CyclotomicNumber]] = [None]
    power = 0
    for _ in range(d):
        power = G.mul(power, phi_inv)
        sums.append(_projected_trace(chi, inertia, power))
    e = elementary_from_power_sums(sums, d)
    total = ZERO
    for k, ek in enumerate(e):
        total = total + ek * ((-q) ** k)
    return total


def decomposition_members(place: PlaceDatum, G: FiniteGroup, j: CentralInvolution):
    if place.infinite:
        return G.closure([j.index])
    inertia = place.inertia_of(G)
    gens = sorted(inertia.elements)
    if place.frobenius is not None:
        gens.append(place.frobenius)
    return G.closure(gens)


def vanishing_order(chi: Character, datum: ExtensionDatum) -> int:
    """L_S(s, χ) の s = 0 での零点の位数 Σ_{v∈S} dim V^{G_w} − dim V^G"""
    if chi.is_trivial():
        return len(datum.s_places) - 1
    return _order_by_formula(chi, datum)


def _order_by_formula(chi: Character, datum: ExtensionDatum) -> int:
    G = datum.group
    order = 0
    for v in datum.s_places:
        if not v.infinite:
            inertia = v.inertia_of(G)
            if _projected_trace(chi, inertia, 0) == ZERO:
                continue
            if v.frobenius is None:
                raise InconsistentPlaceData(f"素点 {v.label}: フロベニウスが与えられていません")
        order += invariant_dimension(chi, decomposition_members(v, G, datum.j))
    return order - int(inner_product(chi, character_table(G).trivial()).to_fraction())


# ============================================================================
# L 値
# ============================================================================
@dataclass
class LValue:
    character: str
    value: CyclotomicNumber
    provenance: str
    detail: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"character": self.character, "value": self.value.to_json(), "provenance": self.provenance,
                "detail": self.detail}


def _table_character(chi: Character) -> Character:
    table = character_table(chi.group)
    return table[table.index_of(chi)]


def _split_form(D: int, ell: int) -> Optional[QuadraticForm]:
    """ℓ が F で分解するとき、ℓ の上の素イデアルを表す形式 (ℓ, b, c)"""
    for b in range(D % 2, 2 * ell, 2):
        if (b * b - D) % (4 * ell) == 0:
            return QuadraticForm(ell, b, (b * b - D) // (4 * ell))
    return None


def check_induction(induction: InductionDatum, datum: ExtensionDatum) -> None:
    """誘導データと素点・アルティン写像の整合性

    - L/F が有限素点で不分岐（惰性群と U の交わりが自明）
    - アルティン写像があれば ε_U の原始指標が χ_D に一致し、
      G の一次指標 ψ で Σ_𝔄 ψ(σ_𝔄)ζ(0, 𝔄) = L(0, ψ)·L(0, ψε_U)
    - 基礎体 ℚ の不分岐な素点で、分解する ℓ は形式 (ℓ, b, c) の像と φ_w が G で共役、
      惰性する ℓ は φ_w ∉ U かつ φ_w² = 1
    """
    G = datum.group
    U = induction.subgroup
    D = induction.discriminant
    if datum.base_field != "Q":
        raise InputError("誘導データは基礎体 ℚ の拡大でのみ使えます", "/induction")
    for v in datum.places:
        if v.infinite:
            continue
        for i in v.inertia_of(G).elements:
            # U は正規なので共役をとらなくてよい
            if i and i in U:
                raise InconsistentPlaceData(f"素点 {v.label}: L/F が分岐しています（誘導データは使えません）")
    if datum.artin_map is not None:
        epsilon = datum.artin_map.dirichlet(induction.sign_character(G)).primitive()
        expected = kronecker_character(D)
        if epsilon.conductor != D or any(epsilon(a) != expected(a) for a in _units(D)):
            raise InconsistentPlaceData(f"G/U の符号指標が χ_{D} になりません（導手 {epsilon.conductor}）")
        eps = induction.sign_character(G)
        for psi in linear_characters(G):
            genus = induction.l_value(psi)
            product = primitive_l_value(psi, datum).value * primitive_l_value(psi * eps, datum).value
            if genus != product:
                raise InconsistentPlaceData(
                    f"一次指標 {psi.label}: 類和 {genus.to_json()} が L(0, ψ)·L(0, ψε) = {product.to_json()} と合いません")
    for v in datum.places:
        if v.infinite or v.frobenius is None or v.inertia_of(G).order > 1:
            continue
        ell = v.residue_characteristic
        if v.norm != ell or D % ell == 0:
            continue
        phi = v.frobenius
        form = _split_form(D, ell)
        if form is None:
            if phi in U or G.mul(phi, phi) != 0:
                raise InconsistentPlaceData(f"素点 {v.label}: F で惰性なのに φ_w = {G.label(phi)} です")
            continue
        image = induction.class_images[induction.class_group.class_of(form)]
        if G.class_of[image] != G.class_of[phi]:
            raise InconsistentPlaceData(
                f"素点 {v.label}: φ_w = {G.label(phi)} が形式 {form.to_json()} の像 {G.label(image)} と共役ではありません")
    debug_log(f"誘導データ D={D}, h⁺={induction.class_group.order}: 整合性 OK")


def induced_l_value(chi: Character, datum: ExtensionDatum) -> Optional[LValue]:
    """χ = ind_U^G λ なら L(0, χ) = L(0, λ)（誘導データがなければ None）"""
    for induction in datum.inductions:
        lams = induction.inducing_characters(chi)
        if not lams:
            continue
        check_induction(induction, datum)
        values = [induction.l_value(lam) for lam in lams]
        if any(value != values[0] for value in values):
            raise InconsistentPlaceData(f"指標 {chi.label}: λ の選び方で L(0, λ) が変わります（像が F/ℚ 共役と合いません）")
        detail = {"discriminant": induction.discriminant, "narrow_class_number": induction.class_group.order,
                  "subgroup": induction.subgroup.to_cycles()}
        return LValue(chi.label, values[0], PROVENANCE_INDUCED, detail)
    return None


def primitive_l_value(chi: Character, datum: ExtensionDatum) -> LValue:
    """L(0, χ)（切断なし）。一次指標は native、単項指標は誘導データ、その他は証明書"""
    chi = _table_character(chi)
    if chi.is_linear() and datum.base_field == "Q" and datum.artin_map is not None:
        psi = datum.artin_map.dirichlet(chi).primitive()
        if psi.is_trivial():
            value = CyclotomicNumber.rational(Fraction(-1, 2))
        elif psi.is_odd():
            value = bernoulli_L0(psi)
        else:
            value = ZERO
        return LValue(chi.label, value, PROVENANCE_NATIVE, {"conductor": psi.conductor})
    induced = induced_l_value(chi, datum)
    cert = datum.certificate_for(chi)
    if induced is not None:
        if cert is not None and cert.value != induced.value:
            raise InconsistentPlaceData(
                f"指標 {chi.label}: 証明書の値 {cert.value.to_json()} が誘導で計算した値 {induced.value.to_json()} と合いません")
        return induced
    if cert is not None:
        return LValue(chi.label, cert.value, PROVENANCE_CERTIFICATE, {"source_hash": cert.source_hash})
    raise MissingLValue(
        f"指標 {chi.label}（次数 {chi.degree}）の L(0, χ) を計算する経路も証明書もありません。"
        f"certificates に character={chi.label!r} の値を追加してください")


def s_truncated_l_value(chi: Character, datum: ExtensionDatum) -> LValue:
    """L_S(0, χ̌)"""
    if not chi.is_trivial() and parity(chi, datum.j) == "even" \
            and any(v.infinite for v in datum.s_places):
        # 無限素点で V^{G_w} = V なので位数 ≥ 1
        return LValue(chi.label, ZERO, PROVENANCE_VANISHING, {"rule": "even"})
    order = vanishing_order(chi, datum)
    if order > 0:
        return LValue(chi.label, ZERO, PROVENANCE_VANISHING, {"order": order})
    base = primitive_l_value(contragredient(chi), datum)
    value = base.value
    factors = {}
    for v in datum.finite_s_places:
        factor = euler_factor_at_zero(chi, v, 1)
        factors[v.label] = factor.to_json()
        value = value * factor
    detail = dict(base.detail)
    detail["dual_character"] = base.character
    detail["euler_factors"] = factors
    return LValue(chi.label, value, base.provenance, detail)


def delta_t(chi: Character, datum: ExtensionDatum) -> CyclotomicNumber:
    """δ_T(0, χ)"""
    value = ONE
    for v in datum.t_places:
        value = value * euler_factor_at_zero(chi, v, v.norm)
    return value


def delta_t_element(datum: ExtensionDatum) -> CenterElement:
    table = character_table(datum.group)
    return CenterElement(datum.group, [delta_t(chi, datum) for chi in table])


def omega_l(datum: ExtensionDatum) -> CenterElement:
    """ω_L = nr(|μ_L|)"""
    return reduced_norm_of_scalar(datum.group, datum.mu_order)


# ============================================================================
# Stickelberger 元
# ============================================================================
@dataclass
class StickelbergerResult:
    theta: CenterElement
    components: List[dict]
    kind: str = "complex"
    p: Optional[int] = None
    provenance: str = ""
    all_even: bool = False

    def to_json(self) -> dict:
        data = {
            "kind": self.kind,
            "theta": self.theta.to_json(),
            "components": self.components,
            "all_characters_even": self.all_even,
        }
        if self.p is not None:
            data["p"] = self.p
        if self.provenance:
            data["provenance"] = self.provenance
        return data


def _warm_up(G: FiniteGroup) -> None:
    # スレッドから触る前にキャッシュを埋める
    _ = G.table, G.inverse, G.class_of, G.classes, G.inverse_class, character_table(G)
    commutator_subgroup(G)


def _component(chi: Character, datum: ExtensionDatum) -> dict:
    side = parity(chi, datum.j)
    delta = delta_t(chi, datum)
    l_value = s_truncated_l_value(chi, datum)
    return {
        "character": chi.label,
        "parity": side,
        "delta_T": delta.to_json(),
        "L_S": l_value.to_json(),
        "value": delta * l_value.value,
    }


def stickelberger(datum: ExtensionDatum, jobs: int = 1) -> StickelbergerResult:
    """θ_S^T = Σ_χ δ_T(0, χ)·L_S(0, χ̌)·e(χ)"""
    G = datum.group
    _warm_up(G)
    check_place_consistency(datum)
    table = character_table(G)
    debug_log(f"Stickelberger 元: {datum.name}, 指標数 {len(table)}, jobs={jobs}")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda chi: _component(chi, datum), table.characters))
    else:
        parts = [_component(chi, datum) for chi in table]
    theta = CenterElement(G, [part["value"] for part in parts])
    if not theta.is_rational():
        raise InputError("θ の類和座標が有理数になりません（素点データや証明書の値を確認してください）",
                         "/certificates")
    components = []
    for part in parts:
        value = part.pop("value")
        components.append({**part, "component": value.to_json()})
    all_even = all(part["parity"] == "even" for part in parts)
    return StickelbergerResult(theta, components, all_even=all_even)


def p_adic_stickelberger(datum: ExtensionDatum, p: int, subgroup_cap: int = 5000,
                         jobs: int = 1) -> StickelbergerResult:
    """θ_{p,S}^T: 奇指標 χ で δ_T(0, χ)·L_{p,S}(0, χ̌ω)、偶指標で 0"""
    G = datum.group
    above_p = [v for v in datum.places if not v.infinite and v.residue_characteristic == p]
    if not above_p or not all(v.in_s for v in above_p):
        raise NotCheckable(f"S が p = {p} の上の素点をすべて含んでいません")
    if not all(v.in_s for v in datum.places if v.infinite):
        raise NotCheckable("S が無限素点をすべて含んでいません")
    base = stickelberger(datum, jobs)
    G_plus, _ = quotient(G, G.subgroup([datum.j.index]))
    monomial = is_monomial(G_plus, subgroup_cap).is_monomial
    if monomial:
        debug_log("G⁺ が単項なので θ_{p,S}^T = θ_S^T")
        return StickelbergerResult(base.theta, base.components, "p-adic", p, PROVENANCE_MONOMIAL, base.all_even)

    table = character_table(G)
    omega = teichmuller(p)
    values = []
    components = []
    for chi, part in zip(table, base.components):
        if part["parity"] == "even":
            values.append(ZERO)
            components.append({**part, "provenance": "even"})
            continue
        if chi.is_linear():
            detail = {}
            if datum.artin_map is not None:
                twisted = datum.artin_map.dirichlet(contragredient(chi)) * omega
                detail["twisted_conductor"] = twisted.conductor
            values.append(CyclotomicNumber.from_json(part["component"]))
            components.append({**part, "provenance": PROVENANCE_ABELIAN, "detail": detail})
            continue
        dual = _table_character(contragredient(chi))
        cert = datum.certificate_for(dual, kind="p-adic", p=p)
        if cert is None:
            raise IdentityUnproven(
                f"指標 {chi.label}: G⁺ が単項でないため L_{{p,S}}(0, χ̌ω) = L_S(0, χ̌) は示されていません。"
                f"p 進証明書（kind=p-adic, p={p}, character={dual.label!r}）が必要です")
        value = delta_t(chi, datum) * cert.value
        values.append(value)
        components.append({**part, "component": value.to_json(), "provenance": PROVENANCE_P_ADIC})
    theta = CenterElement(G, values)
    return StickelbergerResult(theta, components, "p-adic", p, "per-character", base.all_even)


def computed_certificates(datum: ExtensionDatum) -> List[LValueCertificate]:
    """native・誘導で計算できた L(0, χ) を証明書の形で書き出す（再現可能）"""
    out = []
    for chi in character_table(datum.group):
        try:
            l_value = primitive_l_value(chi, datum)
        except MissingLValue:
            continue
        if l_value.provenance not in (PROVENANCE_NATIVE, PROVENANCE_INDUCED):
            continue
        out.append(LValueCertificate(chi.label, l_value.value, fingerprint=character_fingerprint(chi),
                                     provenance="computed"))
    return out


# ============================================================================
# 整性
# ============================================================================
@dataclass
class IntegralityReport:
    mode: str
    verdict: str
    failures: List[dict] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {"mode": self.mode, "verdict": self.verdict, "failures": self.failures, "note": self.note}


def integrality_report(theta: CenterElement, mode: str = "Z[G]", p: Optional[int] = None,
                       sample_size: int = 6, seed: int = 20240611) -> IntegralityReport:
    """θ の類和座標の整性。mode は Z[G] / Z_p[G] / I-sample"""
    from tools.fitting import FULL_CENTER, KIND_EXACT, FittingInvariant, denominator_dichotomy, sample_reduced_norms
    from tools.padic import MEMBER

    G = theta.group
    if not theta.is_rational():
        return IntegralityReport(mode, "fail", note="類和座標が有理数ではありません")
    coords = theta.rational_class_coordinates()
    labels = [G.label(members[0]) for members in G.classes]
    if mode == "Z[G]":
        failures = [{"class": labels[i], "coefficient": str(c)} for i, c in enumerate(coords) if c.denominator != 1]
        return IntegralityReport(mode, "fail" if failures else "pass", failures)
    if p is None:
        raise InputError(f"mode={mode} には p が必要です")
    failures = [{"class": labels[i], "coefficient": str(c)} for i, c in enumerate(coords) if c.denominator % p == 0]
    if mode == "Z_p[G]":
        return IntegralityReport(mode, "fail" if failures else "pass", failures)
    if mode != "I-sample":
        raise InputError(f"未知の整性モード: {mode}")
    if denominator_dichotomy(G, p) == FULL_CENTER:
        # この場合 ℐ_p(G) = ζ(ℤ_p[G])
        return IntegralityReport(mode, "fail" if failures else "pass", failures, "p ∤ |G'|")
    sample = FittingInvariant(G, p, KIND_EXACT, sample_reduced_norms(G, sample_size, seed))
    verdict, precision = sample.contains(theta)
    if verdict == MEMBER:
        return IntegralityReport(mode, "pass", note=f"標本格子に所属（精度 {precision}）")
    return IntegralityReport(mode, "undecided", note="標本の被約ノルムが張る格子の外（ℐ(G) の外とは限らない）")
