"""非可換 Fitting 不変量・分母イデアルの証明書・零化の検証

Fitting 不変量は表示行列 h の b×b 小行列の被約ノルムが ζ(𝔄) 上で張る格子として持つ。
格子の比較は類和座標の p 進格子（tools.padic.PAdicLattice）で行い、
nr(𝔄) 同値は有限個の単元の語を探索して判定する（上限を超えたら「判定不能」）。
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tools.characters import character_table, parity
from tools.cyclotomic import ONE
from tools.group_ring import (
    CenterElement,
    CoefficientRing,
    GroupRingElement,
    GroupRingMatrix,
    MinusRing,
    e_minus_center,
    generalized_adjoint,
    nr_unit_generators,
    reduced_norm,
)
from tools.groups import CentralInvolution, FiniteGroup, commutator_subgroup
from tools.padic import MEMBER, NON_MEMBER, UNDECIDED, PAdicLattice, decide_containment, decide_membership, valuation
from utils.debug import debug_log
from utils.errors import NotCheckable, PresentationError

if TYPE_CHECKING:
    from tools.gmodule import GModule

KIND_ZERO = "zero"
KIND_EXACT = "exact"
KIND_LOWER_BOUND = "lower-bound-for-Fitt-max"
KIND_FRACTION = "fraction"

EQUAL = "equal"
CONTAINED = "contained"
UNDECIDED_AT_BOUND = "undecided-at-bound"

FULL_CENTER = "full-center"
PROPER = "proper"


# ============================================================================
# 表示された加群
# ============================================================================
@dataclass
class PresentedModule:
    """𝔄^a →h 𝔄^b → M → 0（h の行が関係式）

    minus を指定すると 𝔄 = ℤ_p[G]_− 上の表示で、成分は ℤ_p[G] への持ち上げ。
    """
    matrix: GroupRingMatrix
    p: int
    precision: int = 20
    minus: Optional[CentralInvolution] = None
    label: str = ""

    @classmethod
    def zero_module(cls, group: FiniteGroup, p: int, precision: int = 20,
                    minus: Optional[CentralInvolution] = None) -> "PresentedModule":
        ring = CoefficientRing.zmod(p, precision)
        return cls(GroupRingMatrix([[GroupRingElement.one(group, ring)]]), p, precision, minus, "0")

    @classmethod
    def from_integers(cls, group: FiniteGroup, rows: Sequence[Sequence[int]], p: int, precision: int = 20,
                      minus: Optional[CentralInvolution] = None, label: str = "") -> "PresentedModule":
        """整数スカラーの行列による表示（例: (3) なら ℤ/3 ⊗ 𝔄）"""
        ring = CoefficientRing.zmod(p, precision)
        matrix = GroupRingMatrix([[GroupRingElement.from_terms(group, {0: c}, ring) for c in row] for row in rows])
        return cls(matrix, p, precision, minus, label)

    @property
    def group(self) -> FiniteGroup:
        return self.matrix.group

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    @property
    def is_quadratic(self) -> bool:
        return self.matrix.is_square

    def direct_sum(self, other: "PresentedModule") -> "PresentedModule":
        return PresentedModule(GroupRingMatrix.block_diagonal(self.matrix, other.matrix), self.p,
                               max(self.precision, other.precision), self.minus,
                               f"{self.label}⊕{other.label}")

    def to_module(self) -> "GModule":
        from tools.gmodule import GModule
        return GModule.from_presentation(self.matrix, self.p, self.minus, self.precision, self.label)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "precision": self.precision,
            "ring": "Z_p[G]_-" if self.minus is not None else "Z_p[G]",
            "shape": list(self.shape),
            "matrix": self.matrix.to_json(),
        }


# ============================================================================
# Fitting 不変量
# ============================================================================
@dataclass
class FittingInvariant:
    """⟨nr(H) : H ∈ S_b(h)⟩_{ζ(𝔄)} の代表格子"""
    group: FiniteGroup
    p: int
    kind: str
    generators: List[CenterElement]
    minus: Optional[CentralInvolution] = None
    precision: int = 20
    notes: Dict[str, object] = field(default_factory=dict)

    def ambient(self) -> Optional[List[Tuple]]:
        if self.minus is None:
            return None
        return MinusRing(self.minus, self.p, self.precision).center_ambient()

    def spanning_vectors(self) -> List[Tuple]:
        """ζ(𝔄)·f の ℤ_p 生成元（類和 C_i·f の類座標）"""
        vectors = []
        for f in self.generators:
            for i in range(len(self.group.classes)):
                vectors.append(f.times_class_sum(i).rational_class_coordinates())
        return vectors

    def lattice(self, precision: Optional[int] = None) -> PAdicLattice:
        return PAdicLattice(self.p, len(self.group.classes), self.spanning_vectors(),
                            precision or self.precision, self.ambient())

    def contains(self, z: CenterElement, cap: int = 64) -> Tuple[str, int]:
        if self.kind == KIND_ZERO:
            return (MEMBER if z.is_zero() else NON_MEMBER), self.precision
        return decide_membership(self.lattice(), z.rational_class_coordinates(), cap)

    def scale(self, z: CenterElement) -> "FittingInvariant":
        return FittingInvariant(self.group, self.p, self.kind, [z * f for f in self.generators],
                                self.minus, self.precision, dict(self.notes))

    def product(self, other: "FittingInvariant") -> "FittingInvariant":
        if KIND_ZERO in (self.kind, other.kind):
            kind = KIND_ZERO
        elif KIND_FRACTION in (self.kind, other.kind):
            kind = KIND_FRACTION
        elif self.kind == other.kind == KIND_EXACT:
            kind = KIND_EXACT
        else:
            kind = KIND_LOWER_BOUND
        generators = _unique([f * g for f in self.generators for g in other.generators])
        return FittingInvariant(self.group, self.p, kind, generators if kind != KIND_ZERO else [],
                                self.minus, max(self.precision, other.precision))

    def to_json(self) -> dict:
        data = {
            "kind": self.kind,
            "p": self.p,
            "precision": self.precision,
            "ring": "Z_p[G]_-" if self.minus is not None else "Z_p[G]",
            "generators": [f.to_json() for f in self.generators],
        }
        if self.kind != KIND_ZERO:
            data["lattice"] = self.lattice().to_json()
        if self.notes:
            data["notes"] = self.notes
        return data


def _unique(elements: Sequence[CenterElement]) -> List[CenterElement]:
    seen = set()
    out = []
    for z in elements:
        if z not in seen:
            seen.add(z)
            out.append(z)
    return out


def _minus_part(z: CenterElement, minus: Optional[CentralInvolution]) -> CenterElement:
    return z if minus is None else z * e_minus_center(minus)


def fitting_of_presentation(module: PresentedModule, jobs: int = 1) -> FittingInvariant:
    """b×b 小行列すべての被約ノルムが張る格子（a < b なら零類）"""
    G = module.group
    a, b = module.shape
    if a < b:
        return FittingInvariant(G, module.p, KIND_ZERO, [], module.minus, module.precision,
                                {"reason": f"a = {a} < b = {b}"})
    subsets = list(combinations(range(a), b))
    debug_log(f"Fitting 不変量: {a}×{b} 表示, 小行列 {len(subsets)} 個")

    def norm_of(rows):
        return reduced_norm(module.matrix.submatrix(rows))

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        norms = list(pool.map(norm_of, subsets))
    generators = _unique([_minus_part(z, module.minus) for z in norms])
    kind = KIND_EXACT if a == b else KIND_LOWER_BOUND
    return FittingInvariant(G, module.p, kind, generators, module.minus, module.precision)


def _invert_on_support(z: CenterElement, minus: Optional[CentralInvolution]) -> CenterElement:
    """minus のときは奇指標成分だけを反転（偶成分は捨てる）"""
    if minus is None:
        return z.inverse()
    table = character_table(z.group)
    adjusted = [c if parity(chi, minus) == "odd" else ONE for chi, c in zip(table, z.components)]
    return CenterElement(z.group, adjusted).inverse() * e_minus_center(minus)


def fitting_of_two_term_complex(A: PresentedModule, B: PresentedModule) -> FittingInvariant:
    """Fitt(A → B) = Fitt(A)⁻¹·Fitt(B)（どちらも正方表示）"""
    if not (A.is_quadratic and B.is_quadratic):
        raise PresentationError("二項複体の両端は正方表示でなければなりません")
    nr_a = _minus_part(reduced_norm(A.matrix), A.minus)
    nr_b = _minus_part(reduced_norm(B.matrix), B.minus)
    try:
        inverse = _invert_on_support(nr_a, A.minus)
    except PresentationError:
        raise PresentationError(f"{A.label or 'A'} の表示行列の被約ノルムが可逆ではありません")
    return FittingInvariant(B.group, B.p, KIND_FRACTION, [nr_b * inverse], B.minus,
                            max(A.precision, B.precision),
                            {"numerator": nr_b.to_json(), "denominator": nr_a.to_json()})


def lattice_relation(outer: FittingInvariant, inner: FittingInvariant, cap: int = 64) -> str:
    """inner ⊆ outer なら contained、両方向なら equal"""
    def contained(big: FittingInvariant, small: FittingInvariant) -> str:
        if small.kind == KIND_ZERO:
            return MEMBER
        if big.kind == KIND_ZERO:
            return NON_MEMBER
        return decide_containment(big.lattice(), small.lattice(), cap)[0]

    forward = contained(outer, inner)
    if forward != MEMBER:
        return forward
    return EQUAL if contained(inner, outer) == MEMBER else CONTAINED


def fitting_product(M: PresentedModule, N: PresentedModule, cap: int = 64, jobs: int = 1) -> FittingInvariant:
    """Fitt(M)·Fitt(N) を求め、直和の表示から得た不変量と一致することを確かめる"""
    if not (M.is_quadratic and N.is_quadratic):
        raise PresentationError("積の公式は正方表示に対してのみ扱います")
    product = fitting_of_presentation(M, jobs).product(fitting_of_presentation(N, jobs))
    direct = fitting_of_presentation(M.direct_sum(N), jobs)
    exact = product.generators == direct.generators
    product.notes["direct_sum"] = EQUAL if exact else lattice_relation(product, direct, cap)
    return product


# ============================================================================
# 単元による同値
# ============================================================================
@dataclass
class UnitComparison:
    status: str
    word: List[str] = field(default_factory=list)
    precision: int = 0
    explored: int = 0

    def to_json(self) -> dict:
        return {"status": self.status, "unit_word": self.word, "precision": self.precision,
                "explored_units": self.explored}


def _unit_words(G: FiniteGroup, units: Sequence[Tuple[str, CenterElement]], bound: int):
    """長さ bound 以下の語で得られる単元（値が同じものは最短の語だけ）"""
    one = CenterElement.scalar(G, 1)
    seen = {one}
    layer = [([], one)]
    yield [], one
    for _ in range(bound):
        nxt = []
        for word, value in layer:
            for label, u in units:
                candidate = value * u
                if candidate in seen:
                    continue
                seen.add(candidate)
                entry = (word + [label], candidate)
                nxt.append(entry)
                yield entry
        layer = nxt


def member_up_to_units(fitt: FittingInvariant, z: CenterElement,
                       units: Optional[Sequence[Tuple[str, CenterElement]]] = None,
                       bound: int = 6, cap: int = 64) -> UnitComparison:
    """z ∈ u·Fitt となる単元 u = nr(…) を語の長さ bound まで探す"""
    if units is None:
        units = nr_unit_generators(fitt.group, fitt.p)
    explored = 0
    last_precision = fitt.precision
    undecided = False
    for word, u in _unit_words(fitt.group, units, bound):
        explored += 1
        target = z * u.inverse()
        verdict, last_precision = fitt.contains(target, cap)
        if verdict == MEMBER:
            return UnitComparison(MEMBER, word, last_precision, explored)
        if verdict == UNDECIDED:
            undecided = True
    status = UNDECIDED if undecided else UNDECIDED_AT_BOUND
    return UnitComparison(status, [], last_precision, explored)


def compare_up_to_units(source: FittingInvariant, target: FittingInvariant,
                        units: Optional[Sequence[Tuple[str, CenterElement]]] = None,
                        bound: int = 6, cap: int = 64) -> UnitComparison:
    """u·source と target を比べる: equal / contained（u·source ⊆ target）/ undecided-at-bound"""
    if units is None:
        units = nr_unit_generators(source.group, source.p)
    explored = 0
    contained: Optional[UnitComparison] = None
    for word, u in _unit_words(source.group, units, bound):
        explored += 1
        moved = source.scale(u)
        relation = lattice_relation(target, moved, cap)
        if relation == EQUAL:
            return UnitComparison(EQUAL, word, target.precision, explored)
        if relation == CONTAINED and contained is None:
            contained = UnitComparison(CONTAINED, word, target.precision, explored)
    if contained is not None:
        contained.explored = explored
        return contained
    return UnitComparison(UNDECIDED_AT_BOUND, [], target.precision, explored)


def idempotent_cut(fitt: FittingInvariant, e: CenterElement,
                   module: Optional[PresentedModule] = None) -> FittingInvariant:
    """e·Fitt(M)。e が p 整なら Fitt_{𝔄e}(𝔄e ⊗ M) = nr(He + (1−e))·e と一致することも確かめる"""
    cut = fitt.scale(e)
    integral = e.is_p_integral(fitt.p)
    cut.notes["idempotent_integral"] = integral
    if integral and module is not None and module.is_quadratic:
        H = module.matrix.lift() if module.matrix.ring.kind == "zmod" else module.matrix
        element = e.to_element()
        b = H.shape[0]
        one_minus = GroupRingMatrix.identity(fitt.group, b, element.ring).scale(
            GroupRingElement.one(fitt.group, element.ring) - element)
        cut_matrix = H.scale(element) + one_minus
        direct = _minus_part(reduced_norm(cut_matrix), fitt.minus) * e
        cut.notes["cut_module_equality"] = direct in cut.generators
    return cut


# ============================================================================
# 分母イデアル ℋ(𝔄)
# ============================================================================
def denominator_dichotomy(G: FiniteGroup, p: int) -> str:
    """p ∤ |G'| なら ℋ_p(G) = ζ(ℤ_p[G])"""
    return FULL_CENTER if commutator_subgroup(G).order % p else PROPER


@dataclass
class DenominatorCertificate:
    candidate: CenterElement
    p: int
    verdict: str
    dichotomy: str
    tested: List[List[int]] = field(default_factory=list)
    witness: Optional[dict] = None

    @property
    def granted(self) -> bool:
        return self.verdict in ("member-by-dichotomy", "member-verified-on-sample")

    def to_json(self) -> dict:
        return {
            "candidate": self.candidate.to_json(),
            "p": self.p,
            "verdict": self.verdict,
            "dichotomy": self.dichotomy,
            "tested_shapes": self.tested,
            "witness": self.witness,
        }


def _structured_matrices(G: FiniteGroup) -> List[GroupRingMatrix]:
    """1×1 の (g), (1 + g), (⟨g⟩ の和)"""
    ring = CoefficientRing.rational()
    one = GroupRingElement.one(G, ring)
    out = []
    for members in G.classes[1:]:
        g = members[0]
        x = GroupRingElement.basis(G, g, ring)
        powers = {0}
        current = g
        while current != 0:
            powers.add(current)
            current = G.mul(current, g)
        out.append(GroupRingMatrix([[x]]))
        out.append(GroupRingMatrix([[one + x]]))
        out.append(GroupRingMatrix([[GroupRingElement.from_subset(G, powers, ring)]]))
    return out


def _random_matrices(G: FiniteGroup, n_max: int, count: int, seed: int) -> List[GroupRingMatrix]:
    rng = np.random.default_rng(seed)
    ring = CoefficientRing.rational()
    out = []
    for n in range(1, n_max + 1):
        for _ in range(count):
            rows = []
            for _ in range(n):
                row = []
                for _ in range(n):
                    terms = {}
                    for g in rng.choice(G.order, size=min(3, G.order), replace=False):
                        terms[int(g)] = int(rng.integers(-2, 3))
                    row.append(GroupRingElement.from_terms(G, terms, ring))
                rows.append(row)
            out.append(GroupRingMatrix(rows))
    return out


def sample_reduced_norms(G: FiniteGroup, sample_size: int = 6, seed: int = 20240611,
                         n_max: int = 2) -> List[CenterElement]:
    """ℐ(G) の部分格子を張る nr(H) の標本"""
    matrices = _structured_matrices(G) + _random_matrices(G, n_max, sample_size, seed)
    norms = [reduced_norm(H) for H in matrices]
    return _unique([z for z in norms if not z.is_zero()] + [CenterElement.scalar(G, 1)])


def denominator_certificate(x: CenterElement, p: int, sample_size: int = 6, seed: int = 20240611,
                            n_max: Optional[int] = None) -> DenominatorCertificate:
    """x ∈ ℋ_p(G) の判定（二分法で決まらなければ x·H* の整性を標本で確かめる）"""
    G = x.group
    if not x.is_rational():
        raise NotCheckable("x の類和座標が有理数でないため ℋ_p(G) への所属を判定できません")
    dichotomy = denominator_dichotomy(G, p)
    if not x.is_p_integral(p):
        return DenominatorCertificate(x, p, "non-member-with-witness", dichotomy,
                                      witness={"matrix": "identity(1)", "reason": "x ∉ ζ(ℤ_p[G])"})
    if dichotomy == FULL_CENTER:
        return DenominatorCertificate(x, p, "member-by-dichotomy", dichotomy)
    if n_max is None:
        n_max = max(character_table(G).degrees)
    element = x.to_element()
    tested = []
    for H in _structured_matrices(G) + _random_matrices(G, n_max, sample_size, seed):
        tested.append(list(H.shape))
        adjoint = generalized_adjoint(H)
        for r in adjoint.rows:
            for entry in r:
                product = element * entry
                if not product.is_p_integral(p):
                    debug_log(f"ℋ の反例: H = {H.to_json()}")
                    return DenominatorCertificate(x, p, "non-member-with-witness", dichotomy, tested,
                                                  {"matrix": H.to_json(), "product": product.to_json()})
    return DenominatorCertificate(x, p, "member-verified-on-sample", dichotomy, tested)


def safe_denominator(G: FiniteGroup, p: int) -> CenterElement:
    """常に ℋ_p(G) に入る元: 二分法が成り立てば 1、そうでなければ p^{v_p(|G|)}"""
    if denominator_dichotomy(G, p) == FULL_CENTER:
        return CenterElement.scalar(G, 1)
    return CenterElement.scalar(G, p ** valuation(G.order, p))


# ============================================================================
# 零化
# ============================================================================
@dataclass
class AnnihilationCheck:
    verdict: str
    checked: int
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "checked_generators": self.checked, "witness": self.witness}


def annihilation_check(x: CenterElement, fitt: FittingInvariant, module: "GModule",
                       certificate: Optional[DenominatorCertificate] = None) -> AnnihilationCheck:
    """x·f（f は Fitting 格子の生成元）がすべて M を消すか"""
    if certificate is not None and not certificate.granted:
        return AnnihilationCheck("fail", 0, {"reason": "x が ℋ に入りません", "certificate": certificate.to_json()})
    for count, f in enumerate(fitt.generators, start=1):
        z = x * f
        try:
            result = module.annihilated_by(z)
        except NotCheckable as exc:
            return AnnihilationCheck("fail", count, {"generator": f.to_json(), "reason": str(exc)})
        if not result.annihilates:
            return AnnihilationCheck("fail", count, {"generator": f.to_json(), "image": result.witness})
    return AnnihilationCheck("pass", len(fitt.generators))


# ============================================================================
# 全射による単調性
# ============================================================================
@dataclass
class SurjectionCertificate:
    status: str
    comparisons: List[dict]

    def to_json(self) -> dict:
        return {"status": self.status, "comparisons": self.comparisons}


def fitting_surjection_monotone(source: "GModule", target: "GModule", phi: Sequence[Sequence[int]],
                                minus: Optional[CentralInvolution] = None, bound: int = 6,
                                cap: int = 64) -> SurjectionCertificate:
    """M ↠ M'（phi は M' の座標 × M の座標の行列）から Fitt(M) ⊆ Fitt(M') を確かめる"""
    from tools.padic import howell_form, howell_residue

    p, k = target.p, target.precision
    modulus = p ** k
    Phi = np.array([[int(v) % modulus for v in row] for row in phi], dtype=object).reshape(target.rank, source.rank)
    for row in source.relation_rows:
        if not target.is_zero(Phi.dot(np.array(row, dtype=object)) % modulus):
            raise PresentationError("写像が関係式を保たない（well-defined でない）")
    for s in source.group.generators:
        left = Phi.dot(source.action_matrix(s)) % modulus
        right = target.action_matrix(s).dot(Phi) % modulus
        for col in range(source.rank):
            if not target.is_zero((left[:, col] - right[:, col]) % modulus):
                raise PresentationError("写像が G 同変ではありません")
    span = [list(r) for r in target.relation_rows] + [[int(v) for v in Phi[:, i]] for i in range(source.rank)]
    form = howell_form(span, p, k, target.rank) if target.rank else []
    for i in range(target.rank):
        e = [int(t == i) for t in range(target.rank)]
        if any(howell_residue(form, e, p, k)):
            raise PresentationError("写像が全射ではありません")
    fitt_source = fitting_of_presentation(source.derive_presentation(minus))
    fitt_target = fitting_of_presentation(target.derive_presentation(minus))
    comparisons = []
    status = CONTAINED
    for f in fitt_source.generators:
        result = member_up_to_units(fitt_target, f, bound=bound, cap=cap)
        comparisons.append({"generator": f.to_json(), **result.to_json()})
        if result.status != MEMBER:
            status = UNDECIDED_AT_BOUND
    return SurjectionCertificate(status, comparisons)
