"""N-hybrid 判定（ℤ_p[G](1 − e_N) が極大整環か）

構造的な規則を強い順に試し、証明の経路を記録する。
欠陥零（defect zero）による判定は規則とは独立に計算して別欄で報告する。
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from tools.characters import character_table, defect_zero, kernel
from tools.groups import FiniteGroup, SubgroupHandle, frobenius_structure, group_label_for_subgroup, normal_subgroups
from utils.debug import debug_log
from utils.errors import NotNormalSubgroup

RULE_NOT_INTEGRAL = "p-divides-N"
RULE_TRIVIAL = "trivial-kernel"
RULE_MAXIMAL = "maximal-order"
RULE_FROBENIUS = "frobenius-kernel"
RULE_BASE_UP = "base-change-up"
RULE_BASE_DOWN = "base-change-down"
RULE_DEFECT_ZERO = "defect-zero"


@dataclass
class HybridVerdict:
    p: int
    group_order: int
    kernel_order: int
    hybrid: bool
    rule: str
    path: List[str] = field(default_factory=list)
    defect_zero: Optional[bool] = None
    witness: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "group_order": self.group_order,
            "N_order": self.kernel_order,
            "hybrid": self.hybrid,
            "rule": self.rule,
            "path": self.path,
            "defect_zero_heuristic": self.defect_zero,
            "witness": self.witness,
        }


def defect_zero_criterion(G: FiniteGroup, N: SubgroupHandle, p: int) -> bool:
    """N ⊄ ker χ となる既約指標がすべて p 欠陥零か"""
    if N.order % p == 0:
        return False
    for chi in character_table(G):
        if N.elements <= kernel(chi).elements:
            continue
        if not defect_zero(chi, p):
            return False
    return True


def _inside(H: SubgroupHandle, N: SubgroupHandle) -> SubgroupHandle:
    """N ≤ H を H.view の部分群として"""
    local = {int(g): i for i, g in enumerate(H.embedding)}
    return SubgroupHandle.from_elements(H.view, frozenset(local[int(n)] for n in N.elements))


def _direct_rules(G: FiniteGroup, N: SubgroupHandle, p: int) -> Optional[HybridVerdict]:
    base = dict(p=p, group_order=G.order, kernel_order=N.order)
    if N.order % p == 0:
        return HybridVerdict(**base, hybrid=False, rule=RULE_NOT_INTEGRAL,
                             path=[f"p = {p} が |N| = {N.order} を割るので e_N ∉ ℤ_p[G]"])
    if N.order == 1:
        return HybridVerdict(**base, hybrid=True, rule=RULE_TRIVIAL,
                             path=["N = 1 なので 1 − e_N = 0"])
    if G.order % p:
        return HybridVerdict(**base, hybrid=True, rule=RULE_MAXIMAL,
                             path=[f"p ∤ |G| = {G.order} なので ℤ_p[G] 自体が極大整環"])
    structure = frobenius_structure(G)
    if structure is not None and structure.kernel.elements == N.elements:
        return HybridVerdict(**base, hybrid=True, rule=RULE_FROBENIUS,
                             path=[f"G はフロベニウス群で N は核、p ∤ |N| = {N.order}"],
                             witness={"frobenius": structure.summary()})
    return None


def hybrid_check(G: FiniteGroup, N: SubgroupHandle, p: int, depth: int = 2) -> HybridVerdict:
    """ℤ_p[G] が N-hybrid か（規則で決まらなければ欠陥零の判定に委ねる）"""
    if not N.is_normal:
        raise NotNormalSubgroup("N は G の正規部分群ではありません")
    heuristic = defect_zero_criterion(G, N, p)
    verdict = _direct_rules(G, N, p)
    if verdict is None and depth > 0:
        verdict = _base_change_up(G, N, p, depth)
    if verdict is None:
        verdict = HybridVerdict(p, G.order, N.order, heuristic, RULE_DEFECT_ZERO,
                                ["構造的な規則が当てはまらないため欠陥零の判定を採用"])
    verdict.defect_zero = heuristic
    debug_log(f"hybrid 判定: |G|={G.order}, |N|={N.order}, p={p} -> {verdict.hybrid} ({verdict.rule})")
    return verdict


def _base_change_up(G: FiniteGroup, N: SubgroupHandle, p: int, depth: int) -> Optional[HybridVerdict]:
    """N ⊴ H ⊴ G, p ∤ [G:H] なら ℤ_p[G] と ℤ_p[H] の N-hybrid 性は同値"""
    for H in normal_subgroups(G):
        if H.order == G.order or not N.elements <= H.elements or H.index % p == 0:
            continue
        inner = _direct_rules(H.view, _inside(H, N), p)
        if inner is None and depth > 1:
            inner = _base_change_up(H.view, _inside(H, N), p, depth - 1)
        if inner is None or not inner.hybrid:
            continue
        path = [f"H = {group_label_for_subgroup(H)}（指数 {H.index}, p ∤ [G:H]）へ降りる"] + inner.path
        return HybridVerdict(p, G.order, N.order, True, RULE_BASE_UP, path,
                             witness={"H": H.to_cycles(), "inner_rule": inner.rule})
    return None


def base_change_down(ambient: FiniteGroup, N: SubgroupHandle, H: SubgroupHandle,
                     N_prime: SubgroupHandle, p: int) -> HybridVerdict:
    """ℤ_p[G] が N-hybrid で H ⊴ G, N' ⊴ H, N' ≤ N なら ℤ_p[H] は N'-hybrid"""
    if not H.is_normal or not N.is_normal:
        raise NotNormalSubgroup("H と N は G の正規部分群である必要があります")
    if not N_prime.elements <= N.elements or not N_prime.elements <= H.elements:
        raise NotNormalSubgroup("N' は N ∩ H に含まれる必要があります")
    local = _inside(H, N_prime)
    if not local.is_normal:
        raise NotNormalSubgroup("N' は H の正規部分群ではありません")
    upper = hybrid_check(ambient, N, p)
    heuristic = defect_zero_criterion(H.view, local, p)
    if not upper.hybrid:
        verdict = hybrid_check(H.view, local, p)
        verdict.path = ["G での判定が否定的なので H で直接判定"] + verdict.path
        return verdict
    path = [f"ℤ_p[G] は N-hybrid（{upper.rule}）"] + upper.path + [f"H = {group_label_for_subgroup(H)} に制限"]
    return HybridVerdict(p, H.order, N_prime.order, True, RULE_BASE_DOWN, path, heuristic,
                         {"ambient_order": ambient.order, "upper_rule": upper.rule})


def hybrid_kernels(G: FiniteGroup, p: int) -> List[HybridVerdict]:
    """N-hybrid となる正規部分群 N の一覧（位数の大きい順）"""
    found = []
    for N in reversed(normal_subgroups(G)):
        verdict = hybrid_check(G, N, p)
        if verdict.hybrid:
            verdict.witness["N"] = N.to_cycles()
            found.append(verdict)
    return found
