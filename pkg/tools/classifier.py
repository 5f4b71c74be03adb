"""無条件に Brumer–Stark が従う状況の判定

G⁺ = Gal(L⁺/K) の群論的なデータから、適用できる結果を強い順に試す。
各結果の前提はすべて記録し、verify_verdict で再計算して確かめられる。

前提の出所 (source):
    computed            群のデータから計算したもの
    derived-assumption  K = ℚ のとき群のデータから従う算術的事実
    assumption          利用者が --assume で与えた記録
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from sympy import isprime

from tools.characters import is_monomial, verify_monomial_witness
from tools.groups import (
    FiniteGroup,
    SubgroupHandle,
    commutator_subgroup,
    direct_complement_of,
    frobenius_structure,
    group_label_for_subgroup,
    is_p_group,
    quotient,
    sylow_subgroup,
)
from tools.hybrid import hybrid_check, hybrid_kernels
from tools.l_values import ExtensionDatum
from utils.debug import debug_log
from utils.errors import InputError, NotNormalSubgroup

TAG_FROBENIUS_ELL_KERNEL = "frobenius-ell-kernel-over-Q"
TAG_COPRIME_DEGREE = "coprime-degree"
TAG_FROBENIUS_ABELIAN_COMPLEMENT = "frobenius-abelian-complement"
TAG_HYBRID_MONOMIAL = "hybrid-monomial"
TAG_KNOWN_EXAMPLE = "known-example"
TAG_NONE = "none"

# 出力の result 欄に載せる結果の呼び名
RESULT_LABELS = {
    TAG_COPRIME_DEGREE: "Thm 9.1",
    TAG_HYBRID_MONOMIAL: "Thm 9.4",
    TAG_FROBENIUS_ABELIAN_COMPLEMENT: "Cor 9.5",
    TAG_FROBENIUS_ELL_KERNEL: "Cor 9.6",
    TAG_KNOWN_EXAMPLE: TAG_KNOWN_EXAMPLE,
    TAG_NONE: TAG_NONE,
}

# 強い順
TAG_ORDER = [
    TAG_FROBENIUS_ELL_KERNEL,
    TAG_COPRIME_DEGREE,
    TAG_FROBENIUS_ABELIAN_COMPLEMENT,
    TAG_HYBRID_MONOMIAL,
    TAG_KNOWN_EXAMPLE,
]

SOURCE_COMPUTED = "computed"
SOURCE_DERIVED = "derived-assumption"
SOURCE_ASSUMPTION = "assumption"

ASSUMPTION_KINDS = ("abelian_over_Q", "known_example")


@dataclass
class Premise:
    name: str
    holds: bool
    witness: Optional[object] = None
    source: str = SOURCE_COMPUTED

    def to_json(self) -> dict:
        return {"name": self.name, "holds": self.holds, "witness": self.witness, "source": self.source}


@dataclass
class Candidate:
    tag: str
    premises: List[Premise] = field(default_factory=list)

    @property
    def applicable(self) -> bool:
        return bool(self.premises) and all(p.holds for p in self.premises)

    @property
    def failing(self) -> Optional[Premise]:
        for premise in self.premises:
            if not premise.holds:
                return premise
        return None

    def to_json(self) -> dict:
        failing = self.failing
        return {
            "tag": self.tag,
            "result": RESULT_LABELS[self.tag],
            "applicable": self.applicable,
            "premises": [p.to_json() for p in self.premises],
            "failing_premise": failing.name if failing else None,
        }


@dataclass
class TheoremVerdict:
    tag: str
    p: int
    group: str
    base_field: str
    premises: List[dict] = field(default_factory=list)
    candidates: List[dict] = field(default_factory=list)
    assumptions: List[dict] = field(default_factory=list)
    witnesses: Dict[str, object] = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return self.tag != TAG_NONE

    @property
    def result(self) -> str:
        return RESULT_LABELS[self.tag]

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "result": self.result,
            "p": self.p,
            "group": self.group,
            "base_field": self.base_field,
            "premises": self.premises,
            "candidates": self.candidates,
            "assumptions": self.assumptions,
            "witnesses": self.witnesses,
        }


# ============================================================================
# 仮定の記録
# ============================================================================
@dataclass
class AssumptionRecord:
    kind: str
    subgroup: Optional[SubgroupHandle] = None
    note: str = ""
    raw: Dict[str, object] = field(default_factory=dict)


def parse_assumptions(G: FiniteGroup, records: Sequence[dict], projection=None,
                      ambient: Optional[FiniteGroup] = None) -> List[AssumptionRecord]:
    """仮定の記録を G⁺ の部分群に解釈する

    projection を与えた場合、subgroup は ambient（= Gal(L/K)）の元で書かれているとみなし、
    G⁺ = ambient/⟨j⟩ への像を取る。
    """
    parsed = []
    for i, record in enumerate(records):
        kind = record.get("kind")
        if kind not in ASSUMPTION_KINDS:
            raise InputError(f"仮定の種類 {kind!r} は扱えません（{', '.join(ASSUMPTION_KINDS)}）",
                             f"/assumptions/{i}/kind")
        subgroup = None
        cycles = record.get("subgroup")
        if cycles is not None:
            if projection is None:
                subgroup = G.subgroup_from_cycles(cycles, f"/assumptions/{i}/subgroup")
            else:
                source = ambient.subgroup_from_cycles(cycles, f"/assumptions/{i}/subgroup")
                subgroup = G.subgroup([int(projection[g]) for g in source.generators])
        parsed.append(AssumptionRecord(kind, subgroup, record.get("note", ""), dict(record)))
    return parsed


def abelian_fixed_field(G: FiniteGroup, M: SubgroupHandle, base_field: str,
                        assumptions: Sequence[AssumptionRecord]) -> Premise:
    """(L⁺)^M / ℚ がアーベルか

    K = ℚ なら M ⊇ G' と同値。そうでなければ A ⊆ M となる記録 abelian_over_Q(A) を探す
    （アーベル拡大の部分体はアーベル）。
    """
    name = f"(L+)^M / Q abelian, M = {group_label_for_subgroup(M)}"
    if base_field == "Q":
        derived = commutator_subgroup(G)
        holds = derived.elements <= M.elements
        return Premise(name, holds, {"M": M.to_cycles(), "derived_subgroup": derived.to_cycles()}, SOURCE_DERIVED)
    for record in assumptions:
        if record.kind == "abelian_over_Q" and record.subgroup is not None \
                and record.subgroup.elements <= M.elements:
            return Premise(name, True, {"M": M.to_cycles(), "record": record.raw}, SOURCE_ASSUMPTION)
    return Premise(name, False, {"M": M.to_cycles(), "reason": "K ≠ ℚ で該当する仮定の記録がありません"},
                   SOURCE_ASSUMPTION)


def sylow_preimage(G: FiniteGroup, N: SubgroupHandle, p: int) -> SubgroupHandle:
    """G/N の Sylow p 部分群の G での逆像"""
    Q, projection = quotient(G, N)
    P = sylow_subgroup(Q, p)
    members = frozenset(g for g in range(G.order) if int(projection[g]) in P.elements)
    return SubgroupHandle.from_elements(G, members)


# ============================================================================
# 各結果の前提
# ============================================================================
def _monomial_premise(G: FiniteGroup, subgroup_cap: int) -> Premise:
    witness = is_monomial(G, subgroup_cap)
    return Premise("G+ monomial", witness.is_monomial, witness.to_json())


def _frobenius_premises(G: FiniteGroup) -> List[Premise]:
    structure = frobenius_structure(G)
    if structure is None:
        return [Premise("G+ Frobenius", False, {"reason": "フロベニウス構造がありません"})]
    complement = structure.complement
    return [
        Premise("G+ Frobenius", True, structure.summary()),
        Premise("Frobenius complement abelian", complement.view.is_abelian(), complement.summary()),
    ]


def frobenius_ell_kernel_candidate(G: FiniteGroup, base_field: str,
                                   direct: Optional[Premise]) -> Candidate:
    candidate = Candidate(TAG_FROBENIUS_ELL_KERNEL)
    candidate.premises.append(Premise("K = Q", base_field == "Q", base_field))
    if direct is None:
        direct = Premise("Gal(L/Q) = <j> x G+", False, {"reason": "拡大のデータが必要です"})
    candidate.premises.append(direct)
    candidate.premises.extend(_frobenius_premises(G))
    structure = frobenius_structure(G)
    if structure is not None:
        order = structure.kernel.order
        candidate.premises.append(Premise("Frobenius kernel is an l-group", is_p_group(order),
                                          {"kernel_order": order}))
    return candidate


def coprime_degree_candidate(G: FiniteGroup, p: int, subgroup_cap: int) -> Candidate:
    return Candidate(TAG_COPRIME_DEGREE, [
        _monomial_premise(G, subgroup_cap),
        Premise("p does not divide [L+:K]", G.order % p != 0, {"order": G.order, "p": p}),
    ])


def frobenius_abelian_complement_candidate(G: FiniteGroup, p: int, base_field: str,
                                           assumptions: Sequence[AssumptionRecord]) -> Candidate:
    candidate = Candidate(TAG_FROBENIUS_ABELIAN_COMPLEMENT, _frobenius_premises(G))
    structure = frobenius_structure(G)
    if structure is None:
        return candidate
    U = structure.kernel
    coprime = U.order % p != 0
    candidate.premises.append(Premise("p does not divide |U| or U is a p-group",
                                      coprime or is_p_group(U.order, p), {"kernel_order": U.order, "p": p}))
    candidate.premises.append(abelian_fixed_field(G, U, base_field, assumptions))
    return candidate


def hybrid_monomial_candidate(G: FiniteGroup, p: int, base_field: str,
                              assumptions: Sequence[AssumptionRecord], N: Optional[SubgroupHandle],
                              subgroup_cap: int) -> Candidate:
    """ℤ_p[G⁺] が N-hybrid・G⁺ 単項・(L⁺)^M/ℚ アーベル（M は G⁺/N の Sylow p の逆像）"""
    monomial = _monomial_premise(G, subgroup_cap)
    kernels = [hybrid_check(G, N, p)] if N is not None else hybrid_kernels(G, p)
    best = None
    for verdict in kernels:
        kernel = N if N is not None else G.subgroup_from_cycles(verdict.witness["N"])
        hybrid = Premise(f"Z_p[G+] is N-hybrid, |N| = {kernel.order}", verdict.hybrid, verdict.to_json())
        if not verdict.hybrid:
            best = best or Candidate(TAG_HYBRID_MONOMIAL, [hybrid, monomial])
            continue
        M = sylow_preimage(G, kernel, p)
        candidate = Candidate(TAG_HYBRID_MONOMIAL, [hybrid, monomial, abelian_fixed_field(G, M, base_field, assumptions)])
        if candidate.applicable:
            return candidate
        best = best or candidate
    return best or Candidate(TAG_HYBRID_MONOMIAL, [
        Premise("Z_p[G+] is N-hybrid", False, {"reason": "N-hybrid となる N がありません"}), monomial])


def known_example_candidate(G: FiniteGroup, assumptions: Sequence[AssumptionRecord],
                            subgroup_cap: int) -> Candidate:
    records = [r.raw for r in assumptions if r.kind == "known_example"]
    return Candidate(TAG_KNOWN_EXAMPLE, [
        _monomial_premise(G, subgroup_cap),
        Premise("hypotheses verified in a documented example", bool(records), records or None, SOURCE_ASSUMPTION),
    ])


# ============================================================================
# 判定
# ============================================================================
def classify_theorem(G: FiniteGroup, p: int, N: Optional[SubgroupHandle] = None, base_field: str = "Q",
                     assumptions: Sequence[dict] = (), subgroup_cap: int = 5000,
                     direct: Optional[Premise] = None, extra: Sequence[Premise] = (),
                     parsed: Optional[List[AssumptionRecord]] = None) -> TheoremVerdict:
    """G = Gal(L⁺/K) から最も強く適用できる結果を返す

    extra は S ⊇ S_p ∪ S_ram ∪ S_∞ のように、TAG_FROBENIUS_ELL_KERNEL 以外のすべてに
    共通する前提（拡大のデータがある場合のみ）。
    """
    if p == 2 or not isprime(p):
        raise InputError(f"p は奇素数である必要があります: {p}", "/p")
    if N is not None and not N.is_normal:
        raise NotNormalSubgroup("N は G⁺ の正規部分群ではありません")
    records = parsed if parsed is not None else parse_assumptions(G, assumptions)
    candidates = [frobenius_ell_kernel_candidate(G, base_field, direct)]
    for candidate in (coprime_degree_candidate(G, p, subgroup_cap),
                      frobenius_abelian_complement_candidate(G, p, base_field, records),
                      hybrid_monomial_candidate(G, p, base_field, records, N, subgroup_cap),
                      known_example_candidate(G, records, subgroup_cap)):
        candidate.premises = list(extra) + candidate.premises
        candidates.append(candidate)

    chosen = next((c for c in candidates if c.applicable), None)
    name = G.name or group_label_for_subgroup(G.whole())
    verdict = TheoremVerdict(
        chosen.tag if chosen else TAG_NONE, p, name, base_field,
        premises=[pr.to_json() for pr in chosen.premises] if chosen else [],
        candidates=[c.to_json() for c in candidates],
        assumptions=[r.raw for r in records],
    )
    if N is not None:
        verdict.witnesses["N"] = N.to_cycles()
    if chosen is None:
        verdict.witnesses["failing_premises"] = {c.tag: c.failing.name for c in candidates if c.failing}
    debug_log(f"定理の判定: {name}, p={p} -> {verdict.tag}")
    return verdict


def classify_extension(datum: ExtensionDatum, p: int, N_cycles: Optional[List[str]] = None,
                       assumptions: Sequence[dict] = (), subgroup_cap: int = 5000) -> TheoremVerdict:
    """拡大データから G⁺ = G/⟨j⟩ を作り、S に関する前提も付けて判定する"""
    G = datum.group
    J = G.subgroup([datum.j.index])
    G_plus, projection = quotient(G, J)
    G_plus.name = f"Gal(L+/K) of {datum.name}"
    N = None
    if N_cycles:
        source = G.subgroup_from_cycles(N_cycles, "/N")
        N = G_plus.subgroup([int(projection[g]) for g in source.generators])
    records = parse_assumptions(G_plus, list(datum.assumptions) + list(assumptions), projection, G)

    complement = direct_complement_of(G, datum.j)
    direct = Premise("Gal(L/Q) = <j> x G+", complement is not None,
                     complement.summary() if complement is not None else None)
    missing = [v.label for v in datum.places
               if not v.in_s and (v.infinite or v.inertia_of(G).order > 1)]
    s_ram = Premise("S contains S_ram and S_inf", not missing, {"missing": missing})
    above_p = [v for v in datum.places if not v.infinite and v.residue_characteristic == p]
    s_p = Premise("S contains S_p", bool(above_p) and all(v.in_s for v in above_p),
                  {"places_above_p": [v.label for v in above_p]})
    verdict = classify_theorem(G_plus, p, N, datum.base_field, subgroup_cap=subgroup_cap,
                               direct=direct, extra=[s_ram, s_p], parsed=records)
    # TAG_FROBENIUS_ELL_KERNEL は S_p を要求しないが S_ram ∪ S_∞ は要求する
    first = verdict.candidates[0]
    if first["applicable"] and not s_ram.holds:
        first["applicable"] = False
        first["failing_premise"] = s_ram.name
        first["premises"].insert(0, s_ram.to_json())
        return _reselect(verdict)
    return verdict


def _reselect(verdict: TheoremVerdict) -> TheoremVerdict:
    chosen = next((c for c in verdict.candidates if c["applicable"]), None)
    verdict.tag = chosen["tag"] if chosen else TAG_NONE
    verdict.premises = chosen["premises"] if chosen else []
    return verdict


# ============================================================================
# 再検証
# ============================================================================
def verify_verdict(G: FiniteGroup, verdict: TheoremVerdict, subgroup_cap: int = 5000) -> bool:
    """記録された前提を計算し直して、判定結果が再現されるか確かめる"""
    if verdict.tag == TAG_NONE:
        return not any(c["applicable"] for c in verdict.candidates)
    for premise in verdict.premises:
        if not premise["holds"]:
            return False
        name = premise["name"]
        witness = premise["witness"]
        if name == "G+ monomial":
            for label, data in witness["witnesses"].items():
                if data is None or not verify_monomial_witness(G, label, data):
                    return False
        elif name == "G+ Frobenius":
            structure = frobenius_structure(G)
            if structure is None or structure.kernel.order != witness["kernel"]["order"]:
                return False
        elif name == "p does not divide [L+:K]":
            if G.order % verdict.p == 0:
                return False
        elif name.startswith("Z_p[G+] is N-hybrid"):
            N = G.subgroup_from_cycles(verdict.witnesses.get("N") or witness["witness"].get("N", []))
            if not hybrid_check(G, N, verdict.p).hybrid:
                return False
        elif name.startswith("(L+)^M / Q abelian") and premise["source"] == SOURCE_DERIVED:
            M = G.subgroup_from_cycles(witness["M"])
            if not commutator_subgroup(G).elements <= M.elements:
                return False
    return True
