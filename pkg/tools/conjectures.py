"""仮定 Hyp(S,T) の検証と Brumer / Brumer–Stark 型の包含の検証

判定結果は pass / fail / undecided / not-checkable のいずれか。
データ不足は黙って通さず not-checkable として理由を返す。
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np
from sympy import isprime

from tools.fitting import (
    KIND_EXACT,
    UNDECIDED_AT_BOUND,
    denominator_certificate,
    fitting_of_presentation,
    member_up_to_units,
    safe_denominator,
)
from tools.gmodule import GModule, gmodule_from_json
from tools.group_ring import CenterElement, GroupRingElement, e_minus_center, group_ring_element_from_json
from tools.l_values import (
    ExtensionDatum,
    StickelbergerResult,
    delta_t_element,
    integrality_report,
    omega_l,
    p_adic_stickelberger,
    stickelberger,
)
from tools.padic import MEMBER, UNDECIDED, valuation
from utils.debug import debug_log
from utils.errors import InputError, NotCheckable, PrecisionTooLow, PresentationError

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_UNDECIDED = "undecided"
STATUS_NOT_CHECKABLE = "not-checkable"


# ============================================================================
# Hyp(S,T)
# ============================================================================
@dataclass
class HypVerdict:
    s_contains_ram_and_infinite: bool
    s_t_disjoint: bool
    torsion_free: bool
    torsion_free_p: Optional[bool] = None
    p: Optional[int] = None
    reasons: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.s_contains_ram_and_infinite and self.s_t_disjoint and self.torsion_free

    def to_json(self) -> dict:
        data = {
            "passed": self.passed,
            "S_contains_S_ram_and_S_inf": self.s_contains_ram_and_infinite,
            "S_T_disjoint": self.s_t_disjoint,
            "E_T_torsion_free": self.torsion_free,
            "reasons": self.reasons,
        }
        if self.p is not None:
            data["p"] = self.p
            data["E_T_p_torsion_free"] = self.torsion_free_p
        return data


def _t_residue_characteristics(datum: ExtensionDatum) -> List[int]:
    chars = []
    for v in datum.t_places:
        if v.infinite or v.norm <= 1:
            raise NotCheckable(f"T の素点 {v.label} のノルム（剰余体の位数）がありません")
        chars.append(v.residue_characteristic)
    return sorted(set(chars))


def torsion_free(mu_order: int, residue_characteristics: List[int]) -> bool:
    """1 ≠ ζ ∈ μ_L で T のすべての素点を法として 1 と合同なものがないか

    ζ ≡ 1 (mod 𝔓) となる 1 の冪根は位数が剰余標数の冪のものに限る。
    """
    if mu_order == 1:
        return True
    if not residue_characteristics:
        return False
    if len(residue_characteristics) >= 2:
        return True
    return mu_order % residue_characteristics[0] != 0


def torsion_free_p(mu_order: int, residue_characteristics: List[int], p: int) -> bool:
    """E^T_{L,S}(p) が torsion-free か（μ_L の p 部分だけを見る）"""
    if mu_order % p:
        return True
    return any(ell != p for ell in residue_characteristics)


def check_hyp(datum: ExtensionDatum, p: Optional[int] = None) -> HypVerdict:
    G = datum.group
    reasons = []
    s_ok = True
    for v in datum.places:
        if v.infinite and not v.in_s:
            s_ok = False
            reasons.append(f"無限素点 {v.label} が S に入っていません")
        if not v.infinite and v.inertia_of(G).order > 1 and not v.in_s:
            s_ok = False
            reasons.append(f"分岐する素点 {v.label} が S に入っていません")
    overlap = [v.label for v in datum.places if v.in_s and v.in_t]
    if overlap:
        reasons.append(f"S ∩ T = {overlap} が空ではありません")
    chars = _t_residue_characteristics(datum)
    free = torsion_free(datum.mu_order, chars)
    if not free:
        reasons.append(f"|μ_L| = {datum.mu_order} の元で T を法として 1 と合同な非自明なものがあります"
                       f"（T の剰余標数 {chars}）")
    verdict = HypVerdict(s_ok, not overlap, free, reasons=reasons)
    if p is not None:
        verdict.p = p
        verdict.torsion_free_p = torsion_free_p(datum.mu_order, chars, p)
    debug_log(f"Hyp(S,T): {datum.name} -> {verdict.passed}")
    return verdict


# ============================================================================
# 判定結果
# ============================================================================
@dataclass
class CheckVerdict:
    mode: str
    status: str
    p: int
    premises: List[dict] = field(default_factory=list)
    assumptions: List[dict] = field(default_factory=list)
    witnesses: Dict[str, object] = field(default_factory=dict)
    precision: int = 0
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "status": self.status,
            "p": self.p,
            "premises": self.premises,
            "assumptions": self.assumptions,
            "witnesses": self.witnesses,
            "precision": self.precision,
            "reason": self.reason,
        }


def with_t_set(datum: ExtensionDatum, labels: List[str]) -> ExtensionDatum:
    """T を labels に取り替えた拡大データ"""
    known = {v.label for v in datum.places}
    missing = [label for label in labels if label not in known]
    if missing:
        raise InputError(f"T に指定された素点 {missing} がありません", "/t_sets")
    places = [replace(v, in_t=v.label in labels) for v in datum.places]
    return replace(datum, places=places)


def load_module(datum: ExtensionDatum, key: str, p: int, precision: int = 20,
                precision_cap: int = 64) -> GModule:
    data = getattr(datum, key)
    if data is None:
        raise NotCheckable(f"{key} のデータがありません（類群は取り込み専用です）")
    return gmodule_from_json(datum.group, data, p, precision, precision_cap, f"/{key}")


def _require_odd(p: int) -> None:
    if p == 2 or not isprime(p):
        raise InputError(f"p は奇素数である必要があります: {p}")


# ============================================================================
# Brumer
# ============================================================================
def brumer_check(datum: ExtensionDatum, p: int, precision: int = 20, precision_cap: int = 64,
                 sample_size: int = 6, seed: int = 20240611, jobs: int = 1) -> CheckVerdict:
    """x·δ_T(0)·θ_S が cl_L(p) を消すかを、与えられた T ごとに調べる"""
    _require_odd(p)
    G = datum.group
    verdict = CheckVerdict("brumer", STATUS_PASS, p, assumptions=list(datum.assumptions))
    try:
        cl = load_module(datum, "class_group", p, precision, precision_cap)
    except PrecisionTooLow as exc:
        return replace(verdict, status=STATUS_UNDECIDED, precision=exc.precision, reason=str(exc))
    verdict.precision = cl.precision
    verdict.witnesses["class_group"] = cl.to_json()
    minus_only = datum.class_group.get("part", "full") == "minus"
    if minus_only:
        verdict.witnesses["class_group_part"] = "minus"
        if not cl.is_trivial() and not cl.is_minus_module(datum.j):
            raise PresentationError("class_group は part=minus なのに j が −1 で作用していません")
    if cl.is_trivial():
        verdict.reason = "cl_L(p)⁻ = 0" if minus_only else "cl_L(p) = 0"
        return verdict

    x = safe_denominator(G, p)
    certificate = denominator_certificate(x, p, sample_size, seed)
    verdict.witnesses["x"] = certificate.to_json()

    t_sets = [[v.label for v in datum.t_places]] + [list(t) for t in datum.t_sets]
    base = with_t_set(datum, [])
    theta_s = stickelberger(base, jobs).theta
    verdict.witnesses["theta_S"] = theta_s.to_json()
    if minus_only and theta_s * e_minus_center(datum.j) != theta_s:
        # 偶成分が残ると cl_L(p)⁺ への作用も要る
        return replace(verdict, status=STATUS_NOT_CHECKABLE,
                       reason="θ_S の偶成分が 0 でなく、cl_L(p) のマイナス部分だけでは判定できません")
    checks = []
    for labels in t_sets:
        current = with_t_set(datum, labels)
        hyp = check_hyp(current, p)
        entry = {"T": labels, "hyp": hyp.to_json()}
        if not hyp.passed:
            entry["result"] = "skipped (Hyp(S,T) 不成立)"
            checks.append(entry)
            continue
        y = x * delta_t_element(current) * theta_s
        report = integrality_report(y, "Z_p[G]", p)
        entry["x_delta_theta"] = y.to_json()
        entry["integrality"] = report.to_json()
        if report.verdict != STATUS_PASS:
            entry["result"] = STATUS_FAIL
            verdict.status = STATUS_FAIL
            checks.append(entry)
            continue
        result = cl.annihilated_by(y)
        entry["result"] = STATUS_PASS if result.annihilates else STATUS_FAIL
        if not result.annihilates:
            entry["witness"] = result.witness
            verdict.status = STATUS_FAIL
        checks.append(entry)
    verdict.premises = checks
    verdict.witnesses["T_sets_note"] = "𝔄_S は列挙した T 集合の δ_T だけで生成（打ち切り）"
    if not any(entry["result"] in (STATUS_PASS, STATUS_FAIL) for entry in checks):
        verdict.status = STATUS_NOT_CHECKABLE
        verdict.reason = "Hyp(S,T) を満たす T がありません"
    debug_log(f"Brumer 検証: {datum.name}, p={p} -> {verdict.status}")
    return verdict


# ============================================================================
# (双対) 強 Brumer–Stark
# ============================================================================
def _theta_for_minus_check(datum: ExtensionDatum, p: int, jobs: int) -> StickelbergerResult:
    above_p = [v for v in datum.places if not v.infinite and v.residue_characteristic == p]
    if above_p and all(v.in_s for v in above_p):
        return p_adic_stickelberger(datum, p, jobs=jobs)
    return stickelberger(datum, jobs)


def dual_sbs_check(datum: ExtensionDatum, p: int, precision: int = 20, precision_cap: int = 64,
                   unit_bound: int = 6, theta_scale: Fraction = Fraction(1), dual: bool = True,
                   jobs: int = 1) -> CheckVerdict:
    """(θ_{p,S}^T)^♯ ∈ Fitt^max((A_L^T)^∨)（dual=False なら θ ∈ Fitt(A_L^T)）"""
    _require_odd(p)
    mode = "dual-sbs" if dual else "strong-bs"
    verdict = CheckVerdict(mode, STATUS_PASS, p, assumptions=list(datum.assumptions))
    hyp = check_hyp(datum, p)
    verdict.premises.append({"name": "Hyp(S,T)", **hyp.to_json()})
    if not hyp.passed:
        return replace(verdict, status=STATUS_NOT_CHECKABLE, reason="Hyp(S,T) が成り立ちません")
    j = datum.j
    try:
        key = "minus_module" if datum.minus_module is not None else "ray_class_group"
        module = load_module(datum, key, p, precision, precision_cap)
    except PrecisionTooLow as exc:
        return replace(verdict, status=STATUS_UNDECIDED, precision=exc.precision, reason=str(exc))
    if not module.is_minus_module(j):
        raise PresentationError(f"{key} は j が −1 で作用する加群ではありません（A_L^T を与えてください）")
    target = module.pontryagin_dual() if dual else module
    presentation = target.derive_presentation(minus=j)
    fitt = fitting_of_presentation(presentation, jobs)
    verdict.witnesses["module"] = module.to_json()
    verdict.witnesses["presentation"] = presentation.to_json()
    verdict.witnesses["fitting"] = {"kind": fitt.kind, "generators": [f.to_json() for f in fitt.generators]}

    theta = _theta_for_minus_check(datum, p, jobs)
    verdict.witnesses["theta"] = {"kind": theta.kind, "provenance": theta.provenance,
                                  "value": theta.theta.to_json()}
    z = theta.theta.sharp() if dual else theta.theta
    z = z * e_minus_center(j) * CenterElement.scalar(datum.group, Fraction(theta_scale))
    if theta_scale != 1:
        verdict.witnesses["theta_scale"] = str(Fraction(theta_scale))
    result = member_up_to_units(fitt, z, bound=unit_bound, cap=precision_cap)
    verdict.witnesses["membership"] = result.to_json()
    verdict.precision = result.precision
    if result.status == MEMBER:
        verdict.status = STATUS_PASS
    elif result.status == UNDECIDED:
        verdict.status = STATUS_UNDECIDED
        verdict.reason = f"精度 {result.precision} で判定できません"
    elif result.status == UNDECIDED_AT_BOUND and fitt.kind == KIND_EXACT:
        verdict.status = STATUS_FAIL
        verdict.reason = f"長さ {unit_bound} 以下の単元の語では Fitting 格子に入りません（non-member-at-bound）"
    else:
        verdict.status = STATUS_UNDECIDED
        verdict.reason = "Fitting 不変量が下界としてしか得られず、非所属を結論できません"
    debug_log(f"{mode} 検証: {datum.name}, p={p} -> {verdict.status}")
    return verdict


# ============================================================================
# Brumer–Stark の反単数
# ============================================================================
def _p_part_coordinates(data: dict, vector: Sequence, p: int) -> List[int]:
    """不変因子すべての座標で与えた類を、p 部分の座標に落とす"""
    factors = [int(d) for d in data["invariant_factors"]]
    if len(vector) != len(factors):
        raise InputError(f"class の長さ {len(vector)} が不変因子の個数 {len(factors)} と一致しません",
                         "/bs_data/class")
    return [int(v) for v, d in zip(vector, factors) if d % p == 0]


def _is_integral(x: GroupRingElement) -> bool:
    return all(Fraction(c).denominator == 1 for c in x.coeffs)


def bs_antiunit_check(datum: ExtensionDatum, p: int, precision: int = 20,
                      precision_cap: int = 64, jobs: int = 1) -> CheckVerdict:
    """𝔞^{x·ω_L·θ_S} = (α), α^{1+j} = 1 を類と付値の帳簿の上で確かめる

    bs_data:
        prime:            完全分解する素点のラベル（L の素イデアル 𝔓 を固定）
        ideal:            𝔞 = 𝔓^a の指数 a ∈ ℤ[G]（群環の元の JSON）
        class:            𝔞 の類（class_group 加群の座標）
        alpha_valuations: α の σ𝔓 での付値（群環の元の JSON）
        alpha_T_valuations, z: 任意。与えられれば α^{zδ_T} = α_T^{zω_L} も確かめる
    """
    _require_odd(p)
    G = datum.group
    data = datum.bs_data
    if not data or "ideal" not in data:
        raise NotCheckable("bs_data.ideal（𝔞 の指数）がありません")
    verdict = CheckVerdict("bs", STATUS_PASS, p, assumptions=list(datum.assumptions))
    try:
        cl = load_module(datum, "class_group", p, precision, precision_cap)
    except PrecisionTooLow as exc:
        return replace(verdict, status=STATUS_UNDECIDED, precision=exc.precision, reason=str(exc))
    verdict.precision = cl.precision

    x = safe_denominator(G, p)
    omega = omega_l(datum)
    theta_s = stickelberger(with_t_set(datum, []), jobs).theta
    y = x * omega * theta_s
    verdict.witnesses["x"] = x.to_json()
    verdict.witnesses["omega_L"] = omega.to_json()
    verdict.witnesses["exponent"] = y.to_json()

    # 類の零化（常に検証する）
    if "class" in data:
        vector = _p_part_coordinates(datum.class_group, data["class"], p)
        image = [int(v) for v in cl.act_center(y).dot(np.array(vector, dtype=object)) % cl.modulus] if cl.rank else []
        killed = cl.is_zero(image)
        verdict.premises.append({"name": "class-killed", "holds": killed})
        if not killed:
            verdict.status = STATUS_FAIL
            verdict.reason = "𝔞^{x ω_L θ_S} の類が p 部分で自明になりません"
            return verdict
    else:
        killed = cl.annihilated_by(y).annihilates
        verdict.premises.append({"name": "class-group-killed", "holds": killed})
        if not killed:
            verdict.status = STATUS_FAIL
            verdict.reason = "x ω_L θ_S が cl_L(p) を消しません"
            return verdict

    a = group_ring_element_from_json(G, data["ideal"], "/bs_data/ideal").to_rational()
    expected = a * y.to_element()
    verdict.witnesses["ideal_valuations"] = expected.to_json()
    if not _is_integral(expected):
        verdict.status = STATUS_FAIL
        verdict.reason = "a·x·ω_L·θ_S が ℤ[G] に入りません"
        return verdict
    if "alpha_valuations" not in data:
        verdict.status = STATUS_NOT_CHECKABLE
        verdict.reason = "単項性は類の上で確かめましたが、生成元 α の付値データ（alpha_valuations）がありません"
        return verdict

    alpha = group_ring_element_from_json(G, data["alpha_valuations"], "/bs_data/alpha_valuations").to_rational()
    matches = alpha == expected
    verdict.premises.append({"name": "(alpha) = a^(x omega theta)", "holds": matches})
    ring = alpha.ring
    one_plus_j = GroupRingElement.one(G, ring) + GroupRingElement.basis(G, datum.j.index, ring)
    anti_unit = (alpha * one_plus_j).is_zero()
    verdict.premises.append({"name": "alpha^(1+j) = 1 (valuations)", "holds": anti_unit})
    if not (matches and anti_unit):
        verdict.status = STATUS_FAIL
        verdict.reason = "α の付値が期待値と一致しないか、反単数になりません"
        return verdict

    if "alpha_T_valuations" in data:
        z = group_ring_element_from_json(G, data["z"], "/bs_data/z").to_rational() if "z" in data else x.to_element()
        alpha_t = group_ring_element_from_json(G, data["alpha_T_valuations"], "/bs_data/alpha_T_valuations").to_rational()
        left = alpha * z * delta_t_element(datum).to_element()
        right = alpha_t * z * omega.to_element()
        holds = left == right
        verdict.premises.append({"name": "alpha^(z delta_T) = alpha_T^(z omega_L)", "holds": holds})
        if not holds:
            verdict.status = STATUS_FAIL
            verdict.reason = "α^{zδ_T(0)} = α_T^{zω_L} が付値の上で成り立ちません"
    return verdict


# ============================================================================
# 射類群の整合性
# ============================================================================
def ray_class_consistency(datum: ExtensionDatum, p: int, precision: int = 20,
                          precision_cap: int = 64) -> dict:
    """|cl(p)| | |cl^T(p)| かつ |cl^T(p)| | |cl(p)|·|(O_L/𝔐_T)^×|_p"""
    G = datum.group
    cl = load_module(datum, "class_group", p, precision, precision_cap)
    ray = load_module(datum, "ray_class_group", p, precision, precision_cap)
    parts = [datum.class_group.get("part", "full"), datum.ray_class_group.get("part", "full")]
    if parts[0] != parts[1]:
        raise NotCheckable(f"class_group（{parts[0]}）と ray_class_group（{parts[1]}）の範囲が違います")
    residue_units = 1
    for v in datum.t_places:
        if v.frobenius is None:
            raise NotCheckable(f"T の素点 {v.label} のフロベニウスがありません")
        f = int(G.element_orders[v.frobenius])
        residue_units *= (v.norm ** f - 1) ** (G.order // f)
    unit_p = p ** (valuation(residue_units, p) or 0)
    lower = ray.order % cl.order == 0
    upper = (cl.order * unit_p) % ray.order == 0
    return {
        "status": STATUS_PASS if lower and upper else STATUS_FAIL,
        "cl_p_order": str(cl.order),
        "ray_p_order": str(ray.order),
        "residue_units_p_part": str(unit_p),
        "cl_divides_ray": lower,
        "ray_divides_bound": upper,
    }
