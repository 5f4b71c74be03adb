"""各コマンドの処理の流れをまとめるエンジン"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from fractions import Fraction
from typing import Dict, List, Optional

from tools.characters import character_table, is_monomial, table_to_json
from tools.classifier import classify_extension, classify_theorem, verify_verdict
from tools.conjectures import (
    STATUS_NOT_CHECKABLE,
    STATUS_UNDECIDED,
    CheckVerdict,
    bs_antiunit_check,
    brumer_check,
    check_hyp,
    dual_sbs_check,
    ray_class_consistency,
)
from tools.cyclotomic import format_fraction
from tools.groups import FiniteGroup, frobenius_structure, known_group_name, quotient
from tools.l_values import (
    ExtensionDatum,
    integrality_report,
    p_adic_stickelberger,
    stickelberger,
)
from utils.config import RunConfig
from utils.debug import debug_banner, debug_log, set_debug
from utils.errors import AlgebraError, IdentityUnproven, NotCheckable, PrecisionTooLow
from utils.io import corpus_listing, load_extension, load_group

CHECK_MODES = ("brumer", "bs", "dual-sbs", "strong-bs")


def format_group_ring(theta, j_index: int) -> str:
    """θ を群の元の一次結合として書く（j は "j"、単位元は "1"）"""
    G = theta.group
    x = theta.to_element()
    parts = []
    for g in range(G.order):
        c = x.coefficient(g)
        if not c:
            continue
        value = Fraction(c)
        label = "1" if g == 0 else ("j" if g == j_index else G.label(g))
        magnitude = format_fraction(abs(value))
        if label == "1":
            term = magnitude
        else:
            term = label if abs(value) == 1 else f"{magnitude}*{label}"
        sign = "-" if value < 0 else "+"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text


class BrumerStarkEngine:
    """群・拡大データを受け取り、各コマンドの結果を辞書で返す"""

    def __init__(self, config: dict = None):
        """エンジンを初期化

        Args:
            config: 設定の辞書（既定値を上書き）
        """
        self.config = self._initialize_config(config)
        set_debug(self.config.verbose)
        debug_log(f"エンジン初期化: {self.config.echo()}")

    def _initialize_config(self, config: dict = None) -> RunConfig:
        default_config = RunConfig().model_dump()
        if config:
            default_config.update({k: v for k, v in config.items() if v is not None})
        return RunConfig(**default_config)

    def _envelope(self, command: str, result: dict) -> dict:
        return {"command": command, "config": self.config.echo(), "result": result}

    # ------------------------------------------------------------------
    # 入力
    # ------------------------------------------------------------------
    def group(self, name_or_path: str) -> FiniteGroup:
        return load_group(name_or_path, self.config)

    def extension(self, name_or_path: str) -> ExtensionDatum:
        return load_extension(name_or_path, self.config)

    # ------------------------------------------------------------------
    # chartable
    # ------------------------------------------------------------------
    def chartable(self, group: FiniteGroup) -> dict:
        debug_banner("chartable")
        table = character_table(group)
        structure = frobenius_structure(group)
        result = {
            "group": {"name": group.name or known_group_name(group) or "?", "order": group.order,
                      "isomorphism_hint": known_group_name(group)},
            "table": table_to_json(table),
            "characters": [chi.to_json() for chi in table],
            "degrees": table.degrees,
            "sum_of_squares": sum(d * d for d in table.degrees),
            "frobenius": structure.summary() if structure else None,
            "monomial": is_monomial(group, self.config.subgroup_cap).is_monomial,
        }
        return self._envelope("chartable", result)

    # ------------------------------------------------------------------
    # classify
    # ------------------------------------------------------------------
    def classify(self, group: FiniteGroup, p: int, N: Optional[List[str]] = None,
                 assumptions: Optional[List[dict]] = None, base_field: str = "Q") -> dict:
        debug_banner("classify")
        kernel = group.subgroup_from_cycles(N, "/N") if N else None
        verdict = classify_theorem(group, p, kernel, base_field, assumptions or [], self.config.subgroup_cap)
        rechecked = verify_verdict(group, verdict, self.config.subgroup_cap)
        return self._envelope("classify", {"verdict": verdict.to_json(), "rechecked": rechecked})

    def classify_extension(self, datum: ExtensionDatum, p: int, N: Optional[List[str]] = None,
                           assumptions: Optional[List[dict]] = None) -> dict:
        debug_banner("classify (extension)")
        verdict = classify_extension(datum, p, N, assumptions or [], self.config.subgroup_cap)
        G_plus, _ = quotient(datum.group, datum.group.subgroup([datum.j.index]))
        rechecked = verify_verdict(G_plus, verdict, self.config.subgroup_cap)
        result = {"verdict": verdict.to_json(), "rechecked": rechecked, "extension": datum.summary()}
        return self._envelope("classify", result)

    # ------------------------------------------------------------------
    # stickelberger
    # ------------------------------------------------------------------
    def stickelberger(self, datum: ExtensionDatum, p: Optional[int] = None) -> dict:
        debug_banner("stickelberger")
        result = stickelberger(datum, self.config.jobs)
        reports = [integrality_report(result.theta, "Z[G]")]
        if p is not None:
            reports.append(integrality_report(result.theta, "Z_p[G]", p))
            reports.append(integrality_report(result.theta, "I-sample", p, self.config.sample_size, self.config.seed))
        output = {
            "extension": datum.summary(),
            "stickelberger": result.to_json(),
            "theta_text": format_group_ring(result.theta, datum.j.index),
            "integrality": [r.to_json() for r in reports],
            "hyp": check_hyp(datum, p).to_json(),
        }
        if p is not None:
            try:
                p_adic = p_adic_stickelberger(datum, p, self.config.subgroup_cap, self.config.jobs)
                output["p_adic"] = p_adic.to_json()
            except (NotCheckable, IdentityUnproven) as exc:
                output["p_adic"] = {"note": str(exc)}
        return self._envelope("stickelberger", output)

    # ------------------------------------------------------------------
    # check
    # ------------------------------------------------------------------
    def check(self, datum: ExtensionDatum, mode: str, p: int, assumptions: Optional[List[dict]] = None,
              theta_scale: Fraction = Fraction(1)) -> dict:
        debug_banner(f"check ({mode})")
        if assumptions:
            datum = replace(datum, assumptions=list(datum.assumptions) + list(assumptions))
        c = self.config
        try:
            if mode == "brumer":
                verdict = brumer_check(datum, p, c.precision, c.precision_cap, c.sample_size, c.seed, c.jobs)
            elif mode == "bs":
                verdict = bs_antiunit_check(datum, p, c.precision, c.precision_cap, c.jobs)
            elif mode in ("dual-sbs", "strong-bs"):
                verdict = dual_sbs_check(datum, p, c.precision, c.precision_cap, c.unit_bound,
                                         theta_scale, mode == "dual-sbs", c.jobs)
            else:
                raise NotCheckable(f"未知のモード: {mode}（{', '.join(CHECK_MODES)}）")
        except NotCheckable as exc:
            verdict = CheckVerdict(mode, STATUS_NOT_CHECKABLE, p, assumptions=list(datum.assumptions),
                                   reason=str(exc))
        except PrecisionTooLow as exc:
            verdict = CheckVerdict(mode, STATUS_UNDECIDED, p, assumptions=list(datum.assumptions),
                                   precision=exc.precision, reason=str(exc))
        if datum.class_group is not None and datum.ray_class_group is not None:
            try:
                verdict.witnesses["ray_class_consistency"] = ray_class_consistency(
                    datum, p, c.precision, c.precision_cap)
            except AlgebraError as exc:
                verdict.witnesses["ray_class_consistency"] = {"status": STATUS_NOT_CHECKABLE, "reason": str(exc)}
        return self._envelope("check", {"verdict": verdict.to_json(), "extension": datum.summary()})

    # ------------------------------------------------------------------
    # corpus / batch
    # ------------------------------------------------------------------
    def corpus_list(self) -> dict:
        return self._envelope("corpus", corpus_listing(self.config))

    def _run_task(self, task: Dict[str, object]) -> dict:
        command = str(task.get("command"))
        try:
            if command == "chartable":
                output = self.chartable(self.group(task["group"]))
            elif command == "classify":
                output = self.classify(self.group(task["group"]), int(task["p"]), task.get("N"),
                                       task.get("assumptions"))
            elif command == "stickelberger":
                output = self.stickelberger(self.extension(task["extension"]), task.get("p"))
            elif command == "check":
                output = self.check(self.extension(task["extension"]), task["mode"], int(task["p"]),
                                    task.get("assumptions"))
            else:
                return {"command": command, "success": False, "message": f"未知のコマンド: {command}"}
        except (AlgebraError, KeyError) as exc:
            return {"command": command, "success": False, "message": str(exc)}
        return {"command": command, "success": True, "output": output["result"]}

    def run_batch(self, tasks: List[Dict[str, object]]) -> dict:
        """独立なタスクを並列に実行し、入力順に結果を並べる"""
        debug_banner(f"batch ({len(tasks)} 件, jobs={self.config.jobs})")
        if self.config.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
                results = list(pool.map(self._run_task, tasks))
        else:
            results = [self._run_task(task) for task in tasks]
        return self._envelope("batch", {"results": results})
