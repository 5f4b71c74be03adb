"""テキスト形式の出力テンプレート"""
from typing import Callable, Dict, List

import pandas as pd

REPORT_HEADERS = {
    "chartable": "【指標表】",
    "classify": "【適用できる結果の判定】",
    "stickelberger": "【Stickelberger 元】",
    "check": "【予想の検証】",
    "corpus": "【コーパス】",
    "batch": "【一括実行】",
}

STATUS_LABELS = {
    "pass": "成立",
    "fail": "不成立",
    "undecided": "判定不能",
    "not-checkable": "検証不能（データ不足）",
}


def _frame(rows: List[dict]) -> str:
    if not rows:
        return "（なし）"
    return pd.DataFrame(rows).to_string(index=False)


def _config_lines(config: dict) -> List[str]:
    return ["【設定】", "  " + ", ".join(f"{k}={v}" for k, v in sorted(config.items()))]


def _value(v) -> str:
    if isinstance(v, dict) and "coeffs" in v:
        return f"ζ_{v['conductor']}: [{', '.join(v['coeffs'])}]"
    return str(v)


def render_chartable(result: dict) -> List[str]:
    table = result["table"]
    reps = table["class_representatives"]
    lines = [f"群: {result['group']['name']}（位数 {result['group']['order']}）",
             f"値の導手: {table['conductor']}", ""]
    rows = []
    for chi in result["characters"]:
        row = {"χ": chi["label"]}
        for rep, value in zip(reps, chi["values"]):
            row[rep] = _value(value)
        rows.append(row)
    lines.append(_frame([{"代表元": r, "類の大きさ": s} for r, s in zip(reps, table["class_sizes"])]))
    lines.append("")
    lines.append(_frame(rows))
    lines.append("")
    lines.append(f"Σχ(1)² = {result['sum_of_squares']}")
    if result.get("frobenius"):
        lines.append(f"フロベニウス群: 核の位数 {result['frobenius']['kernel']['order']}, "
                     f"補群の位数 {result['frobenius']['complement']['order']}")
    lines.append(f"単項群: {'はい' if result['monomial'] else 'いいえ'}")
    return lines


def render_classify(result: dict) -> List[str]:
    verdict = result["verdict"]
    lines = [f"群: {verdict['group']}, p = {verdict['p']}, 基礎体 {verdict['base_field']}",
             f"判定: {verdict['result']}（{verdict['tag']}）", f"再検証: {'一致' if result['rechecked'] else '不一致'}", ""]
    for candidate in verdict["candidates"]:
        mark = "○" if candidate["applicable"] else "×"
        lines.append(f"{mark} {candidate['result']}（{candidate['tag']}）")
        for premise in candidate["premises"]:
            lines.append(f"    [{'o' if premise['holds'] else 'x'}] {premise['name']}（{premise['source']}）")
    if verdict["assumptions"]:
        lines.append("")
        lines.append("【仮定】")
        lines.extend(f"  - {a['kind']}: {a.get('note', '')}" for a in verdict["assumptions"])
    return lines


def render_stickelberger(result: dict) -> List[str]:
    theta = result["stickelberger"]
    lines = [f"拡大: {result['extension']['name']}",
             f"S = {result['extension']['S']}, T = {result['extension']['T']}", ""]
    lines.append(f"θ_S^T = {result['theta_text']}")
    if theta["all_characters_even"]:
        lines.append("すべての指標が偶なので θ = 0（L(0, χ) が消える）")
    lines.append("")
    rows = [{"χ": c["character"], "偶奇": c["parity"], "δ_T": _value(c["delta_T"]),
             "L_S(0,χ̌)": _value(c["L_S"]["value"]), "由来": c["L_S"]["provenance"]}
            for c in theta["components"]]
    lines.append(_frame(rows))
    lines.append("")
    lines.append("【整性】")
    for report in result["integrality"]:
        lines.append(f"  {report['mode']}: {report['verdict']} {report['note']}".rstrip())
    lines.append(f"【Hyp(S,T)】 {'成立' if result['hyp']['passed'] else '不成立'}")
    lines.extend(f"  - {reason}" for reason in result["hyp"]["reasons"])
    if "p_adic" in result:
        lines.append(f"【p 進 θ】 {result['p_adic'].get('provenance', result['p_adic'].get('note', ''))}")
    return lines


def render_check(result: dict) -> List[str]:
    verdict = result["verdict"]
    lines = [f"拡大: {result['extension']['name']}, p = {verdict['p']}, モード {verdict['mode']}",
             f"結果: {verdict['status']}（{STATUS_LABELS.get(verdict['status'], '')}）"]
    if verdict["reason"]:
        lines.append(f"理由: {verdict['reason']}")
    if verdict["precision"]:
        lines.append(f"精度: p^{verdict['precision']}")
    if verdict["premises"]:
        lines.append("")
        lines.append("【前提と途中結果】")
        for premise in verdict["premises"]:
            label = premise.get("name") or f"T = {premise.get('T')}"
            status = premise.get("holds", premise.get("result", premise.get("passed")))
            lines.append(f"  - {label}: {status}")
    if verdict["assumptions"]:
        lines.append("【仮定】")
        lines.extend(f"  - {a['kind']}: {a.get('note', '')}" for a in verdict["assumptions"])
    return lines


def render_corpus(result: dict) -> List[str]:
    lines = ["【群】", _frame(result["groups"]), "", "【拡大】", _frame(result["extensions"])]
    return lines


def render_batch(result: dict) -> List[str]:
    lines = []
    for i, entry in enumerate(result["results"]):
        state = "成功" if entry["success"] else f"失敗: {entry['message']}"
        lines.append(f"{i + 1}. {entry['command']}: {state}")
    return lines


RENDERERS: Dict[str, Callable[[dict], List[str]]] = {
    "chartable": render_chartable,
    "classify": render_classify,
    "stickelberger": render_stickelberger,
    "check": render_check,
    "corpus": render_corpus,
    "batch": render_batch,
}


def render_text(output: dict) -> str:
    """コマンドの出力（JSON と同じ辞書）をテキストにする"""
    command = output["command"]
    lines = [REPORT_HEADERS.get(command, f"【{command}】"), ""]
    lines.extend(RENDERERS[command](output["result"]))
    lines.append("")
    lines.extend(_config_lines(output["config"]))
    return "\n".join(lines) + "\n"
