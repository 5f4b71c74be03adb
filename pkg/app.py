"""非可換 Brumer–Stark 検証 - Streamlit UI"""
from fractions import Fraction

import pandas as pd
import streamlit as st

from engine.core import CHECK_MODES, BrumerStarkEngine
from engine.reports import STATUS_LABELS
from utils.errors import AlgebraError


# ============================================================================
# エンジン初期化
# ============================================================================
@st.cache_resource
def initialize_engine(precision: int, unit_bound: int) -> BrumerStarkEngine:
    """エンジンを初期化"""
    return BrumerStarkEngine({"precision": precision, "unit_bound": unit_bound})


def show_value(v) -> str:
    if isinstance(v, dict) and "coeffs" in v:
        return f"ζ_{v['conductor']}: [{', '.join(v['coeffs'])}]"
    return str(v)


# ============================================================================
# ページ設定
# ============================================================================
st.set_page_config(page_title="非可換 Brumer–Stark 検証", layout="wide")
st.title("非可換 Brumer–Stark 検証")
st.markdown("---")

with st.sidebar:
    st.subheader("設定")
    precision = st.number_input("p 進精度 k", min_value=1, max_value=64, value=20)
    unit_bound = st.number_input("単元の探索の深さ", min_value=0, max_value=12, value=6)

engine = initialize_engine(int(precision), int(unit_bound))

try:
    corpus = engine.corpus_list()["result"]
except AlgebraError as e:
    st.error(f"コーパスを読めません: {e}")
    st.stop()

group_names = [g["name"] for g in corpus["groups"]]
extension_names = [e["name"] for e in corpus["extensions"]]

tab_table, tab_classify, tab_theta, tab_check = st.tabs(["指標表", "適用できる結果", "Stickelberger 元", "予想の検証"])

# ============================================================================
# 指標表
# ============================================================================
with tab_table:
    name = st.selectbox("群", group_names, key="table_group")
    if name:
        try:
            result = engine.chartable(engine.group(name))["result"]
        except AlgebraError as e:
            st.error(str(e))
        else:
            table = result["table"]
            st.markdown(f"**{result['group']['name']}**（位数 {result['group']['order']}）")
            rows = {chi["label"]: [show_value(v) for v in chi["values"]] for chi in result["characters"]}
            frame = pd.DataFrame.from_dict(rows, orient="index", columns=table["class_representatives"])
            st.dataframe(frame)
            st.caption(f"類の大きさ: {table['class_sizes']} / Σχ(1)² = {result['sum_of_squares']}")
            st.markdown(f"単項群: {'はい' if result['monomial'] else 'いいえ'}")
            if result["frobenius"]:
                st.markdown(f"フロベニウス群（核の位数 {result['frobenius']['kernel']['order']}）")

# ============================================================================
# 適用できる結果
# ============================================================================
with tab_classify:
    with st.form("classify_form"):
        name = st.selectbox("G⁺", group_names, key="classify_group")
        p = st.number_input("p（奇素数）", min_value=3, value=3, step=2)
        kernel = st.text_input("N の生成元（空白区切りの巡回記法、省略可）")
        submitted = st.form_submit_button("判定")
    if submitted:
        try:
            N = kernel.split() or None
            result = engine.classify(engine.group(name), int(p), N)["result"]
        except AlgebraError as e:
            st.error(str(e))
        else:
            verdict = result["verdict"]
            st.success(f"判定: {verdict['result']}（{verdict['tag']}）")
            for candidate in verdict["candidates"]:
                st.markdown(f"{'○' if candidate['applicable'] else '×'} {candidate['result']} `{candidate['tag']}`")
                st.dataframe(pd.DataFrame(candidate["premises"])[["name", "holds", "source"]], hide_index=True)

# ============================================================================
# Stickelberger 元
# ============================================================================
with tab_theta:
    name = st.selectbox("拡大", extension_names, key="theta_extension")
    p_text = st.text_input("p（省略可）", key="theta_p")
    if name and st.button("計算", key="theta_button"):
        try:
            p = int(p_text) if p_text.strip() else None
            result = engine.stickelberger(engine.extension(name), p)["result"]
        except (AlgebraError, ValueError) as e:
            st.error(str(e))
        else:
            st.markdown(f"θ = `{result['theta_text']}`")
            rows = [{"χ": c["character"], "偶奇": c["parity"], "δ_T": show_value(c["delta_T"]),
                     "L_S(0,χ̌)": show_value(c["L_S"]["value"]), "由来": c["L_S"]["provenance"]}
                    for c in result["stickelberger"]["components"]]
            st.dataframe(pd.DataFrame(rows), hide_index=True)
            st.json(result["integrality"])
            st.markdown(f"Hyp(S,T): {'成立' if result['hyp']['passed'] else '不成立'}")

# ============================================================================
# 予想の検証
# ============================================================================
with tab_check:
    with st.form("check_form"):
        name = st.selectbox("拡大", extension_names, key="check_extension")
        mode = st.selectbox("モード", CHECK_MODES)
        p = st.number_input("p", min_value=3, value=3, step=2, key="check_p")
        scale = st.text_input("θ に掛ける有理数", value="1")
        submitted = st.form_submit_button("検証")
    if submitted:
        try:
            result = engine.check(engine.extension(name), mode, int(p), theta_scale=Fraction(scale))["result"]
        except (AlgebraError, ValueError, ZeroDivisionError) as e:
            st.error(str(e))
        else:
            verdict = result["verdict"]
            st.markdown(f"### {STATUS_LABELS.get(verdict['status'], verdict['status'])}")
            if verdict["reason"]:
                st.info(verdict["reason"])
            st.json(verdict)
