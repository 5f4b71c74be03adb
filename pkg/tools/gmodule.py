"""有限 ℤ_p[G] 加群（類群 cl_L(p)・A_L^T などの p 部分）

加群は (ℤ/p^k)^n を関係式の張る部分群で割った商として持ち、
群の元 g の作用は列ベクトルに左から掛ける行列 A_g で表す。
p^{k-1} が加群を消す（精度が足りている）ことを構成時に確認する。
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from tools.group_ring import CenterElement, CoefficientRing, GroupRingElement, GroupRingMatrix, MinusRing
from tools.cyclotomic import CyclotomicNumber
from tools.groups import CentralInvolution, FiniteGroup
from tools.padic import howell_express, howell_form, howell_residue, kernel_rows, log_order, reduce_rational, valuation
from utils.debug import debug_log
from utils.errors import InputError, NotCheckable, PrecisionTooLow, PresentationError


@dataclass
class AnnihilationResult:
    """作用させた元が加群を消すかどうかと、消さない場合の証拠"""
    annihilates: bool
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"annihilates": self.annihilates, "witness": self.witness}


def _matmul(A: np.ndarray, B: np.ndarray, modulus: int) -> np.ndarray:
    return np.array(A.dot(B), dtype=object) % modulus


def _identity(n: int) -> np.ndarray:
    M = np.zeros((n, n), dtype=object)
    for i in range(n):
        M[i, i] = 1
    return M


class GModule:
    """M = (ℤ/p^k)^n / R に G が行列で作用する有限加群"""

    def __init__(self, group: FiniteGroup, p: int, rank: int, relations: Sequence[Sequence[int]],
                 action: Dict[int, Sequence[Sequence[int]]], precision: int = 20, label: str = ""):
        self.group = group
        self.p = int(p)
        self.rank = int(rank)
        self.precision = int(precision)
        self.modulus = self.p ** self.precision
        self.label = label
        self.relation_rows = howell_form(relations, self.p, self.precision, self.rank) if self.rank else []
        self._check_resolved()
        given = {}
        for g, matrix in action.items():
            M = np.array([[int(x) % self.modulus for x in row] for row in matrix], dtype=object)
            if self.rank and M.shape != (self.rank, self.rank):
                raise InputError(f"作用行列の大きさが {self.rank}×{self.rank} ではありません", f"/action/{group.label(g)}")
            given[int(g)] = M if self.rank else np.zeros((0, 0), dtype=object)
        self.matrices = self._close_action(given)
        self._check_action(given)

    # ------------------------------------------------------------------
    # 構成
    # ------------------------------------------------------------------
    @classmethod
    def from_invariant_factors(cls, group: FiniteGroup, p: int, factors: Sequence[int],
                               action: Dict[int, Sequence[Sequence[int]]], precision: int = 20,
                               precision_cap: int = 64, label: str = "") -> "GModule":
        """⊕ ℤ/d_i の p 部分（p と素な座標は落とす）"""
        exponents = [valuation(d, p) if d else None for d in factors]
        if any(e is None for e in exponents):
            raise InputError("不変因子 0（無限巡回成分）は扱えません", "/invariant_factors")
        keep = [i for i, e in enumerate(exponents) if e > 0]
        top = max((exponents[i] for i in keep), default=0)
        k = max(int(precision), top + 1)
        if k > precision_cap:
            raise PrecisionTooLow(f"指数 p^{top} を扱うには精度 {k} が必要です（上限 {precision_cap}）", k)
        relations = []
        for pos, i in enumerate(keep):
            relations.append([p ** exponents[i] if t == pos else 0 for t in range(len(keep))])
        reduced = {g: [[int(matrix[i][t]) for t in keep] for i in keep] for g, matrix in action.items()}
        debug_log(f"加群 {label or '?'}: p={p}, 不変因子の p 部分 {[exponents[i] for i in keep]}, 精度 {k}")
        return cls(group, p, len(keep), relations, reduced, precision=k, label=label)

    @classmethod
    def from_presentation(cls, h: GroupRingMatrix, p: int, minus: Optional[CentralInvolution] = None,
                          precision: int = 20, label: str = "") -> "GModule":
        """表示行列 h（行が関係式）の余核 𝔄^b / 𝔄^a h"""
        G = h.group
        a, b = h.shape
        k = precision
        if minus is not None:
            ring = MinusRing(minus, p, k)
            basis = ring.representatives
            position = ring.position
        else:
            ring = None
            basis = list(range(G.order))
            position = {g: (g, 1) for g in range(G.order)}
        width = len(basis)
        zmod = CoefficientRing.zmod(p, k)
        relations = []
        for i in range(a):
            row = [h[i, t].to_ring(zmod) for t in range(b)]
            for g in range(G.order):
                vector = [0] * (b * width)
                for t, entry in enumerate(row):
                    for x, c in enumerate(entry.coeffs):
                        if c:
                            slot, sign = position[G.mul(g, x)]
                            vector[t * width + slot] += sign * int(c)
                relations.append(vector)
        action = {}
        for s in G.generators:
            M = np.zeros((b * width, b * width), dtype=object)
            for t in range(b):
                for col, x in enumerate(basis):
                    slot, sign = position[G.mul(s, x)]
                    M[t * width + slot, t * width + col] = sign
            action[s] = M.tolist()
        return cls(G, p, b * width, relations, action, precision=k, label=label)

    def _check_resolved(self) -> None:
        """p^{k-1} e_i ∈ R̄ を確認（成り立たなければ精度不足か無限加群）"""
        top = self.p ** (self.precision - 1)
        for i in range(self.rank):
            e = [top if t == i else 0 for t in range(self.rank)]
            if any(howell_residue(self.relation_rows, e, self.p, self.precision)):
                raise PrecisionTooLow(
                    f"精度 {self.precision} では加群が確定しません（指数が p^{self.precision - 1} を超えるか無限加群）",
                    self.precision,
                )

    def _close_action(self, given: Dict[int, np.ndarray]) -> Dict[int, np.ndarray]:
        G = self.group
        matrices = {0: _identity(self.rank)}
        queue = [0]
        while queue:
            g = queue.pop(0)
            for s, A in given.items():
                h = G.mul(g, s)
                if h not in matrices:
                    matrices[h] = _matmul(matrices[g], A, self.modulus)
                    queue.append(h)
        if len(matrices) != G.order:
            raise InputError("作用が与えられた元で群全体が生成されません", "/action")
        return matrices

    def _check_action(self, given: Dict[int, np.ndarray]) -> None:
        G = self.group
        for s, A in given.items():
            for row in self.relation_rows:
                image = _matmul(A, np.array(row, dtype=object), self.modulus)
                if not self.is_zero(image):
                    raise InputError(f"{G.label(s)} の作用が関係式を保ちません", "/action")
            for g, B in self.matrices.items():
                diff = (self.matrices[G.mul(g, s)] - _matmul(B, A, self.modulus)) % self.modulus
                for col in range(self.rank):
                    if not self.is_zero(diff[:, col]):
                        raise InputError("作用行列が群の関係式を満たしません", "/action")

    # ------------------------------------------------------------------
    # 基本量
    # ------------------------------------------------------------------
    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(howell_residue(self.relation_rows, [int(v) for v in x], self.p, self.precision))

    def log_order(self) -> int:
        """log_p |M|"""
        return self.rank * self.precision - log_order(self.relation_rows, self.p, self.precision)

    @property
    def order(self) -> int:
        return self.p ** self.log_order()

    def is_trivial(self) -> bool:
        return self.log_order() == 0

    def invariant_factors(self) -> List[int]:
        """M ≅ ⊕ ℤ/p^{m_i} の m_i（降順）

        a_t = log_p |M / p^t M| = Σ min(m_i, t) から a_t − a_{t−1} = #{i : m_i ≥ t}。
        """
        total = self.log_order()
        counts = []
        previous = 0
        t = 0
        while previous < total:
            t += 1
            rows = [list(r) for r in self.relation_rows]
            rows += [[self.p ** t if c == i else 0 for c in range(self.rank)] for i in range(self.rank)]
            form = howell_form(rows, self.p, self.precision, self.rank)
            current = self.rank * self.precision - log_order(form, self.p, self.precision)
            counts.append(current - previous)
            previous = current
        factors = []
        for t, count in enumerate(counts, start=1):
            following = counts[t] if t < len(counts) else 0
            factors.extend([t] * (count - following))
        return sorted(factors, reverse=True)

    def exponent(self) -> int:
        factors = self.invariant_factors()
        return factors[0] if factors else 0

    def action_matrix(self, g: int) -> np.ndarray:
        return self.matrices[int(g)]

    # ------------------------------------------------------------------
    # 作用
    # ------------------------------------------------------------------
    def act(self, x: GroupRingElement) -> np.ndarray:
        """Σ x_g A_g（係数は p 整であること）"""
        total = np.zeros((self.rank, self.rank), dtype=object)
        for g, c in enumerate(x.coeffs):
            if not c:
                continue
            if x.ring.kind == "zmod":
                scalar = int(c)
            else:
                if isinstance(c, CyclotomicNumber):
                    if not c.is_rational():
                        raise NotCheckable(f"係数 {c} が有理数でないため作用させられません")
                    c = c.to_fraction()
                value = Fraction(c)
                if value.denominator % self.p == 0:
                    raise NotCheckable(f"係数 {value} が {self.p} 整でないため作用させられません")
                scalar = reduce_rational(value, self.p, self.precision)
            total = (total + scalar * self.matrices[g]) % self.modulus
        return total

    def act_center(self, z: CenterElement) -> np.ndarray:
        """中心の元を類和の作用の一次結合として作用させる"""
        coords = z.rational_class_coordinates()
        G = self.group
        total = np.zeros((self.rank, self.rank), dtype=object)
        for i, c in enumerate(coords):
            if not c:
                continue
            if c.denominator % self.p == 0:
                raise NotCheckable(f"類和座標 {c} が {self.p} 整でないため作用させられません")
            scalar = reduce_rational(c, self.p, self.precision)
            class_sum = np.zeros((self.rank, self.rank), dtype=object)
            for g in G.classes[i]:
                class_sum = class_sum + self.matrices[g]
            total = (total + scalar * class_sum) % self.modulus
        return total

    def annihilated_by_matrix(self, X: np.ndarray) -> AnnihilationResult:
        for i in range(self.rank):
            image = [int(v) % self.modulus for v in X[:, i]]
            if not self.is_zero(image):
                return AnnihilationResult(False, {"generator": i, "image": image})
        return AnnihilationResult(True)

    def annihilated_by(self, z) -> AnnihilationResult:
        """z（群環の元または中心の元）が M を消すか"""
        X = self.act_center(z) if isinstance(z, CenterElement) else self.act(z)
        return self.annihilated_by_matrix(X)

    def is_minus_module(self, j: CentralInvolution) -> bool:
        """j が −1 で作用するか"""
        A = self.matrices[j.index]
        return self.annihilated_by_matrix((A + _identity(self.rank)) % self.modulus).annihilates

    # ------------------------------------------------------------------
    # 双対・表示
    # ------------------------------------------------------------------
    def pontryagin_dual(self) -> "GModule":
        """M^∨ = Hom(M, ℚ_p/ℤ_p)、作用は (g f)(m) = f(g⁻¹ m)

        f は R に直交する (ℤ/p^k)^n の行ベクトルとして実現する。
        """
        p, k = self.p, self.precision
        if self.is_trivial():
            return GModule(self.group, p, 0, [], {g: [] for g in self.group.generators}, k, f"{self.label}^∨")
        images = []
        for i in range(self.rank):
            images.append([row[i] for row in self.relation_rows])
        functionals = kernel_rows(images, [], p, k)
        W = howell_form(functionals, p, k, self.rank)
        s = len(W)
        relations = kernel_rows(W, [], p, k)
        G = self.group
        action = {}
        for g in G.generators:
            A_inv = self.matrices[int(G.inverse[g])]
            D = np.zeros((s, s), dtype=object)
            for col, w in enumerate(W):
                image = _matmul(A_inv.T, np.array(w, dtype=object), self.modulus)
                coefficients = howell_express(W, [int(v) for v in image], p, k)
                if coefficients is None:
                    raise PresentationError("双対への作用が閉じていません")
                for row, c in enumerate(coefficients):
                    D[row, col] = c
            action[g] = D.tolist()
        dual = GModule(G, p, s, relations, action, precision=k, label=f"{self.label}^∨" if self.label else "")
        if dual.log_order() != self.log_order():
            raise PresentationError("双対加群の位数が一致しません")
        return dual

    def generators_over_ring(self, minus: Optional[CentralInvolution]) -> List[int]:
        """𝔄 加群としての生成元（標準基底から貪欲に選ぶ）"""
        chosen: List[int] = []
        span = [list(r) for r in self.relation_rows]
        form = howell_form(span, self.p, self.precision, self.rank) if span else []
        elements = self._ring_basis(minus)
        for i in range(self.rank):
            e = [int(t == i) for t in range(self.rank)]
            if not any(howell_residue(form, e, self.p, self.precision)):
                continue
            chosen.append(i)
            for g in elements:
                span.append([int(v) for v in self.matrices[g][:, i]])
            form = howell_form(span, self.p, self.precision, self.rank)
        return chosen

    def _ring_basis(self, minus: Optional[CentralInvolution]) -> List[int]:
        if minus is None:
            return list(range(self.group.order))
        return MinusRing(minus, self.p, self.precision).representatives

    def derive_presentation(self, minus: Optional[CentralInvolution] = None):
        """𝔄^a →h 𝔄^b → M → 0 を求める（𝔄 = ℤ_p[G] または ℤ_p[G]_−）

        核は ℤ/p^k で計算し、整数に持ち上げた生成元で十分（p^{k-1} が M を消すため）。
        """
        from tools.fitting import PresentedModule

        G = self.group
        p, k = self.p, self.precision
        if minus is not None and not self.is_minus_module(minus):
            raise PresentationError("j が −1 で作用しないので ℤ_p[G]_− 加群ではありません")
        if self.is_trivial():
            return PresentedModule.zero_module(G, p, k, minus)
        generators = self.generators_over_ring(minus)
        basis = self._ring_basis(minus)
        width = len(basis)
        b = len(generators)
        images = []
        for i in generators:
            for g in basis:
                images.append([int(v) for v in self.matrices[g][:, i]])
        kernel = kernel_rows(images, self.relation_rows, p, k)
        if minus is not None:
            ring = MinusRing(minus, p, k)
            position = ring.position
        else:
            position = {g: (g, 1) for g in range(G.order)}

        def translates(c):
            out = []
            for g in range(G.order):
                vector = [0] * (b * width)
                for t in range(b):
                    for col, x in enumerate(basis):
                        value = c[t * width + col]
                        if value:
                            slot, sign = position[G.mul(g, x)]
                            vector[t * width + slot] = (vector[t * width + slot] + sign * value) % self.modulus
                out.append(vector)
            return out

        kept = []
        span: List[List[int]] = []
        form: List[List[int]] = []
        for c in kernel:
            if form and not any(howell_residue(form, c, p, k)):
                continue
            kept.append(c)
            span.extend(translates(c))
            form = howell_form(span, p, k, b * width)
        zmod = CoefficientRing.zmod(p, k)
        rows = []
        for c in kept:
            row = []
            for t in range(b):
                terms = {basis[col]: c[t * width + col] for col in range(width) if c[t * width + col]}
                row.append(GroupRingElement.from_terms(G, terms, zmod))
            rows.append(row)
        debug_log(f"表示を導出: 生成元 {b} 個, 関係式 {len(rows)} 個（{'マイナス商' if minus else '群環'}上）")
        if not rows:
            raise PresentationError("関係式がありません（有限加群ではありません）")
        return PresentedModule(GroupRingMatrix(rows), p, precision=k, minus=minus, label=self.label)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "precision": self.precision,
            "invariant_factors": [f"{self.p}^{m}" for m in self.invariant_factors()],
            "order": str(self.order),
        }


def gmodule_from_json(group: FiniteGroup, data: dict, p: int, precision: int = 20,
                      precision_cap: int = 64, path: str = "") -> GModule:
    """{"invariant_factors": [...], "action": {"(1 2)": [[...]]}} 形式"""
    factors = data.get("invariant_factors")
    if not isinstance(factors, list):
        raise InputError("invariant_factors がありません", f"{path}/invariant_factors")
    action = {}
    for cycles, matrix in (data.get("action") or {}).items():
        action[group.element(cycles, f"{path}/action/{cycles}")] = matrix
    if not action:
        n = len(factors)
        action = {g: [[int(i == t) for t in range(n)] for i in range(n)] for g in group.generators}
    return GModule.from_invariant_factors(group, p, [int(d) for d in factors], action, precision,
                                          precision_cap, data.get("label", ""))
