"""p 進格子（ℤ/p^k 上の Howell 形式）と有限体上の行列計算

格子は有理数座標の生成元を厳密に保持し、判定のときだけ p^s 倍して
ℤ/p^k に落とす。精度 k が足りない場合は「判定不能」を返し、
呼び出し側で精度を上げて再計算する。
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import multiplicity

from utils.debug import debug_log

Vector = Tuple[Fraction, ...]

MEMBER = "member"
NON_MEMBER = "non-member"
UNDECIDED = "undecided"


# ============================================================================
# F_p 上の行列計算（指標表・単元判定用）
# ============================================================================
def rref_mod(M: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """素数 p を法とする被約行階段形と主列"""
    M = np.array(M, dtype=np.int64) % p
    rows, cols = M.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if not len(nz):
            continue
        i = r + int(nz[0])
        M[[r, i]] = M[[i, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        for i in np.nonzero(M[:, c])[0]:
            if i != r:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        pivots.append(c)
        r += 1
    return M, pivots


def nullspace_mod(M: np.ndarray, p: int) -> np.ndarray:
    """M x = 0 (mod p) の解空間の列基底"""
    R, pivots = rref_mod(M, p)
    n = M.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for col, f in enumerate(free):
        basis[f, col] = 1
        for i, c in enumerate(pivots):
            basis[c, col] = (-R[i, f]) % p
    return basis


def rank_mod(M: np.ndarray, p: int) -> int:
    if M.size == 0:
        return 0
    return len(rref_mod(M, p)[1])


# ============================================================================
# 付値と有理数の還元
# ============================================================================
def valuation(value, p: int) -> Optional[int]:
    """有理数の p 進付値（0 は None）"""
    value = Fraction(value)
    if not value:
        return None
    return int(multiplicity(p, abs(value.numerator))) - int(multiplicity(p, value.denominator))


def reduce_rational(value, p: int, k: int) -> int:
    """p 整な有理数を ℤ/p^k に還元"""
    value = Fraction(value)
    modulus = p ** k
    if value.denominator % p == 0:
        raise ValueError(f"{value} は {p} 整ではありません")
    return value.numerator * pow(value.denominator, -1, modulus) % modulus


def unit_part(a: int, p: int) -> Tuple[int, int]:
    """a = p^v · u となる (v, u)"""
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


# ============================================================================
# Howell 形式
# ============================================================================
def howell_form(rows: Sequence[Sequence[int]], p: int, k: int, ncols: int) -> List[List[int]]:
    """ℤ/p^k 上の行ベクトルが張る部分加群の Howell 形式

    主成分は p^v に正規化し、消去のたびに p^{k-v} 倍の行を補うので、
    先頭 j 成分が 0 の元は先頭 j 成分が 0 の行だけで張られる。
    """
    modulus = p ** k
    pending = [[int(x) % modulus for x in row] for row in rows]
    pending = [row for row in pending if any(row)]
    result: List[List[int]] = []
    pivot_info: List[Tuple[int, int]] = []
    for c in range(ncols):
        best = None
        for i, row in enumerate(pending):
            if row[c]:
                v, _ = unit_part(row[c], p)
                if best is None or v < best[0]:
                    best = (v, i)
        if best is None:
            continue
        v, i = best
        pivot = pending.pop(i)
        _, u = unit_part(pivot[c], p)
        u_inv = pow(u, -1, modulus)
        pivot = [x * u_inv % modulus for x in pivot]
        scale = p ** v
        survivors = []
        for row in pending:
            if row[c]:
                factor = row[c] // scale
                row = [(x - factor * y) % modulus for x, y in zip(row, pivot)]
            if any(row):
                survivors.append(row)
        extra = [x * p ** (k - v) % modulus for x in pivot]
        if any(extra):
            survivors.append(extra)
        pending = survivors
        result.append(pivot)
        pivot_info.append((c, v))
    # 主成分より上の成分を簡約
    for idx, (c, v) in enumerate(pivot_info):
        scale = p ** v
        for upper in range(idx):
            entry = result[upper][c]
            if entry >= scale:
                factor = entry // scale
                result[upper] = [(x - factor * y) % modulus for x, y in zip(result[upper], result[idx])]
    return result


def howell_residue(rows: List[List[int]], x: Sequence[int], p: int, k: int) -> List[int]:
    """x を Howell 基底で簡約した剰余（0 なら所属）"""
    modulus = p ** k
    x = [int(v) % modulus for v in x]
    for row in rows:
        c = next(i for i, entry in enumerate(row) if entry)
        scale = row[c]
        if x[c] % scale:
            return x
        factor = x[c] // scale
        if factor:
            x = [(a - factor * b) % modulus for a, b in zip(x, row)]
    return x


# ============================================================================
# p 進格子
# ============================================================================
@dataclass
class PAdicLattice:
    """ℚ_p^n 内の ℤ_p 格子 L（生成元は厳密な有理数ベクトル）

    ambient は L を含む飽和格子 Λ の基底。省略時は標準格子。
    p^{k-1}Λ ⊆ L̄ が成り立てば（resolved）ℤ/p^k での所属判定は厳密になる。
    """
    p: int
    dimension: int
    generators: List[Vector]
    precision: int = 20
    ambient: Optional[List[Vector]] = None
    shift: int = field(init=False, default=0)
    rows: List[List[int]] = field(init=False, default_factory=list)

    def __post_init__(self):
        self.generators = [tuple(Fraction(x) for x in g) for g in self.generators]
        if self.ambient is not None:
            self.ambient = [tuple(Fraction(x) for x in a) for a in self.ambient]
        shift = 0
        for g in self.generators:
            for x in g:
                v = valuation(x, self.p)
                if v is not None and v < 0:
                    shift = max(shift, -v)
        self.shift = shift
        scaled = [self._scale(g) for g in self.generators]
        self.rows = howell_form(scaled, self.p, self.precision, self.dimension)

    def _scale(self, vector: Sequence) -> List[int]:
        factor = Fraction(self.p ** self.shift)
        return [reduce_rational(Fraction(x) * factor, self.p, self.precision) for x in vector]

    def _ambient_basis(self) -> List[Vector]:
        if self.ambient is not None:
            return self.ambient
        return [tuple(Fraction(int(i == j)) for j in range(self.dimension)) for i in range(self.dimension)]

    def is_zero(self) -> bool:
        return all(not any(g) for g in self.generators)

    def with_precision(self, precision: int) -> "PAdicLattice":
        return PAdicLattice(self.p, self.dimension, self.generators, precision, self.ambient)

    def resolved(self) -> bool:
        """p^{k-1}·a ∈ L̄ がすべての ambient 基底 a で成り立つか"""
        factor = Fraction(self.p ** (self.precision - 1))
        for a in self._ambient_basis():
            scaled = [reduce_rational(x * factor, self.p, self.precision) for x in a]
            if any(howell_residue(self.rows, scaled, self.p, self.precision)):
                return False
        return True

    def contains(self, x: Sequence) -> str:
        """所属判定: member / non-member / undecided"""
        x = [Fraction(v) for v in x]
        if not any(x):
            return MEMBER
        if self.is_zero():
            return NON_MEMBER
        for v in x:
            val = valuation(v, self.p)
            if val is not None and val < -self.shift:
                return NON_MEMBER
        residue = howell_residue(self.rows, self._scale(x), self.p, self.precision)
        if any(residue):
            return NON_MEMBER
        return MEMBER if self.resolved() else UNDECIDED

    def contains_lattice(self, other: "PAdicLattice") -> str:
        verdicts = [self.contains(g) for g in other.generators]
        if NON_MEMBER in verdicts:
            return NON_MEMBER
        if UNDECIDED in verdicts:
            return UNDECIDED
        return MEMBER

    def scale(self, factor) -> "PAdicLattice":
        factor = Fraction(factor)
        generators = [tuple(x * factor for x in g) for g in self.generators]
        return PAdicLattice(self.p, self.dimension, generators, self.precision, self.ambient)

    def hermite_rows(self) -> List[List[int]]:
        return [list(row) for row in self.rows]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "precision": self.precision,
            "shift": self.shift,
            "dimension": self.dimension,
            "howell_rows": [[str(x) for x in row] for row in self.rows],
            "resolved": self.resolved(),
        }


def decide_membership(lattice: PAdicLattice, x: Sequence, cap: int = 64) -> Tuple[str, int]:
    """精度を倍々に上げながら所属を判定（上限 cap）"""
    current = lattice
    while True:
        verdict = current.contains(x)
        if verdict != UNDECIDED or current.precision >= cap:
            if verdict == UNDECIDED:
                debug_log(f"精度 {current.precision} でも判定不能")
            return verdict, current.precision
        next_precision = min(cap, current.precision * 2)
        debug_log(f"精度を引き上げ: {current.precision} -> {next_precision}")
        current = current.with_precision(next_precision)


def decide_containment(outer: PAdicLattice, inner: PAdicLattice, cap: int = 64) -> Tuple[str, int]:
    current = outer
    while True:
        verdict = current.contains_lattice(inner)
        if verdict != UNDECIDED or current.precision >= cap:
            return verdict, current.precision
        current = current.with_precision(min(cap, current.precision * 2))


def howell_express(rows: List[List[int]], x: Sequence[int], p: int, k: int) -> Optional[List[int]]:
    """x = Σ c_i rows_i となる係数 c（張られなければ None）"""
    modulus = p ** k
    x = [int(v) % modulus for v in x]
    coefficients = [0] * len(rows)
    for i, row in enumerate(rows):
        c = next(t for t, entry in enumerate(row) if entry)
        scale = row[c]
        if x[c] % scale:
            return None
        factor = x[c] // scale
        if factor:
            coefficients[i] = factor
            x = [(a - factor * b) % modulus for a, b in zip(x, row)]
    return coefficients if not any(x) else None


def log_order(rows: List[List[int]], p: int, k: int) -> int:
    """Howell 基底が張る部分群の位数の log_p"""
    total = 0
    for row in rows:
        pivot = next(entry for entry in row if entry)
        total += k - unit_part(pivot, p)[0]
    return total


def kernel_rows(images: Sequence[Sequence[int]], relations: Sequence[Sequence[int]],
                p: int, k: int) -> List[List[int]]:
    """(ℤ/p^k)^s → (ℤ/p^k)^n / ⟨relations⟩, e_i ↦ images[i] の核の生成元

    [images | I] と [relations | 0] の Howell 形式のうち、左側が 0 の行の右側。
    """
    s = len(images)
    n = len(images[0]) if images else (len(relations[0]) if relations else 0)
    rows = []
    for i, image in enumerate(images):
        rows.append(list(image) + [int(t == i) for t in range(s)])
    for rel in relations:
        rows.append(list(rel) + [0] * s)
    form = howell_form(rows, p, k, n + s)
    return [row[n:] for row in form if not any(row[:n])]
