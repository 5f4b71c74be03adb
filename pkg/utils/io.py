"""入力ファイルのスキーマ検証・読み込みと JSON 出力

検証エラーはすべて JSON ポインタ形式の位置を付けた InputError にする。
"""
import hashlib
import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from tools.cyclotomic import CyclotomicNumber
from tools.groups import CentralInvolution, FiniteGroup
from tools.l_values import ArtinMap, ExtensionDatum, InductionDatum, LValueCertificate, PlaceDatum
from tools.real_quadratic import QuadraticForm
from utils.config import RunConfig
from utils.debug import debug_log
from utils.errors import CorpusEntryNotFound, InputError

Model = TypeVar("Model", bound=BaseModel)


# ============================================================================
# スキーマ
# ============================================================================
class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GroupFile(_Strict):
    name: str
    degree: int = Field(ge=1)
    generators: List[str]
    description: str = ""


class PlaceModel(_Strict):
    label: str
    norm: int = Field(default=0, ge=0)
    frobenius: Optional[str] = None
    inertia: Optional[List[str]] = None
    in_S: bool = False
    in_T: bool = False
    infinite: bool = False

    @model_validator(mode="after")
    def _finite_needs_norm(self):
        if not self.infinite and self.norm < 2:
            raise ValueError("有限素点には norm（剰余体の位数）が必要です")
        return self


class ArtinMapModel(_Strict):
    modulus: int = Field(ge=1)
    generators: Dict[str, str]


class CertificateModel(_Strict):
    character: str
    value: Union[int, str, Dict[str, object]]
    kind: Literal["complex", "p-adic"] = "complex"
    p: Optional[int] = None
    fingerprint: str = ""
    source: str = ""

    @model_validator(mode="after")
    def _p_adic_needs_p(self):
        if self.kind == "p-adic" and self.p is None:
            raise ValueError("p 進証明書には p が必要です")
        return self


class ModuleModel(_Strict):
    invariant_factors: List[int]
    action: Dict[str, List[List[int]]] = Field(default_factory=dict)
    label: str = ""
    # minus: マイナス部分（j が −1 で作用する部分）だけを与えた加群
    part: Literal["full", "minus"] = "full"


class InductionClassModel(_Strict):
    form: List[int] = Field(min_length=3, max_length=3)
    image: str


class InductionModel(_Strict):
    """U = Gal(L/F)（F は判別式 discriminant の実二次体）と狭義類ごとのアルティン像"""
    subgroup: List[str]
    discriminant: int
    classes: List[InductionClassModel]
    source: str = ""


class AssumptionModel(_Strict):
    kind: Literal["abelian_over_Q", "known_example"]
    subgroup: Optional[List[str]] = None
    note: str = ""


class ExtensionFile(_Strict):
    name: str
    description: str = ""
    group: Union[str, GroupFile]
    j: str
    mu_order: int = Field(ge=1)
    base_field: str = "Q"
    places: List[PlaceModel]
    artin_map: Optional[ArtinMapModel] = None
    certificates: List[CertificateModel] = Field(default_factory=list)
    induction: List[InductionModel] = Field(default_factory=list)
    class_group: Optional[ModuleModel] = None
    ray_class_group: Optional[ModuleModel] = None
    minus_module: Optional[ModuleModel] = None
    t_sets: List[List[str]] = Field(default_factory=list)
    bs_data: Optional[Dict[str, object]] = None
    assumptions: List[AssumptionModel] = Field(default_factory=list)


# ============================================================================
# 読み込み
# ============================================================================
def _pointer(loc) -> str:
    return "/" + "/".join(str(part) for part in loc) if loc else ""


def parse_model(model: Type[Model], data: object) -> Model:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise InputError(first["msg"], _pointer(first["loc"]))


def read_json(path: Union[str, Path]) -> Tuple[object, str]:
    """(内容, sha256) を返す"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"ファイルを読めません: {path} ({exc.strerror})")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"JSON として読めません: {path} ({exc})")
    return data, hashlib.sha256(raw).hexdigest()


def resolve_corpus_path(name_or_path: str, kind: str, config: RunConfig) -> Path:
    """ファイルパスでなければ corpus/<kind>/<name>.json を探す"""
    candidate = Path(name_or_path)
    if candidate.suffix == ".json" and candidate.exists():
        return candidate
    corpus = Path(config.corpus_dir) / kind / f"{name_or_path}.json"
    if corpus.exists():
        return corpus
    if candidate.exists():
        return candidate
    raise CorpusEntryNotFound(f"{kind} {name_or_path!r} が見つかりません（{corpus} も探しました）")


def group_from_model(model: GroupFile, config: RunConfig) -> FiniteGroup:
    return FiniteGroup.from_cycles(model.degree, model.generators, order_bound=config.order_bound, name=model.name)


def load_group(name_or_path: str, config: Optional[RunConfig] = None) -> FiniteGroup:
    config = config or RunConfig()
    path = resolve_corpus_path(name_or_path, "groups", config)
    data, _ = read_json(path)
    model = parse_model(GroupFile, data)
    debug_log(f"群ファイルを読み込み: {path}")
    return group_from_model(model, config)


def load_assumptions(path: Optional[str]) -> List[dict]:
    if not path:
        return []
    data, _ = read_json(path)
    if isinstance(data, dict):
        data = data.get("assumptions", [])
    if not isinstance(data, list):
        raise InputError("仮定ファイルは記録のリストです", "")
    return [parse_model(AssumptionModel, record).model_dump(exclude_none=True) for record in data]


def _place(G: FiniteGroup, model: PlaceModel, i: int) -> PlaceDatum:
    path = f"/places/{i}"
    frobenius = G.element(model.frobenius, f"{path}/frobenius") if model.frobenius is not None else None
    inertia = G.subgroup_from_cycles(model.inertia, f"{path}/inertia") if model.inertia else None
    return PlaceDatum(model.label, model.norm, frobenius, inertia, model.in_S, model.in_T, model.infinite)


def _induction(G: FiniteGroup, model: InductionModel, i: int, source: str) -> InductionDatum:
    path = f"/induction/{i}"
    U = G.subgroup_from_cycles(model.subgroup, f"{path}/subgroup")
    classes = []
    for k, entry in enumerate(model.classes):
        form = QuadraticForm.from_json(entry.form, f"{path}/classes/{k}/form")
        classes.append((form, G.element(entry.image, f"{path}/classes/{k}/image")))
    induction = InductionDatum(U, model.discriminant, classes, model.source or source)
    induction.validate(G, path)
    return induction


def extension_from_model(model: ExtensionFile, source_hash: str, source: str,
                         config: RunConfig) -> ExtensionDatum:
    if isinstance(model.group, str):
        G = load_group(model.group, config)
    else:
        G = group_from_model(model.group, config)
    j = CentralInvolution.from_index(G, G.element(model.j, "/j"))
    places = [_place(G, v, i) for i, v in enumerate(model.places)]
    labels = [v.label for v in places]
    if len(set(labels)) != len(labels):
        raise InputError("素点のラベルが重複しています", "/places")
    for i, t in enumerate(model.t_sets):
        for k, label in enumerate(t):
            if label not in labels:
                raise InputError(f"素点 {label!r} はありません", f"/t_sets/{i}/{k}")
    artin = None
    if model.artin_map is not None:
        generators = {}
        for residue, cycles in model.artin_map.generators.items():
            try:
                a = int(residue)
            except ValueError:
                raise InputError(f"剰余 {residue!r} が整数ではありません", f"/artin_map/generators/{residue}")
            generators[a] = G.element(cycles, f"/artin_map/generators/{residue}")
        artin = ArtinMap.from_generators(G, model.artin_map.modulus, generators, "/artin_map")
    certificates = []
    for i, cert in enumerate(model.certificates):
        try:
            value = CyclotomicNumber.from_json(cert.value)
        except (KeyError, ValueError, TypeError, ZeroDivisionError):
            raise InputError(f"値を読めません: {cert.value!r}", f"/certificates/{i}/value")
        certificates.append(LValueCertificate(cert.character, value, cert.kind, cert.p, cert.fingerprint,
                                              "ingested", source_hash, cert.source or source))
    inductions = [_induction(G, m, i, source) for i, m in enumerate(model.induction)]

    def module(m: Optional[ModuleModel]) -> Optional[dict]:
        return m.model_dump() if m is not None else None

    return ExtensionDatum(
        name=model.name,
        group=G,
        j=j,
        places=places,
        mu_order=model.mu_order,
        base_field=model.base_field,
        artin_map=artin,
        certificates=certificates,
        inductions=inductions,
        class_group=module(model.class_group),
        ray_class_group=module(model.ray_class_group),
        minus_module=module(model.minus_module),
        bs_data=model.bs_data,
        assumptions=[a.model_dump(exclude_none=True) for a in model.assumptions],
        t_sets=[list(t) for t in model.t_sets],
        description=model.description,
        source_hash=source_hash,
    )


def load_extension(name_or_path: str, config: Optional[RunConfig] = None) -> ExtensionDatum:
    config = config or RunConfig()
    path = resolve_corpus_path(name_or_path, "extensions", config)
    data, digest = read_json(path)
    model = parse_model(ExtensionFile, data)
    debug_log(f"拡大データを読み込み: {path} (sha256={digest[:12]})")
    return extension_from_model(model, digest, path.name, config)


# ============================================================================
# コーパス
# ============================================================================
def corpus_listing(config: Optional[RunConfig] = None) -> Dict[str, List[dict]]:
    config = config or RunConfig()
    root = Path(config.corpus_dir)
    listing: Dict[str, List[dict]] = {"groups": [], "extensions": []}
    for kind in listing:
        for path in sorted((root / kind).glob("*.json")):
            data, _ = read_json(path)
            listing[kind].append({
                "name": path.stem,
                "title": data.get("name", path.stem),
                "description": data.get("description", ""),
            })
    return listing


# ============================================================================
# 出力
# ============================================================================
def dump_json(data: object) -> str:
    """決定的な JSON 文字列（キー順固定）"""
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True)
