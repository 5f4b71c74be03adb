"""FastAPIバックエンドサーバー

CLI と同じエンジンを HTTP から呼び出す。レスポンスは常に
{"success", "result", "message"} の形で、result には CLI の JSON 出力が入る。
"""
import sys
import traceback
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from engine.core import CHECK_MODES, BrumerStarkEngine
from utils.debug import debug_banner, debug_log, set_debug
from utils.errors import AlgebraError, CorpusEntryNotFound, PrecisionTooLow

app = FastAPI(title="非可換 Brumer–Stark 検証 API")

# CORS設定（Streamlit のデフォルトポート）
app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:8501"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class Options(BaseModel):
    """RunConfig の上書き（None は既定値のまま）"""
    precision: Optional[int] = None
    unit_bound: Optional[int] = None
    jobs: Optional[int] = None


class ChartableRequest(Options):
    group: str


class ClassifyRequest(Options):
    group: Optional[str] = None
    extension: Optional[str] = None
    p: int
    N: Optional[List[str]] = None
    base_field: str = "Q"
    assumptions: List[dict] = Field(default_factory=list)


class StickelbergerRequest(Options):
    extension: str
    p: Optional[int] = None


class CheckRequest(Options):
    extension: str
    mode: str
    p: int
    theta_scale: str = "1"
    assumptions: List[dict] = Field(default_factory=list)


class ApiResponse(BaseModel):
    success: bool
    result: Optional[dict] = None
    message: Optional[str] = None


def _engine(options: Options) -> BrumerStarkEngine:
    return BrumerStarkEngine({"precision": options.precision, "unit_bound": options.unit_bound,
                              "jobs": options.jobs})


def _run(label: str, call) -> ApiResponse:
    """エンジン呼び出しを共通の形に包む"""
    debug_banner(f"{label} APIが呼ばれました")
    try:
        output = call()
    except CorpusEntryNotFound as e:
        raise HTTPException(status_code=404, detail=str(e))
    except PrecisionTooLow as e:
        return ApiResponse(success=False, result=None, message=f"判定不能: {e}")
    except AlgebraError as e:
        debug_log(f"{label} 入力エラー: {e}")
        return ApiResponse(success=False, result=None, message=f"入力エラー: {e}")
    except Exception as e:
        debug_log(f"{label} エラー: {e}")
        traceback.print_exc()
        return ApiResponse(success=False, result=None, message=f"内部エラー: {e}")
    return ApiResponse(success=True, result=output, message="計算が完了しました")


@app.get("/")
async def root():
    """ヘルスチェック"""
    return {"message": "非可換 Brumer–Stark 検証 API", "status": "ok"}


@app.get("/api/corpus", response_model=ApiResponse)
def corpus_endpoint():
    return _run("corpus", lambda: BrumerStarkEngine().corpus_list())


@app.post("/api/chartable", response_model=ApiResponse)
def chartable_endpoint(request: ChartableRequest):
    engine = _engine(request)
    return _run("chartable", lambda: engine.chartable(engine.group(request.group)))


@app.post("/api/classify", response_model=ApiResponse)
def classify_endpoint(request: ClassifyRequest):
    """G⁺ の群、または拡大データから適用できる結果を判定"""
    engine = _engine(request)
    if request.extension:
        return _run("classify", lambda: engine.classify_extension(
            engine.extension(request.extension), request.p, request.N, request.assumptions))
    if not request.group:
        return ApiResponse(success=False, result=None, message="入力エラー: group か extension を指定してください")
    return _run("classify", lambda: engine.classify(
        engine.group(request.group), request.p, request.N, request.assumptions, request.base_field))


@app.post("/api/stickelberger", response_model=ApiResponse)
def stickelberger_endpoint(request: StickelbergerRequest):
    engine = _engine(request)
    return _run("stickelberger", lambda: engine.stickelberger(engine.extension(request.extension), request.p))


@app.post("/api/check", response_model=ApiResponse)
def check_endpoint(request: CheckRequest):
    if request.mode not in CHECK_MODES:
        return ApiResponse(success=False, result=None,
                           message=f"入力エラー: 未知のモード {request.mode}（{', '.join(CHECK_MODES)}）")
    try:
        scale = Fraction(request.theta_scale)
    except (ValueError, ZeroDivisionError):
        return ApiResponse(success=False, result=None,
                           message=f"入力エラー: theta_scale が有理数ではありません: {request.theta_scale!r}")
    engine = _engine(request)
    return _run("check", lambda: engine.check(engine.extension(request.extension), request.mode, request.p,
                                              request.assumptions, scale))


if __name__ == "__main__":
    import uvicorn

    # バッファリングを無効化（ログが即座に表示されるように）
    sys.stdout.reconfigure(line_buffering=True)
    sys.stderr.reconfigure(line_buffering=True)

    set_debug(True)
    debug_banner("FastAPIサーバーを起動します（ポート 8765）")
    uvicorn.run(app, host="0.0.0.0", port=8765)
