"""実行設定（RunConfig）"""
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CORPUS = PROJECT_ROOT / "corpus"


class RunConfig(BaseModel):
    """全コマンド共通の設定

    既定値はすべての出力に記録される。
    """
    precision: int = Field(default=20, ge=1, le=64)
    precision_cap: int = Field(default=64, ge=1)
    unit_bound: int = Field(default=6, ge=0)
    jobs: int = Field(default=1, ge=1)
    order_bound: int = Field(default=2000, ge=1)
    subgroup_cap: int = Field(default=5000, ge=1)
    sample_size: int = Field(default=6, ge=0)
    seed: int = 20240611
    corpus_dir: str = str(DEFAULT_CORPUS)
    format: Literal["json", "text"] = "json"
    verbose: bool = False

    def echo(self) -> dict:
        """出力に埋め込む設定（環境依存のパスは除く）"""
        data = self.model_dump()
        data.pop("corpus_dir")
        data.pop("verbose")
        return data
