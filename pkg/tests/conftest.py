"""テスト共通の fixture"""
import sys
from pathlib import Path

import pytest

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from utils.config import RunConfig  # noqa: E402
from utils.io import load_extension, load_group  # noqa: E402


@pytest.fixture(scope="session")
def config() -> RunConfig:
    return RunConfig()


@pytest.fixture(scope="session")
def group(config):
    """コーパスの群を名前で読む"""
    cache = {}

    def load(name: str):
        if name not in cache:
            cache[name] = load_group(name, config)
        return cache[name]

    return load


@pytest.fixture(scope="session")
def extension(config):
    """コーパスの拡大データを名前で読む"""
    cache = {}

    def load(name: str):
        if name not in cache:
            cache[name] = load_extension(name, config)
        return cache[name]

    return load
