"""計算エンジンパッケージ"""
from .core import BrumerStarkEngine

__all__ = ["BrumerStarkEngine"]
