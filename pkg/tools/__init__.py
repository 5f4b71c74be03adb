"""カスタムツールパッケージ"""
