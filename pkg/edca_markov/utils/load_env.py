import os
from pathlib import Path
from typing import Dict


def _strip_quotes(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ('"', "'"):
        return value[1:-1]
    return value


def load_env(env_path: Path | str = ".env", override: bool = False) -> Dict[str, str]:
    """
    读取 .env 文件中的环境变量并导出到当前环境中

    Args:
        env_path: .env 文件路径，默认为 ".env"
        override: 是否覆盖已经存在的环境变量（命令行显式设置的优先）

    Returns:
        Dict[str, str]: 解析出的环境变量字典
    """
    env_vars: Dict[str, str] = {}
    if not os.path.exists(env_path):
        return env_vars

    try:
        with open(env_path, "r", encoding="utf-8") as file:
            lines = file.readlines()
    except OSError as e:
        print(f"\033[91m[WARN]\033[0m{env_path}文件读取失败: {e}")
        return env_vars

    for raw_line in lines:
        line = raw_line.strip()
        # 跳过空行和注释行
        if not line or line.startswith("#") or "=" not in line:
            continue

        key, value = line.split("=", 1)
        key = key.strip()
        value = _strip_quotes(value.strip())

        # 去除值后面可能存在的注释
        if "#" in value:
            value = _strip_quotes(value.split("#", 1)[0].strip())

        env_vars[key] = value
        if override or key not in os.environ:
            os.environ[key] = value

    return env_vars


def env_int(name: str, default: int) -> int:
    """读取整数环境变量，格式错误时回退到默认值"""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default
