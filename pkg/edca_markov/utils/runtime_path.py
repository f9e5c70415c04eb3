from pathlib import Path
from platformdirs import user_data_dir
import sys


def get_package_root() -> Path:
    """
    获取当前 package 的根目录（兼容 PyInstaller 和开发环境）
    Returns:
        Path: 根目录的 Path 对象
    """
    if getattr(sys, 'frozen', False):
        return Path(sys.executable).parent
    return Path(__file__).parent.parent


def get_user_data_path() -> Path:
    """
    获取用户数据目录，开发环境使用仓库内的 data 文件夹
    Returns:
        Path: 用户数据目录的 Path 对象
    """
    if getattr(sys, 'frozen', False):
        return Path(user_data_dir(appname=APP_NAME, appauthor=APP_AUTHOR))
    return get_package_root().parent / "data"


# 应用信息（用于构建平台特定路径）
APP_NAME = "edca_markov"
APP_AUTHOR = "edca_markov"

package_root: Path = get_package_root()

static_path: Path = package_root / "static"
scenarios_path: Path = static_path / "scenarios"   # 随包发布的示例场景
user_data_path: Path = get_user_data_path()

__all__ = [
    "package_root",
    "static_path",
    "scenarios_path",
    "user_data_path",
    "APP_NAME",
    "APP_AUTHOR"
]
