# logger.py
import logging
import os
import sys
import threading
from datetime import datetime
from typing import Optional, TextIO

from edca_markov.utils.runtime_path import user_data_path

GREY = '\033[90m'
GREEN = '\033[92m'
YELLOW = '\033[93m'
RED = '\033[91m'
RESET = '\033[0m'

LEVEL_COLORS = {logging.INFO: GREEN, logging.WARNING: YELLOW, logging.ERROR: RED, logging.CRITICAL: RED}
SPINNER = '⢿⣻⣽⣾⣷⣯⣟⡿'


def _display_width(text: str) -> int:
    """终端显示宽度，非 ASCII 字符计为 2"""
    return sum(2 if ord(c) > 127 else 1 for c in text)


class Logger:
    """单例日志记录器：彩色控制台输出（stderr）、可选的文件日志，以及求解时的转圈提示

    stdout 只留给 CSV / JSON 结果。
    """

    _instance = None
    _initialized = False

    DATE_FORMAT = "%Y-%m-%d-%H:%M:%S"

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(
            self,
            app_name: str = "edca-markov",
            log_level: Optional[str] = None,
            show_timestamp: Optional[bool] = None,
            enable_file_logging: Optional[bool] = None,
            log_file_directory: Optional[str] = None,
            stream: TextIO = sys.stderr,
    ):
        """
        Args:
            log_level: None 时读环境变量 LOG_LEVEL
            show_timestamp: None 时读 CONSOLE_SHOW_TIMESTAMP
            enable_file_logging: None 时读 ENABLE_FILE_LOGGING
            log_file_directory: None 时读 LOG_FILE_DIRECTORY，默认放在用户数据目录的 run_logs 下
        """
        if self._initialized:
            return

        self.app_name = app_name
        self.stream = stream
        self.log_level = self._parse_level(log_level if log_level is not None else os.environ.get('LOG_LEVEL', 'INFO'))
        self.show_timestamp = self._env_flag('CONSOLE_SHOW_TIMESTAMP', show_timestamp)
        self.enable_file_logging = self._env_flag('ENABLE_FILE_LOGGING', enable_file_logging)
        self.log_file_directory = (log_file_directory
                                   or os.environ.get('LOG_FILE_DIRECTORY')
                                   or str(user_data_path / "run_logs"))

        self._spinner_thread: Optional[threading.Thread] = None
        self._spinner_stop = threading.Event()
        self._spinner_width = 0
        self._lock = threading.Lock()

        self._logger = logging.getLogger(self.app_name)
        self._logger.propagate = False
        for handler in self._logger.handlers[:]:
            handler.close()
            self._logger.removeHandler(handler)
        console = SpinnerAwareHandler(self.stream)
        console.setFormatter(ColoredFormatter(self.show_timestamp))
        console.setLevel(self.log_level)
        self._logger.addHandler(console)
        file_handler = self._file_handler()
        if file_handler:
            self._logger.addHandler(file_handler)
        self._logger.setLevel(logging.DEBUG if file_handler else self.log_level)

        self._initialized = True

    @staticmethod
    def _parse_level(name: str) -> int:
        level = logging.getLevelName(name.upper())
        return level if isinstance(level, int) else logging.INFO

    @staticmethod
    def _env_flag(env_var: str, explicit: Optional[bool]) -> bool:
        if explicit is not None:
            return explicit
        return os.environ.get(env_var, "false").lower() == "true"

    def _file_handler(self) -> Optional[logging.Handler]:
        if not self.enable_file_logging:
            return None
        try:
            os.makedirs(self.log_file_directory, exist_ok=True)
            path = os.path.join(self.log_file_directory,
                                datetime.now().strftime(f"{self.app_name}_%Y-%m-%d_%H-%M-%S.log"))
            handler = logging.FileHandler(path, encoding='utf-8')
        except OSError as e:
            sys.stderr.write(f"{RED}Error: Failed to initialize file logging: {e}{RESET}\n")
            return None
        handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s', datefmt=self.DATE_FORMAT))
        handler.setLevel(logging.DEBUG)
        return handler

    def set_level(self, level: str):
        """运行时调整控制台日志级别（命令行 --log-level 使用）"""
        self.log_level = self._parse_level(level)
        for handler in self._logger.handlers:
            if isinstance(handler, SpinnerAwareHandler):
                handler.setLevel(self.log_level)
        if not any(isinstance(h, logging.FileHandler) for h in self._logger.handlers):
            self._logger.setLevel(self.log_level)

    def debug(self, message: str):
        self._logger.debug(message)

    def info(self, message: str):
        self._logger.info(message)

    def warning(self, message: str):
        self._logger.warning(message)

    def error(self, message: str, exc_info: bool = False):
        self._logger.error(message, exc_info=exc_info)

    def start_loading_animation(self, message: str = "Processing"):
        """在终端上转圈，直到 stop_loading_animation；管道、CI 下不绘制"""
        if not getattr(self.stream, "isatty", lambda: False)():
            return
        with self._lock:
            if self._spinner_thread is not None:
                return
            self._spinner_stop.clear()
            self._spinner_thread = threading.Thread(target=self._spin, args=(message,), daemon=True)
            self._spinner_thread.start()

    def stop_loading_animation(self, success: bool = True, final_message: Optional[str] = None):
        thread = self._spinner_thread
        if thread is not None:
            self._spinner_stop.set()
            thread.join(timeout=2)
            with self._lock:
                self._spinner_thread = None
        if final_message:
            if success:
                self.info(f"{GREEN}✔{RESET} {final_message}")
            else:
                self.error(f"{RED}✖{RESET} {final_message}")

    def _spin(self, message: str):
        idx = 0
        while not self._spinner_stop.is_set():
            line = f"{message} {SPINNER[idx % len(SPINNER)]} "
            with self._lock:
                self._spinner_width = _display_width(line)
                self.stream.write(f"\r{line}")
                self.stream.flush()
            idx += 1
            self._spinner_stop.wait(0.12)
        self.clear_spinner_line()

    def clear_spinner_line(self):
        with self._lock:
            if self._spinner_width:
                self.stream.write("\r" + " " * self._spinner_width + "\r")
                self.stream.flush()
                self._spinner_width = 0


class SpinnerAwareHandler(logging.StreamHandler):
    """输出日志前先擦掉转圈的那一行"""

    def emit(self, record):
        Logger().clear_spinner_line()
        super().emit(record)


class ColoredFormatter(logging.Formatter):
    def __init__(self, show_timestamp: bool):
        super().__init__(datefmt=Logger.DATE_FORMAT)
        self.show_timestamp = show_timestamp

    def format(self, record):
        timestamp = f"{self.formatTime(record, Logger.DATE_FORMAT)} " if self.show_timestamp else ""
        level = f"[{record.levelname}]: "
        if record.levelno == logging.DEBUG:
            return f"{GREY}{timestamp}{level}{record.getMessage()}{RESET}"
        color = LEVEL_COLORS.get(record.levelno, "")
        return f"{timestamp}{color}{level}{RESET}{record.getMessage()}"


logger = Logger()
