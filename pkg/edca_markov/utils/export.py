import csv
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Sequence, TextIO

from pydantic import BaseModel


@contextmanager
def _open_out(out: Optional[Path | str]) -> Iterator[TextIO]:
    """None 或 "-" 写到标准输出"""
    if out is None or str(out) == "-":
        yield sys.stdout
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Sequence[BaseModel], columns: Sequence[str], out: Optional[Path | str] = None):
    """
    按给定列顺序写 CSV；没有行时只写表头，空值写成空字符串
    """
    with _open_out(out) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_cell(data.get(c)) for c in columns])


def write_json(document: BaseModel | Sequence[BaseModel], out: Optional[Path | str] = None):
    """单个文档或文档列表写成缩进 JSON"""
    if isinstance(document, BaseModel):
        payload = document.model_dump(mode="json")
    else:
        payload = [item.model_dump(mode="json") for item in document]
    with _open_out(out) as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
        f.write("\n")
