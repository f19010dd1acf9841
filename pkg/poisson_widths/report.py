"""
报告输出 - JSON / CSV / 彩色文本三种格式
"""

import csv
import io
import json
import math
from typing import Any, Dict, List, Optional, Sequence, Union

import click

SCHEMA_VERSION = "1"

Payload = Union[Dict[str, Any], List[Dict[str, Any]]]


# 颜色配置
class Colors:
    RED = 'red'
    GREEN = 'green'
    BLUE = 'cyan'
    YELLOW = 'yellow'
    MAGENTA = 'magenta'


def _plain(value: Any) -> Any:
    """把值转换为 JSON 可表示的形式；非有限浮点数写成字符串"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if hasattr(value, "to_dict"):
        return _plain(value.to_dict())
    # numpy 标量
    if hasattr(value, "item"):
        return _plain(value.item())
    return str(value)


def document(command: str, payload: Payload) -> Dict[str, Any]:
    """
    组装一次调用的完整文档

    字段顺序固定: schema、command，然后是记录本身或 rows 列表。
    """
    doc: Dict[str, Any] = {"schema": SCHEMA_VERSION, "command": command}
    if isinstance(payload, list):
        doc["rows"] = _plain(payload)
    else:
        doc.update(_plain(payload))
    return doc


def render_json(command: str, payload: Payload) -> str:
    """UTF-8 JSON，浮点数使用最短往返表示"""
    return json.dumps(document(command, payload), ensure_ascii=False, indent=2, allow_nan=False)


def flatten(record: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """嵌套字典展开为 a.b 形式的列；列表编码为紧凑 JSON"""
    flat: Dict[str, Any] = {}
    for key, value in _plain(record).items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, prefix=f"{name}."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value, ensure_ascii=False, separators=(",", ":"))
        else:
            flat[name] = value
    return flat


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def render_csv(payload: Payload, fields: Optional[Sequence[str]] = None) -> str:
    """
    CSV 表格（RFC-4180 引号规则，CRLF 行尾）

    Args:
        payload: 单条记录或行列表
        fields: 固定表头；缺省时取第一行展开后的列
    """
    rows = [flatten(r) for r in (payload if isinstance(payload, list) else [payload])]
    if fields is None:
        fields = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fields), extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({f: _csv_cell(row.get(f)) for f in fields})
    return buffer.getvalue()


def _styled(value: Any) -> str:
    if value is True:
        return click.style("✓ true", fg=Colors.GREEN)
    if value is False:
        return click.style("✗ false", fg=Colors.RED)
    if value is None:
        return click.style("—", fg=Colors.YELLOW)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _text_lines(record: Dict[str, Any], indent: int) -> List[str]:
    lines = []
    pad = "  " * indent
    for key, value in record.items():
        if isinstance(value, dict):
            lines.append(f"{pad}• {click.style(str(key), fg=Colors.BLUE)}:")
            lines.extend(_text_lines(value, indent + 1))
        elif isinstance(value, list) and len(value) > 8:
            head = ", ".join(_styled(v) for v in value[:8])
            lines.append(f"{pad}• {click.style(str(key), fg=Colors.BLUE)}: [{head}, … ({len(value)} 项)]")
        else:
            lines.append(f"{pad}• {click.style(str(key), fg=Colors.BLUE)}: {_styled(value)}")
    return lines


def render_text(command: str, payload: Payload) -> str:
    """人类可读的彩色输出"""
    lines = [click.style(f"📋 {command}", fg=Colors.MAGENTA, bold=True)]
    if isinstance(payload, list):
        for index, row in enumerate(_plain(payload)):
            lines.append(click.style(f"\n  [{index}]", fg=Colors.YELLOW))
            lines.extend(_text_lines(row, 2))
    else:
        lines.extend(_text_lines(_plain(payload), 1))
    return "\n".join(lines)


def render(output: str, command: str, payload: Payload, fields: Optional[Sequence[str]] = None) -> str:
    """按输出格式分派"""
    if output == "json":
        return render_json(command, payload)
    if output == "csv":
        return render_csv(payload, fields)
    return render_text(command, payload)


def emit(output: str, command: str, payload: Payload, fields: Optional[Sequence[str]] = None):
    """写到标准输出"""
    text = render(output, command, payload, fields)
    # csv 自带 CRLF 行尾
    click.echo(text, nl=output != "csv")
