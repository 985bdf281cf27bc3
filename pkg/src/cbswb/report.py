"""Report container with stable text and schema-versioned JSON forms.

Reports are built from JSON-native data only, so the machine-readable
form round-trips exactly and the text form is byte-identical across
runs for identical inputs.  Timing is attached only on request to keep
the default output diffable.
"""

import json
from typing import Optional

from .errors import FormatError

SCHEMA = "cbswb-report/1"


def _jsonable(value):
    return json.loads(json.dumps(value))


class Report:
    def __init__(self, verb: str, status: str, body: dict, timing: Optional[dict] = None):
        if status not in ("pass", "refuted"):
            raise FormatError(f"unknown report status {status!r}")
        self.verb = verb
        self.status = status
        self.body = _jsonable(body)
        self.timing = _jsonable(timing) if timing is not None else None

    def __eq__(self, other):
        if not isinstance(other, Report):
            return NotImplemented
        return (
            self.verb == other.verb
            and self.status == other.status
            and self.body == other.body
            and self.timing == other.timing
        )

    def __repr__(self):
        return f"Report({self.verb!r}, {self.status!r}, {len(self.body)} keys)"

    def to_document(self) -> dict:
        doc = {"schema": SCHEMA, "verb": self.verb, "status": self.status, "body": self.body}
        if self.timing is not None:
            doc["timing"] = self.timing
        return doc


def _scalar(value) -> str:
    if value is None:
        return "none"
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def _inline(value) -> Optional[str]:
    """Short lists of scalars, or of scalar lists, are rendered on one line."""
    if not isinstance(value, list):
        return None
    if all(not isinstance(v, (list, dict)) for v in value):
        text = "[" + ", ".join(_scalar(v) for v in value) + "]"
    elif all(
        isinstance(v, list) and all(not isinstance(x, (list, dict)) for x in v)
        for v in value
    ):
        text = "[" + ", ".join(
            "[" + ", ".join(_scalar(x) for x in v) + "]" for v in value
        ) + "]"
    else:
        return None
    return text if len(text) <= 72 else None

def _lines(label, value, depth):
    pad = "  " * depth
    if isinstance(value, dict):
        if not value:
            yield f"{pad}{label}: {{}}"
            return
        yield f"{pad}{label}:"
        for k in value:
            yield from _lines(k, value[k], depth + 1)
    elif isinstance(value, list):
        inline = _inline(value)
        if inline is not None:
            yield f"{pad}{label}: {inline}"
            return
        yield f"{pad}{label}:"
        for i, item in enumerate(value):
            yield from _lines(f"[{i}]", item, depth + 1)
    else:
        yield f"{pad}{label}: {_scalar(value)}"


def render_report(r: Report, format: str = "text") -> str:
    if format == "json":
        return json.dumps(r.to_document(), indent=2, sort_keys=True) + "\n"
    if format != "text":
        raise FormatError(f"unknown report format {format!r}")
    out = [SCHEMA, f"verb: {r.verb}", f"status: {r.status}"]
    for key in r.body:
        out.extend(_lines(key, r.body[key], 0))
    if r.timing is not None:
        out.extend(_lines("timing", r.timing, 0))
    return "\n".join(out) + "\n"


def parse_report(text: str) -> Report:
    """Inverse of the JSON rendering."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"report is not valid JSON: {e}")
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise FormatError(f"expected a {SCHEMA} document")
    for field in ("verb", "status", "body"):
        if field not in doc:
            raise FormatError(f"report misses field {field!r}")
    return Report(doc["verb"], doc["status"], doc["body"], doc.get("timing"))


def lattice_dot(report_body: dict, name: str = "con") -> str:
    """DOT rendering of a congruence-lattice report (covering edges only)."""
    blocks = report_body["elements"]
    leq = report_body["order"]
    m = len(blocks)

    def label(i):
        return "|".join("".join(str(x) for x in b) for b in blocks[i])

    covers = []
    for i in range(m):
        for j in range(m):
            if i == j or not leq[i][j]:
                continue
            if any(k != i and k != j and leq[i][k] and leq[k][j] for k in range(m)):
                continue
            covers.append((i, j))
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(m):
        lines.append(f'  n{i} [label="{label(i)}"];')
    for i, j in covers:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
