"""DOT and CSV writers for built spaces.  Output is a pure function of the graph."""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

from .cusped_graph import CayleyVertex, CuspVertex
from .errors import ExportError
from .horoball import HoroVertex
from .hyperbolicity import as_graph


def vertex_fields(label) -> tuple[str, str, int]:
    """(kind, element, depth) for any vertex label."""
    if isinstance(label, CayleyVertex):
        return "cayley", str(label.element), 0
    if isinstance(label, CuspVertex):
        return f"horoball{label.coset}", str(label.element), label.depth
    if isinstance(label, HoroVertex):
        return "horoball", str(label.element), label.depth
    return "vertex", str(label), 0


def node_label(label) -> str:
    kind, el, depth = vertex_fields(label)
    return f"{kind}/{el}/{depth}"


def to_dot(X) -> str:
    g = as_graph(X)
    out = ["graph cusped {"]
    for i, lab in enumerate(g.labels):
        text = node_label(lab).replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'  {i} [label="{text}"];')
    for u, v in g.edges.tolist():
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"


def to_csv(X) -> tuple[str, str]:
    g = as_graph(X)
    vbuf, ebuf = io.StringIO(), io.StringIO()
    w = csv.writer(vbuf, lineterminator="\n")
    w.writerow(["index", "kind", "element", "depth"])
    for i, lab in enumerate(g.labels):
        w.writerow([i, *vertex_fields(lab)])
    w = csv.writer(ebuf, lineterminator="\n")
    w.writerow(["u", "v"])
    w.writerows(g.edges.tolist())  # rows are already (lo, hi) and sorted
    return vbuf.getvalue(), ebuf.getvalue()


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc


def export_graph(X, fmt: str, path: str | os.PathLike) -> list[Path]:
    """Write ``X`` as ``dot`` (to the file ``path``) or ``csv`` (vertices.csv and
    edges.csv inside the directory ``path``).  Returns the written paths."""
    path = Path(path)
    if fmt == "dot":
        _write(path, to_dot(X))
        return [path]
    if fmt == "csv":
        verts, edges = to_csv(X)
        out = [path / "vertices.csv", path / "edges.csv"]
        _write(out[0], verts)
        _write(out[1], edges)
        return out
    raise ValueError(f"unknown export format {fmt!r}")
