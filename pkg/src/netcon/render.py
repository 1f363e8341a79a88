"""Text and SVG pictures of shapes and configurations.

Both renderers are pure functions of their input: the same shape or
configuration always gives byte-identical output.  Rows are printed top
(largest y) first.
"""

from __future__ import annotations

from .model import PORTS, Configuration, normalize_cells

FORMATS = ("ascii", "svg")
CELL = 24                     # svg pixels per grid cell


def _pieces(obj, spec=None, labels=False):
    """List of ``(cells -> char, edges, dashed)`` per drawn piece, in a canonical order."""
    if not isinstance(obj, Configuration):
        cells = normalize_cells(obj)
        grid = {c: "#" for c in cells}
        edges = {(a, b) for a in cells for b in cells
                 if a < b and abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1}
        return [(grid, sorted(edges), set())], 0
    cfg = obj
    pieces = []
    free = 0
    for cid in sorted(cfg.components):
        comp = cfg.components[cid]
        if len(comp) == 1 and not any((v, p) in cfg.edges for v in comp.cells.values() for p in PORTS):
            free += 1
            continue
        cells = normalize_cells(comp.cells)
        dx = min(c[0] for c in comp.cells)
        dy = min(c[1] for c in comp.cells)
        grid, edges, dashed = {}, set(), set()
        for cell, v in comp.cells.items():
            key = (cell[0] - dx, cell[1] - dy)
            s = cfg.states[v]
            if labels:
                grid[key] = (str(s) or "?")[0]
            else:
                grid[key] = "#" if spec is None or spec.is_output(s) else "o"
            for p in PORTS:
                other = cfg.edges.get((v, p))
                if other is None or (v, p) > other:
                    continue
                oc = cfg.pos[other[0]]
                e = tuple(sorted((key, (oc[0] - dx, oc[1] - dy))))
                edges.add(e)
                if spec is not None and not (spec.is_output(s) and spec.is_output(cfg.states[other[0]])):
                    dashed.add(e)
        assert set(grid) == set(cells)
        pieces.append((grid, sorted(edges), dashed))
    pieces.sort(key=lambda t: (-len(t[0]), sorted(t[0].items())))
    return pieces, free


def render_ascii(obj, spec=None, labels: bool = False) -> str:
    """One character per cell: ``#`` for (output) nodes, ``.`` for empty cells.

    For a configuration each attached component is drawn on its own; with a
    ``spec`` non-output nodes show as ``o``, and ``labels=True`` prints the
    first letter of every node's state instead.
    """
    pieces, free = _pieces(obj, spec, labels)
    blocks = []
    for grid, _edges, _dashed in pieces:
        w = max(c[0] for c in grid) + 1
        h = max(c[1] for c in grid) + 1
        rows = ["".join(grid.get((x, y), ".") for x in range(w)) for y in range(h - 1, -1, -1)]
        blocks.append("\n".join(rows))
    text = "\n\n".join(blocks)
    if isinstance(obj, Configuration):
        text += ("\n\n" if text else "") + f"free nodes: {free}"
    return text + "\n"


def render_svg(obj, spec=None, labels: bool = False) -> str:
    """Standalone SVG: unit squares for nodes, strokes for active edges.

    Edges touching a non-output node (the ones a release phase will cut) are
    drawn dashed.
    """
    pieces, free = _pieces(obj, spec, labels)
    parts = []
    x0 = 1
    height = 0
    for grid, edges, dashed in pieces:
        w = max(c[0] for c in grid) + 1
        h = max(c[1] for c in grid) + 1
        height = max(height, h)

        def centre(c, w=w, h=h, x0=x0):
            return ((x0 + c[0]) * CELL + CELL // 2, (1 + h - 1 - c[1]) * CELL + CELL // 2)

        for c in sorted(grid):
            px, py = centre(c)
            fill = "#333333" if grid[c] == "#" else "#dddddd"
            parts.append(f'<rect x="{px - 8}" y="{py - 8}" width="16" height="16" fill="{fill}"/>')
            if labels:
                parts.append(f'<text x="{px}" y="{py + 4}" font-size="10" text-anchor="middle" '
                             f'fill="#cc0000">{grid[c]}</text>')
        for a, b in edges:
            (ax, ay), (bx, by) = centre(a), centre(b)
            style = ' stroke-dasharray="3,3"' if (a, b) in dashed else ""
            parts.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="#000000" '
                         f'stroke-width="2"{style}/>')
        x0 += w + 1
    width = x0 * CELL
    total_h = (height + 2) * CELL
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total_h}" '
            f'viewBox="0 0 {width} {total_h}">')
    foot = []
    if isinstance(obj, Configuration):
        foot.append(f'<text x="{CELL}" y="{total_h - 6}" font-size="12">free nodes: {free}</text>')
    return "\n".join([head, '<rect width="100%" height="100%" fill="#ffffff"/>'] + parts + foot + ["</svg>"]) + "\n"


def render(obj, format: str = "ascii", spec=None, labels: bool = False) -> str:
    """Render a set of cells or a Configuration as ``ascii`` or ``svg``."""
    if format == "ascii":
        return render_ascii(obj, spec, labels)
    if format == "svg":
        return render_svg(obj, spec, labels)
    raise ValueError(f"unsupported format {format!r}; choose from {', '.join(FORMATS)}")
