"""SVG dendrograms of cluster trees.

The horizontal axis is a branch layout and the vertical axis the density
level. Children are placed left to right by decreasing subtree size (ties:
higher birth first); a leaf gets the next free column and an internal node sits
midway between its outermost children. Removed edges are dashed. When a
confidence radius is known, a vertical bar of length ``2 t_hat`` is drawn at the
top right corner.
"""

from __future__ import annotations

from .errors import DataError

__all__ = ["dendrogram_layout", "render_svg"]

WIDTH = 480
HEIGHT = 360
MARGIN = 30


def _check_nodes(doc):
    try:
        nodes = doc["nodes"]
        root = int(doc["root"])
        lo, hi = (float(v) for v in doc["levels"])
        table = {}
        for nd in nodes:
            table[int(nd["id"])] = {
                "birth": float(nd["birth"]),
                "death": float(nd["death"]),
                "children": [int(c) for c in nd["children"]],
                "size": int(nd.get("size", 1)),
                "pruned": bool(nd.get("pruned", False)),
            }
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed tree document: {exc!r}", "cli") from None
    if root not in table or any(c not in table for nd in table.values() for c in nd["children"]):
        raise DataError("malformed tree document: dangling node reference", "cli")
    return table, root, lo, hi


def dendrogram_layout(doc: dict) -> dict:
    """Column (x, in leaf units) of every node of a serialized tree."""
    table, root, _, _ = _check_nodes(doc)
    x = {}
    col = 0
    # iterative post-order over children sorted by (size desc, birth desc)
    stack = [(root, False)]
    seen = set()
    while stack:
        i, done = stack.pop()
        kids = sorted(table[i]["children"], key=lambda c: (-table[c]["size"], -table[c]["birth"], c))
        if done:
            if kids:
                x[i] = (x[kids[0]] + x[kids[-1]]) / 2
            else:
                x[i] = float(col)
                col += 1
            continue
        if i in seen:
            raise DataError("malformed tree document: cycle in node graph", "cli")
        seen.add(i)
        stack.append((i, True))
        for c in reversed(kids):
            stack.append((c, False))
    return x


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(doc: dict, t_hat: float | None = None) -> str:
    """SVG text for a serialized tree (see ``serialize.tree_to_dict``)."""
    table, root, lo, hi = _check_nodes(doc)
    x = dendrogram_layout(doc)
    n_cols = max(1, sum(1 for nd in table.values() if not nd["children"]))
    span = hi - lo if hi > lo else 1.0
    plot_w = WIDTH - 3 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN

    def px(col):
        return MARGIN + (col + 0.5) * plot_w / n_cols

    def py(level):
        return MARGIN + (hi - level) * plot_h / span

    lines = []
    for i in sorted(table):
        nd = table[i]
        dash = ' stroke-dasharray="4,3"' if nd["pruned"] else ""
        if nd["birth"] > nd["death"]:
            lines.append(
                f'<line x1="{_fmt(px(x[i]))}" y1="{_fmt(py(nd["death"]))}" x2="{_fmt(px(x[i]))}" '
                f'y2="{_fmt(py(nd["birth"]))}"{dash}/>'
            )
        kids = nd["children"]
        if kids:
            xs = [x[c] for c in kids]
            # the joining bar belongs to the parent's top: dashed only if the parent is removed
            lines.append(
                f'<line x1="{_fmt(px(min(xs)))}" y1="{_fmt(py(nd["birth"]))}" x2="{_fmt(px(max(xs)))}" '
                f'y2="{_fmt(py(nd["birth"]))}"{dash}/>'
            )
    if t_hat is not None and t_hat > 0:
        bx = WIDTH - MARGIN
        lines.append(
            f'<line class="bar" x1="{_fmt(bx)}" y1="{_fmt(MARGIN)}" x2="{_fmt(bx)}" '
            f'y2="{_fmt(MARGIN + 2 * t_hat * plot_h / span)}" stroke-width="3"/>'
        )
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n<g stroke="black" stroke-width="1.5" fill="none">\n'
    )
    return head + "\n".join(lines) + "\n</g>\n</svg>\n"
