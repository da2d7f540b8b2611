"""Rendering: canonical text, TikZ snippets, and matplotlib figures."""

from __future__ import annotations

from fractions import Fraction

from .diagram import Diagram, DNode, brace_groups, canonical_text, parse_diagram
from .polygon import NewtonPolygon

Q = Fraction


def to_text(d: Diagram) -> str:
    """Canonical nested form with {...} marking brace groups."""
    return canonical_text(d, "real")


def _fmt_label(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# TikZ
# ---------------------------------------------------------------------------

def diagram_to_tikz(d: Diagram) -> str:
    """Grow-right tree with rational labels and rounded-corner brace arcs."""
    # depth-first layout: leaves evenly spaced vertically, x by depth
    xstep, ystep = 1.0, 0.45
    pos = {}
    leaf_counter = [0]

    def place(node, depth):
        if node.is_leaf():
            y = -leaf_counter[0] * ystep
            leaf_counter[0] += 1
            pos[id(node)] = (depth * xstep, y)
            return y
        ys = [place(c, depth + 1) for c in node.children]
        y = sum(ys) / len(ys)
        pos[id(node)] = (depth * xstep, y)
        return y

    place(d.root, 0)
    lines = ["\\begin{tikzpicture}[grow=right]"]
    leaf_xy = {}

    def emit(node):
        x, y = pos[id(node)]
        if node.is_leaf():
            leaf_xy[node.leaf_id] = (x, y)
        lines.append(f"\\filldraw ({x:.2f},{y:.2f}) circle [radius=0.045];")
        for c in node.children:
            cx, cy = pos[id(c)]
            lines.append(f"\\draw ({x:.2f},{y:.2f}) -- ({cx:.2f},{cy:.2f});")
            emit(c)
        if not node.is_leaf():
            lines.append(
                f"\\node[above] at ({x + 0.45:.2f},{y + 0.05:.2f}) "
                f"{{${_fmt_label(node.split)}$}};")

    emit(d.root)

    def emit_braces(node):
        if node.is_leaf():
            return
        for grp in brace_groups(node, d.pairs):
            leaves = []
            for idx in grp:
                leaves.extend(node.children[idx].leaves())
            ys = [leaf_xy[l][1] for l in leaves if l in leaf_xy]
            xs = [leaf_xy[l][0] for l in leaves if l in leaf_xy]
            if not ys:
                continue
            bx = max(xs) + 0.18
            ymid = (max(ys) + min(ys)) / 2
            lines.append(
                f"\\draw[-, rounded corners, thick] ({bx:.2f},{min(ys):.2f}) -- "
                f"({bx + 0.14:.2f},{ymid:.2f}) -- ({bx:.2f},{max(ys):.2f});")
        for c in node.children:
            emit_braces(c)

    emit_braces(d.root)
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines)


def polygon_to_tikz(p: NewtonPolygon) -> str:
    """Polygon in the transposed axis orientation used by the source figures."""
    # draw in (y-exp, x-exp) axes so the picture matches convention
    pts = [(b, a) for a, b in p.support]
    maxc = max(7, max(x for xy in pts for x in xy))
    lines = [
        "\\begin{tikzpicture}[scale=.25]",
        f"\\draw[help lines] (0,0) grid ({maxc},{maxc});",
    ]
    for e in p.edges:
        u1, v1 = e.p1[1], e.p1[0]
        u2, v2 = e.p2[1], e.p2[0]
        lines.append(f"\\draw ({u1},{v1}) -- ({u2},{v2});")
    for (u, v) in sorted(pts):
        lines.append(f"\\draw[fill] ({u},{v}) circle [radius=0.25];")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines)


def to_tikz(obj) -> str:
    if isinstance(obj, Diagram):
        return diagram_to_tikz(obj)
    if isinstance(obj, NewtonPolygon):
        return polygon_to_tikz(obj)
    raise TypeError(f"cannot render {type(obj)!r} to TikZ")


# ---------------------------------------------------------------------------
# matplotlib (report figures)
# ---------------------------------------------------------------------------

def render_figure(path, diagram: Diagram | None = None,
                  polygon: NewtonPolygon | None = None, title: str = ""):
    """Render diagram and/or polygon side by side into an image file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ncols = (diagram is not None) + (polygon is not None)
    fig, axes = plt.subplots(1, max(ncols, 1), figsize=(4.2 * max(ncols, 1), 3.4))
    if ncols <= 1:
        axes = [axes]
    col = 0
    if polygon is not None:
        ax = axes[col]
        col += 1
        maxc = max(7, max(max(a, b) for a, b in polygon.support))
        for (a, b) in polygon.support:
            ax.plot(b, a, "ko", markersize=4)
        for e in polygon.edges:
            ax.plot([e.p1[1], e.p2[1]], [e.p1[0], e.p2[0]], "b-")
            midu = (e.p1[1] + e.p2[1]) / 2
            midv = (e.p1[0] + e.p2[0]) / 2
            ax.annotate(_fmt_label(e.mu), (midu, midv),
                        textcoords="offset points", xytext=(6, 6), fontsize=9)
        ax.set_xlim(-0.5, maxc + 0.5)
        ax.set_ylim(-0.5, maxc + 0.5)
        ax.set_xticks(range(maxc + 1))
        ax.set_yticks(range(maxc + 1))
        ax.grid(True, linewidth=0.3)
        ax.set_aspect("equal")
        ax.set_title("Newton polygon")
    if diagram is not None:
        ax = axes[col]
        pos = {}
        leaf_counter = [0]

        def place(node, depth):
            if node.is_leaf():
                y = -leaf_counter[0]
                leaf_counter[0] += 1
                pos[id(node)] = (depth, y, node)
                return y
            ys = [place(c, depth + 1) for c in node.children]
            y = sum(ys) / len(ys)
            pos[id(node)] = (depth, y, node)
            return y

        place(diagram.root, 0)
        leaf_xy = {}

        def emit(node):
            x, y, _ = pos[id(node)]
            if node.is_leaf():
                leaf_xy[node.leaf_id] = (x, y)
                ax.plot(x, y, "ko", markersize=5)
            else:
                ax.plot(x, y, "ko", markersize=3)
                ax.annotate(_fmt_label(node.split), (x, y),
                            textcoords="offset points", xytext=(2, 7),
                            fontsize=10, color="darkred")
                for c in node.children:
                    cx, cy, _ = pos[id(c)]
                    ax.plot([x, cx], [y, cy], "k-", linewidth=0.9)
                    emit(c)

        emit(diagram.root)

        def emit_braces(node):
            if node.is_leaf():
                return
            for grp in brace_groups(node, diagram.pairs):
                leaves = []
                for idx in grp:
                    leaves.extend(node.children[idx].leaves())
                pts = [leaf_xy[l] for l in leaves if l in leaf_xy]
                if not pts:
                    continue
                bx = max(x for x, _ in pts) + 0.25
                ys = [y for _, y in pts]
                ax.plot([bx, bx + 0.12, bx], [min(ys), (min(ys) + max(ys)) / 2,
                                              max(ys)],
                        "-", color="steelblue", linewidth=1.4,
                        solid_joinstyle="round")
            for c in node.children:
                emit_braces(c)

        emit_braces(diagram.root)
        ax.axis("off")
        ax.set_title("contact diagram")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
