"""Neighbor-joining trees over distance matrices, their unrooted layout and
export to Newick, Graphviz DOT and SVG."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from itertools import combinations
from typing import Iterable, Iterator
from xml.sax.saxutils import escape

from .distance import DistanceMatrix
from .errors import MissingLayout, StyleError, TooFewLabels

# Branch lengths are rounded to this many decimals so that float residue
# (0.04999999999999999) does not leak into exports.
LENGTH_DECIMALS = 12


@dataclass(eq=False)
class Node:
    id: int
    name: str | None = None
    length: float | None = None
    children: list[Node] = field(default_factory=list)
    parent: Node | None = field(default=None, repr=False)

    def is_leaf(self) -> bool:
        return not self.children

    def add(self, child: Node, length: float | None = None) -> None:
        child.parent = self
        if length is not None:
            child.length = length
        self.children.append(child)

    def preorder(self) -> Iterator[Node]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def postorder(self) -> Iterator[Node]:
        out = list(self.preorder())
        return reversed(out)

    def leaves(self) -> list[Node]:
        return [n for n in self.preorder() if n.is_leaf()]


@dataclass
class StyleTree:
    """An unrooted weighted tree, stored hanging from a central node.

    The root is only a drawing and serialization anchor; for neighbor
    joining it is the node where the last three clusters meet.
    """

    root: Node
    layout: dict[int, tuple[float, float]] | None = None
    angles: dict[int, float] | None = None
    notes: list[str] = field(default_factory=list)

    def nodes(self) -> list[Node]:
        return list(self.root.preorder())

    def leaves(self) -> list[Node]:
        return self.root.leaves()

    def leaf_names(self) -> list[str]:
        return [n.name for n in self.leaves()]

    def edges(self) -> list[tuple[Node, Node, float]]:
        return [(n.parent, n, n.length or 0.0) for n in self.root.preorder() if n.parent]

    def total_length(self) -> float:
        return math.fsum(length for _, _, length in self.edges())

    def find(self, name: str) -> Node:
        for node in self.root.preorder():
            if node.name == name and node.is_leaf():
                return node
        raise KeyError(name)

    def leaf_distances(self) -> dict[tuple[str, str], float]:
        """Path length between every ordered pair of distinct leaves."""
        adjacency: dict[int, list[tuple[Node, float]]] = {}
        for parent, child, length in self.edges():
            adjacency.setdefault(parent.id, []).append((child, length))
            adjacency.setdefault(child.id, []).append((parent, length))
        out = {}
        for leaf in self.leaves():
            dist = {leaf.id: 0.0}
            stack = [leaf]
            while stack:
                node = stack.pop()
                for other, length in adjacency.get(node.id, ()):
                    if other.id not in dist:
                        dist[other.id] = dist[node.id] + length
                        stack.append(other)
            for other in self.leaves():
                if other is not leaf:
                    out[(leaf.name, other.name)] = dist[other.id]
        return out

    def splits(self) -> set[frozenset[str]]:
        """Non-trivial bipartitions, each given by the side that does not
        contain the alphabetically first leaf."""
        names = set(self.leaf_names())
        anchor = min(names)
        out = set()
        for node in self.root.preorder():
            if node is self.root or node.is_leaf():
                continue
            side = frozenset(n.name for n in node.leaves())
            if len(side) < 2 or len(names - side) < 2:
                continue
            out.add(side if anchor not in side else frozenset(names - side))
        return out

    def mrca(self, names: Iterable[str]) -> Node:
        """Deepest node (with respect to the drawing root) above all ``names``."""
        paths = []
        for name in names:
            node, path = self.find(name), []
            while node is not None:
                path.append(node)
                node = node.parent
            paths.append(path[::-1])
        if not paths:
            raise ValueError("mrca needs at least one leaf name")
        common = self.root
        for level in zip(*paths):
            if all(n is level[0] for n in level):
                common = level[0]
            else:
                break
        return common


def _clean(length: float) -> float:
    return max(0.0, round(length, LENGTH_DECIMALS))


def _note_negative(notes: list[str], length: float, cluster: str) -> None:
    if length < -(10.0 ** -LENGTH_DECIMALS):
        notes.append(f"negative branch {length:.3g} to cluster {cluster!r} set to 0")


def _validate(matrix: DistanceMatrix) -> None:
    n = len(matrix.labels)
    if n < 3:
        raise TooFewLabels(f"neighbor joining needs at least 3 labels, got {n}")
    if len(set(matrix.labels)) != n:
        raise StyleError("distance matrix labels must be unique")
    v = matrix.values
    for i in range(n):
        if v[i][i] != 0.0:
            raise StyleError(f"non-zero diagonal at {matrix.labels[i]!r}")
        for j in range(i + 1, n):
            if v[i][j] != v[j][i]:
                raise StyleError(f"matrix not symmetric at ({matrix.labels[i]!r}, {matrix.labels[j]!r})")
            if v[i][j] < 0 or math.isnan(v[i][j]):
                raise StyleError("distances must be non-negative numbers")


def neighbor_joining(matrix: DistanceMatrix) -> StyleTree:
    """Build an unrooted tree by neighbor joining (Saitou & Nei).

    Labels are processed in sorted order and Q-criterion ties go to the
    lexicographically smallest pair (clusters are named by their smallest
    leaf label), so the result does not depend on input order. A negative
    branch estimate is set to zero and its deficit moved to the sibling
    branch, keeping the pair's summed length equal to their distance.
    """
    _validate(matrix)
    labels = matrix.labels
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    nodes = [Node(k, labels[i]) for k, i in enumerate(order)]
    keys = [labels[i] for i in order]
    d = [[matrix.values[i][j] for j in order] for i in order]
    next_id = len(nodes)
    notes: list[str] = []

    while len(nodes) > 3:
        k = len(nodes)
        r = [math.fsum(row) for row in d]
        tol = 1e-12 * (1.0 + max(abs(x) for x in r))
        best = None
        for i, j in combinations(range(k), 2):
            q = (k - 2) * d[i][j] - r[i] - r[j]
            pair = tuple(sorted((keys[i], keys[j])))
            if best is None or q < best[0] - tol or (abs(q - best[0]) <= tol and pair < best[1]):
                best = (q, pair, i, j)
        _, _, i, j = best
        dij = d[i][j]
        li = 0.5 * dij + (r[i] - r[j]) / (2.0 * (k - 2))
        lj = dij - li
        if li < 0.0:
            _note_negative(notes, li, keys[i])
            li, lj = 0.0, dij
        elif lj < 0.0:
            _note_negative(notes, lj, keys[j])
            li, lj = dij, 0.0
        joined = Node(next_id)
        next_id += 1
        pair = sorted([(keys[i], nodes[i], li), (keys[j], nodes[j], lj)], key=lambda t: t[0])
        for _, child, length in pair:
            joined.add(child, _clean(length))
        new_row = [0.5 * (d[i][m] + d[j][m] - dij) for m in range(k)]
        keep = [m for m in range(k) if m not in (i, j)]
        d = [[d[a][b] for b in keep] + [new_row[a]] for a in keep]
        d.append([new_row[a] for a in keep] + [0.0])
        nodes = [nodes[m] for m in keep] + [joined]
        keys = [keys[m] for m in keep] + [min(keys[i], keys[j])]

    # Three clusters left: join them at a central node.
    lengths = []
    for a in range(3):
        b, c = [x for x in range(3) if x != a]
        lengths.append(0.5 * (d[a][b] + d[a][c] - d[b][c]))
    for a in range(3):
        if lengths[a] < 0.0:
            # At most one of the three can be negative for non-negative input.
            _note_negative(notes, lengths[a], keys[a])
            lengths[a] = 0.0
    root = Node(next_id)
    for _, child, length in sorted(zip(keys, nodes, lengths), key=lambda t: t[0]):
        root.add(child, _clean(length))
    return StyleTree(root, notes=notes)


# Layout -------------------------------------------------------------------


def layout_equal_angle(tree: StyleTree, start_angle: float = 0.0) -> StyleTree:
    """Assign 2D coordinates with the equal-angle algorithm.

    Every subtree gets an angular wedge proportional to its number of leaves
    and each edge is drawn along the bisector of its child's wedge, with
    Euclidean length equal to the branch length. Returns the same tree.
    """
    counts: dict[int, int] = {}
    for node in tree.root.postorder():
        counts[node.id] = 1 if node.is_leaf() else sum(counts[c.id] for c in node.children)
    layout = {tree.root.id: (0.0, 0.0)}
    angles = {tree.root.id: 0.0}
    stack = [(tree.root, start_angle, 2.0 * math.pi)]
    while stack:
        node, lo, width = stack.pop()
        x, y = layout[node.id]
        for child in node.children:
            share = width * counts[child.id] / counts[node.id]
            theta = lo + share / 2.0
            length = child.length or 0.0
            layout[child.id] = (x + length * math.cos(theta), y + length * math.sin(theta))
            angles[child.id] = theta
            stack.append((child, lo, share))
            lo += share
    tree.layout = layout
    tree.angles = angles
    return tree


# Newick -------------------------------------------------------------------

_NEWICK_SPECIAL = set("()[]':;, \t\n\r")


def format_length(value: float) -> str:
    """Shortest round-tripping decimal, never in exponent notation."""
    text = format(Decimal(repr(float(value))), "f")
    return text if "." in text else text + ".0"


def _quote(name: str) -> str:
    # Unquoted underscores read back as spaces, so quote those too.
    if name and not any(ch in _NEWICK_SPECIAL or ch == "_" for ch in name):
        return name
    return "'" + name.replace("'", "''") + "'"


def to_newick(tree: StyleTree) -> str:
    parts: list[str] = []

    def emit(node: Node) -> None:
        if node.children:
            parts.append("(")
            for idx, child in enumerate(node.children):
                if idx:
                    parts.append(",")
                emit(child)
            parts.append(")")
        if node.name is not None:
            parts.append(_quote(node.name))
        if node.length is not None:
            parts.append(":" + format_length(node.length))

    emit(tree.root)
    return "".join(parts) + ";"


class NewickError(StyleError):
    pass


class _NewickParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.next_id = 0

    def error(self, message: str) -> NewickError:
        return NewickError(f"Newick parse error at offset {self.pos}: {message}")

    def skip(self) -> None:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = text.find("]", self.pos)
                if end == -1:
                    raise self.error("unterminated comment")
                self.pos = end + 1
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> StyleTree:
        root = self.subtree()
        if self.peek() != ";":
            raise self.error("expected ';'")
        self.pos += 1
        if self.peek():
            raise self.error("trailing characters after ';'")
        return StyleTree(root)

    def subtree(self) -> Node:
        node = Node(self.next_id)
        self.next_id += 1
        if self.peek() == "(":
            self.pos += 1
            while True:
                node.add(self.subtree())
                ch = self.peek()
                self.pos += 1
                if ch == ")":
                    break
                if ch != ",":
                    raise self.error("expected ',' or ')'")
        name = self.label()
        if name:
            node.name = name
        if self.peek() == ":":
            self.pos += 1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] not in _NEWICK_SPECIAL:
                self.pos += 1
            try:
                node.length = float(self.text[start:self.pos])
            except ValueError:
                raise self.error(f"bad branch length {self.text[start:self.pos]!r}") from None
        if node.is_leaf() and node.name is None:
            raise self.error("leaf without a label")
        return node

    def label(self) -> str:
        if self.peek() == "'":
            self.pos += 1
            out = []
            while True:
                end = self.text.find("'", self.pos)
                if end == -1:
                    raise self.error("unterminated quoted label")
                out.append(self.text[self.pos:end])
                self.pos = end + 1
                if self.text.startswith("'", self.pos):
                    out.append("'")
                    self.pos += 1
                else:
                    return "".join(out)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _NEWICK_SPECIAL:
            self.pos += 1
        return self.text[start:self.pos].replace("_", " ")


def parse_newick(text: str) -> StyleTree:
    """Parse one Newick tree. Unquoted underscores become spaces, as the
    format prescribes; quoted labels are taken verbatim."""
    return _NewickParser(text.strip()).parse()


# DOT ----------------------------------------------------------------------


def _dot_id(node: Node) -> str:
    return f"n{node.id}"


def to_dot(tree: StyleTree) -> str:
    lines = ["graph style_tree {", "  node [shape=point];"]
    for node in tree.root.preorder():
        if node.is_leaf():
            label = node.name.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  {_dot_id(node)} [shape=plaintext, label="{label}"];')
    for parent, child, length in tree.edges():
        text = format_length(length)
        lines.append(f'  {_dot_id(parent)} -- {_dot_id(child)} [label="{text}", len={text}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# SVG ----------------------------------------------------------------------

CHAR_WIDTH = 0.6  # estimated glyph advance, in font-size units
LINE_HEIGHT = 1.2


@dataclass
class _Label:
    text: str
    x: float
    y: float  # vertical centre
    anchor: str
    width: float
    leaf_xy: tuple[float, float]
    y0: float = 0.0

    def __post_init__(self):
        self.y0 = self.y

    def x_range(self) -> tuple[float, float]:
        return (self.x, self.x + self.width) if self.anchor == "start" else (self.x - self.width, self.x)


def _place_labels(labels: list[_Label], height: float) -> None:
    """Push labels down until no two estimated boxes intersect."""
    placed: list[_Label] = []
    for lab in sorted(labels, key=lambda l: (l.y, l.x, l.text)):
        x0, x1 = lab.x_range()
        moved = True
        while moved:
            moved = False
            for other in placed:
                ox0, ox1 = other.x_range()
                if x0 < ox1 and ox0 < x1 and abs(lab.y - other.y) < height:
                    lab.y = other.y + height
                    moved = True
        placed.append(lab)


def _nice_step(span: float) -> float:
    if span <= 0:
        return 0.0
    raw = span / 5.0
    exp = math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if mult * 10 ** exp >= raw:
            return mult * 10 ** exp
    return 10 ** (exp + 1)


def _f(value: float) -> str:
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def to_svg(tree: StyleTree, size: float = 640.0, font_size: float = 12.0,
           highlight: Iterable[Node] = (), title: str = "") -> str:
    """Draw a laid-out tree as a standalone SVG document.

    ``highlight`` nodes get a red dot (e.g. the point where a cluster of
    interest branches off). Leaf labels are placed beside their leaf along
    its ray and nudged downward, with a leader line, when they would
    otherwise overlap.
    """
    if tree.layout is None or tree.angles is None:
        raise MissingLayout("tree has no layout; run layout_equal_angle first")
    xs = [p[0] for p in tree.layout.values()]
    ys = [p[1] for p in tree.layout.values()]
    extent = max(max(xs) - min(xs), max(ys) - min(ys))
    scale = size / extent if extent > 0 else 1.0

    def px(node: Node) -> tuple[float, float]:
        x, y = tree.layout[node.id]
        return x * scale, -y * scale

    labels = []
    gap = 0.5 * font_size
    for leaf in tree.leaves():
        lx, ly = px(leaf)
        theta = tree.angles[leaf.id]
        cx, cy = lx + gap * math.cos(theta), ly - gap * math.sin(theta)
        anchor = "start" if math.cos(theta) >= -1e-9 else "end"
        labels.append(_Label(leaf.name, cx, cy, anchor,
                             CHAR_WIDTH * font_size * len(leaf.name), (lx, ly)))
    # The extra 0.1 keeps boxes apart after attributes are rounded to 2 decimals.
    _place_labels(labels, LINE_HEIGHT * font_size + 0.1)

    min_x = min([*(l.x_range()[0] for l in labels), *(px(n)[0] for n in tree.nodes())])
    max_x = max([*(l.x_range()[1] for l in labels), *(px(n)[0] for n in tree.nodes())])
    min_y = min([*(l.y - font_size for l in labels), *(px(n)[1] for n in tree.nodes())])
    max_y = max([*(l.y + font_size for l in labels), *(px(n)[1] for n in tree.nodes())])
    margin = 2 * font_size
    bar_space = 3 * font_size
    vx, vy = min_x - margin, min_y - margin
    vw, vh = (max_x - min_x) + 2 * margin, (max_y - min_y) + 2 * margin + bar_space

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(vw)}" height="{_f(vh)}" '
        f'viewBox="{_f(vx)} {_f(vy)} {_f(vw)} {_f(vh)}" '
        f'font-family="sans-serif" font-size="{_f(font_size)}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append('<g class="edges" stroke="black" stroke-width="1.5" stroke-linecap="round">')
    for parent, child, _ in tree.edges():
        (x1, y1), (x2, y2) = px(parent), px(child)
        out.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}"/>')
    out.append("</g>")
    out.append('<g class="leaders" stroke="#999999" stroke-width="0.75" stroke-dasharray="2,2">')
    for lab in labels:
        lx, ly = lab.leaf_xy
        if lab.y != lab.y0:
            out.append(f'<line x1="{_f(lx)}" y1="{_f(ly)}" x2="{_f(lab.x)}" y2="{_f(lab.y)}"/>')
    out.append("</g>")
    highlight = list(highlight)
    if highlight:
        out.append('<g class="highlights" fill="red">')
        for node in highlight:
            x, y = px(node)
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(font_size / 3)}"/>')
        out.append("</g>")
    out.append('<g class="leaf-labels" fill="black">')
    for lab in labels:
        out.append(f'<text class="leaf-label" x="{_f(lab.x)}" y="{_f(lab.y + 0.35 * font_size)}" '
                   f'text-anchor="{lab.anchor}">{escape(lab.text)}</text>')
    out.append("</g>")
    step = _nice_step(extent)
    if step > 0:
        bx, by = min_x, max_y + 2 * font_size
        out.append('<g class="scale-bar" stroke="black" stroke-width="1.5">')
        out.append(f'<line x1="{_f(bx)}" y1="{_f(by)}" x2="{_f(bx + step * scale)}" y2="{_f(by)}"/>')
        out.append(f'<text x="{_f(bx)}" y="{_f(by + 1.2 * font_size)}" stroke="none">'
                   f"{format_length(float(f'{step:.6g}'))}</text>")
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_tree(tree: StyleTree, fmt: str, **options) -> str:
    if fmt == "newick":
        return to_newick(tree) + "\n"
    if fmt == "dot":
        return to_dot(tree)
    if fmt == "svg":
        return to_svg(tree, **options)
    raise ValueError(f"unknown tree format {fmt!r}; use newick, dot or svg")


def tree_from_matrix(matrix: DistanceMatrix) -> StyleTree:
    return layout_equal_angle(neighbor_joining(matrix))
