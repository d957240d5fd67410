"""Convex-concave objectives as expression trees with explicit kink choices.

Objectives are built from a small set of node types (constants, variables,
sums, products, integer powers, absolute values, affine forms). Subgradients
are obtained by formal forward-mode differentiation; at a kink of an
absolute-value node the derivative is taken from an explicit per-node
selection constant in [-1, 1] instead of sign(0). The formal rules produce a
valid subgradient whenever the expression is convex (resp. concave) in the
differentiated block, which the library checks by sampling, not by proof.

Two evaluation paths exist: a recursive reference interpreter and a code
generator (:func:`compile_objective`) producing plain-Python closures used by
the hot loops. Tests assert they agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


# ---------------------------------------------------------------------------
# node types
# ---------------------------------------------------------------------------

class Expr:
    """Base class for expression nodes. Immutable after construction."""

    def __add__(self, other):
        return Sum((self, _as_expr(other)))

    def __radd__(self, other):
        return Sum((_as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Neg(_as_expr(other))))

    def __rsub__(self, other):
        return Sum((_as_expr(other), Neg(self)))

    def __neg__(self):
        return Neg(self)

    def __mul__(self, other):
        return Prod((self, _as_expr(other)))

    def __rmul__(self, other):
        return Prod((_as_expr(other), self))

    def __pow__(self, n):
        return Pow(self, int(n))


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    side: str  # "x" or "y"
    index: int

    def __post_init__(self):
        if self.side not in ("x", "y"):
            raise ValueError(f"variable side must be 'x' or 'y', got {self.side!r}")
        if self.index < 0:
            raise ValueError("variable index must be nonnegative")


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr

    def __post_init__(self):
        object.__setattr__(self, "child", _as_expr(self.child))


@dataclass(frozen=True)
class Sum(Expr):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(_as_expr(c) for c in self.children))


@dataclass(frozen=True)
class Scale(Expr):
    factor: float
    child: Expr

    def __post_init__(self):
        object.__setattr__(self, "factor", float(self.factor))
        object.__setattr__(self, "child", _as_expr(self.child))


@dataclass(frozen=True)
class Prod(Expr):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(_as_expr(c) for c in self.children))


@dataclass(frozen=True)
class Pow(Expr):
    child: Expr
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "child", _as_expr(self.child))
        if self.exponent < 1:
            raise ValueError("integer power exponent must be >= 1")


@dataclass(frozen=True)
class Abs(Expr):
    child: Expr

    def __post_init__(self):
        object.__setattr__(self, "child", _as_expr(self.child))


@dataclass(frozen=True)
class Affine(Expr):
    coeff_x: tuple
    coeff_y: tuple
    offset: float


def _as_expr(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float)):
        return Const(float(v))
    raise TypeError(f"cannot coerce {type(v).__name__} to Expr")


def x_var(index: int = 0) -> Var:
    return Var("x", index)


def y_var(index: int = 0) -> Var:
    return Var("y", index)


def abs_nodes(e: Expr) -> list:
    """Absolute-value nodes of `e` in preorder. Selection keys refer to
    positions in this list."""
    found = []

    def walk(node):
        if isinstance(node, Abs):
            found.append(node)
        for c in _children(node):
            walk(c)

    walk(e)
    return found


def _children(node):
    if isinstance(node, (Neg, Scale, Pow, Abs)):
        return (node.child,)
    if isinstance(node, (Sum, Prod)):
        return node.children
    return ()


def dimensions(e: Expr) -> tuple:
    """(m1, m2) implied by the highest variable indices appearing in `e`."""
    mx, my = 0, 0
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            if node.side == "x":
                mx = max(mx, node.index + 1)
            else:
                my = max(my, node.index + 1)
        elif isinstance(node, Affine):
            mx = max(mx, len(node.coeff_x))
            my = max(my, len(node.coeff_y))
        stack.extend(_children(node))
    return mx, my


# ---------------------------------------------------------------------------
# kink selections
# ---------------------------------------------------------------------------

def check_selection(e: Expr, sel: dict) -> dict:
    """Validate a kink-selection map for `e` and fill defaults (0.0).

    Keys index the preorder list of absolute-value nodes; values are the
    derivative chosen when the node argument is exactly zero.
    """
    n_abs = len(abs_nodes(e))
    out = {i: 0.0 for i in range(n_abs)}
    for k, v in (sel or {}).items():
        k = int(k)
        if not 0 <= k < n_abs:
            raise ValidationError(f"selection key {k} out of range (expression has {n_abs} abs nodes)")
        v = float(v)
        if not -1.0 <= v <= 1.0:
            raise ValidationError(f"selection constant {v} outside [-1, 1]")
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# reference interpreter
# ---------------------------------------------------------------------------

def evaluate(e: Expr, x, y) -> float:
    """Exact recursive evaluation of `e` at (x, y)."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    mx, my = dimensions(e)
    if len(x) < mx or len(y) < my:
        raise ValueError(f"expression needs dims >= ({mx},{my}), got ({len(x)},{len(y)})")
    return _eval(e, x, y)


def _eval(e, x, y):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(x[e.index] if e.side == "x" else y[e.index])
    if isinstance(e, Neg):
        return -_eval(e.child, x, y)
    if isinstance(e, Sum):
        return sum(_eval(c, x, y) for c in e.children)
    if isinstance(e, Scale):
        return e.factor * _eval(e.child, x, y)
    if isinstance(e, Prod):
        v = 1.0
        for c in e.children:
            v *= _eval(c, x, y)
        return v
    if isinstance(e, Pow):
        return _eval(e.child, x, y) ** e.exponent
    if isinstance(e, Abs):
        return abs(_eval(e.child, x, y))
    if isinstance(e, Affine):
        return (sum(c * x[d] for d, c in enumerate(e.coeff_x))
                + sum(c * y[d] for d, c in enumerate(e.coeff_y)) + e.offset)
    raise TypeError(f"unknown node {type(e).__name__}")


def _grad(e, x, y, sel, counter):
    """Forward-mode pass returning (value, dvalue/dx, dvalue/dy)."""
    if isinstance(e, Const):
        return e.value, np.zeros(len(x)), np.zeros(len(y))
    if isinstance(e, Var):
        gx, gy = np.zeros(len(x)), np.zeros(len(y))
        if e.side == "x":
            gx[e.index] = 1.0
            return float(x[e.index]), gx, gy
        gy[e.index] = 1.0
        return float(y[e.index]), gx, gy
    if isinstance(e, Neg):
        v, gx, gy = _grad(e.child, x, y, sel, counter)
        return -v, -gx, -gy
    if isinstance(e, Scale):
        v, gx, gy = _grad(e.child, x, y, sel, counter)
        return e.factor * v, e.factor * gx, e.factor * gy
    if isinstance(e, Sum):
        v, gx, gy = 0.0, np.zeros(len(x)), np.zeros(len(y))
        for c in e.children:
            cv, cgx, cgy = _grad(c, x, y, sel, counter)
            v += cv
            gx += cgx
            gy += cgy
        return v, gx, gy
    if isinstance(e, Prod):
        parts = [_grad(c, x, y, sel, counter) for c in e.children]
        v = 1.0
        for pv, _, _ in parts:
            v *= pv
        gx, gy = np.zeros(len(x)), np.zeros(len(y))
        for i, (_, cgx, cgy) in enumerate(parts):
            rest = 1.0
            for j, (pv, _, _) in enumerate(parts):
                if j != i:
                    rest *= pv
            gx += rest * cgx
            gy += rest * cgy
        return v, gx, gy
    if isinstance(e, Pow):
        cv, cgx, cgy = _grad(e.child, x, y, sel, counter)
        n = e.exponent
        d = n * cv ** (n - 1)
        return cv ** n, d * cgx, d * cgy
    if isinstance(e, Abs):
        idx = counter[0]
        counter[0] += 1
        cv, cgx, cgy = _grad(e.child, x, y, sel, counter)
        s = 1.0 if cv > 0 else (-1.0 if cv < 0 else sel[idx])
        return abs(cv), s * cgx, s * cgy
    if isinstance(e, Affine):
        v = _eval(e, x, y)
        gx, gy = np.zeros(len(x)), np.zeros(len(y))
        gx[:len(e.coeff_x)] = e.coeff_x
        gy[:len(e.coeff_y)] = e.coeff_y
        return v, gx, gy
    raise TypeError(f"unknown node {type(e).__name__}")


def subgradient_x(e: Expr, x, y, sel=None) -> np.ndarray:
    """Formal derivative of `e` in the x block with kink selections.

    For `e` convex in x this is an element of the convex subdifferential.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    sel = check_selection(e, sel)
    _, gx, _ = _grad(e, x, y, sel, [0])
    return gx


def subgradient_y(e: Expr, x, y, sel=None) -> np.ndarray:
    """Formal derivative of `e` in the y block with kink selections.

    For `e` concave in y this is an element of the concave subdifferential.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    sel = check_selection(e, sel)
    _, _, gy = _grad(e, x, y, sel, [0])
    return gy


# ---------------------------------------------------------------------------
# code generation
# ---------------------------------------------------------------------------

def _sgn_scalar(u, c):
    return 1.0 if u > 0.0 else (-1.0 if u < 0.0 else c)


def _sgn_vector(u, c):
    return np.where(u > 0.0, 1.0, np.where(u < 0.0, -1.0, c))


def compile_objective(e: Expr, sel=None, m1: int = 1, m2: int = 1,
                      which: str = "both", vector: bool = False):
    """Generate a closure computing `e` and its formal block derivatives.

    Returns ``f(x, y)`` where x, y are indexable sequences of components.
    Depending on `which` ("value", "x", "y", "both") the result is the value,
    ``(value, gx)``, ``(value, gy)`` or ``(value, gx, gy)`` with gradients as
    tuples. With ``vector=True`` the emitted code is numpy-broadcast safe and
    components may be arrays.
    """
    if which not in ("value", "x", "y", "both"):
        raise ValueError(f"bad which={which!r}")
    sel = check_selection(e, sel)
    want_x = which in ("x", "both")
    want_y = which in ("y", "both")
    gen = _CodeGen(sel, m1, m2, want_x, want_y)
    val, gx, gy = gen.emit(e)
    lines = ["def _compiled(x, y):"]
    lines += ["    " + ln for ln in gen.lines]
    ret = [val]
    if want_x:
        ret.append("(" + ", ".join(gx) + ("," if m1 == 1 else "") + ")")
    if want_y:
        ret.append("(" + ", ".join(gy) + ("," if m2 == 1 else "") + ")")
    lines.append("    return " + (ret[0] if len(ret) == 1 else ", ".join(ret)))
    src = "\n".join(lines)
    env = {"_sgn": _sgn_vector if vector else _sgn_scalar,
           "abs": np.abs if vector else abs}
    exec(src, env)  # noqa: S102 - source is generated locally from the tree
    fn = env["_compiled"]
    fn.__nashnet_source__ = src
    return fn


class _CodeGen:
    def __init__(self, sel, m1, m2, want_x, want_y):
        self.sel = sel
        self.m1, self.m2 = m1, m2
        self.want_x, self.want_y = want_x, want_y
        self.lines = []
        self.n = 0
        self.abs_idx = 0

    def tmp(self, code):
        self.n += 1
        name = f"t{self.n}"
        self.lines.append(f"{name} = {code}")
        return name

    def emit(self, e):
        """Return (value_code, gx_codes, gy_codes); gradient entries are code
        strings, "0.0" when structurally zero."""
        zx = ["0.0"] * self.m1
        zy = ["0.0"] * self.m2
        if isinstance(e, Const):
            return repr(e.value), zx, zy
        if isinstance(e, Var):
            if e.side == "x":
                g = list(zx)
                g[e.index] = "1.0"
                return f"x[{e.index}]", g, zy
            g = list(zy)
            g[e.index] = "1.0"
            return f"y[{e.index}]", zx, g
        if isinstance(e, Neg):
            v, gx, gy = self.emit(e.child)
            return (f"(-{v})",
                    [g if g == "0.0" else f"(-{g})" for g in gx],
                    [g if g == "0.0" else f"(-{g})" for g in gy])
        if isinstance(e, Scale):
            v, gx, gy = self.emit(e.child)
            c = repr(e.factor)
            return (f"({c} * {v})",
                    [g if g == "0.0" else f"({c} * {g})" for g in gx],
                    [g if g == "0.0" else f"({c} * {g})" for g in gy])
        if isinstance(e, Sum):
            parts = [self.emit(c) for c in e.children]
            v = self.tmp(" + ".join(p[0] for p in parts))
            gx = [self._add([p[1][d] for p in parts]) for d in range(self.m1)]
            gy = [self._add([p[2][d] for p in parts]) for d in range(self.m2)]
            return v, gx, gy
        if isinstance(e, Prod):
            parts = []
            for c in e.children:
                cv, cgx, cgy = self.emit(c)
                parts.append((self.tmp(cv) if not cv.startswith("t") else cv, cgx, cgy))
            v = self.tmp(" * ".join(p[0] for p in parts))
            gx, gy = [], []
            for d in range(self.m1):
                terms = []
                for i, (_, cgx, _) in enumerate(parts):
                    if cgx[d] != "0.0":
                        rest = [p[0] for j, p in enumerate(parts) if j != i]
                        terms.append(" * ".join(rest + [cgx[d]]) if rest else cgx[d])
                gx.append(self._add(terms) if terms else "0.0")
            for d in range(self.m2):
                terms = []
                for i, (_, _, cgy) in enumerate(parts):
                    if cgy[d] != "0.0":
                        rest = [p[0] for j, p in enumerate(parts) if j != i]
                        terms.append(" * ".join(rest + [cgy[d]]) if rest else cgy[d])
                gy.append(self._add(terms) if terms else "0.0")
            return v, gx, gy
        if isinstance(e, Pow):
            cv, cgx, cgy = self.emit(e.child)
            base = self.tmp(cv) if not cv.startswith("t") else cv
            n = e.exponent
            v = self.tmp(f"{base} ** {n}")
            if n == 1:
                d = "1.0"
            elif n == 2:
                d = self.tmp(f"2.0 * {base}")
            else:
                d = self.tmp(f"{n}.0 * {base} ** {n - 1}")
            gx = [g if g == "0.0" else f"({d} * {g})" for g in cgx]
            gy = [g if g == "0.0" else f"({d} * {g})" for g in cgy]
            return v, gx, gy
        if isinstance(e, Abs):
            idx = self.abs_idx
            self.abs_idx += 1
            cv, cgx, cgy = self.emit(e.child)
            base = self.tmp(cv) if not cv.startswith("t") else cv
            v = self.tmp(f"abs({base})")
            s = self.tmp(f"_sgn({base}, {repr(self.sel[idx])})")
            gx = [g if g == "0.0" else f"({s} * {g})" for g in cgx]
            gy = [g if g == "0.0" else f"({s} * {g})" for g in cgy]
            return v, gx, gy
        if isinstance(e, Affine):
            terms = [f"{repr(c)} * x[{d}]" for d, c in enumerate(e.coeff_x) if c != 0.0]
            terms += [f"{repr(c)} * y[{d}]" for d, c in enumerate(e.coeff_y) if c != 0.0]
            terms.append(repr(e.offset))
            v = self.tmp(" + ".join(terms))
            gx = [repr(float(c)) if d < len(e.coeff_x) and (c := e.coeff_x[d]) != 0.0 else "0.0"
                  for d in range(self.m1)]
            gy = [repr(float(c)) if d < len(e.coeff_y) and (c := e.coeff_y[d]) != 0.0 else "0.0"
                  for d in range(self.m2)]
            return v, gx, gy
        raise TypeError(f"unknown node {type(e).__name__}")

    def _add(self, terms):
        terms = [t for t in terms if t != "0.0"]
        if not terms:
            return "0.0"
        if len(terms) == 1:
            return terms[0]
        return "(" + " + ".join(terms) + ")"


# ---------------------------------------------------------------------------
# boxes and projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxSet:
    """Axis-aligned box [lower, upper] per dimension."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi):
            raise ValidationError("box lower/upper dimension mismatch")
        if any(l > u for l, u in zip(lo, hi)):
            raise ValidationError("box has lower > upper in some dimension")

    @property
    def dim(self):
        return len(self.lower)

    def center(self):
        return np.array([(l + u) / 2.0 for l, u in zip(self.lower, self.upper)])

    def contains(self, p, tol=0.0):
        p = np.asarray(p, dtype=float).ravel()
        return bool(np.all(p >= np.array(self.lower) - tol)
                    and np.all(p <= np.array(self.upper) + tol))


def project(p, box: BoxSet) -> np.ndarray:
    """Euclidean projection onto a box: componentwise clamp."""
    p = np.asarray(p, dtype=float).ravel()
    if len(p) != box.dim:
        raise ValueError(f"point dim {len(p)} != box dim {box.dim}")
    return np.clip(p, box.lower, box.upper)


# ---------------------------------------------------------------------------
# sampled bounds and convexity diagnostics
# ---------------------------------------------------------------------------

def lipschitz_bound(e: Expr, bx: BoxSet, by: BoxSet, grid: int = 21, sel=None) -> float:
    """Sampled estimate of the subgradient bound over the box grid.

    The true bound is existential; this maximizes the block-derivative norms
    on a regular grid and is flagged everywhere as an estimate.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2 per dimension")
    sel = check_selection(e, sel)
    axes = [np.linspace(l, u, grid) for l, u in zip(bx.lower, bx.upper)]
    axes += [np.linspace(l, u, grid) for l, u in zip(by.lower, by.upper)]
    best = 0.0
    mesh = np.meshgrid(*axes, indexing="ij") if axes else []
    pts = np.stack([m.ravel() for m in mesh], axis=-1) if mesh else np.zeros((1, 0))
    m1 = bx.dim
    for row in pts:
        x, yv = row[:m1], row[m1:]
        _, gx, gy = _grad(e, x, yv, sel, [0])
        best = max(best, float(np.linalg.norm(gx)), float(np.linalg.norm(gy)))
    return best


def sample_convexity(e: Expr, bx: BoxSet, by: BoxSet, trials: int = 1000,
                     seed: int = 0, tol: float = 1e-9) -> list:
    """Midpoint-inequality sampling of convexity in x and concavity in y.

    Returns a list of warning strings (empty means no violation found on the
    sample). A warning is evidence against the declared convex-concave flag,
    never a proof either way.
    """
    rng = np.random.default_rng(seed)
    # unbounded boxes are sampled on a wide finite window
    lo_x, hi_x = np.clip(bx.lower, -1e6, 1e6), np.clip(bx.upper, -1e6, 1e6)
    lo_y, hi_y = np.clip(by.lower, -1e6, 1e6), np.clip(by.upper, -1e6, 1e6)
    warnings = []
    worst_x = worst_y = 0.0
    for _ in range(trials):
        x0 = rng.uniform(lo_x, hi_x)
        x1 = rng.uniform(lo_x, hi_x)
        yv = rng.uniform(lo_y, hi_y)
        mid = evaluate(e, (x0 + x1) / 2, yv)
        chord = 0.5 * (evaluate(e, x0, yv) + evaluate(e, x1, yv))
        worst_x = max(worst_x, mid - chord)
        y0 = rng.uniform(lo_y, hi_y)
        y1 = rng.uniform(lo_y, hi_y)
        xv = rng.uniform(lo_x, hi_x)
        midv = evaluate(e, xv, (y0 + y1) / 2)
        chordv = 0.5 * (evaluate(e, xv, y0) + evaluate(e, xv, y1))
        worst_y = max(worst_y, chordv - midv)
    if worst_x > tol:
        warnings.append(f"convexity in x violated on sample by {worst_x:.3e}")
    if worst_y > tol:
        warnings.append(f"concavity in y violated on sample by {worst_y:.3e}")
    return warnings


# ---------------------------------------------------------------------------
# prefix-notation serialization
# ---------------------------------------------------------------------------

def format_expr(e: Expr) -> str:
    """Render `e` in the prefix notation used by scenario files."""
    if isinstance(e, Const):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return f"{e.side}{e.index}"
    if isinstance(e, Neg):
        return f"(neg {format_expr(e.child)})"
    if isinstance(e, Sum):
        # (sub a b) round-trips as written; general sums use add
        if len(e.children) == 2 and isinstance(e.children[1], Neg):
            return f"(sub {format_expr(e.children[0])} {format_expr(e.children[1].child)})"
        return "(add " + " ".join(format_expr(c) for c in e.children) + ")"
    if isinstance(e, Scale):
        return f"(scale {_fmt_num(e.factor)} {format_expr(e.child)})"
    if isinstance(e, Prod):
        return "(mul " + " ".join(format_expr(c) for c in e.children) + ")"
    if isinstance(e, Pow):
        return f"(pow {format_expr(e.child)} {e.exponent})"
    if isinstance(e, Abs):
        return f"(abs {format_expr(e.child)})"
    if isinstance(e, Affine):
        return ("(affine (" + " ".join(_fmt_num(c) for c in e.coeff_x) + ") ("
                + " ".join(_fmt_num(c) for c in e.coeff_y) + ") "
                + _fmt_num(e.offset) + ")")
    raise TypeError(f"unknown node {type(e).__name__}")


def _fmt_num(v):
    v = float(v)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def parse_expr(text: str) -> Expr:
    """Parse prefix notation, e.g. ``(sub (pow (sub x0 1) 4) (mul 2 (pow y0 2)))``."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise ValidationError("empty expression")
    expr, rest = _parse(tokens)
    if rest:
        raise ValidationError(f"trailing tokens in expression: {' '.join(rest)}")
    return expr


def _parse(tokens):
    tok, rest = tokens[0], tokens[1:]
    if tok == ")":
        raise ValidationError("unexpected ')'")
    if tok != "(":
        return _parse_atom(tok), rest
    if not rest:
        raise ValidationError("unterminated '('")
    op, rest = rest[0], rest[1:]
    args = []
    while True:
        if not rest:
            raise ValidationError("unterminated '('")
        if rest[0] == ")":
            rest = rest[1:]
            break
        if op == "affine" and rest[0] == "(":
            # coefficient list literal
            close = rest.index(")")
            args.append([float(t) for t in rest[1:close]])
            rest = rest[close + 1:]
            continue
        a, rest = _parse(rest)
        args.append(a)
    return _build(op, args), rest


def _parse_atom(tok):
    if tok and tok[0] in "xy" and tok[1:].isdigit():
        return Var(tok[0], int(tok[1:]))
    try:
        return Const(float(tok))
    except ValueError:
        raise ValidationError(f"bad token {tok!r} in expression") from None


def _build(op, args):
    def num(a):
        if isinstance(a, Const):
            return a.value
        raise ValidationError(f"expected a number argument for {op}")

    if op == "add":
        return Sum(tuple(args))
    if op == "sub":
        if len(args) != 2:
            raise ValidationError("sub takes exactly 2 arguments")
        return Sum((args[0], Neg(args[1])))
    if op == "neg":
        if len(args) != 1:
            raise ValidationError("neg takes exactly 1 argument")
        return Neg(args[0])
    if op == "mul":
        return Prod(tuple(args))
    if op == "scale":
        if len(args) != 2:
            raise ValidationError("scale takes a constant and a child")
        return Scale(num(args[0]), args[1])
    if op == "pow":
        if len(args) != 2:
            raise ValidationError("pow takes a child and an integer exponent")
        n = num(args[1])
        if n != int(n):
            raise ValidationError("pow exponent must be an integer")
        return Pow(args[0], int(n))
    if op == "abs":
        if len(args) != 1:
            raise ValidationError("abs takes exactly 1 argument")
        return Abs(args[0])
    if op == "affine":
        if len(args) != 3 or not isinstance(args[0], list) or not isinstance(args[1], list):
            raise ValidationError("affine takes (cx...) (cy...) offset")
        return Affine(tuple(args[0]), tuple(args[1]), num(args[2]))
    raise ValidationError(f"unknown operator {op!r}")
