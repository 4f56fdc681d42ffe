"""シンボル式の字句解析・構文解析・評価・静的解析

文法（再帰下降）:
    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' factor)?
    base   := number | 'i' | 'w' | func '(' args ')' | '(' expr ')' | '-' base
    func   := abs | re | im | conj | exp | log | arg | disk | pow

部分式 1-abs(w)^2 はノードの境界距離 gap（= 1-|w|²）で評価するので、
(1-abs(w)^2)^(-a) のような境界特異な式も桁落ちしない。
"""

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from bergman_lab.errors import ConfigError, ExpressionEvaluationError, ExpressionSyntaxError

_TOKEN_RE = re.compile(
    r"(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)

FUNCTIONS: dict[str, int] = {
    "abs": 1, "re": 1, "im": 1, "conj": 1, "exp": 1, "log": 1, "arg": 1, "disk": 1, "pow": 2,
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Node", ...]


Node = Union[Num, ImagUnit, Var, Neg, BinOp, Call]

# 1-abs(w)^2
GAP_PATTERN = BinOp("-", Num(1.0), BinOp("^", Call("abs", (Var(),)), Num(2.0)))


# ---------------------------------------------------------------------------
# 字句解析・構文解析
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str    # num / name / op / end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _next(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _expect(self, op: str) -> None:
        if self.tok.kind != "op" or self.tok.text != op:
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected '{op}', found '{found}'", self.tok.pos)
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected '{self.tok.text}'", self.tok.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self._next().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self._next().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            node = BinOp("^", node, self.factor())
        return node

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text == "i":
                return ImagUnit()
            if tok.text == "w":
                return Var()
            if tok.text not in FUNCTIONS:
                raise ExpressionSyntaxError(f"unknown name '{tok.text}'", tok.pos)
            self._expect("(")
            args = [self.expr()]
            while self.tok.kind == "op" and self.tok.text == ",":
                self.i += 1
                args.append(self.expr())
            self._expect(")")
            if len(args) != FUNCTIONS[tok.text]:
                raise ExpressionSyntaxError(
                    f"{tok.text}() takes {FUNCTIONS[tok.text]} argument(s), got {len(args)}", tok.pos
                )
            return Call(tok.text, tuple(args))
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        if tok.kind == "op" and tok.text == "-":
            self.i += 1
            return Neg(self.base())
        found = tok.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected '{found}'", tok.pos)


def parse_expression(text: str) -> Node:
    """式文字列を AST に変換（構文エラーは位置付きの ExpressionSyntaxError）"""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def pretty(node: Node) -> str:
    """AST を再パース可能な文字列に戻す（二項演算はすべて括弧で囲む）"""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, ImagUnit):
        return "i"
    if isinstance(node, Var):
        return "w"
    if isinstance(node, Neg):
        return f"(-{pretty(node.operand)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    return f"{node.name}({', '.join(pretty(a) for a in node.args)})"


def _children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    return ()


def walk(node: Node):
    yield node
    for child in _children(node):
        yield from walk(child)


def is_constant(node: Node) -> bool:
    """w に依存しない部分式か（disk は w に依存する）"""
    return not any(isinstance(n, Var) or (isinstance(n, Call) and n.name == "disk") for n in walk(node))


def constant_value(node: Node) -> complex:
    """w を含まない部分式の値"""
    w = np.zeros(1, dtype=complex)
    return complex(_Evaluator(w, np.ones(1)).eval(node)[0])


# ---------------------------------------------------------------------------
# 評価
# ---------------------------------------------------------------------------

def _int_power(base: np.ndarray, k: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base.copy()
    n = abs(k)
    while n:
        if n & 1:
            result = result * b
        b = b * b
        n >>= 1
    return 1.0 / result if k < 0 else result


def _integral(value: complex) -> bool:
    return value.imag == 0.0 and math.isfinite(value.real) and value.real == round(value.real) and abs(value.real) <= 1e6


class _Evaluator:
    def __init__(self, w: np.ndarray, gap: np.ndarray):
        self.w = w
        self.gap = gap

    def _fail(self, message: str, node: Node, bad: np.ndarray) -> None:
        bad = np.broadcast_to(bad, self.w.shape)
        idx = int(np.argmax(bad))
        raise ExpressionEvaluationError(message, pretty(node), idx, complex(self.w[idx]))

    def eval(self, node: Node) -> np.ndarray:
        if node == GAP_PATTERN:
            return self.gap.astype(complex)
        if isinstance(node, Num):
            return np.full(self.w.shape, node.value, dtype=complex)
        if isinstance(node, ImagUnit):
            return np.full(self.w.shape, 1j, dtype=complex)
        if isinstance(node, Var):
            return self.w
        if isinstance(node, Neg):
            return -self.eval(node.operand)
        if isinstance(node, BinOp):
            return self._binop(node)
        return self._call(node)

    def _binop(self, node: BinOp) -> np.ndarray:
        left = self.eval(node.left)
        right = self.eval(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            zero = right == 0
            if np.any(zero):
                self._fail("division by zero", node, zero)
            return left / right
        return self._power(node, left, right)

    def _power(self, node: Node, base: np.ndarray, expo: np.ndarray) -> np.ndarray:
        exponent_node = node.args[1] if isinstance(node, Call) else node.right
        if is_constant(exponent_node):
            e = complex(expo.flat[0]) if expo.size else 0j
            if _integral(e):
                k = int(round(e.real))
                if k < 0 and np.any(base == 0):
                    self._fail("division by zero", node, base == 0)
                return _int_power(base, k)
            expo = np.full(base.shape, e)
        real_pos = (base.imag == 0) & (base.real > 0)
        integral = (expo.imag == 0) & (expo.real == np.round(expo.real))
        zero_ok = (base == 0) & (expo.real > 0)
        bad = ~(real_pos | integral | zero_ok)
        if np.any(bad):
            self._fail("non-integer power of a base that is not a positive real", node, bad)
        out = np.zeros(base.shape, dtype=complex)
        out[real_pos] = np.exp(expo[real_pos] * np.log(base.real[real_pos]))
        other = integral & ~real_pos & ~(base == 0)
        if np.any(other):
            out[other] = np.power(base[other], expo[other].real)
        zero_int = integral & (base == 0)
        if np.any(zero_int & (expo.real < 0)):
            self._fail("division by zero", node, zero_int & (expo.real < 0))
        out[zero_int & (expo.real == 0)] = 1.0
        return out

    def _call(self, node: Call) -> np.ndarray:
        if node.name == "disk":
            r = constant_value(node.args[0]).real
            return (np.abs(self.w) < r).astype(complex)
        args = [self.eval(a) for a in node.args]
        x = args[0]
        if node.name == "abs":
            return np.abs(x).astype(complex)
        if node.name == "re":
            return x.real.astype(complex)
        if node.name == "im":
            return x.imag.astype(complex)
        if node.name == "conj":
            return np.conj(x)
        if node.name == "arg":
            return np.angle(x).astype(complex)
        if node.name == "exp":
            return np.exp(x)
        if node.name == "log":
            bad = (x.imag == 0) & (x.real <= 0)
            if np.any(bad):
                self._fail("log of a nonpositive real", node, bad)
            return np.log(x)
        return self._power(node, x, args[1])


def evaluate(node: Node, w, gap=None) -> np.ndarray:
    """AST を点列 w（と境界距離 gap）で評価し複素配列を返す"""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    gap = 1.0 - np.abs(w) ** 2 if gap is None else np.broadcast_to(np.asarray(gap, dtype=float), w.shape)
    with np.errstate(all="ignore"):
        out = _Evaluator(w, gap).eval(node)
    return np.broadcast_to(out, w.shape).copy()


# ---------------------------------------------------------------------------
# 静的解析
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpressionFlags:
    radial: bool
    real_valued: bool
    bounded: bool
    boundary_singular: bool
    non_integrable: bool
    bound: Optional[float]
    breakpoints: tuple[float, ...]


def _radial(node: Node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, Call) and node.name == "abs" and node.args[0] in (Var(), Call("conj", (Var(),))):
        return True
    if isinstance(node, Call) and node.name == "disk":
        return True
    return all(_radial(c) for c in _children(node))


def _real(node: Node) -> bool:
    if node == GAP_PATTERN or isinstance(node, Num):
        return True
    if isinstance(node, (ImagUnit, Var)):
        return False
    if isinstance(node, Neg):
        return _real(node.operand)
    if isinstance(node, BinOp):
        return _real(node.left) and _real(node.right)
    if node.name in ("abs", "re", "im", "arg", "disk"):
        return True
    return all(_real(a) for a in node.args)


def _const_real(node: Node) -> Optional[float]:
    if not is_constant(node):
        return None
    try:
        v = constant_value(node)
    except ExpressionEvaluationError:
        return None
    return v.real if v.imag == 0.0 else None


def _pure_imaginary(node: Node) -> bool:
    """i·(実数値) の形か（exp の絶対値が 1 になる）"""
    if isinstance(node, ImagUnit):
        return True
    if isinstance(node, Neg):
        return _pure_imaginary(node.operand)
    if isinstance(node, BinOp) and node.op in "*/":
        return (_pure_imaginary(node.left) and _real(node.right)) or (
            node.op == "*" and _real(node.left) and _pure_imaginary(node.right)
        )
    return False


def _bounds(node: Node) -> tuple[Optional[float], float]:
    """(|値| の上界 または None, |値| の下界)"""
    if node == GAP_PATTERN:
        return 1.0, 0.0
    if isinstance(node, Num):
        return abs(node.value), abs(node.value)
    if isinstance(node, ImagUnit):
        return 1.0, 1.0
    if isinstance(node, Var):
        return 1.0, 0.0
    if isinstance(node, Neg):
        return _bounds(node.operand)
    if isinstance(node, Call) and node.name == "pow":
        return _power_bounds(node.args[0], node.args[1])
    if isinstance(node, Call):
        if node.name == "disk":
            return 1.0, 0.0
        if node.name == "arg":
            return math.pi, 0.0
        if node.name == "log":
            return None, 0.0
        hi, lo = _bounds(node.args[0])
        if node.name in ("abs", "conj"):
            return hi, lo
        if node.name in ("re", "im"):
            return hi, 0.0
        # exp
        if _pure_imaginary(node.args[0]):
            return 1.0, 1.0
        if hi is None:
            return None, 0.0
        return math.exp(hi), math.exp(-hi)
    lhi, llo = _bounds(node.left)
    rhi, rlo = _bounds(node.right)
    if node.op in "+-":
        hi = None if lhi is None or rhi is None else lhi + rhi
        lo = max(0.0, llo - rhi) if rhi is not None else 0.0
        if lhi is not None:
            lo = max(lo, rlo - lhi)
        return hi, lo
    if node.op == "*":
        hi = None if lhi is None or rhi is None else lhi * rhi
        return hi, llo * rlo
    if node.op == "/":
        hi = None if lhi is None or rlo <= 0.0 else lhi / rlo
        lo = 0.0 if rhi is None or rhi == 0.0 else llo / rhi
        return hi, lo
    return _power_bounds(node.left, node.right)


def _power_bounds(base: Node, expo: Node) -> tuple[Optional[float], float]:
    e = _const_real(expo)
    if e is None:
        return None, 0.0
    hi, lo = _bounds(base)
    if e >= 0.0:
        return (None if hi is None else hi ** e), lo ** e
    up = lo ** e if lo > 0.0 else None
    down = hi ** e if hi not in (None, 0.0) else 0.0
    return up, down


def _gap_exponent(node: Node) -> Optional[float]:
    """node が gap^e（gap 自身は e=1）ならその指数"""
    if node == GAP_PATTERN:
        return 1.0
    if isinstance(node, BinOp) and node.op == "^" and node.left == GAP_PATTERN:
        return _const_real(node.right)
    if isinstance(node, Call) and node.name == "pow" and node.args[0] == GAP_PATTERN:
        return _const_real(node.args[1])
    return None


def _singular(node: Node, negative: bool) -> bool:
    if node == GAP_PATTERN:
        return negative
    if isinstance(node, BinOp) and node.op == "/":
        return _singular(node.left, negative) or _singular(node.right, True)
    if (isinstance(node, BinOp) and node.op == "^") or (isinstance(node, Call) and node.name == "pow"):
        base, expo = (node.left, node.right) if isinstance(node, BinOp) else node.args
        e = _const_real(expo)
        flip = e is None or e < 0.0
        return _singular(base, negative or flip) or _singular(expo, negative)
    if isinstance(node, Call) and node.name == "log":
        return _singular(node.args[0], True)
    return any(_singular(c, negative) for c in _children(node))


def _non_integrable(node: Node) -> bool:
    for n in walk(node):
        e = _gap_exponent(n)
        if e is not None and e <= -1.0:
            return True
        if isinstance(n, BinOp) and n.op == "/":
            e = _gap_exponent(n.right)
            if e is not None and e >= 1.0:
                return True
    return False


def _breakpoints(node: Node) -> tuple[float, ...]:
    out = set()
    for n in walk(node):
        if isinstance(n, Call) and n.name == "disk":
            arg = n.args[0]
            if not is_constant(arg):
                raise ConfigError(f"disk() radius must be a constant, got '{pretty(arg)}'")
            r = _const_real(arg)
            if r is None or not 0.0 < r <= 1.0:
                raise ConfigError(f"disk() radius must be a real number in (0, 1], got '{pretty(arg)}'")
            if r < 1.0:
                out.add(r * r)
    return tuple(sorted(out))


def analyze(node: Node) -> ExpressionFlags:
    """保守的な静的解析でフラグと上界・不連続点を求める"""
    breakpoints = _breakpoints(node)
    hi, _ = _bounds(node)
    return ExpressionFlags(
        radial=_radial(node),
        real_valued=_real(node),
        bounded=hi is not None,
        boundary_singular=_singular(node, False),
        non_integrable=_non_integrable(node),
        bound=hi,
        breakpoints=breakpoints,
    )
