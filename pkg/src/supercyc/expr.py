"""Complex expressions in one variable ``z``.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | "+" unary | power ;
    power   = atom [ "^" exponent ] ;
    exponent = "-" exponent | "+" exponent | power ;
    atom    = number | "z" | "i" | "pi" | "e"
            | name "(" expr ")" | "(" expr ")" ;
    number  = ( digits [ "." [ digits ] ] | "." digits )
              [ ("e" | "E") [ "+" | "-" ] digits ] ;

``^`` binds tighter than unary minus, so ``-z^2`` is ``-(z^2)``; it is
right-associative.  Implicit multiplication (``2z``) is rejected.
Functions: exp, log, sin, cos, sqrt, conj, abs, arg, re, im, all unary.
Branch cuts of log/sqrt/arg lie on the negative real axis with
``arg`` in ``(-pi, pi]``.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Lit", "Const", "Var", "Neg", "BinOp", "Call",
    "Expression", "ExpressionError", "EvaluationError",
    "parse", "unparse", "FUNCTIONS", "CONSTANTS",
]

CONSTANTS = {"i": 1j, "pi": complex(math.pi), "e": complex(math.e)}
FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "conj", "abs", "arg", "re", "im")

# integer exponents up to this size use repeated squaring
_MAX_INT_POWER = 1 << 20


class ExpressionError(ValueError):
    """Raised for malformed expression text; ``offset`` points into the source."""

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        self.reason = message
        super().__init__(f"{message} at offset {offset}")


class EvaluationError(ArithmeticError):
    """Evaluation left the finite complex numbers (pole, log(0), overflow)."""


@dataclass(frozen=True)
class Lit:
    value: complex


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str = "z"


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
    func: str
    arg: "Node"


Node = Union[Lit, Const, Var, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# tokenizer / parser

_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, name, op, eof
    text: str
    pos: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        m = _NUMBER.match(source, pos)
        if m:
            toks.append(_Tok("num", m.group(), pos))
            pos = m.end()
            continue
        m = _NAME.match(source, pos)
        if m:
            toks.append(_Tok("name", m.group(), pos))
            pos = m.end()
            continue
        if ch in "+-*/^(),":
            toks.append(_Tok("op", ch, pos))
            pos += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", pos, source)
    toks.append(_Tok("eof", "", n))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        return ExpressionError(message, tok.pos, self.source)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            raise self.error(f"expected {text!r}, found {found}")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.exponent())
        return base

    def exponent(self) -> Node:
        if self.accept("-"):
            return Neg(self.exponent())
        if self.accept("+"):
            return self.exponent()
        return self.power()

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            value = float(tok.text)
            if not math.isfinite(value):
                raise self.error("numeric literal overflows", tok)
            return Lit(complex(value))
        if tok.kind == "name":
            self.i += 1
            if tok.text in FUNCTIONS:
                if not self.accept("("):
                    raise self.error(f"function {tok.text!r} requires '('")
                arg = self.expr()
                if self.tok.kind == "op" and self.tok.text == ",":
                    raise self.error(f"{tok.text} takes exactly 1 argument")
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text == "z":
                return Var("z")
            if tok.text in CONSTANTS:
                return Const(tok.text)
            raise self.error(f"unknown identifier {tok.text!r}", tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "eof":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")


def parse(source: str) -> "Expression":
    if not isinstance(source, str):
        raise TypeError("expression source must be a string")
    if not source.strip():
        raise ExpressionError("empty expression", 0, source)
    return Expression(source, _Parser(source).parse())


def _fmt_literal(v: complex) -> str:
    if v.imag == 0.0:
        return repr(float(v.real))
    # not produced by parse; emitted as an explicit sum so it re-parses
    return f"({float(v.real)!r}+{float(v.imag)!r}*i)"


def unparse(node: Node) -> str:
    """Render ``node`` fully parenthesised so that parse(unparse(t)) == t."""
    if isinstance(node, Lit):
        return _fmt_literal(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{unparse(node.operand)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)}{node.op}{unparse(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# evaluation


def _canon(z: complex) -> complex:
    # -0.0 imaginary parts would put the result on the wrong side of the cut
    return complex(z.real, z.imag + 0.0)


def _int_exponent(w: complex) -> int | None:
    if w.imag == 0.0 and w.real.is_integer() and abs(w.real) <= _MAX_INT_POWER:
        return int(w.real)
    return None


def _scalar_pow(base: complex, w: complex) -> complex:
    k = _int_exponent(w)
    if k is not None:
        if k == 0:
            return 1 + 0j
        if base == 0:
            if k < 0:
                raise EvaluationError("division by zero in power")
            return 0j
        result = 1 + 0j
        b = base
        m = abs(k)
        while m:
            if m & 1:
                result *= b
            b *= b
            m >>= 1
        return 1 / result if k < 0 else result
    if base == 0:
        raise EvaluationError("log of zero in power")
    return cmath.exp(w * cmath.log(_canon(base)))


def _scalar_call(func: str, x: complex) -> complex:
    if func == "exp":
        return cmath.exp(x)
    if func == "log":
        if x == 0:
            raise EvaluationError("log(0)")
        return cmath.log(_canon(x))
    if func == "sin":
        return cmath.sin(x)
    if func == "cos":
        return cmath.cos(x)
    if func == "sqrt":
        return cmath.sqrt(_canon(x))
    if func == "conj":
        return x.conjugate()
    if func == "abs":
        return complex(abs(x))
    if func == "arg":
        if x == 0:
            raise EvaluationError("arg(0)")
        return complex(cmath.phase(_canon(x)))
    if func == "re":
        return complex(x.real)
    if func == "im":
        return complex(x.imag)
    raise EvaluationError(f"unknown function {func}")


def _check(v: complex) -> complex:
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise EvaluationError("non-finite value")
    return v


def _eval_scalar(node: Node, z: complex) -> complex:
    if isinstance(node, Lit):
        return node.value
    if isinstance(node, Var):
        return z
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval_scalar(node.operand, z)
    if isinstance(node, Call):
        try:
            return _check(_scalar_call(node.func, _eval_scalar(node.arg, z)))
        except (OverflowError, ValueError) as exc:
            raise EvaluationError(f"{node.func}: {exc}") from None
    a = _eval_scalar(node.left, z)
    b = _eval_scalar(node.right, z)
    try:
        if node.op == "+":
            v = a + b
        elif node.op == "-":
            v = a - b
        elif node.op == "*":
            v = a * b
        elif node.op == "/":
            if b == 0:
                raise EvaluationError("division by zero")
            v = a / b
        else:
            v = _scalar_pow(a, b)
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvaluationError(str(exc)) from None
    return _check(v)


def _canon_arr(x: np.ndarray) -> np.ndarray:
    return x.real + 1j * (x.imag + 0.0)


def _pow_arr(a: np.ndarray, b: np.ndarray, bad: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    # integer exponents: exact repeated squaring, element-wise on distinct k
    is_int = (b.imag == 0.0) & (np.mod(b.real, 1.0) == 0.0) & (np.abs(b.real) <= _MAX_INT_POWER)
    if is_int.any():
        ks = b.real[is_int].astype(np.int64)
        base = a[is_int]
        res = np.ones_like(base)
        bb = base.copy()
        m = np.abs(ks)
        while (m > 0).any():
            odd = (m & 1).astype(bool)
            res = np.where(odd, res * bb, res)
            bb = bb * bb
            m >>= 1
        neg = ks < 0
        zero_div = neg & (base == 0)
        res = np.where(neg & ~zero_div, 1 / np.where(res == 0, 1, res), res)
        res = np.where(ks == 0, 1 + 0j, res)
        sub_bad = zero_div.copy()
        out[is_int] = res
        idx = np.flatnonzero(is_int)
        bad[idx[sub_bad]] = True
    rest = ~is_int
    if rest.any():
        base = a[rest]
        zero = base == 0
        safe = np.where(zero, 1, base)
        out[rest] = np.exp(b[rest] * np.log(_canon_arr(safe)))
        idx = np.flatnonzero(rest)
        bad[idx[zero]] = True
    return out


def _eval_array(node: Node, z: np.ndarray, bad: np.ndarray) -> np.ndarray:
    if isinstance(node, Lit):
        return np.full(z.shape, node.value, dtype=complex)
    if isinstance(node, Var):
        return z
    if isinstance(node, Const):
        return np.full(z.shape, CONSTANTS[node.name], dtype=complex)
    if isinstance(node, Neg):
        return -_eval_array(node.operand, z, bad)
    if isinstance(node, Call):
        x = _eval_array(node.arg, z, bad)
        f = node.func
        if f == "exp":
            v = np.exp(x)
        elif f == "log":
            zero = x == 0
            bad |= zero
            v = np.log(_canon_arr(np.where(zero, 1, x)))
        elif f == "sin":
            v = np.sin(x)
        elif f == "cos":
            v = np.cos(x)
        elif f == "sqrt":
            v = np.sqrt(_canon_arr(x))
        elif f == "conj":
            v = np.conj(x)
        elif f == "abs":
            v = np.abs(x).astype(complex)
        elif f == "arg":
            zero = x == 0
            bad |= zero
            v = np.angle(_canon_arr(x)).astype(complex)
        elif f == "re":
            v = x.real.astype(complex)
        else:
            v = x.imag.astype(complex)
        bad |= ~np.isfinite(v)
        return v
    a = _eval_array(node.left, z, bad)
    b = _eval_array(node.right, z, bad)
    if node.op == "+":
        v = a + b
    elif node.op == "-":
        v = a - b
    elif node.op == "*":
        v = a * b
    elif node.op == "/":
        zero = b == 0
        bad |= zero
        v = a / np.where(zero, 1, b)
    else:
        v = _pow_arr(a, b, bad)
    bad |= ~np.isfinite(v)
    return v


def _eval_mp(node: Node, z, mp):
    if isinstance(node, Lit):
        return mp.mpc(node.value)
    if isinstance(node, Var):
        return z
    if isinstance(node, Const):
        return {"i": mp.mpc(0, 1), "pi": mp.mpc(mp.pi), "e": mp.mpc(mp.e)}[node.name]
    if isinstance(node, Neg):
        return -_eval_mp(node.operand, z, mp)
    if isinstance(node, Call):
        x = _eval_mp(node.arg, z, mp)
        f = node.func
        if f in ("log", "arg") and x == 0:
            raise EvaluationError(f"{f}(0)")
        table = {
            "exp": mp.exp, "log": mp.log, "sin": mp.sin, "cos": mp.cos,
            "sqrt": mp.sqrt, "conj": mp.conj,
            "abs": lambda v: mp.mpc(abs(v)), "arg": lambda v: mp.mpc(mp.arg(v)),
            "re": lambda v: mp.mpc(v.real), "im": lambda v: mp.mpc(v.imag),
        }
        return mp.mpc(table[f](x))
    a = _eval_mp(node.left, z, mp)
    b = _eval_mp(node.right, z, mp)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b == 0:
            raise EvaluationError("division by zero")
        return a / b
    k = _int_exponent(complex(b))
    if k is not None and b.imag == 0 and b.real == k:
        if a == 0 and k < 0:
            raise EvaluationError("division by zero in power")
        return a ** k
    if a == 0:
        raise EvaluationError("log of zero in power")
    return mp.exp(b * mp.log(a))


@dataclass(frozen=True)
class Expression:
    """A parsed expression; immutable and safe to share between threads."""

    source: str
    ast: Node

    def __call__(self, z: complex) -> complex:
        return self.evaluate(z)

    def evaluate(self, z: complex) -> complex:
        """Evaluate at one point; raises :class:`EvaluationError` on failure."""
        return _eval_scalar(self.ast, _check(complex(z)))

    def evaluate_many(self, zs) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised evaluation.

        Returns ``(values, ok)``; ``values`` is NaN wherever ``ok`` is False.
        """
        z = np.asarray(zs, dtype=complex)
        shape = z.shape
        z = z.ravel()
        bad = ~np.isfinite(z)
        with np.errstate(all="ignore"):
            v = _eval_array(self.ast, np.where(bad, 0, z), bad)
            v = np.array(np.broadcast_to(v, z.shape), dtype=complex)
        v[bad] = complex("nan+nanj")
        return v.reshape(shape), ~bad.reshape(shape)

    def evaluate_mp(self, z, dps: int = 40):
        """Evaluate in extended precision with mpmath (``dps`` decimal digits)."""
        import mpmath

        with mpmath.workdps(dps):
            return _eval_mp(self.ast, mpmath.mpc(z), mpmath)

    def unparse(self) -> str:
        return unparse(self.ast)

    def __str__(self) -> str:
        return self.source


def as_expression(e) -> Expression:
    """Accept an :class:`Expression` or its source text."""
    if isinstance(e, Expression):
        return e
    return parse(e)
