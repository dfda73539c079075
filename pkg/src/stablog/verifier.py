"""Constraint verifier expressions.

A verifier is a boolean expression over the variables bound by a
constraint's emitter patterns. Arithmetic is exact: integers stay
integers, division produces ``fractions.Fraction``, and division or
modulo by zero is an error rather than a false result. Symbols compare
only with ``eq?``; using them in arithmetic or ordering comparisons is
a type error.

Expressions are evaluated many times per search, so alongside the
straightforward tree-walking ``evaluate`` there is ``compile_verifier``,
which turns the conjunction of expressions into one Python closure.
Both implementations are cross-checked in the test suite.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor as _math_floor
from typing import Any, Callable, Sequence

from .errors import (
    ExternalArityError,
    UnboundVerifierVariableError,
    UnknownExternalError,
    VerifierTypeError,
    VerifierZeroDivisionError,
)

Value = Any  # int | bool | str | Fraction


class Const:
    __slots__ = ("value",)

    def __init__(self, value: Value):
        self.value = value

    def __repr__(self) -> str:
        return repr(self.value)


class VarRef:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


class Arith:
    """Numeric operator: one of + - * / mod floor abs."""

    __slots__ = ("op", "args")

    def __init__(self, op: str, args: Sequence):
        self.op = op
        self.args = tuple(args)


class Cmp:
    """Numeric comparison: one of = != < <= > >=."""

    __slots__ = ("op", "lhs", "rhs")

    def __init__(self, op: str, lhs, rhs):
        self.op = op
        self.lhs = lhs
        self.rhs = rhs


class SymEq:
    """Symbol equality (eq?)."""

    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs


class Bool:
    """Short-circuit boolean combination: and / or / not."""

    __slots__ = ("op", "args")

    def __init__(self, op: str, args: Sequence):
        self.op = op
        self.args = tuple(args)


class ExtCall:
    """Call to a registered external function."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: Sequence):
        self.name = name
        self.args = tuple(args)


VerifierExpr = Any

_ARITH_OPS = {"+", "-", "*", "/", "mod", "floor", "abs"}
_CMP_OPS = {"=", "!=", "<", "<=", ">", ">="}


def _need_num(v: Value) -> Value:
    if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
        raise VerifierTypeError(f"expected a number, got {v!r}")
    return v


def _add(*args: Value) -> Value:
    total = 0
    for a in args:
        total = total + _need_num(a)
    return total


def _sub(a: Value, b: Value) -> Value:
    return _need_num(a) - _need_num(b)


def _mul(*args: Value) -> Value:
    total = 1
    for a in args:
        total = total * _need_num(a)
    return total


def _div(a: Value, b: Value) -> Value:
    _need_num(a)
    _need_num(b)
    if b == 0:
        raise VerifierZeroDivisionError("division by zero in verifier")
    if type(a) is int and type(b) is int:
        return Fraction(a, b)
    return Fraction(a) / Fraction(b)


def _mod(a: Value, b: Value) -> Value:
    _need_num(a)
    _need_num(b)
    if b == 0:
        raise VerifierZeroDivisionError("modulo by zero in verifier")
    return a % b


def _floor(a: Value) -> int:
    return _math_floor(_need_num(a))


def _abs(a: Value) -> Value:
    return abs(_need_num(a))


def _num_eq(a: Value, b: Value) -> bool:
    return _need_num(a) == _need_num(b)


def _lt(a: Value, b: Value) -> bool:
    return _need_num(a) < _need_num(b)


def _le(a: Value, b: Value) -> bool:
    return _need_num(a) <= _need_num(b)


def _sym_eq(a: Value, b: Value) -> bool:
    if type(a) is not str or type(b) is not str:
        raise VerifierTypeError(f"eq? compares symbols, got {a!r} and {b!r}")
    return a == b


def free_vars(expr: VerifierExpr, acc: list | None = None) -> list:
    """Variable names referenced by an expression, in first-use order."""
    if acc is None:
        acc = []
    t = type(expr)
    if t is VarRef:
        if expr.name not in acc:
            acc.append(expr.name)
    elif t is Arith or t is Bool or t is ExtCall:
        for a in expr.args:
            free_vars(a, acc)
    elif t is Cmp or t is SymEq:
        free_vars(expr.lhs, acc)
        free_vars(expr.rhs, acc)
    return acc


def evaluate(expr: VerifierExpr, env: dict, externals: dict | None = None) -> Value:
    """Tree-walking reference evaluator."""
    t = type(expr)
    if t is Const:
        return expr.value
    if t is VarRef:
        if expr.name not in env:
            raise UnboundVerifierVariableError(f"unbound verifier variable {expr.name}")
        return env[expr.name]
    if t is Arith:
        args = [evaluate(a, env, externals) for a in expr.args]
        op = expr.op
        if op == "+":
            return _add(*args)
        if op == "-":
            return _sub(*args)
        if op == "*":
            return _mul(*args)
        if op == "/":
            return _div(*args)
        if op == "mod":
            return _mod(*args)
        if op == "floor":
            return _floor(*args)
        if op == "abs":
            return _abs(*args)
        raise VerifierTypeError(f"unknown arithmetic operator {op}")
    if t is Cmp:
        a = evaluate(expr.lhs, env, externals)
        b = evaluate(expr.rhs, env, externals)
        op = expr.op
        if op == "=":
            return _num_eq(a, b)
        if op == "!=":
            return not _num_eq(a, b)
        if op == "<":
            return _lt(a, b)
        if op == "<=":
            return _le(a, b)
        if op == ">":
            return _lt(b, a)
        if op == ">=":
            return _le(b, a)
        raise VerifierTypeError(f"unknown comparison {op}")
    if t is SymEq:
        return _sym_eq(evaluate(expr.lhs, env, externals), evaluate(expr.rhs, env, externals))
    if t is Bool:
        op = expr.op
        if op == "and":
            for a in expr.args:
                if not evaluate(a, env, externals):
                    return False
            return True
        if op == "or":
            for a in expr.args:
                if evaluate(a, env, externals):
                    return True
            return False
        if op == "not":
            return not evaluate(expr.args[0], env, externals)
        raise VerifierTypeError(f"unknown boolean operator {op}")
    if t is ExtCall:
        if not externals or expr.name not in externals:
            raise UnknownExternalError(f"external function {expr.name} not registered")
        fn, arity = externals[expr.name]
        if len(expr.args) != arity:
            raise ExternalArityError(
                f"external {expr.name} takes {arity} args, got {len(expr.args)}"
            )
        return fn(*[evaluate(a, env, externals) for a in expr.args])
    raise VerifierTypeError(f"not a verifier expression: {expr!r}")


def _codegen(expr: VerifierExpr, slots: dict, ns: dict) -> str:
    t = type(expr)
    if t is Const:
        return repr(expr.value)
    if t is VarRef:
        if expr.name not in slots:
            raise UnboundVerifierVariableError(f"unbound verifier variable {expr.name}")
        return f"v{slots[expr.name]}"
    if t is Arith:
        parts = [_codegen(a, slots, ns) for a in expr.args]
        fn = {"+": "_add", "-": "_sub", "*": "_mul", "/": "_div",
              "mod": "_mod", "floor": "_floor", "abs": "_abs"}[expr.op]
        return f"{fn}({', '.join(parts)})"
    if t is Cmp:
        a = _codegen(expr.lhs, slots, ns)
        b = _codegen(expr.rhs, slots, ns)
        return {
            "=": f"_num_eq({a}, {b})",
            "!=": f"(not _num_eq({a}, {b}))",
            "<": f"_lt({a}, {b})",
            "<=": f"_le({a}, {b})",
            ">": f"_lt({b}, {a})",
            ">=": f"_le({b}, {a})",
        }[expr.op]
    if t is SymEq:
        return f"_sym_eq({_codegen(expr.lhs, slots, ns)}, {_codegen(expr.rhs, slots, ns)})"
    if t is Bool:
        parts = [_codegen(a, slots, ns) for a in expr.args]
        if expr.op == "and":
            return "(" + " and ".join(parts) + ")"
        if expr.op == "or":
            return "(" + " or ".join(parts) + ")"
        return f"(not {parts[0]})"
    if t is ExtCall:
        key = f"_ext_{expr.name}"
        if key not in ns:
            raise UnknownExternalError(f"external function {expr.name} not registered")
        return f"{key}({', '.join(_codegen(a, slots, ns) for a in expr.args)})"
    raise VerifierTypeError(f"not a verifier expression: {expr!r}")


def compile_verifier(
    exprs: Sequence[VerifierExpr],
    params: Sequence[str],
    externals: dict | None = None,
) -> Callable[..., bool]:
    """Compile the conjunction of ``exprs`` into one positional closure.

    ``params`` fixes the argument order. External functions are bound
    at compile time; arities are checked here, not per call.
    """
    slots = {name: i for i, name in enumerate(params)}
    ns = {
        "_add": _add, "_sub": _sub, "_mul": _mul, "_div": _div,
        "_mod": _mod, "_floor": _floor, "_abs": _abs,
        "_num_eq": _num_eq, "_lt": _lt, "_le": _le, "_sym_eq": _sym_eq,
    }
    if externals:
        for name, (fn, arity) in externals.items():
            ns[f"_ext_{name}"] = fn
    for e in exprs:
        _check_ext_arity(e, externals or {})
    body = " and ".join(f"bool({_codegen(e, slots, ns)})" for e in exprs) or "True"
    args = ", ".join(f"v{i}" for i in range(len(params)))
    src = f"def _verifier({args}):\n    return {body}"
    exec(src, ns)  # noqa: S102 - codegen over a closed AST, no user strings
    return ns["_verifier"]


def _check_ext_arity(expr: VerifierExpr, externals: dict) -> None:
    t = type(expr)
    if t is ExtCall:
        if expr.name not in externals:
            raise UnknownExternalError(f"external function {expr.name} not registered")
        arity = externals[expr.name][1]
        if len(expr.args) != arity:
            raise ExternalArityError(
                f"external {expr.name} takes {arity} args, got {len(expr.args)}"
            )
        for a in expr.args:
            _check_ext_arity(a, externals)
    elif t is Arith or t is Bool:
        for a in expr.args:
            _check_ext_arity(a, externals)
    elif t is Cmp or t is SymEq:
        _check_ext_arity(expr.lhs, externals)
        _check_ext_arity(expr.rhs, externals)
