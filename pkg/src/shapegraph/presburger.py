"""Linear-arithmetic formulas over naturals: construction from bag
expressions, bounded evaluation, and S-expression export.

The constructed formula psi_e has one free variable per alphabet symbol
(the bag's Parikh vector) plus the free iteration count n; the defining
property exercised by the tests is psi_e(w, 1) iff w ∈ L(e).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import INF
from .errors import WorkCapError
from . import rbe as _rbe


@dataclass(frozen=True)
class Term:
    """const + Σ coeff·var with nonnegative coefficients."""

    const: int = 0
    coeffs: tuple = ()  # of (var_name, coeff)

    def value(self, env) -> int:
        total = self.const
        for v, c in self.coeffs:
            total += c * env[v]
        return total

    def known(self, env) -> bool:
        return all(v in env for v, _ in self.coeffs)

    def variables(self):
        return [v for v, _ in self.coeffs]


def var(name: str) -> Term:
    return Term(0, ((name, 1),))


def const(k: int) -> Term:
    return Term(k, ())


def tsum(*terms: Term) -> Term:
    coeffs: dict = {}
    c = 0
    for t in terms:
        c += t.const
        for v, k in t.coeffs:
            coeffs[v] = coeffs.get(v, 0) + k
    return Term(c, tuple(sorted(coeffs.items())))


class PAFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Eq(PAFormula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Le(PAFormula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class And(PAFormula):
    parts: tuple


@dataclass(frozen=True)
class Or(PAFormula):
    parts: tuple


@dataclass(frozen=True)
class Not(PAFormula):
    body: PAFormula


@dataclass(frozen=True)
class Exists(PAFormula):
    variables: tuple
    body: PAFormula


TRUE = And(())
FALSE = Or(())


def conj(*parts) -> PAFormula:
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts) -> PAFormula:
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def free_variables(f: PAFormula) -> frozenset:
    if isinstance(f, (Eq, Le)):
        return frozenset(f.lhs.variables()) | frozenset(f.rhs.variables())
    if isinstance(f, (And, Or)):
        out = frozenset()
        for p in f.parts:
            out |= free_variables(p)
        return out
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, Exists):
        return free_variables(f.body) - frozenset(f.variables)
    raise TypeError(f"not a formula: {f!r}")


# --- Construction from bag expressions --------------------------------------


class _Fresh:
    def __init__(self):
        self.counter = 0

    def vector(self, symbols, tag):
        self.counter += 1
        return {a: f"x{self.counter}_{tag}_{_sym_key(a)}" for a in symbols}

    def scalar(self, tag):
        self.counter += 1
        return f"{tag}{self.counter}"


def _sym_key(a) -> str:
    if isinstance(a, tuple):
        return "_".join(str(p) for p in a)
    return str(a)


def presburger_of(e: _rbe.Rbe, symbols=None):
    """Build psi_e with free bag variables x_<symbol> and free count n.

    Returns (formula, xvars, nvar) where xvars maps each alphabet symbol to
    its variable name.
    """
    if symbols is None:
        symbols = sorted(_rbe.alphabet(e), key=_sym_key)
    symbols = list(symbols)
    fresh = _Fresh()
    xvars = {a: f"x_{_sym_key(a)}" for a in symbols}
    nvar = "n"
    formula = _psi(e, xvars, nvar, symbols, fresh)
    return formula, xvars, nvar


def _zero(xvars, symbols):
    return conj(*[Eq(var(xvars[a]), const(0)) for a in symbols]) if symbols else TRUE


def _psi(e, xvars, n, symbols, fresh) -> PAFormula:
    nt = var(n) if isinstance(n, str) else const(n)
    if isinstance(e, _rbe.Epsilon):
        return _zero(xvars, symbols)
    if isinstance(e, _rbe.Empty):
        return FALSE
    if isinstance(e, _rbe.Sym):
        parts = [Eq(var(xvars[e.symbol]), nt)]
        parts += [Eq(var(xvars[b]), const(0)) for b in symbols if b != e.symbol]
        return conj(*parts)
    if isinstance(e, _rbe.Repeat):
        k, l = e.interval.min, e.interval.max
        m = fresh.scalar("m")
        inner = [Le(const(k), var(m))]
        if l != INF:
            inner.append(Le(var(m), const(l)))
        inner.append(_psi(e.body, xvars, m, symbols, fresh))
        positive = conj(Le(const(1), nt), Exists((m,), conj(*inner)))
        zero = conj(Eq(nt, const(0)), _zero(xvars, symbols))
        return disj(zero, positive)
    if isinstance(e, _rbe.Disj):
        x1 = fresh.vector(symbols, "l")
        x2 = fresh.vector(symbols, "r")
        n1 = fresh.scalar("n")
        n2 = fresh.scalar("n")
        parts = [Eq(nt, tsum(var(n1), var(n2)))]
        parts += [Eq(var(xvars[a]), tsum(var(x1[a]), var(x2[a]))) for a in symbols]
        parts.append(_psi(e.left, x1, n1, symbols, fresh))
        parts.append(_psi(e.right, x2, n2, symbols, fresh))
        bound = tuple(x1[a] for a in symbols) + tuple(x2[a] for a in symbols) + (n1, n2)
        return Exists(bound, conj(*parts))
    if isinstance(e, _rbe.Concat):
        x1 = fresh.vector(symbols, "l")
        x2 = fresh.vector(symbols, "r")
        parts = [Eq(var(xvars[a]), tsum(var(x1[a]), var(x2[a]))) for a in symbols]
        parts.append(_psi(e.left, x1, n, symbols, fresh))
        parts.append(_psi(e.right, x2, n, symbols, fresh))
        bound = tuple(x1[a] for a in symbols) + tuple(x2[a] for a in symbols)
        return Exists(bound, conj(*parts))
    if isinstance(e, _rbe.Intersect):
        return conj(
            _psi(e.left, xvars, n, symbols, fresh),
            _psi(e.right, xvars, n, symbols, fresh),
        )
    raise TypeError(f"not an expression: {e!r}")


def psi_sound_cap(e: _rbe.Rbe, w, n: int = 1) -> int:
    """A quantifier bound sufficient for the psi family used in the tests:
    bag-part variables never exceed |w|, split counts never exceed n, and
    iteration counts are pinned by flat repeat bodies or equal their
    interval's lower endpoint.
    """
    size = sum(w.values()) if not isinstance(w, int) else w
    return max(1, n, size, _rbe.max_finite_constant(e))


# --- Bounded evaluation -----------------------------------------------------

DEFAULT_EVAL_WORK = 2 * 10**6

UNKNOWN = "unknown"


@dataclass
class _EvalState:
    cap: int
    assume_cap_sound: bool
    work: int = 0
    work_cap: int = DEFAULT_EVAL_WORK


def pa_eval_bounded(
    f: PAFormula,
    assignment: dict,
    cap: int,
    assume_cap_sound: bool = False,
    work_cap: int = DEFAULT_EVAL_WORK,
):
    """Evaluate with quantified variables over {0..bound}; bounds are derived
    from equalities and inequalities in the conjunctive spine where possible
    and fall back to cap otherwise.

    Returns True, False, or UNKNOWN when a failed existential involved a
    variable that was only cap-bounded (suppressed by assume_cap_sound).
    """
    missing = free_variables(f) - set(assignment)
    if missing:
        raise ValueError(f"unassigned free variables: {sorted(missing)}")
    st = _EvalState(cap=cap, assume_cap_sound=assume_cap_sound, work_cap=work_cap)
    return _eval(f, dict(assignment), st)


def _tick(st: _EvalState):
    st.work += 1
    if st.work > st.work_cap:
        raise WorkCapError(f"formula evaluation exceeded {st.work_cap} steps")


def _flatten_and(f: PAFormula, out: list):
    if isinstance(f, And):
        for p in f.parts:
            _flatten_and(p, out)
    else:
        out.append(f)


def _derived_bound(v: str, spine, env, st: _EvalState):
    """Upper bound for v from spine constraints whose other side is known."""
    best = None
    for c in spine:
        if isinstance(c, Eq):
            for side, other in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
                coeff = dict(side.coeffs).get(v, 0)
                if coeff >= 1 and other.known(env):
                    b = other.value(env) // coeff
                    best = b if best is None else min(best, b)
        elif isinstance(c, Le):
            coeff = dict(c.lhs.coeffs).get(v, 0)
            if coeff >= 1 and c.rhs.known(env):
                b = (c.rhs.value(env) - c.lhs.const) // coeff
                best = b if best is None else min(best, b)
    return best


def _eval(f: PAFormula, env: dict, st: _EvalState):
    _tick(st)
    if isinstance(f, Eq):
        return f.lhs.value(env) == f.rhs.value(env)
    if isinstance(f, Le):
        return f.lhs.value(env) <= f.rhs.value(env)
    if isinstance(f, And):
        unknown = False
        for p in f.parts:
            r = _eval(p, env, st)
            if r is False:
                return False
            if r == UNKNOWN:
                unknown = True
        return UNKNOWN if unknown else True
    if isinstance(f, Or):
        unknown = False
        for p in f.parts:
            r = _eval(p, env, st)
            if r is True:
                return True
            if r == UNKNOWN:
                unknown = True
        return UNKNOWN if unknown else False
    if isinstance(f, Not):
        r = _eval(f.body, env, st)
        if r == UNKNOWN:
            return UNKNOWN
        return not r
    if isinstance(f, Exists):
        return _eval_exists(f, env, st)
    raise TypeError(f"not a formula: {f!r}")


def _eval_exists(f: Exists, env: dict, st: _EvalState):
    spine: list = []
    _flatten_and(f.body, spine)
    variables = list(f.variables)
    capped = [False]

    def search(i: int):
        if i == len(variables):
            return _eval(f.body, env, st)
        v = variables[i]
        bound = _derived_bound(v, spine, env, st)
        if bound is None:
            bound = st.cap
            capped[0] = True
        if bound < 0:
            return False
        unknown = False
        for val in range(bound + 1):
            _tick(st)
            env[v] = val
            # Fully-assigned spine constraints prune early.
            ok = True
            for c in spine:
                if isinstance(c, (Eq, Le)) and c.lhs.known(env) and c.rhs.known(env):
                    if _eval(c, env, st) is False:
                        ok = False
                        break
            if ok:
                r = search(i + 1)
                if r is True:
                    del env[v]
                    return True
                if r == UNKNOWN:
                    unknown = True
            del env[v]
        return UNKNOWN if unknown else False

    r = search(0)
    if r is False and capped[0] and not st.assume_cap_sound:
        return UNKNOWN
    return r


# --- Export -----------------------------------------------------------------


def _term_sexpr(t: Term) -> str:
    parts = []
    if t.const or not t.coeffs:
        parts.append(str(t.const))
    for v, c in t.coeffs:
        parts.extend([v] * c)
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def to_sexpr(f: PAFormula) -> str:
    """Prefix-operator rendering with operators and, or, not, exists, =, <=, +
    and decimal constants."""
    if isinstance(f, Eq):
        return f"(= {_term_sexpr(f.lhs)} {_term_sexpr(f.rhs)})"
    if isinstance(f, Le):
        return f"(<= {_term_sexpr(f.lhs)} {_term_sexpr(f.rhs)})"
    if isinstance(f, And):
        if not f.parts:
            return "(and)"
        return "(and " + " ".join(to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        if not f.parts:
            return "(or)"
        return "(or " + " ".join(to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, Not):
        return f"(not {to_sexpr(f.body)})"
    if isinstance(f, Exists):
        return "(exists (" + " ".join(f.variables) + ") " + to_sexpr(f.body) + ")"
    raise TypeError(f"not a formula: {f!r}")
