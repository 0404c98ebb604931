"""Function-free rewriting of GDL atoms.

``true(count(9))`` becomes ``true_count(9)`` and ``legal(player, say(9))``
becomes ``legal_say(player, 9)``.  A constant fluent such as ``true(p)``
becomes the nullary ``true_p``; constant actions are left alone, so
``does(p1, stone)`` stays as it is.
"""

from __future__ import annotations

from .errors import NameCollision, NestingTooDeep
from .gdl.terms import Atom, Compound
from .signature import TypeSignature

# wrapper predicates whose single argument is a fluent
FLUENT_WRAPPERS = ("true", "next", "init", "base")
# wrapper predicates of the form w(role, action)
ACTION_WRAPPERS = ("legal", "does", "input")


def _const_args(atom: Atom, args) -> tuple:
    for t in args:
        if type(t) is not str:
            raise NestingTooDeep(f"cannot flatten {atom}: argument {t} is still compound")
    return tuple(args)


def flatten(a: Atom) -> Atom:
    pred, args = a.predicate, a.args
    if pred in FLUENT_WRAPPERS and len(args) == 1:
        f = args[0]
        if type(f) is Compound:
            return Atom(f"{pred}_{f.functor}", _const_args(a, f.args))
        if type(f) is str:
            return Atom(f"{pred}_{f}", ())
    elif pred in ACTION_WRAPPERS and len(args) == 2 and type(args[1]) is Compound:
        act = args[1]
        return Atom(f"{pred}_{act.functor}", _const_args(a, (args[0], *act.args)))
    return Atom(pred, _const_args(a, args))


class FlatMap:
    """Inverse of :func:`flatten` for one signature.

    Construction fails with :class:`NameCollision` if a fused name clashes
    with a declared predicate or with another fused name, which is what keeps
    flattening injective.
    """

    def __init__(self, sig: TypeSignature):
        self.sig = sig
        self._inverse: dict[tuple[str, int], tuple[str, str, int]] = {}
        fused: dict[str, tuple] = {}

        def add(name, arity, wrapper, functor, kind):
            if name in sig.decls:
                raise NameCollision(f"flattened name {name} ({wrapper} of {functor}) is also a declared symbol")
            if name in fused and fused[name] != (wrapper, functor, kind):
                raise NameCollision(f"flattened name {name} is produced by {fused[name][:2]} and {(wrapper, functor)}")
            fused[name] = (wrapper, functor, kind)
            self._inverse[(name, arity)] = (wrapper, functor, kind)

        for w in FLUENT_WRAPPERS:
            d = sig.decls.get(w)
            if d is None or len(d.args) != 1:
                continue
            for sym, sd in sig.decls.items():
                if sd.result != "bool" and sig.subtype(sd.result, d.args[0]):
                    add(f"{w}_{sym}", len(sd.args), w, sym, "fluent")
        for w in ACTION_WRAPPERS:
            d = sig.decls.get(w)
            if d is None or len(d.args) != 2:
                continue
            for sym, sd in sig.decls.items():
                if sd.args and sd.result != "bool" and sig.subtype(sd.result, d.args[1]):
                    add(f"{w}_{sym}", 1 + len(sd.args), w, sym, "action")

    def unflatten(self, a: Atom) -> Atom:
        hit = self._inverse.get((a.predicate, len(a.args)))
        if hit is None:
            return a
        wrapper, functor, kind = hit
        if kind == "fluent":
            inner = Compound(functor, a.args) if a.args else functor
            return Atom(wrapper, (inner,))
        return Atom(wrapper, (a.args[0], Compound(functor, a.args[1:])))

