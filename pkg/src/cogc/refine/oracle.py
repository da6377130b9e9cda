"""Dynamic refinement oracle: run both semantics on one input and check they correspond.

Besides the end-to-end obligations (corresponding results, no growth of the read-only
set, a clean frame) the oracle replays the environment-typing lemmas at every node of
the typing derivation that evaluation passes through, and the FFI assumption at every
abstract call.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, NoReturn

from cogc.errors import CogcError
from cogc.kinding import bang_type
from cogc.marshal import from_json
from cogc.parser import format_expr, format_type
from cogc.refine.correspondence import CorrReport, Pointers, Relation, instantiate_type
from cogc.refine.frame import FrameViolation, frame_check
from cogc.registry import FFIRegistry
from cogc.semantics.base import DEFAULT_FUEL, EvalError, EvalObserver
from cogc.semantics.store import Store
from cogc.semantics.update import UpdateInterpreter
from cogc.semantics.value import ValueInterpreter
from cogc.syntax import AbsFunDecl, CoreType, Expr, FunDef, FunRef, Program, TFun
from cogc.typecheck import TypeChecker, TypingTree
from cogc.values import AbsFunV, Environment, FunV, Value

logger = logging.getLogger("cogc.oracle")

DEFAULT_REPLAY_LIMIT = 200_000


# --- Verdicts ---


@dataclass(frozen=True)
class Obligation:
    """The first check that failed: which obligation, the violation code, and context."""

    name: str
    code: str
    message: str
    context: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "obligation": self.name,
            "code": self.code,
            "message": self.message,
            "context": self.context,
        }


@dataclass(frozen=True)
class OracleVerdict:
    passed: bool
    r: Pointers = frozenset()
    w: Pointers = frozenset()
    r_out: Pointers = frozenset()
    w_out: Pointers = frozenset()
    frame_violations: tuple[FrameViolation, ...] = ()
    failure: Obligation | None = None
    outcome: str = "value"
    checks: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "pass": self.passed,
            "r": _ids(self.r),
            "w": _ids(self.w),
            "r_out": _ids(self.r_out),
            "w_out": _ids(self.w_out),
            "frame_violations": [v.to_json() for v in self.frame_violations],
            "failure": self.failure.to_json() if self.failure else None,
        }

    def raise_for_failure(self) -> None:
        if not self.passed:
            raise OracleFailure(self)


class OracleFailure(CogcError):
    code = "OracleFailure"

    def __init__(self, verdict: OracleVerdict) -> None:
        self.verdict = verdict
        failure = verdict.failure
        super().__init__(f"{failure.name}: {failure.code}: {failure.message}")


class _Failed(Exception):
    """Unwinds both interpreters once an obligation fails."""

    def __init__(self, obligation: Obligation) -> None:
        self.obligation = obligation
        super().__init__(obligation.message)


def _ids(ptrs: Pointers) -> list[int]:
    return sorted(p.id for p in ptrs)


def _fail(name: str, code: str, message: str, **context: Any) -> NoReturn:
    raise _Failed(Obligation(name, code, message, context))


def _from_report(name: str, report: CorrReport, **context: Any) -> NoReturn:
    violation = report.failure
    _fail(name, violation.code, str(violation), **context)


def _where(e: Expr) -> dict[str, Any]:
    span = e.span
    return {
        "line": span.line if span else 0,
        "column": span.column if span else 0,
        "expr": format_expr(e),
    }


# --- Observers ---


class _ValueTrace(EvalObserver):
    """Records what the value semantics saw so the update run can be paired with it."""

    def __init__(self, record_entries: bool, limit: int) -> None:
        self.record_entries = record_entries
        self.limit = limit
        self.entries: list[tuple[Expr, Environment]] = []
        self.calls: list[list[Value | None]] = []
        self._open: list[int] = []

    def enter(self, e, env, store) -> None:
        if self.record_entries and len(self.entries) < self.limit:
            self.entries.append((e, env))

    def before_abstract(self, decl, fn, arg, store) -> None:
        self._open.append(len(self.calls))
        self.calls.append([arg, None])

    def after_abstract(self, decl, fn, arg, result, store) -> None:
        self.calls[self._open.pop()][1] = result


class _Replay(EvalObserver):
    """Update-run observer that checks each obligation against the recorded value run."""

    def __init__(self, program: Program, relation: Relation, trace: _ValueTrace) -> None:
        self.program = program
        self.relation = relation
        self.trace = trace
        self.checker = TypeChecker(program)
        # one derivation per instance: bodies without type mentions are shared objects
        self._derivations: dict[tuple, dict[int, TypingTree]] = {}
        self._frames: list[dict[int, TypingTree]] = []
        self._step = 0
        self._ffi_calls = 0
        self._open: list[tuple[int, CorrReport, Store, TFun, AbsFunDecl]] = []
        self.checks = 0

    def call(self, fn: FunV, arg: Value, store: Store | None) -> None:
        self._frames.append(self._derivation(fn))

    def returned(self, fn: FunV, result: Value, store: Store | None) -> None:
        self._frames.pop()

    def _derivation(self, fn: FunV) -> dict[int, TypingTree]:
        """Nodes of the derivation for this instance of ``fn``, checked on first call."""
        if not self.trace.record_entries or fn.origin is None:
            return {}
        cached = self._derivations.get(fn.origin)
        if cached is not None:
            return cached
        name, type_args = fn.origin
        d = self.program.lookup(name)
        nodes: dict[int, TypingTree] = {}
        if isinstance(d, FunDef):
            fn_type = instantiate_type(d.signature.body, d.signature.binders, type_args)
            try:
                tree = self.checker.check_body(
                    {}, fn.param, fn_type.arg, fn.body, fn_type.result, d.span
                )
            except CogcError as exc:
                _fail("typing", exc.code, f"{name}: {exc.message}")
            for node in tree.iter_nodes():
                nodes.setdefault(id(node.expr), node)
        self._derivations[fn.origin] = nodes
        return nodes

    def enter(self, e: Expr, env: Environment, store: Store | None) -> None:
        if self._step >= len(self.trace.entries):
            return
        e_v, env_v = self.trace.entries[self._step]
        self._step += 1
        if e_v is not e:
            _fail(
                "evaluation",
                "EvaluationDivergence",
                "the two semantics evaluated different expressions",
                **_where(e),
            )
        node = self._frames[-1].get(id(e)) if self._frames else None
        if node is not None:
            self._replay(node, env, store, env_v)

    def _replay(
        self, node: TypingTree, env_u: Environment, store: Store, env_v: Environment
    ) -> None:
        rel = self.relation
        full = rel.env(env_u, store, env_v, node.gamma)
        if not full.ok:
            _from_report("environment", full, rule=node.rule, **_where(node.expr))
        used = rel.env(env_u, store, env_v, node.used)
        if not used.ok:
            _from_report("weakening", used, rule=node.rule, **_where(node.expr))
        if not (used.r <= full.r and used.w <= full.w):
            _fail(
                "weakening",
                "WeakeningViolation",
                "weakened environment reaches pointers the full one does not",
                rule=node.rule,
                **_where(node.expr),
            )
        if node.split:
            parts = []
            for names in node.split:
                gamma = tuple(b for b in node.used if b[0] in names)
                part = rel.env(env_u, store, env_v, gamma)
                if not part.ok:
                    _from_report("splitting", part, rule=node.rule, **_where(node.expr))
                parts.append(part)
            for i, a in enumerate(parts):
                for j, b in enumerate(parts):
                    if i != j and a.w & (b.r | b.w):
                        _fail(
                            "splitting",
                            "AliasViolation",
                            f"premises {i} and {j} share writable pointer(s) "
                            f"{_ids(a.w & (b.r | b.w))}",
                            rule=node.rule,
                            **_where(node.expr),
                        )
        for name, ty in node.observed:
            self._bang(name, ty, env_u, store, env_v, node)
        self.checks += 1

    def _bang(
        self,
        name: str,
        ty: CoreType,
        env_u: Environment,
        store: Store,
        env_v: Environment,
        node: TypingTree,
    ) -> None:
        u, v = env_u.lookup(name), env_v.lookup(name)
        plain = self.relation.value(u, store, v, ty)
        banged = self.relation.value(u, store, v, bang_type(ty))
        if not banged.ok:
            _from_report("bang", banged, variable=name, **_where(node.expr))
        if plain.ok and (banged.r != plain.r | plain.w or banged.w):
            _fail(
                "bang",
                "BangViolation",
                f"'{name}' at {format_type(bang_type(ty))} does not make its writable "
                f"pointers read-only",
                variable=name,
                **_where(node.expr),
            )

    # the FFI assumption, once per abstract call
    def before_abstract(
        self, decl: AbsFunDecl, fn: AbsFunV, arg: Value, store: Store | None
    ) -> None:
        index = self._ffi_calls
        self._ffi_calls += 1
        if index >= len(self.trace.calls):
            _fail(
                "evaluation",
                "EvaluationDivergence",
                f"update semantics made an extra call to '{decl.ffi_name}'",
            )
        fn_type = instantiate_type(decl.signature.body, decl.signature.binders, fn.type_args)
        report = self.relation.value(arg, store, self.trace.calls[index][0], fn_type.arg)
        if not report.ok:
            _from_report("ffi-assumption", report, function=decl.ffi_name, side="argument")
        self._open.append((index, report, store.copy(), fn_type, decl))

    def after_abstract(
        self, decl: AbsFunDecl, fn: AbsFunV, arg: Value, result: Value, store: Store | None
    ) -> None:
        index, before, store_in, fn_type, decl = self._open.pop()
        name = decl.ffi_name
        after = self.relation.value(result, store, self.trace.calls[index][1], fn_type.result)
        if not after.ok:
            _from_report("ffi-assumption", after, function=name, side="result")
        if not after.r <= before.r:
            _fail(
                "ffi-assumption",
                "ReadSetGrowth",
                f"'{name}' returned read-only pointer(s) {_ids(after.r - before.r)} "
                "it was not given",
                function=name,
            )
        violations = frame_check(before.w, store_in, after.w, store)
        if violations:
            _fail(
                "ffi-assumption",
                violations[0].rule.value,
                f"'{name}' broke the frame: {', '.join(map(str, violations))}",
                function=name,
            )
        self.checks += 1


# --- The oracle ---


def refinement_oracle(
    program: Program,
    fname: str,
    v_arg: Value,
    u_arg: Value,
    store: Store,
    arg_type: CoreType | None = None,
    result_type: CoreType | None = None,
    *,
    registry: FFIRegistry | None = None,
    fuel: int = DEFAULT_FUEL,
    replay: bool = True,
    replay_limit: int = DEFAULT_REPLAY_LIMIT,
) -> OracleVerdict:
    """Run ``fname`` under both semantics and check every refinement obligation.

    ``program`` must be checked and elaborated. The input store is not modified.
    Lemma replay stops pairing evaluation steps after ``replay_limit`` of them.
    """
    try:
        return _run(
            program,
            fname,
            v_arg,
            u_arg,
            store,
            arg_type,
            result_type,
            registry,
            fuel,
            replay,
            replay_limit,
        )
    except _Failed as failed:
        ob = failed.obligation
        logger.info("oracle: %s failed for '%s': %s", ob.name, fname, ob.message)
        return OracleVerdict(False, failure=ob)


def _run(
    program, fname, v_arg, u_arg, store, arg_type, result_type, registry, fuel, replay, replay_limit
) -> OracleVerdict:
    d = program.lookup(fname)
    if not isinstance(d, FunDef) or not d.signature.is_mono:
        _fail("precondition", "NotAnEntryPoint", f"'{fname}' is not a monomorphic function")
    arg_type = arg_type or d.arg_type
    result_type = result_type or d.result_type
    if registry is None:
        from cogc.library import builtin_library

        registry = builtin_library(program)
    relation = Relation(registry, program)

    pre = relation.value(u_arg, store, v_arg, arg_type)
    if not pre.ok:
        _from_report("precondition", pre, type=format_type(arg_type))
    _check_erasure(relation, u_arg, store, v_arg, arg_type, pre, "argument")

    trace = _ValueTrace(replay, replay_limit)
    instances: dict[tuple, Value] = {}
    vi = ValueInterpreter(program, registry, fuel, trace, instances)
    fn = vi.instantiate(FunRef(fname))
    v_res = v_err = None
    try:
        v_res = vi.apply(fn, v_arg)
    except EvalError as exc:
        v_err = exc

    observer = _Replay(program, relation, trace)
    ui = UpdateInterpreter(program, registry, fuel, observer, instances)
    store_out = store.copy()
    u_res = u_err = None
    try:
        u_res = ui.apply(fn, u_arg, store_out)
    except EvalError as exc:
        u_err = exc

    if v_err is not None or u_err is not None:
        return _abnormal(v_err, u_err, pre, observer.checks)

    post = relation.value(u_res, store_out, v_res, result_type)
    if not post.ok:
        _from_report("result", post, type=format_type(result_type))
    _check_erasure(relation, u_res, store_out, v_res, result_type, post, "result")
    if not post.r <= pre.r:
        _fail(
            "read-set",
            "ReadSetGrowth",
            f"result reaches read-only pointer(s) {_ids(post.r - pre.r)} absent from the input",
        )
    violations = tuple(frame_check(pre.w, store, post.w, store_out))
    failure = None
    if violations:
        failure = Obligation("frame", violations[0].rule.value, ", ".join(map(str, violations)))
    verdict = OracleVerdict(
        passed=not violations,
        r=pre.r,
        w=pre.w,
        r_out=post.r,
        w_out=post.w,
        frame_violations=violations,
        failure=failure,
        checks=observer.checks,
    )
    logger.debug(
        "oracle: '%s' %s after %d replayed check(s)",
        fname,
        "passed" if verdict.passed else "failed",
        observer.checks,
    )
    return verdict


def _abnormal(
    v_err: EvalError | None, u_err: EvalError | None, pre: CorrReport, checks: int
) -> OracleVerdict:
    """Both semantics must fail the same way; a one-sided failure is a refinement failure."""
    if v_err is None or u_err is None:
        failed, ok = ("update", "value") if u_err is not None else ("value", "update")
        err = u_err or v_err
        _fail(
            "termination",
            err.code,
            f"{failed} semantics raised {err.code} ({err.message}) but {ok} semantics returned",
        )
    if v_err.code != u_err.code:
        _fail(
            "termination",
            u_err.code,
            f"value semantics raised {v_err.code}, update semantics {u_err.code}",
        )
    if v_err.code == "FuelExhausted":
        _fail("termination", "FuelExhausted", "neither semantics finished within the budget")
    return OracleVerdict(True, r=pre.r, w=pre.w, outcome=v_err.code, checks=checks)


def _check_erasure(
    relation: Relation,
    u: Value,
    store: Store,
    v: Value,
    ty: CoreType,
    both: CorrReport,
    side: str,
) -> None:
    """Single-sided typings must hold, with the update side's sets, whenever both sides do."""
    only_v = relation.value(None, None, v, ty)
    only_u = relation.value(u, store, None, ty)
    if not (only_v.ok and only_u.ok and only_u.sets == both.sets):
        _fail(
            "erasure",
            "ErasureMismatch",
            f"single-sided typing of the {side} disagrees with the correspondence",
            value_side=only_v.ok,
            update_side=only_u.to_json(),
            both=both.to_json(),
        )


# --- JSON inputs and batches ---


def oracle_from_json(
    program: Program,
    fname: str,
    doc: Any,
    *,
    registry: FFIRegistry | None = None,
    fuel: int = DEFAULT_FUEL,
    replay: bool = True,
) -> OracleVerdict:
    """Build corresponding inputs from a JSON document and run the oracle."""
    if registry is None:
        from cogc.library import builtin_library

        registry = builtin_library(program)
    d = program.lookup(fname)
    if not isinstance(d, FunDef):
        failure = Obligation("precondition", "NotAnEntryPoint", f"'{fname}' is not a function")
        return OracleVerdict(False, failure=failure)
    store = Store()
    v_arg, u_arg = from_json(doc, d.arg_type, registry, store)
    return refinement_oracle(
        program, fname, v_arg, u_arg, store, registry=registry, fuel=fuel, replay=replay
    )


def _sample(program: Program, fname: str, doc: Any, fuel: int) -> OracleVerdict:
    return oracle_from_json(program, fname, doc, fuel=fuel)


def run_samples(
    program: Program, fname: str, docs: list[Any], *, jobs: int = 1, fuel: int = DEFAULT_FUEL
) -> list[OracleVerdict]:
    """Oracle verdicts for many inputs, in input order; ``jobs > 1`` uses worker processes.

    Worker processes rebuild the built-in library, so custom registries need ``jobs == 1``.
    """
    if jobs <= 1 or len(docs) <= 1:
        return [_sample(program, fname, doc, fuel) for doc in docs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_sample, program, fname, doc, fuel) for doc in docs]
        return [f.result() for f in futures]
