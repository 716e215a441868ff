"""Per-method inference: parse, passivize, SP, refine, FAR, emit."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

from spinfer.emit import emit_contract, metrics
from spinfer.far import LEXICAL, far
from spinfer.lang import ParseError, TypeCheckError, parse, parse_expr, substitute, typecheck
from spinfer.lang.ast import Var
from spinfer.passive import UnsupportedConstruct, passivize, version
from spinfer.refine import (
    FrameInfo, dedupe_cases, externalize, infer_frame, prune_unsat, strip_trivial,
)
from spinfer.spengine import (
    DEFAULT_MAX_CFG, InferenceRefused, InferenceTimeout, infer_raw, raw_tree,
)


class Status(str, enum.Enum):
    INFERRED = "Inferred"
    TIMEOUT = "Timeout"
    REFUSED = "Refused"
    ERROR = "Error"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Options:
    far: bool = True
    simplify: bool = True
    deep_prune: bool = False
    timeout_ms: int = 300_000
    max_cfg: int | None = DEFAULT_MAX_CFG
    domain_bound: int = 2
    precondition: str | None = None


@dataclass
class InferenceResult:
    method: str
    status: Status
    message: str = ""
    spec: object = None
    snf: object = None  # externalized SNF, before simplification and FAR
    raw: object = None  # RawSpec straight from SP
    frame: FrameInfo | None = None
    contract: str | None = None
    before: dict | None = None
    after: dict | None = None
    passes: dict = field(default_factory=dict)  # metrics after each pass, in order
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def telemetry(self) -> dict:
        return {
            "method": self.method,
            "status": str(self.status),
            "message": self.message,
            "timings_ms": {k: round(v, 3) for k, v in self.timings.items()},
            "metrics_before": self.before,
            "metrics_after": self.after,
            "metrics_by_pass": self.passes,
            "warnings": self.warnings,
        }


class _Clock:
    def __init__(self, budget_ms: int):
        self.start = time.monotonic()
        self.deadline = self.start + budget_ms / 1000.0
        self.timings: dict = {}
        self._mark = self.start

    def lap(self, name: str):
        now = time.monotonic()
        self.timings[name] = (now - self._mark) * 1000.0
        self._mark = now
        if now > self.deadline:
            raise InferenceTimeout(f"wall-clock budget exceeded after {name}")


def _entry_precondition(text: str, method, program):
    entry = set(method.param_names) | {g.name for g in program.globals}
    return substitute(parse_expr(text), lambda n: Var(version(n, 0)) if n in entry else None)


def infer_method(program, method, options: Options | None = None) -> InferenceResult:
    """Run the whole pipeline on one type-checked method. Refusals, timeouts
    and failures come back as statuses; partial results are discarded."""
    opts = options or Options()
    res = InferenceResult(method.name, Status.INFERRED)
    clock = _Clock(opts.timeout_ms)
    try:
        pm = passivize(method, program)
        clock.lap("passive")
        phi = None if opts.precondition is None else _entry_precondition(opts.precondition, method, program)
        raw = infer_raw(pm, phi, max_cfg=opts.max_cfg, deadline=clock.deadline)
        clock.lap("sp")
        frame = infer_frame(method, program)
        passes = {"sp": metrics(raw_tree(raw.spec), frame)}
        snf = externalize(raw.spec, pm)
        clock.lap("externalize")
        passes["externalize"] = metrics(snf, frame)
        spec = snf
        if opts.simplify:
            spec = strip_trivial(spec, default="true")
            env = dict(pm.env)
            spec = prune_unsat(spec, deep=opts.deep_prune, env=env, bound=opts.domain_bound)
            spec = dedupe_cases(spec)
            clock.lap("simplify")
            passes["simplify"] = metrics(spec, frame)
        if opts.far:
            spec = far(spec, LEXICAL, deadline=clock.deadline)
            if opts.simplify:
                spec = dedupe_cases(spec)
            clock.lap("far")
            passes["far"] = metrics(spec, frame)
        contract = emit_contract(spec, frame)
        before = passes["sp"]
        after = metrics(spec, frame)
        clock.lap("emit")
    except InferenceTimeout as err:
        res.status, res.message = Status.TIMEOUT, str(err)
    except (InferenceRefused, UnsupportedConstruct) as err:
        res.status, res.message = Status.REFUSED, str(err)
    except Exception as err:  # noqa: BLE001 - any other failure is an Error outcome
        res.status, res.message = Status.ERROR, f"{type(err).__name__}: {err}"
    else:
        res.spec, res.snf, res.raw, res.frame = spec, snf, raw, frame
        res.contract, res.before, res.after, res.passes = contract, before, after, passes
        res.warnings = list(raw.warnings)
    res.timings = clock.timings
    return res


def load_program(source: str):
    return typecheck(parse(source))


def infer_source(source: str, options: Options | None = None, methods=None) -> list:
    """Infer every method of a source file (or the named subset). A file that
    does not parse or type-check yields a single Error result."""
    try:
        program = load_program(source)
    except (ParseError, TypeCheckError) as err:
        return [InferenceResult("*", Status.ERROR, f"{type(err).__name__}: {err}")]
    targets = [m for m in program.methods if methods is None or m.name in methods]
    return [infer_method(program, m, options) for m in targets]
