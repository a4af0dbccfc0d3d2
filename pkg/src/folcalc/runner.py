"""Task dispatch and deterministic JSON reports."""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .foliation import (
    Foliation,
    VectorField,
    induced_foliation,
    intersection_foliation,
    involutive_closure,
    is_involutive,
    union,
)
from .gaussian import parse_gaussian
from .groebner import Budget, BudgetExceeded, current_budget, use_budget
from .lab import cauchy_schwarz_audit, nt_report, nu_proxy, pullback_check, transversality_check
from .modules import PolyIdeal, PolyModule, saturate
from .scene import SceneDoc, TaskSpec
from .testforms import constant_test_form_basis

__all__ = ["Report", "run_task", "run_scene", "emit_report", "STATUS_OK", "STATUS_ERROR", "STATUS_BUDGET"]

STATUS_OK = "ok"
STATUS_ERROR = "error"
STATUS_BUDGET = "budget-exceeded"


@dataclass
class Report:
    id: str
    op: str
    inputs: dict
    status: str
    result: Any = None
    error: str | None = None
    computation: str | None = None
    timing: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"id": self.id, "op": self.op, "inputs": self.inputs, "status": self.status, "result": self.result}
        if self.error is not None:
            out["error"] = self.error
        if self.computation is not None:
            out["computation"] = self.computation
        if include_timing:
            out["timing"] = self.timing
        return out


# -- payloads ---------------------------------------------------------------

def _module_payload(M: PolyModule) -> dict:
    gens = [str(VectorField(g)) for g in M.basis]
    return {"generators": gens, "rank": M.generic_rank() if gens else 0}


def _ideal_payload(I: PolyIdeal) -> list[str]:
    return [str(g) for g in I.basis]


def _foliation_payload(F: Foliation) -> dict:
    return {
        "generators": [str(g) for g in F.generators],
        "rank": F.rank,
        "singular_ideal": _ideal_payload(F.sing_ideal),
        "iterations": F.iterations,
        "rank_trace": list(F.trace),
    }


def _closure(doc: SceneDoc, name: str) -> Foliation:
    M = doc.module(name)
    if not M.generators:
        return Foliation.from_saturated(M)
    return involutive_closure(M)


def _field(doc: SceneDoc, name: str, params: dict):
    H = doc.hermitian_field(name)
    if "order" in params:
        H = H.permuted(params["order"])
    return H


def _matrix(rows) -> np.ndarray:
    def num(x):
        return complex(parse_gaussian(x)) if isinstance(x, str) else complex(x)

    return np.array([[num(x) for x in r] for r in rows], dtype=complex)


# -- ops --------------------------------------------------------------------

def _op_rank(doc, args, params):
    M = doc.module(args[0])
    return {"rank": M.generic_rank() if M.generators else 0}


def _op_singular_locus(doc, args, params):
    F = _closure(doc, args[0])
    return {"rank": F.rank, "singular_ideal": _ideal_payload(F.sing_ideal)}


def _op_saturate(doc, args, params):
    return _module_payload(saturate(doc.module(args[0])))


def _op_involutive(doc, args, params):
    return {"value": is_involutive(doc.module(args[0]))}


def _op_closure(doc, args, params):
    return _foliation_payload(_closure(doc, args[0]))


def _op_union(doc, args, params):
    return _foliation_payload(union(_closure(doc, args[0]), _closure(doc, args[1])))


def _op_intersection(doc, args, params):
    res = intersection_foliation(_closure(doc, args[0]), _closure(doc, args[1]))
    out = _module_payload(res.module)
    out["saturated"] = res.saturated
    return out


def _op_induced(doc, args, params):
    return _foliation_payload(induced_foliation(doc.rational_map(args[0])))


def _op_test_form_basis(doc, args, params):
    n = params.get("n", doc.n)
    pairs = constant_test_form_basis(n, params["k"], params["p"])
    return {"n": n, "k": params["k"], "p": params["p"], "pairs": [[list(q.I), list(q.J)] for q in pairs]}


def _op_nt_check(doc, args, params):
    H = _field(doc, args[0], params)
    chart = doc.chart_box(args[1])
    rep = nt_report(H, chart, doc.n, params["k"], r_max=params.get("r_max", 0.6),
                    floor=params.get("floor", 1e-12), workers=params.get("workers", 1))
    return rep.to_dict()


def _op_transversality(doc, args, params):
    H = _field(doc, args[0], params)
    delta = transversality_check(H, doc.chart_box(args[1]), params["k"], params["eps"])
    return {"delta": delta}


def _op_pullback_check(doc, args, params):
    H = _field(doc, args[0], params)
    ok = pullback_check(H, doc.chart_box(args[1]), params["k"], params.get("eps", 0.0), params["tol"])
    return {"value": ok}


def _op_cs_audit(doc, args, params):
    return {"value": cauchy_schwarz_audit(_matrix(params["matrix"]), params["p"], tol=params.get("tol", 1e-12))}


def _op_nu_proxy(doc, args, params):
    H = doc.hermitian_field(args[0])
    nu, masses = nu_proxy(H, doc.chart_box(args[1]), r_max=params.get("r_max", 0.6),
                          floor=params.get("floor", 1e-12))
    return {"nu": nu, "n_minus_nu": doc.n - nu,
            "masses": [{"p": p, "values": vals} for p, vals in sorted(masses.items())]}


_DISPATCH: dict[str, Callable] = {
    "rank": _op_rank,
    "singular-locus": _op_singular_locus,
    "saturate": _op_saturate,
    "involutive": _op_involutive,
    "closure": _op_closure,
    "union": _op_union,
    "intersection": _op_intersection,
    "induced": _op_induced,
    "test-form-basis": _op_test_form_basis,
    "nt-check": _op_nt_check,
    "transversality": _op_transversality,
    "pullback-check": _op_pullback_check,
    "cs-audit": _op_cs_audit,
    "nu-proxy": _op_nu_proxy,
}


def run_task(doc: SceneDoc, task: TaskSpec, budget: Budget | None = None) -> Report:
    """Run one task; every failure is captured in the report status."""
    inputs = {"args": list(task.args), "params": dict(task.params)}
    start = time.perf_counter()
    try:
        with use_budget(budget or current_budget()):
            result = _DISPATCH[task.op](doc, task.args, task.params)
        report = Report(task.id, task.op, inputs, STATUS_OK, result)
    except BudgetExceeded as exc:
        report = Report(task.id, task.op, inputs, STATUS_BUDGET, None, str(exc), exc.computation)
    except Exception as exc:  # noqa: BLE001 - isolation: one task never aborts the run
        report = Report(task.id, task.op, inputs, STATUS_ERROR, None, f"{type(exc).__name__}: {exc}")
    report.timing = time.perf_counter() - start
    return report


def _run_indexed(payload):
    doc, task, budget = payload
    return run_task(doc, task, budget)


def run_scene(doc: SceneDoc, budget: Budget | None = None, parallel: bool = False,
              max_workers: int | None = None) -> list[Report]:
    """Reports for every task, always in scene order."""
    budget = budget or current_budget()
    if not parallel or len(doc.tasks) < 2:
        return [run_task(doc, t, budget) for t in doc.tasks]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_run_indexed, [(doc, t, budget) for t in doc.tasks]))


# -- JSON -------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int, out: list[str]) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        for i, (k, v) in enumerate(items):
            out.append(pad + json.dumps(str(k), ensure_ascii=False) + ": ")
            _encode(v, indent, level + 1, out)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _encode(v, indent, level + 1, out)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(reports: Sequence[Report | dict], include_timing: bool = False) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    items = [r.to_dict(include_timing) if isinstance(r, Report) else r for r in reports]
    out: list[str] = []
    _encode(items, 2, 0, out)
    return "".join(out)
