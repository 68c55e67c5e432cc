"""JSON schemas for instances, parameters, solutions and oracle reports.

Complex numbers are stored as two-element [re, im] arrays.  Floats survive a
round trip losslessly (JSON rendering uses Python's shortest-repr floats).

Scenario document::

    {
      "instance": {
        "h_sd": [re, im],
        "h_sr": [[re, im], ...],
        "h_rd": [[re, im], ...],
        "sigma2": <float>
      },
      "params": {
        "p1": <float>,
        "gamma": <float or null>,
        "budget": {"kind": "total", "p_tot": <float>}
                  or {"kind": "individual", "p_s": <float>, "p_i": [<float>, ...]}
      }
    }
"""

from __future__ import annotations

import json
from typing import Optional, Tuple

import numpy as np

from .oracles import OracleReport
from .types import (
    BeamSolution,
    IndividualBudget,
    IndividualSolveDiagnostics,
    NetworkInstance,
    SystemParams,
    TotalBudget,
    TotalSolveDiagnostics,
)


def _c2pair(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _pair2c(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def instance_to_dict(instance: NetworkInstance) -> dict:
    return {
        "h_sd": _c2pair(instance.h_sd),
        "h_sr": [_c2pair(z) for z in instance.h_sr],
        "h_rd": [_c2pair(z) for z in instance.h_rd],
        "sigma2": instance.sigma2,
    }


def instance_from_dict(doc: dict) -> NetworkInstance:
    return NetworkInstance(
        h_sd=_pair2c(doc["h_sd"]),
        h_sr=np.array([_pair2c(p) for p in doc["h_sr"]], dtype=complex),
        h_rd=np.array([_pair2c(p) for p in doc["h_rd"]], dtype=complex),
        sigma2=float(doc["sigma2"]),
    )


def params_to_dict(params: SystemParams) -> dict:
    budget = params.budget
    if isinstance(budget, TotalBudget):
        budget_doc = {"kind": "total", "p_tot": budget.p_tot}
    elif isinstance(budget, IndividualBudget):
        budget_doc = {"kind": "individual", "p_s": budget.p_s,
                      "p_i": [float(p) for p in budget.p_i]}
    else:
        raise TypeError(f"unknown budget type {type(budget).__name__}")
    return {"p1": params.p1, "gamma": params.gamma, "budget": budget_doc}


def params_from_dict(doc: dict) -> SystemParams:
    budget_doc = doc["budget"]
    kind = budget_doc["kind"]
    if kind == "total":
        budget = TotalBudget(p_tot=float(budget_doc["p_tot"]))
    elif kind == "individual":
        budget = IndividualBudget(p_s=float(budget_doc["p_s"]),
                                  p_i=np.array(budget_doc["p_i"], dtype=float))
    else:
        raise ValueError(f"unknown budget kind {kind!r}")
    gamma = doc.get("gamma")
    return SystemParams(p1=float(doc["p1"]),
                        gamma=None if gamma is None else float(gamma),
                        budget=budget)


def scenario_to_dict(instance: NetworkInstance, params: SystemParams) -> dict:
    return {"instance": instance_to_dict(instance), "params": params_to_dict(params)}


def scenario_from_dict(doc: dict) -> Tuple[NetworkInstance, SystemParams]:
    return instance_from_dict(doc["instance"]), params_from_dict(doc["params"])


def load_scenario(path) -> Tuple[NetworkInstance, SystemParams]:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def dump_scenario(instance: NetworkInstance, params: SystemParams, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(instance, params), fh, indent=2)
        fh.write("\n")


def solution_to_dict(solution: BeamSolution) -> dict:
    doc = {
        "w": [_c2pair(z) for z in solution.w],
        "alpha": solution.alpha,
        "c_d": solution.c_d,
        "second_phase_power": solution.second_phase_power,
    }
    diag = solution.diagnostics
    if isinstance(diag, TotalSolveDiagnostics):
        doc["diagnostics"] = {
            "kind": "total",
            "mu": diag.mu,
            "rayleigh_value": diag.rayleigh_value,
        }
    elif isinstance(diag, IndividualSolveDiagnostics):
        doc["diagnostics"] = {
            "kind": "individual",
            "clamped": list(diag.clamped),
            "iterations": diag.iterations,
            "chosen_r": diag.chosen_r,
        }
    return doc


def report_to_dict(report: OracleReport, label: Optional[str] = None) -> dict:
    doc = {
        "analytic_value": report.analytic_value,
        "oracle_value": report.oracle_value,
        "gap": report.gap,
        "argmax_distance": report.argmax_distance,
        "samples_or_evals": report.samples_or_evals,
    }
    if label is not None:
        doc["label"] = label
    return doc
