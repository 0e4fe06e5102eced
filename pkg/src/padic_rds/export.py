"""
Writers for the CLI output files.

Every writer is a pure function of its input: floats are rendered with 17
significant digits, rationals as "num/den", p-adic integers in their
"p:K:digits" text form, so reruns with the same seed are byte-identical.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from .analysis import invariant_decomposition
from .chain import TransitionMatrix
from .config import fraction_text
from .engine import EmpiricalChainReport, OrbitTrace
from .pattern import PatternResult, SeedIndependenceReport

FLOAT_FORMAT = "%.17g"
TRACE_COLUMNS = ["step", "drawn_j", "state", "dist_valuation", "cumulative_valuation"]
HISTOGRAM_HEADER = "x_bins y_bins x_min x_max y_min y_max"


def render_float(x: float) -> str:
    return FLOAT_FORMAT % x


def write_json(data: Dict[str, Any], path: Path) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    return path


def trace_frame(trace: OrbitTrace) -> pd.DataFrame:
    """Trace as text columns; the step-0 row has an empty drawn_j."""
    rows = [{
        "step": str(step.step),
        "drawn_j": "" if step.drawn_j is None else str(step.drawn_j),
        "state": step.state.to_text(),
        "dist_valuation": str(step.dist_valuation),
        "cumulative_valuation": str(step.cumulative_valuation),
    } for step in trace.steps]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def write_trace_csv(trace: OrbitTrace, path: Path) -> Path:
    trace_frame(trace).to_csv(path, index=False, lineterminator="\n")
    return Path(path)


def simulate_summary(traces: Sequence[OrbitTrace]) -> Dict[str, Any]:
    spec = traces[0].spec
    components = invariant_decomposition(spec.p, spec.exponents)
    trials: List[Dict[str, Any]] = []
    for t, trace in enumerate(traces):
        final = trace.steps[-1]
        component = None
        if final.root_index is not None:
            component = next((i for i, c in enumerate(components) if final.root_index in c), None)
        counts = np.bincount(np.asarray(trace.drawn, dtype=np.int64), minlength=spec.m)
        trials.append({
            "trial": t,
            "final_state": final.state.to_text(),
            "final_root_index": None if final.root_index is None else final.root_index.a,
            "final_component": component,
            "final_dist_valuation": str(final.dist_valuation),
            "final_distance": fraction_text(trace.final_distance),
            "cumulative_valuation": final.cumulative_valuation,
            "draw_counts": [int(c) for c in counts],
        })
    return {
        "spec": spec.to_json_dict(),
        "u0": traces[0].u0.to_text(),
        "n_steps": traces[0].n_steps,
        "components": [[r.a for r in c] for c in components],
        "trials": trials,
    }


def matrix_json(matrix: TransitionMatrix) -> Dict[str, Any]:
    return {
        "states": [r.a for r in matrix.states],
        "entries": [[fraction_text(x) for x in row] for row in matrix.entries],
    }


def matrix_lines(matrix: TransitionMatrix) -> List[str]:
    """One line per positive edge, "xi^a -> xi^b : num/den"."""
    lines = []
    for a in matrix.states:
        for b, x in matrix.row(a).items():
            lines.append(f"{a} -> {b} : {fraction_text(x)}")
    return lines


def chain_report(matrix: TransitionMatrix, empirical: EmpiricalChainReport) -> Dict[str, Any]:
    return {
        "exact": matrix_json(matrix),
        "empirical": {
            "start": empirical.start.a,
            "n_steps": empirical.n_steps,
            "burn_in": empirical.burn_in,
            "visits": list(empirical.visits),
            "counts": [list(row) for row in empirical.counts],
            "max_abs_deviation": render_float(empirical.max_abs_deviation),
            "all_within_3_sigma": empirical.all_passed,
            "failed_entries": [[c.a.a, c.b.a] for c in empirical.comparisons if not c.passed],
        },
    }


def write_points_csv(result: PatternResult, path: Path) -> Path:
    frame = pd.DataFrame({"x": result.xs, "y": result.ys})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return Path(path)


def write_histogram_csv(result: PatternResult, path: Path) -> Path:
    """Row-major x_bins x y_bins counts after a two-line header."""
    config = result.config
    a, b = config.y_range
    values = " ".join([str(config.x_bins), str(config.y_bins), "0", "1", render_float(a), render_float(b)])
    np.savetxt(path, result.histogram, fmt="%d", delimiter=",", header=f"{HISTOGRAM_HEADER}\n{values}",
               comments="# ")
    return Path(path)


def strips_report(result: PatternResult) -> Dict[str, Any]:
    spec = result.config.spec
    return {
        "spec": spec.to_json_dict(),
        "u0": result.config.u0.to_text(),
        "reached_component": result.reached_component,
        "n_strips": len(result.strip_centers),
        "strips": [{
            "index": None if c.index is None else c.index.a,
            "exact": fraction_text(c.exact),
            "x": render_float(c.x),
            "occupancy": result.occupancy[c.index],
        } for c in result.strip_centers],
        "n_samples": result.n_samples,
        "tolerance_digits": result.config.effective_tolerance_digits,
        "outside_tolerance": result.outside_tolerance,
        "y_chisquare_pvalue": render_float(result.y_pvalue),
    }


def seed_report(report: SeedIndependenceReport) -> Dict[str, Any]:
    return {
        "seeds": list(report.seeds),
        "strips": [fraction_text(c.exact) for c in report.strip_centers],
        "occupancies": [[o[c.index] for c in report.strip_centers] for o in report.occupancies],
        "within_3_sigma_fraction": render_float(report.within_3_sigma_fraction()),
        "occupancies_differ": report.occupancies_differ,
    }
