"""Execute a resolved RunConfig and write the result table plus its manifest."""

import json
import logging
import math
import platform
import time
from pathlib import Path
from typing import Any, Optional

import numpy as np
import scipy

from . import __version__
from .adiabatic import AdiabaticRow, adiabatic_sweep
from .config import RunConfig
from .criteria import CriterionResult, SpinMoments
from .errors import NumericError
from .kerr import DynamicRow, KerrParams, dynamic_spin_moments, dynamic_sweep
from .oracle import default_cutoff, fock_oracle

logger = logging.getLogger(__name__)

UNDEFINED = "undefined"
ORACLE_ATOL = 1e-10

ADIABATIC_COLUMNS = ["Ng_over_kappa", "T_nK", "E_HZ", "E_entropic"]
DYNAMIC_COLUMNS = ["tau", "S_plus_dB", "S_minus_dB", "theta", "E_product", "E_sum"]
ORACLE_COLUMNS = ["g_ratio_set", "alpha_sq", "tau", "cutoff", "max_rel_deviation", "passed"]


def format_number(value: Any) -> str:
    """17 significant digits, locale independent; None becomes 'undefined'."""
    if value is None:
        return UNDEFINED
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


def _criterion_value(result: Optional[CriterionResult]) -> Optional[float]:
    return None if result is None else result.value


def adiabatic_table(rows: list[AdiabaticRow], include_number_squeezing: bool = False) -> tuple[list[str], list[list]]:
    columns = ADIABATIC_COLUMNS + (["number_squeezing_dB"] if include_number_squeezing else [])
    table = []
    for row in rows:
        record = [row.ng_over_kappa, row.T, _criterion_value(row.e_hz), _criterion_value(row.e_entropic)]
        if include_number_squeezing:
            record.append(row.number_squeezing_dB)
        table.append(record)
    return columns, table


def dynamic_table(rows: list[DynamicRow]) -> tuple[list[str], list[list]]:
    table = [
        [row.tau, row.squeezing.plus, row.squeezing.minus, row.theta, row.e_product.value, row.e_sum.value]
        for row in rows
    ]
    return DYNAMIC_COLUMNS, table


# -- oracle check ------------------------------------------------------------


def _moment_arrays(sm: SpinMoments) -> list[np.ndarray]:
    return [sm.mean_a, sm.mean_b, sm.cov_a, sm.cov_b, sm.cross, np.asarray(sm.n_mean)]


def max_relative_deviation(engine: SpinMoments, reference: SpinMoments, rtol: float = 1e-8, atol: float = ORACLE_ATOL) -> float:
    """max |x - y| / (|y| + atol/rtol) over every moment entry."""
    floor = atol / rtol
    worst = 0.0
    for x, y in zip(_moment_arrays(engine), _moment_arrays(reference)):
        worst = max(worst, float(np.max(np.abs(x - y) / (np.abs(y) + floor))))
    return worst


def oracle_check(config) -> tuple[list[str], list[list], float]:
    """Compare the closed-form engine against the truncated Fock oracle on every grid point."""
    table = []
    worst = 0.0
    for name, ratios in config.g_ratio_sets.items():
        for alpha_sq in config.alpha_sq:
            n_a = config.n_a if config.n_a is not None else 2.0 * alpha_sq
            for tau in config.tau:
                params = KerrParams.from_atom_number(n_a, ratios, tau, alpha=math.sqrt(alpha_sq))
                cutoff = config.cutoff if config.cutoff is not None else default_cutoff(params)
                try:
                    reference = fock_oracle(params, config.phi, cutoff)
                except NumericError as e:
                    e.point = {"g_ratio_set": name, "alpha_sq": alpha_sq, "tau": tau, **e.point}
                    raise
                deviation = max_relative_deviation(dynamic_spin_moments(params, config.phi), reference)
                worst = max(worst, deviation)
                table.append([name, alpha_sq, tau, cutoff, deviation, deviation < config.tolerance])
                logger.debug("oracle %s alpha_sq=%g tau=%g: deviation %.3g", name, alpha_sq, tau, deviation)
    return ORACLE_COLUMNS, table, worst


# -- writers -----------------------------------------------------------------


def render_csv(columns: list[str], table: list[list]) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(format_number(v) for v in record) for record in table)
    return "\n".join(lines) + "\n"


def _json_value(value: Any) -> Any:
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def render_json(columns: list[str], table: list[list]) -> str:
    records = [{c: _json_value(v) for c, v in zip(columns, record)} for record in table]
    return json.dumps({"columns": columns, "rows": records}, indent=2) + "\n"


def manifest_path(output_path: Path) -> Path:
    return output_path.with_name(output_path.name + ".manifest.json")


def build_manifest(config: RunConfig, fmt: str, threads: int, rows: int, wall_time: float, extra: Optional[dict] = None) -> dict:
    manifest = {
        "twowell_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "format": fmt,
        "threads": threads,
        "rows": rows,
        "wall_time_s": wall_time,
        "config": config.to_dict(),
    }
    if config.dynamic is not None:
        manifest["resolved"] = {"alpha_abs": abs(config.dynamic.alpha), "alpha_sq": abs(config.dynamic.alpha) ** 2}
    manifest.update(extra or {})
    return manifest


def run(config: RunConfig, fmt: Optional[str] = None, threads: int = 1, output: Optional[str] = None) -> Path:
    """Evaluate the configured scenario and write its table and manifest.

    Returns the path of the written table. An oracle check whose worst
    deviation exceeds the tolerance still writes its report, then raises
    NumericError.
    """
    fmt = fmt or config.output.format
    out_path = Path(output or config.output.path)
    start = time.perf_counter()
    extra: dict[str, Any] = {}
    failure: Optional[NumericError] = None

    if config.scenario == "adiabatic":
        ad = config.adiabatic
        print(f"Adiabatic sweep: N={ad.N}, {len(ad.ng_over_kappa)} grid points x {len(ad.temperatures)} temperatures")
        rows = adiabatic_sweep(
            ad.N, ad.ng_over_kappa, ad.temperatures, ad.kappa_scale, ad.include_number_squeezing, threads
        )
        columns, table = adiabatic_table(rows, ad.include_number_squeezing)
    elif config.scenario == "dynamic":
        dyn = config.dynamic
        print(f"Dynamic sweep: N_A={dyn.n_a:g}, |alpha|={abs(dyn.alpha):.6g}, {len(dyn.tau)} tau points")
        params = KerrParams.from_atom_number(dyn.n_a, dyn.g_ratios, alpha=dyn.alpha)
        rows = dynamic_sweep(params, dyn.tau, dyn.phi, dyn.frame, threads)
        columns, table = dynamic_table(rows)
    else:
        oc = config.oracle
        points = len(oc.g_ratio_sets) * len(oc.alpha_sq) * len(oc.tau)
        print(f"Oracle check: {points} points, tolerance {oc.tolerance:g}")
        columns, table, worst = oracle_check(oc)
        extra["max_rel_deviation"] = worst
        print(f"Max relative deviation: {worst:.3e}")
        if worst >= oc.tolerance:
            failed = next(record for record in table if not record[-1])
            failure = NumericError(
                "engine disagrees with the Fock oracle",
                diagnostic=f"max relative deviation {worst:.3e} >= {oc.tolerance:g}",
                point={"g_ratio_set": failed[0], "alpha_sq": failed[1], "tau": failed[2]},
            )

    text = render_csv(columns, table) if fmt == "csv" else render_json(columns, table)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text)
    wall_time = time.perf_counter() - start

    manifest = build_manifest(config, fmt, threads, len(table), wall_time, extra)
    manifest_path(out_path).write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"Wrote {len(table)} rows to {out_path} ({wall_time:.2f}s)")

    if failure is not None:
        raise failure
    return out_path
