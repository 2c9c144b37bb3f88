"""Run configuration for twowell.

A run is described by one JSON document naming a scenario and carrying
exactly one matching block:

    {
      "scenario": "adiabatic",
      "adiabatic": {"N": 100, "Ng_over_kappa": {"start": -10, "stop": 10, "step": 0.1}},
      "output": {"path": "fig2.csv", "format": "csv"}
    }

Missing keys inside a block fall back to the DEFAULT_* dictionaries.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .adiabatic import MAX_ATOM_NUMBER
from .criteria import FRAMES, ROTATED
from .errors import ConfigError, InvalidArgumentError
from .kerr import MAX_MEAN_OCCUPATION, RB_SCATTERING_LENGTHS, g_ratios_from_scattering_lengths
from .oracle import MAX_ORACLE_OCCUPATION

SCENARIOS = ("adiabatic", "dynamic", "oracle-check")
FORMATS = ("csv", "json")
MAX_GRID_POINTS = 1_000_000

RB_RATIOS = [list(row) for row in g_ratios_from_scattering_lengths(**RB_SCATTERING_LENGTHS)]
NO_CROSS_RATIOS = [[1.0, 0.0], [0.0, RB_RATIOS[1][1]]]

DEFAULT_ADIABATIC = {
    "N": 100,
    "Ng_over_kappa": {"start": -10.0, "stop": 10.0, "step": 0.1},
    "T_nK": [0.0, 50.0, 80.0],
    "kappa_scale_nK": 50.0,
    "include_number_squeezing": False,
}

DEFAULT_DYNAMIC = {
    "N_A": 200.0,
    "alpha": None,
    "g_ratios": RB_RATIOS,
    "tau": {"start": 0.0, "stop": 0.5, "num": 501},
    "phi": math.pi / 2,
    "frame": ROTATED,
}

DEFAULT_ORACLE = {
    "alpha_sq": [1.0, 4.0, 9.0, 16.0],
    "N_A": None,
    "tau": {"start": 0.25, "stop": 5.0, "num": 20},
    "g_ratio_sets": {"rb": RB_RATIOS, "no_cross": NO_CROSS_RATIOS},
    "phi": math.pi / 2,
    "cutoff": None,
    "tolerance": 1e-8,
}

DEFAULT_OUTPUT = {"path": "results.csv", "format": "csv"}

BLOCK_DEFAULTS = {"adiabatic": DEFAULT_ADIABATIC, "dynamic": DEFAULT_DYNAMIC, "oracle-check": DEFAULT_ORACLE}


@dataclass(frozen=True)
class Diagnostic:
    field: str
    message: str
    line: Optional[int] = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.field}: {self.message}"


@dataclass
class AdiabaticConfig:
    N: int = 100
    ng_over_kappa: list[float] = field(default_factory=list)
    temperatures: list[float] = field(default_factory=lambda: [0.0, 50.0, 80.0])
    kappa_scale: float = 50.0
    include_number_squeezing: bool = False


@dataclass
class DynamicConfig:
    n_a: float = 200.0
    alpha: complex = 10.0
    g_ratios: list[list[float]] = field(default_factory=lambda: [list(r) for r in RB_RATIOS])
    tau: list[float] = field(default_factory=list)
    phi: float = math.pi / 2
    frame: str = ROTATED


@dataclass
class OracleConfig:
    alpha_sq: list[float] = field(default_factory=list)
    n_a: Optional[float] = None
    tau: list[float] = field(default_factory=list)
    g_ratio_sets: dict[str, list[list[float]]] = field(default_factory=dict)
    phi: float = math.pi / 2
    cutoff: Optional[int] = None
    tolerance: float = 1e-8


@dataclass
class OutputConfig:
    path: str = "results.csv"
    format: str = "csv"


@dataclass
class RunConfig:
    scenario: str
    output: OutputConfig = field(default_factory=OutputConfig)
    adiabatic: Optional[AdiabaticConfig] = None
    dynamic: Optional[DynamicConfig] = None
    oracle: Optional[OracleConfig] = None

    def to_dict(self) -> dict[str, Any]:
        """Fully resolved parameters, JSON-serializable."""
        data = {"scenario": self.scenario, "output": asdict(self.output)}
        if self.adiabatic is not None:
            data["adiabatic"] = asdict(self.adiabatic)
        if self.dynamic is not None:
            dyn = asdict(self.dynamic)
            dyn["alpha"] = [self.dynamic.alpha.real, self.dynamic.alpha.imag]
            data["dynamic"] = dyn
        if self.oracle is not None:
            data["oracle-check"] = asdict(self.oracle)
        return data


# -- parsing -----------------------------------------------------------------


def _locate(text: Optional[str], key: str) -> Optional[int]:
    if not text:
        return None
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse a JSON document, turning syntax errors into a ConfigError with a line."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([Diagnostic("<document>", e.msg, e.lineno)]) from None
    if not isinstance(data, dict):
        raise ConfigError([Diagnostic("<document>", "top level must be a JSON object", 1)])
    return data


def load_config(config_path: Union[str, Path]) -> tuple[dict[str, Any], str]:
    """Read a config file; returns the raw document and its text."""
    path = Path(config_path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError([Diagnostic("<file>", f"cannot read {path}: {e.strerror}")]) from None
    return parse_config_text(text), text


# -- validation --------------------------------------------------------------


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _grid_values(spec: Any) -> list[float]:
    """Resolve a grid spec; raises InvalidArgumentError with a reason."""
    if isinstance(spec, list):
        if not spec:
            raise InvalidArgumentError("grid is empty")
        if not all(_is_number(v) for v in spec):
            raise InvalidArgumentError("grid values must be finite numbers")
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        start, stop = spec.get("start"), spec.get("stop")
        if not (_is_number(start) and _is_number(stop)):
            raise InvalidArgumentError("grid needs finite 'start' and 'stop'")
        if stop < start:
            raise InvalidArgumentError("grid 'stop' is below 'start'")
        if "step" in spec:
            step = spec["step"]
            if not _is_number(step) or step <= 0:
                raise InvalidArgumentError("grid 'step' must be a positive number")
            count = math.floor((stop - start) / step + 1e-9) + 1
            if count > MAX_GRID_POINTS:
                raise InvalidArgumentError(f"grid has more than {MAX_GRID_POINTS} points")
            return [round(start + i * step, 12) + 0.0 for i in range(count)]
        if "num" in spec:
            num = spec["num"]
            if isinstance(num, bool) or not isinstance(num, int) or not 1 <= num <= MAX_GRID_POINTS:
                raise InvalidArgumentError("grid 'num' must be an integer >= 1")
            return [float(v) for v in np.linspace(start, stop, num)]
        raise InvalidArgumentError("grid object needs 'step' or 'num'")
    raise InvalidArgumentError("grid must be a list or a {start, stop, step|num} object")


def _ratio_problems(ratios: Any) -> Optional[str]:
    if not (isinstance(ratios, list) and len(ratios) == 2 and all(isinstance(r, list) and len(r) == 2 for r in ratios)):
        return "must be a 2x2 matrix"
    if not all(_is_number(x) for row in ratios for x in row):
        return "entries must be finite numbers"
    if ratios[0][0] != 1:
        return "KerrParams requires g_ratios[0][0] == 1 exactly"
    if ratios[0][1] != ratios[1][0]:
        return "KerrParams requires a symmetric matrix"
    return None


def _alpha_value(raw: Any) -> complex:
    if _is_number(raw):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(_is_number(x) for x in raw):
        return complex(raw[0], raw[1])
    raise InvalidArgumentError("alpha must be a number or [re, im]")


class _Checker:
    def __init__(self, text: Optional[str]):
        self.text = text
        self.diagnostics: list[Diagnostic] = []

    def add(self, path: str, message: str) -> None:
        self.diagnostics.append(Diagnostic(path, message, _locate(self.text, path.split(".")[-1])))

    def grid(self, path: str, spec: Any) -> Optional[list[float]]:
        try:
            return _grid_values(spec)
        except InvalidArgumentError as e:
            self.add(path, str(e))
            return None

    def number(self, path: str, value: Any, low: Optional[float] = None, strict: bool = False, why: str = "") -> bool:
        if not _is_number(value):
            self.add(path, "must be a finite number")
            return False
        if low is not None and (value <= low if strict else value < low):
            op = ">" if strict else ">="
            self.add(path, f"must be {op} {low:g}" + (f" ({why})" if why else ""))
            return False
        return True


def _unknown_keys(check: _Checker, block: str, data: dict, allowed: dict) -> None:
    for key in data:
        if key not in allowed:
            check.add(f"{block}.{key}", "unknown field")


def _check_adiabatic(check: _Checker, data: dict) -> None:
    _unknown_keys(check, "adiabatic", data, DEFAULT_ADIABATIC)
    merged = {**DEFAULT_ADIABATIC, **data}
    N = merged["N"]
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        check.add("adiabatic.N", "atom number must be an integer >= 1")
    elif N > MAX_ATOM_NUMBER:
        check.add("adiabatic.N", f"atom number {N} exceeds the supported maximum {MAX_ATOM_NUMBER}")
    check.grid("adiabatic.Ng_over_kappa", merged["Ng_over_kappa"])
    temps = check.grid("adiabatic.T_nK", merged["T_nK"])
    for T in temps or []:
        if T < 0:
            check.add("adiabatic.T_nK", f"temperature {T:g} < 0 violates ThermalSpec (T >= 0)")
    check.number("adiabatic.kappa_scale_nK", merged["kappa_scale_nK"], 0.0, strict=True, why="ThermalSpec requires kappa_scale > 0")
    if not isinstance(merged["include_number_squeezing"], bool):
        check.add("adiabatic.include_number_squeezing", "must be true or false")


def _check_phi(check: _Checker, path: str, phi: Any) -> None:
    if check.number(path, phi) and not 0 <= phi < 2 * math.pi:
        check.add(path, "beam-splitter phase must lie in [0, 2pi)")


def _check_dynamic(check: _Checker, data: dict) -> None:
    _unknown_keys(check, "dynamic", data, DEFAULT_DYNAMIC)
    merged = {**DEFAULT_DYNAMIC, **data}
    n_a_ok = check.number("dynamic.N_A", merged["N_A"], 0.0, strict=True, why="KerrParams requires N_A > 0")
    if merged["alpha"] is not None:
        try:
            alpha = _alpha_value(merged["alpha"])
        except InvalidArgumentError as e:
            check.add("dynamic.alpha", str(e))
        else:
            if abs(alpha) ** 2 > MAX_MEAN_OCCUPATION:
                check.add(
                    "dynamic.alpha",
                    f"|alpha|^2 = {abs(alpha) ** 2:.6g} exceeds the KerrParams overflow guard {MAX_MEAN_OCCUPATION:g}",
                )
    elif n_a_ok and merged["N_A"] / 2 > MAX_MEAN_OCCUPATION:
        check.add("dynamic.N_A", f"|alpha|^2 = N_A/2 exceeds the KerrParams overflow guard {MAX_MEAN_OCCUPATION:g}")
    problem = _ratio_problems(merged["g_ratios"])
    if problem:
        check.add("dynamic.g_ratios", problem)
    check.grid("dynamic.tau", merged["tau"])
    _check_phi(check, "dynamic.phi", merged["phi"])
    if merged["frame"] not in FRAMES:
        check.add("dynamic.frame", f"must be one of {', '.join(FRAMES)}")


def _check_oracle(check: _Checker, data: dict) -> None:
    _unknown_keys(check, "oracle-check", data, DEFAULT_ORACLE)
    merged = {**DEFAULT_ORACLE, **data}
    for value in check.grid("oracle-check.alpha_sq", merged["alpha_sq"]) or []:
        if value <= 0:
            check.add("oracle-check.alpha_sq", "|alpha|^2 must be positive")
        elif value > MAX_MEAN_OCCUPATION:
            check.add("oracle-check.alpha_sq", f"|alpha|^2 = {value:.6g} exceeds the KerrParams overflow guard {MAX_MEAN_OCCUPATION:g}")
        elif value > MAX_ORACLE_OCCUPATION:
            check.add("oracle-check.alpha_sq", f"|alpha|^2 = {value:.6g} exceeds the oracle limit {MAX_ORACLE_OCCUPATION:g}")
    if merged["N_A"] is not None:
        check.number("oracle-check.N_A", merged["N_A"], 0.0, strict=True, why="KerrParams requires N_A > 0")
    check.grid("oracle-check.tau", merged["tau"])
    sets = merged["g_ratio_sets"]
    if not isinstance(sets, dict) or not sets:
        check.add("oracle-check.g_ratio_sets", "must be a non-empty object of named 2x2 matrices")
    else:
        for name, ratios in sets.items():
            problem = _ratio_problems(ratios)
            if problem:
                check.add(f"oracle-check.g_ratio_sets.{name}", problem)
    _check_phi(check, "oracle-check.phi", merged["phi"])
    cutoff = merged["cutoff"]
    if cutoff is not None and (isinstance(cutoff, bool) or not isinstance(cutoff, int) or cutoff < 1):
        check.add("oracle-check.cutoff", "must be a positive integer or null")
    check.number("oracle-check.tolerance", merged["tolerance"], 0.0, strict=True)


def validate(raw: Any, text: Optional[str] = None) -> list[Diagnostic]:
    """Schema and range checks without running anything. Empty means runnable."""
    check = _Checker(text)
    if not isinstance(raw, dict):
        check.add("<document>", "top level must be a JSON object")
        return check.diagnostics

    scenario = raw.get("scenario")
    if scenario is None:
        check.add("scenario", f"missing; expected one of {', '.join(SCENARIOS)}")
    elif scenario not in SCENARIOS:
        check.add("scenario", f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")

    for key in raw:
        if key not in ("scenario", "output") and key not in SCENARIOS:
            check.add(key, "unknown field")

    present = [name for name in SCENARIOS if name in raw]
    if scenario in SCENARIOS:
        if scenario not in raw:
            check.add(scenario, f"missing scenario block for {scenario!r}")
        for name in present:
            if name != scenario:
                check.add(name, f"exactly one scenario block allowed; {name!r} does not match scenario {scenario!r}")

    checkers = {"adiabatic": _check_adiabatic, "dynamic": _check_dynamic, "oracle-check": _check_oracle}
    if scenario in SCENARIOS and scenario in raw:
        block = raw[scenario]
        if not isinstance(block, dict):
            check.add(scenario, "scenario block must be a JSON object")
        else:
            checkers[scenario](check, block)

    output = raw.get("output", {})
    if not isinstance(output, dict):
        check.add("output", "must be a JSON object")
    else:
        for key in output:
            if key not in DEFAULT_OUTPUT:
                check.add(f"output.{key}", "unknown field")
        fmt = output.get("format", DEFAULT_OUTPUT["format"])
        if fmt not in FORMATS:
            check.add("output.format", f"must be one of {', '.join(FORMATS)}")
        if not isinstance(output.get("path", DEFAULT_OUTPUT["path"]), str):
            check.add("output.path", "must be a string")

    return check.diagnostics


# -- resolution --------------------------------------------------------------


def resolve(raw: dict[str, Any], text: Optional[str] = None) -> RunConfig:
    """Validate and fill defaults; raises ConfigError with every diagnostic."""
    diagnostics = validate(raw, text)
    if diagnostics:
        raise ConfigError(diagnostics)

    scenario = raw["scenario"]
    data = {**BLOCK_DEFAULTS[scenario], **raw[scenario]}
    output = OutputConfig(**{**DEFAULT_OUTPUT, **raw.get("output", {})})
    config = RunConfig(scenario=scenario, output=output)

    if scenario == "adiabatic":
        config.adiabatic = AdiabaticConfig(
            N=data["N"],
            ng_over_kappa=_grid_values(data["Ng_over_kappa"]),
            temperatures=_grid_values(data["T_nK"]),
            kappa_scale=float(data["kappa_scale_nK"]),
            include_number_squeezing=data["include_number_squeezing"],
        )
    elif scenario == "dynamic":
        n_a = float(data["N_A"])
        alpha = math.sqrt(n_a / 2.0) if data["alpha"] is None else _alpha_value(data["alpha"])
        config.dynamic = DynamicConfig(
            n_a=n_a,
            alpha=complex(alpha),
            g_ratios=[[float(x) for x in row] for row in data["g_ratios"]],
            tau=_grid_values(data["tau"]),
            phi=float(data["phi"]),
            frame=data["frame"],
        )
    else:
        config.oracle = OracleConfig(
            alpha_sq=_grid_values(data["alpha_sq"]),
            n_a=None if data["N_A"] is None else float(data["N_A"]),
            tau=_grid_values(data["tau"]),
            g_ratio_sets={name: [[float(x) for x in row] for row in m] for name, m in data["g_ratio_sets"].items()},
            phi=float(data["phi"]),
            cutoff=data["cutoff"],
            tolerance=float(data["tolerance"]),
        )
    return config


def load_run_config(config_path: Union[str, Path]) -> RunConfig:
    raw, text = load_config(config_path)
    return resolve(raw, text)


# -- presets -----------------------------------------------------------------

PRESETS: dict[str, dict[str, Any]] = {
    "fig2": {
        "scenario": "adiabatic",
        "adiabatic": {
            "N": 100,
            "Ng_over_kappa": {"start": -10.0, "stop": 10.0, "step": 0.1},
            "T_nK": [0.0, 50.0, 80.0],
            "kappa_scale_nK": 50.0,
        },
        "output": {"path": "fig2.csv", "format": "csv"},
    },
    "fig3": {
        "scenario": "dynamic",
        "dynamic": {
            "N_A": 200.0,
            "g_ratios": RB_RATIOS,
            "tau": {"start": 0.0, "stop": 0.5, "num": 501},
            "phi": math.pi / 2,
        },
        "output": {"path": "fig3.csv", "format": "csv"},
    },
    "fig4": {
        "scenario": "dynamic",
        "dynamic": {
            "N_A": 200.0,
            "g_ratios": NO_CROSS_RATIOS,
            "tau": {"start": 0.0, "stop": 0.5, "num": 501},
            "phi": math.pi / 2,
        },
        "output": {"path": "fig4.csv", "format": "csv"},
    },
}


def preset_document(name: str) -> dict[str, Any]:
    if name not in PRESETS:
        raise InvalidArgumentError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    return json.loads(json.dumps(PRESETS[name]))


def preset(name: str) -> RunConfig:
    """Configuration reproducing one of the reference figures."""
    return resolve(preset_document(name))
