"""Scenario files: a plain-text, sectioned ``key = value`` format.

Grammar::

    file     := { blank | comment | header | entry }
    comment  := ('#' | ';') text, alone or after whitespace at the end of a line
    header   := '[' section ']'
    entry    := key '=' value

Numeric values may be arithmetic expressions in ``pi`` (``8*pi``,
``2*pi/3``).  Lists are comma separated.  Sections and their keys:

``[grid]``          ``n`` (required), ``L`` (default ``2*pi``)
``[kernel]``        ``variant`` (required: bounded | mt | singular),
                    ``profile`` (registry name or ``tabulated``), profile
                    parameters, ``radii`` / ``values`` (tabulated),
                    ``alpha`` and ``truncation`` (singular)
``[initial_data]``  ``name`` (required) and the generator's parameters,
                    or ``name = tabulated`` with ``path`` to a CSV file
                    holding ``rho,u`` columns sampled on the grid
``[step_control]``  ``t_end`` (required), ``cfl_advective``,
                    ``cfl_dissipative``, ``dt_max``
``[output]``        ``cadence``, ``directory``, ``formats``, ``snapshot_every``
``[run]``           ``mode``, ``e_convention``, ``eps_supp``, ``rho_floor``,
                    ``blowup_factor``, ``fit_skip``, ``fit_window``
``[agents]``        optional: ``N``, ``seed``, ``mollifier_width``, ``dt``,
                    ``normalization``
"""

from __future__ import annotations

import ast
import copy
import math
import operator
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .initial_data import REGISTRY as INITIAL_REGISTRY
from .kernels import KERNEL_REGISTRY, VARIANTS, KernelSpec

SECTIONS = ("grid", "kernel", "initial_data", "step_control", "output", "run", "agents")
MODES = ("torus", "line_emulation")
FORMATS = ("csv", "npz")

GRID_DEFAULTS = {"L": 2.0 * math.pi}
STEP_DEFAULTS = {"cfl_advective": 0.5, "cfl_dissipative": 0.4, "dt_max": 0.002}
OUTPUT_DEFAULTS = {"cadence": 0.1, "directory": "output", "formats": ("csv",), "snapshot_every": 1}
RUN_DEFAULTS = {"mode": "torus", "e_convention": "auto", "eps_supp": 1e-4, "rho_floor": 1e-6,
                "blowup_factor": 1e3, "fit_skip": 0.2, "fit_window": None}
AGENT_DEFAULTS = {"N": 1000, "seed": 0, "mollifier_width": 0.2, "dt": 0.05, "normalization": "mean"}


class ScenarioError(ValueError):
    """All problems found in a scenario, each tagged with a line number when known."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"line {ln}: {msg}" if ln else msg for ln, msg in self.errors]
        super().__init__("invalid scenario:\n  " + "\n  ".join(lines))


@dataclass
class Scenario:
    n: int
    kernel_variant: str
    initial_name: str
    t_end: float
    L: float = GRID_DEFAULTS["L"]
    kernel_profile: str | None = None
    kernel_params: dict = field(default_factory=dict)
    alpha: float | None = None
    truncation: int = 64
    kernel_radii: tuple | None = None
    kernel_values: tuple | None = None
    initial_params: dict = field(default_factory=dict)
    cfl_advective: float = STEP_DEFAULTS["cfl_advective"]
    cfl_dissipative: float = STEP_DEFAULTS["cfl_dissipative"]
    dt_max: float = STEP_DEFAULTS["dt_max"]
    cadence: float = OUTPUT_DEFAULTS["cadence"]
    directory: str = OUTPUT_DEFAULTS["directory"]
    formats: tuple = OUTPUT_DEFAULTS["formats"]
    snapshot_every: int = OUTPUT_DEFAULTS["snapshot_every"]
    mode: str = RUN_DEFAULTS["mode"]
    e_convention: str = RUN_DEFAULTS["e_convention"]
    eps_supp: float = RUN_DEFAULTS["eps_supp"]
    rho_floor: float = RUN_DEFAULTS["rho_floor"]
    blowup_factor: float = RUN_DEFAULTS["blowup_factor"]
    fit_skip: float = RUN_DEFAULTS["fit_skip"]
    fit_window: tuple | None = RUN_DEFAULTS["fit_window"]
    agents: dict | None = None

    def kernel(self) -> KernelSpec:
        if self.kernel_variant == "singular":
            return KernelSpec.singular(self.alpha, self.truncation)
        if self.kernel_profile == "tabulated":
            return KernelSpec.from_table(self.kernel_radii, self.kernel_values, self.kernel_variant)
        ctor = KernelSpec.mt if self.kernel_variant == "mt" else KernelSpec.bounded
        return ctor(self.kernel_profile or "constant", **self.kernel_params)

    def replace(self, **changes) -> Scenario:
        new = copy.deepcopy(self)
        for k, v in changes.items():
            if not hasattr(new, k):
                raise AttributeError(k)
            setattr(new, k, v)
        return new


# --- value parsing -----------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}


def eval_number(text: str) -> float:
    """Evaluate a numeric literal or an arithmetic expression in ``pi``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError(f"not a number: {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError):
        raise ValueError(f"not a number: {text!r}") from None


def _as_float(text):
    return float(eval_number(text))


def _as_int(text):
    val = eval_number(text)
    if isinstance(val, float):
        if not val.is_integer():
            raise ValueError(f"expected an integer, got {text!r}")
        val = int(val)
    return int(val)


def _as_list(text):
    return tuple(_as_float(p) for p in text.split(",") if p.strip())


def _as_window(text):
    vals = _as_list(text)
    if len(vals) != 2:
        raise ValueError(f"fit window needs two numbers, got {text!r}")
    return vals


def _as_formats(text):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _coerce_like(default, text):
    if isinstance(default, bool):
        return text.strip().lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return _as_int(text)
    if isinstance(default, float):
        return _as_float(text)
    return text.strip()


# --- parsing -----------------------------------------------------------------------

_INLINE_COMMENT = re.compile(r"\s+[#;].*$")


def _read_sections(text: str, errors: list):
    sections: dict[str, dict[str, tuple[int, str]]] = {}
    header_line: dict[str, int] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        # trailing comment: '#' or ';' preceded by whitespace
        line = _INLINE_COMMENT.sub("", line)
        if line.startswith("["):
            if not line.endswith("]"):
                errors.append((lineno, f"malformed section header {line!r}"))
                current = None
                continue
            name = line[1:-1].strip()
            if name not in SECTIONS:
                errors.append((lineno, f"unknown section [{name}]; expected one of {list(SECTIONS)}"))
                current = None
                continue
            if name in sections:
                errors.append((lineno, f"duplicate section [{name}]"))
            sections.setdefault(name, {})
            header_line[name] = lineno
            current = name
            continue
        if "=" not in line:
            errors.append((lineno, f"expected 'key = value', got {line!r}"))
            continue
        if current is None:
            errors.append((lineno, "entry outside of a known section"))
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key in sections[current]:
            errors.append((lineno, f"duplicate key {current}.{key}"))
        sections[current][key] = (lineno, value.strip())
    return sections, header_line


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario; raises :class:`ScenarioError` listing every problem."""
    errors: list[tuple[int | None, str]] = []
    sections, header_line = _read_sections(text, errors)
    linemap = {f"{sec}.{key}": ln for sec, entries in sections.items() for key, (ln, _) in entries.items()}
    values: dict = {}

    def take(section, key, conv, dest=None, required=False):
        entry = sections.get(section, {}).pop(key, None)
        if entry is None:
            if required:
                errors.append((header_line.get(section), f"missing required key {section}.{key}"))
            return
        lineno, raw = entry
        try:
            values[dest or key] = conv(raw)
        except ValueError as exc:
            errors.append((lineno, f"{section}.{key}: {exc}"))

    def line_of(section, key):
        return sections.get(section, {}).get(key, (header_line.get(section),))[0]

    for sec in ("grid", "kernel", "initial_data", "step_control"):
        if sec not in sections:
            errors.append((None, f"missing required section [{sec}]"))

    take("grid", "n", _as_int, required="grid" in sections)
    take("grid", "L", _as_float)

    # kernel
    kern = sections.get("kernel", {})
    kline = {k: v[0] for k, v in kern.items()}
    take("kernel", "variant", str.strip, "kernel_variant", required="kernel" in sections)
    variant = values.get("kernel_variant")
    if variant is not None and variant not in VARIANTS:
        errors.append((kline.get("variant"), f"kernel.variant must be one of {list(VARIANTS)}, got {variant!r}"))
        variant = None
    if variant == "singular":
        take("kernel", "alpha", _as_float, required=True)
        take("kernel", "truncation", _as_int)
    elif variant in ("bounded", "mt"):
        take("kernel", "profile", str.strip, "kernel_profile")
        profile = values.setdefault("kernel_profile", "constant")
        if profile == "tabulated":
            take("kernel", "radii", _as_list, "kernel_radii", required=True)
            take("kernel", "values", _as_list, "kernel_values", required=True)
        elif profile in KERNEL_REGISTRY:
            defaults = KERNEL_REGISTRY[profile][1]
            params = {}
            for key in list(kern):
                if key in defaults:
                    lineno, raw = kern.pop(key)
                    try:
                        params[key] = _as_float(raw)
                    except ValueError as exc:
                        errors.append((lineno, f"kernel.{key}: {exc}"))
            values["kernel_params"] = params
        else:
            errors.append((kline.get("profile"), f"kernel.profile must be one of "
                                                 f"{sorted(KERNEL_REGISTRY) + ['tabulated']}, got {profile!r}"))
    # leftovers are unknown keys, unless the variant itself was unusable
    if variant is not None:
        for key, (lineno, _) in kern.items():
            errors.append((lineno, f"unknown key kernel.{key}"))
    kern.clear()

    # initial data
    init = sections.get("initial_data", {})
    take("initial_data", "name", str.strip, "initial_name", required="initial_data" in sections)
    name = values.get("initial_name")
    if name == "tabulated":
        take("initial_data", "path", str.strip, "initial_path", required=True)
        if "initial_path" in values:
            values["initial_params"] = {"path": values.pop("initial_path")}
    elif name is not None and name not in INITIAL_REGISTRY:
        errors.append((line_of("initial_data", "name"),
                       f"initial_data.name must be one of {sorted(INITIAL_REGISTRY) + ['tabulated']}, "
                       f"got {name!r}"))
        init.clear()
    elif name is not None:
        defaults = INITIAL_REGISTRY[name][1]
        params = {}
        for key in list(init):
            if key in defaults:
                lineno, raw = init.pop(key)
                try:
                    params[key] = _coerce_like(defaults[key], raw)
                except ValueError as exc:
                    errors.append((lineno, f"initial_data.{key}: {exc}"))
        values["initial_params"] = params
    for key, (lineno, _) in init.items():
        errors.append((lineno, f"unknown key initial_data.{key}"))
    init.clear()

    take("step_control", "t_end", _as_float, required="step_control" in sections)
    for key in STEP_DEFAULTS:
        take("step_control", key, _as_float)

    take("output", "cadence", _as_float)
    take("output", "directory", str.strip)
    take("output", "formats", _as_formats)
    take("output", "snapshot_every", _as_int)

    take("run", "mode", str.strip)
    take("run", "e_convention", str.strip)
    for key in ("eps_supp", "rho_floor", "blowup_factor", "fit_skip"):
        take("run", key, _as_float)
    take("run", "fit_window", _as_window)

    if "agents" in sections:
        agents = dict(AGENT_DEFAULTS)
        for key in list(sections["agents"]):
            if key in AGENT_DEFAULTS:
                lineno, raw = sections["agents"].pop(key)
                try:
                    agents[key] = _coerce_like(AGENT_DEFAULTS[key], raw)
                except ValueError as exc:
                    errors.append((lineno, f"agents.{key}: {exc}"))
        values["agents"] = agents

    for sec, entries in sections.items():
        for key, (lineno, _) in entries.items():
            errors.append((lineno, f"unknown key {sec}.{key}"))

    problems = []
    scenario = None
    try:
        scenario = Scenario(**values)
    except TypeError:
        pass  # a required key is missing; already reported
    if scenario is not None:
        try:
            problems = validate(scenario)
        except (TypeError, ValueError) as exc:
            problems = [str(exc)]
    for p in problems:
        m = re.match(r"(\w+\.\w+)", p)
        errors.append((linemap.get(m.group(1)) if m else None, p))
    if errors:
        unique = list(dict.fromkeys(errors))
        raise ScenarioError(sorted(unique, key=lambda e: (e[0] is None, e[0] or 0)))
    return scenario


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return parse_scenario(fh.read())


# --- validation --------------------------------------------------------------------

def validate(s: Scenario) -> list[str]:
    """Every range violation in ``s`` (empty when valid)."""
    errs = []

    def positive(name, val):
        if not (isinstance(val, (int, float)) and val > 0 and math.isfinite(val)):
            errs.append(f"{name} must be positive and finite, got {val!r}")

    if not isinstance(s.n, int) or s.n < 16 or s.n % 2:
        errs.append(f"grid.n must be an even integer >= 16, got {s.n!r}")
    positive("grid.L", s.L)
    if s.kernel_variant not in VARIANTS:
        errs.append(f"kernel.variant must be one of {list(VARIANTS)}, got {s.kernel_variant!r}")
    elif s.kernel_variant == "singular":
        if s.alpha is None or not (isinstance(s.alpha, float) and 0.0 < s.alpha < 2.0):
            errs.append(f"kernel.alpha must lie in (0, 2) for the singular kernel, got {s.alpha!r}")
        elif s.alpha < 1.0:
            warnings.warn(f"alpha = {s.alpha} < 1 is exploratory; decay results are not binding",
                          stacklevel=2)
        if not isinstance(s.truncation, int) or s.truncation < 1:
            errs.append(f"kernel.truncation must be a positive integer, got {s.truncation!r}")
    if s.kernel_variant in ("bounded", "mt"):
        try:
            kern = s.kernel()
            from .kernels import kernel_bounds
            lo, hi = kernel_bounds(kern, s.L)
            if not lo > 0:
                errs.append(f"kernel.profile must be strictly positive on the torus; its minimum is {lo:.6g}")
        except ValueError as exc:
            errs.append(f"kernel.profile: {exc}")
    if s.initial_name != "tabulated":
        if s.initial_name not in INITIAL_REGISTRY:
            errs.append(f"initial_data.name must be one of {sorted(INITIAL_REGISTRY)}, got {s.initial_name!r}")
        else:
            defaults = INITIAL_REGISTRY[s.initial_name][1]
            unknown = set(s.initial_params) - set(defaults)
            if unknown:
                errs.append(f"unknown initial_data parameters {sorted(unknown)}")
            p = {**defaults, **s.initial_params}
            if "rho_amp" in p and not abs(p["rho_amp"]) < 1:
                errs.append(f"initial_data.rho_amp must satisfy |rho_amp| < 1, got {p['rho_amp']!r}")
            for key in ("mass", "halfwidth", "height"):
                if key in p:
                    positive(f"initial_data.{key}", p[key])
            if "shape" in p and p["shape"] not in ("compact", "gaussian"):
                errs.append(f"initial_data.shape must be 'compact' or 'gaussian', got {p['shape']!r}")
    elif "path" not in s.initial_params:
        errs.append("tabulated initial data needs initial_data.path")
    if not (isinstance(s.t_end, (int, float)) and s.t_end >= 0 and math.isfinite(s.t_end)):
        errs.append(f"step_control.t_end must be non-negative and finite, got {s.t_end!r}")
    for key in STEP_DEFAULTS:
        positive(f"step_control.{key}", getattr(s, key))
    positive("output.cadence", s.cadence)
    bad = set(s.formats) - set(FORMATS)
    if bad or not s.formats:
        errs.append(f"output.formats must be a non-empty subset of {list(FORMATS)}, got {list(s.formats)}")
    if not isinstance(s.snapshot_every, int) or s.snapshot_every < 1:
        errs.append(f"output.snapshot_every must be a positive integer, got {s.snapshot_every!r}")
    if s.mode not in MODES:
        errs.append(f"run.mode must be one of {list(MODES)}, got {s.mode!r}")
    if s.e_convention not in ("auto", "convolution", "operator"):
        errs.append(f"run.e_convention must be auto, convolution or operator, got {s.e_convention!r}")
    elif s.e_convention == "convolution" and s.kernel_variant == "singular":
        errs.append("run.e_convention = convolution needs a bounded kernel")
    if not (0.0 < s.eps_supp < 1.0):
        errs.append(f"run.eps_supp must lie in (0, 1), got {s.eps_supp!r}")
    if not (s.rho_floor >= 0.0 and math.isfinite(s.rho_floor)):
        errs.append(f"run.rho_floor must be non-negative, got {s.rho_floor!r}")
    if not (s.blowup_factor > 1.0):
        errs.append(f"run.blowup_factor must exceed 1, got {s.blowup_factor!r}")
    if not (0.0 <= s.fit_skip < 1.0):
        errs.append(f"run.fit_skip must lie in [0, 1), got {s.fit_skip!r}")
    if s.fit_window is not None and not (len(s.fit_window) == 2 and s.fit_window[0] < s.fit_window[1]):
        errs.append(f"run.fit_window must be an increasing pair, got {s.fit_window!r}")
    if s.agents is not None:
        a = s.agents
        if s.kernel_variant == "singular":
            errs.append("the agent model needs a bounded kernel")
        if not isinstance(a.get("N"), int) or not 1 <= a["N"] <= 5000:
            errs.append(f"agents.N must be an integer in [1, 5000], got {a.get('N')!r}")
        if not isinstance(a.get("seed"), int) or a["seed"] < 0:
            errs.append(f"agents.seed must be a non-negative integer, got {a.get('seed')!r}")
        positive("agents.dt", a.get("dt"))
        positive("agents.mollifier_width", a.get("mollifier_width"))
        if isinstance(a.get("mollifier_width"), float) and isinstance(s.L, float) and isinstance(s.n, int) \
                and s.n > 0 and a["mollifier_width"] < 2.0 * s.L / s.n:
            errs.append(f"agents.mollifier_width must be at least 2 dx = {2 * s.L / s.n:.6g}")
        if a.get("normalization") not in ("mean", "adaptive"):
            errs.append(f"agents.normalization must be mean or adaptive, got {a.get('normalization')!r}")
        unknown = set(a) - set(AGENT_DEFAULTS)
        if unknown:
            errs.append(f"unknown agents keys {sorted(unknown)}")
    return errs


# --- serialization -----------------------------------------------------------------

def _fmt(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, int):
        return str(val)
    if isinstance(val, float):
        return repr(val)
    if isinstance(val, (tuple, list)):
        return ", ".join(_fmt(v) for v in val)
    return str(val)


def serialize_scenario(s: Scenario) -> str:
    """Canonical text form; ``parse_scenario(serialize_scenario(s)) == s``."""
    out = ["[grid]", f"n = {s.n}", f"L = {_fmt(float(s.L))}", "", "[kernel]",
           f"variant = {s.kernel_variant}"]
    if s.kernel_variant == "singular":
        out += [f"alpha = {_fmt(float(s.alpha))}", f"truncation = {s.truncation}"]
    else:
        out.append(f"profile = {s.kernel_profile or 'constant'}")
        if s.kernel_profile == "tabulated":
            out += [f"radii = {_fmt(s.kernel_radii)}", f"values = {_fmt(s.kernel_values)}"]
        for key in sorted(s.kernel_params):
            out.append(f"{key} = {_fmt(float(s.kernel_params[key]))}")
    out += ["", "[initial_data]", f"name = {s.initial_name}"]
    for key in sorted(s.initial_params):
        out.append(f"{key} = {_fmt(s.initial_params[key])}")
    out += ["", "[step_control]", f"t_end = {_fmt(float(s.t_end))}"]
    out += [f"{k} = {_fmt(float(getattr(s, k)))}" for k in STEP_DEFAULTS]
    out += ["", "[output]", f"cadence = {_fmt(float(s.cadence))}", f"directory = {s.directory}",
            f"formats = {_fmt(tuple(s.formats))}", f"snapshot_every = {s.snapshot_every}"]
    out += ["", "[run]", f"mode = {s.mode}", f"e_convention = {s.e_convention}"]
    out += [f"{k} = {_fmt(float(getattr(s, k)))}" for k in ("eps_supp", "rho_floor", "blowup_factor", "fit_skip")]
    if s.fit_window is not None:
        out.append(f"fit_window = {_fmt(tuple(float(v) for v in s.fit_window))}")
    if s.agents is not None:
        out += ["", "[agents]"]
        out += [f"{k} = {_fmt(s.agents[k])}" for k in AGENT_DEFAULTS]
    return "\n".join(out) + "\n"


# --- sweeps ------------------------------------------------------------------------

def sweepable_axes(s: Scenario) -> list[str]:
    axes = ["grid.n", "grid.L"]
    if s.kernel_variant == "singular":
        axes.append("kernel.alpha")
    elif s.kernel_profile in KERNEL_REGISTRY:
        axes += [f"kernel.{k}" for k in KERNEL_REGISTRY[s.kernel_profile][1]]
    if s.initial_name in INITIAL_REGISTRY:
        axes += [f"initial_data.{k}" for k, v in INITIAL_REGISTRY[s.initial_name][1].items()
                 if isinstance(v, (int, float))]
    axes += ["step_control." + k for k in ("t_end", *STEP_DEFAULTS)]
    axes += ["run.eps_supp", "run.rho_floor", "run.blowup_factor", "run.fit_skip"]
    if s.agents is not None:
        axes += ["agents.N", "agents.seed", "agents.mollifier_width", "agents.dt"]
    return axes


def with_axis(s: Scenario, axis: str, value) -> Scenario:
    """Copy of ``s`` with the sweep axis ``section.key`` set to ``value``."""
    if axis not in sweepable_axes(s):
        raise ValueError(f"{axis!r} is not a sweepable axis; choose from {sweepable_axes(s)}")
    section, key = axis.split(".", 1)
    new = s.replace()
    if section == "grid":
        setattr(new, key, int(value) if key == "n" else float(value))
    elif section == "kernel":
        if key == "alpha":
            new.alpha = float(value)
        else:
            new.kernel_params = {**new.kernel_params, key: float(value)}
    elif section == "initial_data":
        default = INITIAL_REGISTRY[s.initial_name][1][key]
        new.initial_params = {**new.initial_params, key: type(default)(value)}
    elif section == "agents":
        new.agents = {**new.agents, key: type(AGENT_DEFAULTS[key])(value)}
    else:
        setattr(new, key, float(value))
    problems = validate(new)
    if problems:
        raise ScenarioError([(None, p) for p in problems])
    return new


def load_tabulated_initial(path, n: int):
    """``(rho, u)`` columns from a CSV file with a ``rho,u`` header."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None or not {"rho", "u"} <= set(data.dtype.names):
        raise ValueError(f"{path}: expected a header with 'rho' and 'u' columns")
    rho, u = np.atleast_1d(data["rho"]), np.atleast_1d(data["u"])
    if rho.size != n:
        raise ValueError(f"{path}: {rho.size} rows but the grid has n = {n}")
    return rho.astype(float), u.astype(float)
