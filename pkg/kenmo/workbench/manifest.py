"""Manifest files: INI-style sections with ``key = expression`` lines.

Example::

    [manifold]
    coordinates = x, y, z, u, v

    [metric]
    g_x_x = 1/v^2
    g_x_y = 0
    ...

    [structure]
    phi_y_x = 1
    xi_v = -v

    [soliton]
    V_x = 2*x
    lambda = 3
    mu = 1

See ``docs/manifest.md`` for the complete grammar.
"""

from __future__ import annotations

import configparser
import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Union

from kenmo.base import (
    ExpressionError,
    ManifestError,
    SolitonSpecError,
    StructureError,
)
from kenmo.contact import AlmostContactStructure
from kenmo.registry import REFERENCE_TABLES, ManifoldCase
from kenmo.solitons import MODES, SolitonSpec
from kenmo.symbolic import (
    ExprContext,
    ScalarExpr,
    context_for,
    format_expr,
    format_linear_form,
    parse_expr,
    parse_linear_form,
    parse_tree,
)
from kenmo.tensors import Chart, MetricField, TensorField

SECTIONS = ("manifold", "metric", "structure", "frame", "soliton", "checks", "sample_points")

KNOWN_CHECKS = (
    "positive_definite",
    "almost_contact",
    "normal",
    "almost_kenmotsu",
    "kenmotsu",
    "connection",
    "curvature_properties",
    "eta_einstein",
    "phi_holomorphic",
    "curvature_table",
)
"""Names accepted by ``[checks] select``"""

_SECTION = re.compile(r"\s*\[([^\]]+)\]")
_OPTION = re.compile(r"([^=\s][^=]*?)\s*=\s*")


def _locate(text: str) -> dict[tuple[str, Optional[str]], tuple[int, int]]:
    """(line, column of the value) for every section header and option"""
    out = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#;":
            continue
        header = _SECTION.match(line)
        if header:
            section = header.group(1).strip()
            out[(section, None)] = (lineno, header.start(1) + 1)
            continue
        if line[0].isspace() or section is None:
            continue
        option = _OPTION.match(line)
        if option:
            out[(section, option.group(1))] = (lineno, option.end() + 1)
    return out


def _config_parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None,
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        default_section="__defaults__",
    )
    parser.optionxform = str
    return parser


def _split(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


class _Reader:
    """Configparser contents with positions for error messages"""

    def __init__(self, text: str):
        self.locations = _locate(text)
        self.parser = _config_parser()
        try:
            self.parser.read_string(text)
        except configparser.MissingSectionHeaderError as err:
            raise ManifestError("expected a [section] header", err.lineno, 1) from None
        except configparser.ParsingError as err:
            lineno, line = err.errors[0]
            raise ManifestError(f"cannot parse line {line}", lineno, 1) from None
        except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as err:
            raise ManifestError(err.message.split(": ", 1)[-1], err.lineno) from None
        except configparser.Error as err:
            raise ManifestError(str(err)) from None
        for section in self.parser.sections():
            if section not in SECTIONS:
                raise self.error(section, None, f"unknown section [{section}]")

    def has(self, section: str) -> bool:
        return self.parser.has_section(section)

    def keys(self, section: str) -> list[str]:
        return list(self.parser[section]) if self.has(section) else []

    def get(self, section: str, key: str) -> Optional[str]:
        if not self.has(section):
            return None
        return self.parser[section].get(key)

    def error(
        self, section: str, key: Optional[str], message: str, offset: Optional[int] = None
    ) -> ManifestError:
        line, column = self.locations.get((section, key), (None, None))
        if key is None or column is None:
            column = None
        elif offset is not None:
            column += offset
        return ManifestError(message, line, column)

    def expr(self, section: str, key: str, ctx: ExprContext) -> ScalarExpr:
        try:
            return parse_expr(self.get(section, key), ctx)
        except ExpressionError as err:
            raise self.error(section, key, f"{key}: {err.message}", err.position) from None


def _coordinate_keys(
    reader: _Reader, section: str, key: str, prefix: str, coordinates: tuple[str, ...], n_names: int
) -> tuple[int, ...]:
    parts = key.split("_")
    if parts[0] != prefix or len(parts) != n_names + 1:
        raise reader.error(section, key, f"unknown key {key!r} in [{section}]")
    try:
        return tuple(coordinates.index(name) for name in parts[1:])
    except ValueError:
        raise reader.error(
            section, key, f"{key!r} names a coordinate not in {', '.join(coordinates)}"
        ) from None


def _expression_texts(reader: _Reader) -> list[str]:
    texts = []
    for section in ("metric", "structure", "frame", "soliton"):
        for key in reader.keys(section):
            if key in ("mode", "reference_table"):
                continue
            text = reader.get(section, key)
            try:
                parse_tree(text)
            except ExpressionError as err:
                raise reader.error(section, key, f"{key}: {err.message}", err.position) from None
            texts.append(text)
    return texts


def _context(reader: _Reader) -> ExprContext:
    if not reader.has("manifold"):
        raise ManifestError("missing [manifold] section")
    text = reader.get("manifold", "coordinates")
    if text is None:
        raise reader.error("manifold", None, "[manifold] needs a coordinates list")
    for key in reader.keys("manifold"):
        if key not in ("coordinates", "exp_generators"):
            raise reader.error("manifold", key, f"unknown key {key!r} in [manifold]")
    coordinates = _split(text)
    generators = None
    if reader.get("manifold", "exp_generators") is not None:
        generators = []
        for form in _split(reader.get("manifold", "exp_generators")):
            try:
                generators.append(parse_linear_form(form, coordinates))
            except ExpressionError as err:
                raise reader.error("manifold", "exp_generators", err.message) from None
    texts = _expression_texts(reader)
    try:
        return context_for(coordinates, texts, generators)
    except ExpressionError as err:
        raise reader.error("manifold", None, err.message) from None
    except ValueError as err:
        raise reader.error("manifold", "coordinates", str(err)) from None


def _metric(reader: _Reader, chart: Chart) -> MetricField:
    if not reader.has("metric"):
        raise ManifestError("missing [metric] section")
    n = chart.dimension
    coords = chart.coordinates
    entries = {}
    for key in reader.keys("metric"):
        i, j = sorted(_coordinate_keys(reader, "metric", key, "g", coords, 2))
        if (i, j) in entries:
            raise reader.error("metric", key, f"g_{coords[i]}_{coords[j]} given twice")
        entries[(i, j)] = reader.expr("metric", key, chart.context)
    for i in range(n):
        for j in range(i, n):
            if (i, j) not in entries:
                raise reader.error(
                    "metric", None, f"metric component g_{coords[i]}_{coords[j]} is missing"
                )
    g = TensorField.from_function(
        chart, 0, 2, lambda i, j: entries[(min(i, j), max(i, j))]
    )
    return MetricField.from_tensor(g)


def _structure(reader: _Reader, chart: Chart, metric: MetricField) -> Optional[AlmostContactStructure]:
    if not reader.has("structure"):
        return None
    coords = chart.coordinates
    phi, xi, eta = {}, {}, {}
    for key in reader.keys("structure"):
        prefix = key.split("_")[0]
        target, n_names = {"phi": (phi, 2), "xi": (xi, 1), "eta": (eta, 1)}.get(prefix, (None, 0))
        if target is None:
            raise reader.error("structure", key, f"unknown key {key!r} in [structure]")
        index = _coordinate_keys(reader, "structure", key, prefix, coords, n_names)
        target[index] = reader.expr("structure", key, chart.context)
    if not xi:
        raise reader.error("structure", None, "[structure] needs the components xi_<coordinate>")
    try:
        return AlmostContactStructure.from_reeb(
            TensorField.from_entries(chart, 1, 1, phi),
            TensorField.from_entries(chart, 1, 0, xi),
            metric,
            TensorField.from_entries(chart, 0, 1, eta) if eta else None,
        )
    except StructureError as err:
        raise reader.error("structure", None, str(err)) from None


def _frame(reader: _Reader, chart: Chart) -> tuple[Optional[list[TensorField]], Optional[str]]:
    if not reader.has("frame"):
        return None, None
    coords = chart.coordinates
    n = chart.dimension
    components: dict[int, dict[tuple[int], ScalarExpr]] = {a: {} for a in range(n)}
    table = reader.get("frame", "reference_table")
    if table is not None and table not in REFERENCE_TABLES:
        raise reader.error(
            "frame", "reference_table", f"unknown reference table {table!r}"
        )
    for key in reader.keys("frame"):
        if key == "reference_table":
            continue
        label, _, coord = key.partition("_")
        match = re.fullmatch(r"e(\d+)", label)
        if not match or not 1 <= int(match.group(1)) <= n or coord not in coords:
            raise reader.error("frame", key, f"frame keys are e<1..{n}>_<coordinate>, got {key!r}")
        components[int(match.group(1)) - 1][(coords.index(coord),)] = reader.expr(
            "frame", key, chart.context
        )
    frame = [TensorField.from_entries(chart, 1, 0, components[a]) for a in range(n)]
    return frame, table


def _soliton(reader: _Reader, chart: Chart) -> Optional[SolitonSpec]:
    if not reader.has("soliton"):
        return None
    coords = chart.coordinates
    V = {}
    f = lam = mu = None
    mode = reader.get("soliton", "mode")
    for key in reader.keys("soliton"):
        if key == "mode":
            continue
        if key == "f":
            f = reader.expr("soliton", key, chart.context)
        elif key == "lambda":
            lam = reader.expr("soliton", key, chart.context)
        elif key == "mu":
            mu = reader.expr("soliton", key, chart.context)
        elif key.startswith("V_"):
            V[_coordinate_keys(reader, "soliton", key, "V", coords, 1)] = reader.expr(
                "soliton", key, chart.context
            )
        else:
            raise reader.error("soliton", key, f"unknown key {key!r} in [soliton]")
    if V and f is not None:
        raise reader.error("soliton", "f", "give either V_<coordinate> components or f, not both")
    if not V and f is None:
        raise reader.error("soliton", None, "[soliton] needs V_<coordinate> components or f")
    if mode is None:
        mode = "gradient" if f is not None else "eta_soliton"
    if mode not in MODES:
        raise reader.error("soliton", "mode", f"mode must be one of {', '.join(MODES)}")
    try:
        return SolitonSpec(
            V=TensorField.from_entries(chart, 1, 0, V) if V else None,
            f=f,
            lam=lam,
            mu=mu,
            mode=mode,
        )
    except SolitonSpecError as err:
        raise reader.error("soliton", None, str(err)) from None


def _checks(reader: _Reader) -> Optional[list[str]]:
    if not reader.has("checks"):
        return None
    for key in reader.keys("checks"):
        if key != "select":
            raise reader.error("checks", key, f"unknown key {key!r} in [checks]")
    names = _split(reader.get("checks", "select") or "")
    for name in names:
        if name not in KNOWN_CHECKS:
            raise reader.error(
                "checks", "select", f"unknown check {name!r}; known: {', '.join(KNOWN_CHECKS)}"
            )
    return names


def _sample_points(reader: _Reader, chart: Chart) -> list[dict[str, Fraction]]:
    points = []
    for key in reader.keys("sample_points"):
        point = {}
        for item in _split(reader.get("sample_points", key)):
            name, _, value = item.partition("=")
            name = name.strip()
            if name not in chart.coordinates:
                raise reader.error("sample_points", key, f"unknown coordinate {name!r}")
            try:
                point[name] = Fraction(value.strip())
            except ValueError:
                raise reader.error(
                    "sample_points", key, f"{value.strip()!r} is not a rational number"
                ) from None
        missing = [c for c in chart.coordinates if c not in point]
        if missing:
            raise reader.error("sample_points", key, f"point {key} lacks {', '.join(missing)}")
        points.append(point)
    return points


def parse_manifest(text: str, name: str = "manifest") -> ManifoldCase:
    """Build a :class:`~kenmo.registry.ManifoldCase` from manifest text

    Raises
    ------
    ManifestError
        With the line (and column, for expression errors) of the problem
    SingularMetricError
        If the metric determinant is identically zero
    """
    reader = _Reader(text)
    chart = Chart(_context(reader))
    metric = _metric(reader, chart)
    frame, table = _frame(reader, chart)
    try:
        return ManifoldCase(
            metric,
            _structure(reader, chart, metric),
            frame=frame,
            reference_table=table,
            soliton=_soliton(reader, chart),
            checks=_checks(reader),
            sample_points=_sample_points(reader, chart),
            name=name,
        )
    except ValueError as err:
        if isinstance(err, ManifestError):
            raise
        raise ManifestError(str(err)) from None


def load_manifest(path: Union[str, Path]) -> ManifoldCase:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ManifestError(f"cannot read {path}: {err.strerror}") from None
    return parse_manifest(text, name=path.stem)


def _lines(entries: Iterable[tuple[str, ScalarExpr]]) -> list[str]:
    return [f"{key} = {format_expr(value)}" for key, value in entries]


def dump_manifest(case: ManifoldCase) -> str:
    """Manifest text that :func:`parse_manifest` turns back into `case`"""
    chart = case.chart
    ctx = chart.context
    coords = chart.coordinates
    n = chart.dimension
    out = [f"# {case.name}", "[manifold]", f"coordinates = {', '.join(coords)}"]
    if ctx.exp_generators:
        forms = ", ".join(format_linear_form(form, coords) for form in ctx.exp_generators)
        out.append(f"exp_generators = {forms}")

    out += ["", "[metric]"]
    out += _lines(
        (f"g_{coords[i]}_{coords[j]}", case.metric.g[i, j])
        for i in range(n)
        for j in range(i, n)
    )

    s = case.structure
    if s is not None:
        out += ["", "[structure]"]
        out += _lines((f"phi_{coords[a]}_{coords[b]}", v) for (a, b), v in s.phi.nonzero_items())
        out += _lines((f"xi_{coords[a]}", v) for (a,), v in s.xi.nonzero_items())
        out += _lines((f"eta_{coords[a]}", v) for (a,), v in s.eta.nonzero_items())

    if case.frame is not None:
        out += ["", "[frame]"]
        if case.reference_table is not None:
            out.append(f"reference_table = {case.reference_table}")
        for k, e in enumerate(case.frame, start=1):
            out += _lines((f"e{k}_{coords[a]}", v) for (a,), v in e.nonzero_items())

    spec = case.soliton
    if spec is not None:
        out += ["", "[soliton]", f"mode = {spec.mode}"]
        if spec.f is not None:
            out += _lines([("f", chart.scalar(spec.f))])
        else:
            items = list(spec.V.nonzero_items()) or [((0,), ctx.zero)]
            out += _lines((f"V_{coords[a]}", v) for (a,), v in items)
        if spec.lam is not None:
            out += _lines([("lambda", chart.scalar(spec.lam))])
        if spec.mu is not None:
            out += _lines([("mu", chart.scalar(spec.mu))])

    if case.checks is not None:
        out += ["", "[checks]", f"select = {', '.join(case.checks)}"]

    if case.sample_points:
        out += ["", "[sample_points]"]
        for k, point in enumerate(case.sample_points, start=1):
            out.append(f"p{k} = " + ", ".join(f"{c}={point[c]}" for c in coords))
    return "\n".join(out) + "\n"
