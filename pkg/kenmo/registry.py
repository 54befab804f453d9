"""Built-in manifolds and the case type shared with manifests.

A :class:`ManifoldCase` is everything a workbench command needs: the metric,
an optional almost contact structure, frame and soliton candidate, the
checks to run and sample points for numeric checks. Fixtures build cases
directly; :mod:`kenmo.workbench.manifest` parses and dumps them as text."""

from __future__ import annotations

from typing import Any, Callable, Mapping, Optional, Sequence

from attrs import define, field

from kenmo.base import KenmoError
from kenmo.contact import (
    M5_CURVATURE_TABLE,
    AlmostContactStructure,
    build_warped_kenmotsu,
    builtin_example_m5,
    flat_factor,
    m5_frame,
    product_kahler_factor,
    rotation_complex_structure,
)
from kenmo.curvature import Connection, CurvatureBundle, CurvatureTable, christoffel, riemann
from kenmo.solitons import SolitonSpec
from kenmo.tensors import Chart, MetricField, TensorField

REFERENCE_TABLES: dict[str, CurvatureTable] = {"m5_example": M5_CURVATURE_TABLE}
"""Printed frame curvature tables a manifest may ask to compare against"""


@define(eq=False)
class ManifoldCase:
    """Inputs of one workbench run"""

    metric: MetricField
    structure: Optional[AlmostContactStructure] = field(default=None)
    frame: Optional[list[TensorField]] = field(default=None, repr=False)
    """Vector fields ``e_1, ..., e_dim`` for frame-basis output"""
    reference_table: Optional[str] = field(default=None)
    """Key into :data:`REFERENCE_TABLES`"""
    soliton: Optional[SolitonSpec] = field(default=None, repr=False)
    checks: Optional[list[str]] = None
    """Selected check names; None selects all"""
    sample_points: list[dict[str, Any]] = field(factory=list)
    name: str = "manifest"
    _analysis: Optional[tuple[Connection, CurvatureBundle]] = field(
        default=None, init=False, repr=False
    )

    @structure.validator
    def _check_structure(self, attribute, value):
        if value is not None and value.chart != self.metric.chart:
            raise ValueError("structure and metric live on different charts")

    @frame.validator
    def _check_frame(self, attribute, value):
        if value is not None and len(value) != self.metric.dimension:
            raise ValueError(
                f"a frame needs {self.metric.dimension} vector fields, got {len(value)}"
            )

    @reference_table.validator
    def _check_table(self, attribute, value):
        if value is not None and value not in REFERENCE_TABLES:
            raise ValueError(f"unknown reference table {value!r}")

    @property
    def chart(self) -> Chart:
        return self.metric.chart

    @property
    def table(self) -> Optional[CurvatureTable]:
        return None if self.reference_table is None else REFERENCE_TABLES[self.reference_table]

    def selected(self, check: str) -> bool:
        return self.checks is None or check in self.checks

    def analysis(self) -> tuple[Connection, CurvatureBundle]:
        """Levi-Civita connection and curvature, computed once"""
        if self._analysis is None:
            conn = christoffel(self.metric)
            self._analysis = (conn, riemann(conn))
        return self._analysis


@define(frozen=True)
class Fixture:
    name: str
    description: str
    build: Callable[[], ManifoldCase] = field(repr=False)


def _m5_example() -> ManifoldCase:
    chart, s = builtin_example_m5()
    V = chart.vector(["2*x", "2*y", "2*z", "2*u", "v"])
    return ManifoldCase(
        s.metric,
        s,
        frame=m5_frame(chart),
        reference_table="m5_example",
        soliton=SolitonSpec(V=V),
        name="m5_example",
    )


def _warped_flat(n: int) -> ManifoldCase:
    if n == 1:
        coordinates = ["x", "y"]
    else:
        coordinates = [f"{axis}{k}" for k in range(1, n + 1) for axis in ("x", "y")]
    chart, s = build_warped_kenmotsu(*flat_factor(coordinates))
    if n == 1:
        soliton = SolitonSpec(V=s.xi)
    else:
        soliton = SolitonSpec.gradient_of(chart.scalar("t"))
    return ManifoldCase(s.metric, s, soliton=soliton, name=f"warped_flat_n{n}")


def _warped_hyperbolic_plane() -> ManifoldCase:
    chart, s = build_warped_kenmotsu(
        *product_kahler_factor(["1/y1^2", "1"], ["x1", "y1", "x2", "y2"])
    )
    return ManifoldCase(
        s.metric, s, soliton=SolitonSpec(V=s.xi), name="warped_hyperbolic_plane_n2"
    )


def _flat_rotation() -> ManifoldCase:
    chart = Chart.from_coordinates(["x", "y", "z"])
    g = MetricField.from_tensor(
        TensorField.from_entries(chart, 0, 2, {(i, i): 1 for i in range(3)})
    )
    s = AlmostContactStructure(
        rotation_complex_structure(chart, [(0, 1)]),
        chart.coordinate_vector("z"),
        chart.coordinate_form("z"),
        g,
    )
    return ManifoldCase(g, s, name="flat_rotation_r3")


FIXTURES: dict[str, Fixture] = {
    f.name: f
    for f in [
        Fixture(
            "m5_example",
            "g = v^-2 (dx^2 + dy^2 + dz^2 + du^2 + dv^2) on v > 0, xi = -v d/dv; "
            "Kenmotsu, Ric = -4g, eta-Ricci soliton for V = 2x,2y,2z,2u,v",
            _m5_example,
        ),
        Fixture(
            "warped_flat_n1",
            "R x_(e^t) C^1, dimension 3; constant curvature -1, soliton V = xi",
            lambda: _warped_flat(1),
        ),
        Fixture(
            "warped_flat_n2",
            "R x_(e^t) C^2, dimension 5; Ric = -4g, gradient soliton f = t",
            lambda: _warped_flat(2),
        ),
        Fixture(
            "warped_hyperbolic_plane_n2",
            "R x_(e^t) (H^2 x R^2); Kenmotsu but not Einstein, phi-holomorphic "
            "curvature not constant",
            _warped_hyperbolic_plane,
        ),
        Fixture(
            "flat_rotation_r3",
            "flat R^3 with phi rotating the (x, y) plane and xi = d/dz; almost "
            "contact but not Kenmotsu",
            _flat_rotation,
        ),
    ]
}


def fixture_names() -> list[str]:
    return list(FIXTURES)


def load_fixture(name: str, sample_points: Sequence[Mapping[str, Any]] = ()) -> ManifoldCase:
    """Build the named fixture

    Raises
    ------
    KenmoError
        If there is no fixture called `name`
    """
    try:
        fixture = FIXTURES[name]
    except KeyError:
        raise KenmoError(
            f"no fixture named {name!r}; choose from {', '.join(FIXTURES)}"
        ) from None
    case = fixture.build()
    case.sample_points = [dict(p) for p in sample_points]
    return case
