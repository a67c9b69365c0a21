"""Serialization of analysis results for the command line.

Every result record converts to plain JSON-compatible data with fixed keys:
polynomials in printer syntax, rationals as "p/q" strings and Gaussian
rationals in printer syntax. ``dumps_report`` is deterministic, so identical
input produces byte-identical machine-readable output.
"""

import json
import logging
from functools import singledispatch
from pathlib import Path
from typing import Any

from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ
from sympy.polys.domains.gaussiandomains import GaussianRational

from src.config import REPORT_FIELD_NAMES
from src.decomposition import HoloDecomposition, ImExpansion
from src.finite_type import FiniteTypeVerdict
from src.flows import FlowAdmissibility, FlowSpec, InvarianceVerdict, PairVerdict, ShearNormalization, TranslationVerdict, VField
from src.grading import BalanceClass, Grade, HolomorphicQuotient, Weight
from src.polynomial import ModelMap, PolyMap, RPoly, SplitParts, format_coefficient, format_rational
from src.symmetry import ClassificationReport, EquivalenceVerdict, MapVerdict, UnitaryVerdict, WeightKernel

logger = logging.getLogger(__name__)

Report = dict[str, Any]


@singledispatch
def to_data(value: object) -> Any:
    """Convert a result value to JSON-compatible data.

    Result types register their own converters on this function; exact
    scalars and polynomials become strings in the polynomial grammar.

    Args:
        value: A result value, container of result values, or plain JSON value.

    Returns:
        Nested dicts, lists, strings, integers, booleans and None.

    Raises:
        TypeError: If no converter handles the type of ``value``.
    """
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if QQ.of_type(value):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return [to_data(item) for item in value]
    if isinstance(value, dict):
        return {str(key): to_data(item) for key, item in value.items()}
    msg = f"no serializer for {type(value).__name__}"
    raise TypeError(msg)


@to_data.register
def _gaussian_rational_data(value: GaussianRational) -> str:
    return format_coefficient(value)


@to_data.register
def _rpoly_data(value: RPoly) -> str:
    return str(value)


@to_data.register
def _poly_map_data(value: PolyMap) -> dict[str, str]:
    return {"f1": str(value.f1), "f2": str(value.f2)}


@to_data.register
def _model_map_data(value: ModelMap) -> dict[str, Any]:
    return {"plane": to_data(value.plane), "mu": format_rational(value.mu), "phi": str(value.phi)}


@to_data.register
def _split_parts_data(value: SplitParts) -> dict[str, str]:
    return {"p1": str(value.p1), "mixed": str(value.mixed), "p2": str(value.p2), "constant": str(value.constant)}


@to_data.register
def _weight_data(value: Weight) -> dict[str, Any]:
    return {
        "theta": [format_rational(value.theta1), format_rational(value.theta2)],
        "group": value.group.value,
        "cyclic": list(value.cyclic) if value.cyclic else None,
    }


@to_data.register
def _holomorphic_quotient_data(value: HolomorphicQuotient) -> str:
    return str(value)


@to_data.register
def _grade_data(value: Grade) -> dict[str, Any]:
    return {"wt": to_data(value.wt), "sgn": to_data(value.sgn), "hq": to_data(value.hq)}


@to_data.register
def _balance_class_data(value: BalanceClass) -> dict[str, bool]:
    return {
        "strictly_balanced": value.strictly_balanced,
        "extremely_balanced": value.extremely_balanced,
        "extremely_imbalanced": value.extremely_imbalanced,
        "diversely_balanced": value.diversely_balanced,
    }


def _weighted_terms(terms: list[tuple[MPQ, RPoly]]) -> list[dict[str, str]]:
    return [{"weight": format_rational(weight), "f": str(f)} for weight, f in terms]


@to_data.register
def _holo_decomposition_data(value: HoloDecomposition) -> dict[str, Any]:
    return {
        "q": str(value.q),
        "plus": _weighted_terms(value.plus),
        "minus": _weighted_terms(value.minus),
        "inertia": list(value.inertia),
        "rank_certificate": list(value.rank_certificate),
    }


@to_data.register
def _im_expansion_data(value: ImExpansion) -> dict[str, Any]:
    return {"success": value.success, "coefficients": [str(c) for c in value.coefficients], "reason": value.reason}


@to_data.register
def _finite_type_verdict_data(value: FiniteTypeVerdict) -> dict[str, Any]:
    return {"passed": value.passed, "reasons": list(value.reasons), "lines_checked": value.lines_checked}


@to_data.register
def _weight_kernel_data(value: WeightKernel) -> dict[str, Any]:
    return {"rank": value.rank, "kernel_basis": [list(v) for v in value.basis], "rows": [list(r) for r in value.rows]}


@to_data.register
def _translation_verdict_data(value: TranslationVerdict) -> dict[str, Any]:
    return {
        "direction": f"Re z{value.direction}",
        "status": value.status.value,
        "psi": to_data(value.psi),
        "shear": to_data(value.shear),
        "normalized": to_data(value.normalized),
    }


@to_data.register
def _flow_spec_data(value: FlowSpec) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for name in ("a", "b", "p", "d"):
        if getattr(value, name) is not None:
            params[name] = to_data(getattr(value, name))
    return {"kind": value.kind.value, "params": params, "beta3": format_rational(value.beta3), "swapped": value.swapped}


@to_data.register
def _vfield_data(value: VField) -> dict[str, str]:
    return {"x1": str(value.x1), "x2": str(value.x2), "drift": format_coefficient(value.drift)}


@to_data.register
def _invariance_verdict_data(value: InvarianceVerdict) -> dict[str, Any]:
    return {"status": value.status.value, "psi": to_data(value.psi), "residual": to_data(value.residual)}


@to_data.register
def _flow_admissibility_data(value: FlowAdmissibility) -> dict[str, Any]:
    return {
        "kind": value.kind.value,
        "swapped": value.swapped,
        "admissible": value.admissible,
        "reason": value.reason,
        "witness": to_data(value.witness),
        "certificate": value.certificate,
    }


@to_data.register
def _pair_verdict_data(value: PairVerdict) -> dict[str, Any]:
    return {
        "commute": value.commute,
        "bracket": to_data(value.bracket),
        "ga2_admissible": value.ga2_admissible,
        "model_admissible": value.model_admissible,
        "entry": list(value.entry) if value.entry else None,
        "degree_condition": value.degree_condition,
        "reasons": list(value.reasons),
    }


@to_data.register
def _shear_normalization_data(value: ShearNormalization) -> dict[str, Any]:
    return {
        "conjugator": to_data(value.conjugator),
        "flow": to_data(value.flow),
        "original": to_data(value.original),
        "normalized": to_data(value.normalized),
        "verified": value.verified,
    }


@to_data.register
def _map_verdict_data(value: MapVerdict) -> dict[str, Any]:
    return {
        "passed": value.passed,
        "residual": str(value.residual),
        "invertible": value.invertible,
        "reasons": list(value.reasons),
    }


@to_data.register
def _equivalence_verdict_data(value: EquivalenceVerdict) -> dict[str, Any]:
    return {"passed": value.passed, "residual": str(value.residual), "eta": to_data(value.eta), "reasons": value.reasons}


@to_data.register
def _unitary_verdict_data(value: UnitaryVerdict) -> dict[str, Any]:
    return {"fixes": value.fixes, "balanced": value.balanced, "pure_parts_balanced": list(value.pure_parts_balanced)}


@to_data.register
def _classification_report_data(value: ClassificationReport) -> dict[str, Any]:
    data = {
        "finite_type_necessary": to_data(value.finite_type_necessary),
        "torus": to_data(value.torus),
        "translations": [to_data(t) for t in value.translations],
        "zn_rotations": [list(r) for r in value.zn_rotations],
        "thm3_case": value.thm3_case,
        "thm2_case": value.thm2_case,
        "notes": list(value.notes),
    }
    ordered = {name: data[name] for name in REPORT_FIELD_NAMES}
    ordered["thm3_candidates"] = list(value.thm3_candidates)
    ordered["thm2_candidates"] = list(value.thm2_candidates)
    return ordered


def dumps_report(report: Report) -> str:
    """Stable JSON text of a report: sorted keys, two-space indent.

    Args:
        report: The report.

    Returns:
        The JSON text, identical for equal reports.
    """
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)


def _render(value: Any, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item and not _is_flat_list(item):
                lines.append(f"{pad}{key}:")
                _render(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_inline(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                _render(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_inline(item)}")
    else:
        lines.append(f"{pad}{_inline(value)}")


def _is_flat_list(value: Any) -> bool:
    return isinstance(value, list) and all(not isinstance(item, (dict, list)) or _is_pair(item) for item in value)


def _is_pair(value: Any) -> bool:
    return isinstance(value, list) and all(isinstance(item, (int, str)) for item in value)


def _inline(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, list):
        return ", ".join(_inline(item) for item in value) if value else "(none)"
    if isinstance(value, dict):
        return "(none)"
    return str(value)


def render_text(report: Report) -> str:
    """Human-readable rendering of a report, one "key: value" per line, nested blocks indented.

    Args:
        report: The report.

    Returns:
        The rendered lines joined by newlines.
    """
    lines: list[str] = []
    _render(report, 0, lines)
    return "\n".join(lines)


def write_report(report: Report, output_path: Path) -> bool:
    """Write the JSON form of a report, creating parent directories.

    Args:
        report: The report.
        output_path: Destination file.

    Returns:
        Whether the file was written; failures are logged, not raised.
    """
    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(dumps_report(report) + "\n", encoding="utf-8")
    except OSError:
        logger.exception("Error writing report to %s", output_path)
        return False
    logger.info("Wrote report to %s", output_path)
    return True
