import json

import pytest
from sympy.polys.domains import QQ

from src.finite_type import finite_type_necessary
from src.flows import FlowSpec
from src.grading import Weight
from src.parser import parse
from src.polynomial import ModelMap, PolyMap, gaussian
from src.report import dumps_report, render_text, to_data, write_report
from src.symmetry import ModelDomain, classify

data_cases = [
    pytest.param(QQ(1, 2), "1/2", id="rational"),
    pytest.param(gaussian(0, 2), "2*i", id="gaussian"),
    pytest.param(None, None, id="none"),
    pytest.param(True, True, id="bool"),
    pytest.param((1, "a"), [1, "a"], id="tuple"),
    pytest.param({1: QQ(3)}, {"1": "3"}, id="dict_keys_become_strings"),
    pytest.param(FlowSpec.type4(gaussian(0, 1), gaussian(0, 2)), {"kind": "4", "params": {"a": "i", "b": "2*i"}, "beta3": "0", "swapped": False}, id="flow"),
    pytest.param(ModelMap(PolyMap.flip()), {"plane": {"f1": "z2", "f2": "z1"}, "mu": "1", "phi": "0"}, id="model_map"),
    pytest.param(Weight.circle(1, 3), {"theta": ["1", "3"], "group": "circle", "cyclic": None}, id="weight"),
]


@pytest.mark.parametrize(("value", "expected"), data_cases)
def test_to_data(value, expected):
    assert to_data(value) == expected


def test_to_data_rejects_unknown_types():
    with pytest.raises(TypeError, match="no serializer for object"):
        to_data(object())


def test_finite_type_verdict_data(ball):
    assert to_data(finite_type_necessary(ball)) == {"passed": True, "reasons": [], "lines_checked": 22}


def test_classification_data_has_fixed_keys(weighted):
    data = to_data(classify(ModelDomain(weighted)))
    assert list(data) == [
        "finite_type_necessary",
        "torus",
        "translations",
        "zn_rotations",
        "thm3_case",
        "thm2_case",
        "notes",
        "thm3_candidates",
        "thm2_candidates",
    ]
    assert data["thm2_case"] == "iv"
    assert data["torus"]["kernel_basis"] == [[1, 3]]
    json.dumps(data)


def test_dumps_report_is_deterministic():
    first = dumps_report({"b": 1, "a": {"d": [1, 2], "c": None}})
    second = dumps_report({"a": {"c": None, "d": [1, 2]}, "b": 1})
    assert first == second
    assert first.index('"a"') < first.index('"b"')
    assert json.loads(first) == {"a": {"c": None, "d": [1, 2]}, "b": 1}


def test_render_text():
    report = {
        "command": "analyze",
        "passed": True,
        "torus": None,
        "notes": [],
        "theta": ["1", "3"],
        "flows": [{"kind": "4"}],
        "nested": {"failed": False},
    }
    assert render_text(report).splitlines() == [
        "command: analyze",
        "passed: yes",
        "torus: -",
        "notes: (none)",
        "theta: 1, 3",
        "flows:",
        "  -",
        "    kind: 4",
        "nested:",
        "  failed: no",
    ]


def test_write_report_creates_parent_directories(tmp_path):
    report = {"command": "classify", "polynomial": str(parse("z1*cz1 + z2*cz2"))}
    output_path = tmp_path / "reports" / "ball.json"
    assert write_report(report, output_path)
    text = output_path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert json.loads(text) == report


def test_write_report_logs_os_errors(tmp_path, caplog):
    # a directory cannot be opened for writing
    assert not write_report({"command": "classify"}, tmp_path)
    assert "Error writing report" in caplog.text
