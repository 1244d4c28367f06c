import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from contraction_order.document import decode, emit, encode, format_path, locate, matrix_from_node, parse
from contraction_order.errors import DocumentError
from contraction_order.numerics import Subspace
from contraction_order.verdict import Report

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(hnp.arrays(np.complex128, hnp.array_shapes(min_dims=2, max_dims=2, max_side=4),
                  elements=st.complex_numbers(allow_nan=False, allow_infinity=False)))
def test_complex_round_trip_bit_exact(a):
    back = parse(emit({"m": a}))["m"]
    assert back.dtype == np.complex128 and back.shape == a.shape
    assert back.tobytes() == a.tobytes()


@given(hnp.arrays(np.float64, (3, 2), elements=finite))
def test_real_round_trip(a):
    back = parse(emit(a))
    assert back.dtype == np.float64 and back.tobytes() == a.tobytes()


def test_int_round_trip():
    a = np.arange(6, dtype=np.int64).reshape(2, 3)
    back = parse(emit(a))
    assert back.dtype == np.int64 and np.array_equal(back, a)


def test_non_finite_floats():
    doc = emit({"x": math.inf, "y": [1.0, -math.inf]})
    out = parse(doc)
    assert out["x"] == math.inf and out["y"][1] == -math.inf
    assert math.isnan(parse(emit(float("nan"))))


def test_subspace_and_report():
    S = Subspace(np.eye(3)[:, :2])
    back = parse(emit(S))
    assert isinstance(back, Subspace) and np.array_equal(back.frame, S.frame)
    rep = Report("r")
    rep.add("c", True, 0.5, 1.0)
    tree = json.loads(emit(rep))
    assert tree["passed"] is True and tree["checks"][0]["name"] == "c"


def test_emit_is_sorted_and_stable():
    a = emit({"b": 1, "a": np.eye(2)})
    assert a == emit({"a": np.eye(2), "b": 1})
    assert a.index('"a"') < a.index('"b"')


def test_encode_rejects_unknown():
    with pytest.raises(TypeError):
        encode(object())


def test_nested_list_inputs():
    text = '{"M": [[0, [1, 2]], [0.5, 0]]}'
    M = matrix_from_node(text, ["M"])
    assert M[0, 1] == 1 + 2j and M[1, 0] == 0.5
    text = '{"M": {"rows": 1, "cols": 2, "data": [1, [0, 1]]}}'
    assert np.array_equal(matrix_from_node(text, ["M"]), [[1, 1j]])


def test_syntax_error_offset():
    text = '{"a": [1, 2,, 3]}'
    with pytest.raises(DocumentError) as e:
        decode(text)
    assert e.value.offset == text.index(",,") + 1 and e.value.path == "$"


def test_semantic_error_path_and_offset():
    text = '{\n  "M": {"type": "matrix", "rows": 1, "cols": 2, "data": [[1, 0], ["x", 0]]}\n}'
    with pytest.raises(DocumentError) as e:
        parse(text)
    assert e.value.path == "$.M.data[1][0]"
    assert e.value.offset == text.index('"x"')


def test_error_offset_is_in_bytes():
    text = '{"é": 0, "M": {"rows": 2, "cols": 2, "data": [1]}}'
    with pytest.raises(DocumentError) as e:
        matrix_from_node(text, ["M"])
    assert e.value.path == "$.M.data"
    assert e.value.offset == len(text[: text.index("[1]")].encode())


def test_ragged_rows():
    with pytest.raises(DocumentError) as e:
        matrix_from_node('[[1, 2], [3]]', [])
    assert e.value.path == "$[1]"


def test_missing_entry():
    with pytest.raises(DocumentError) as e:
        matrix_from_node('{"a": 1}', ["b"])
    assert e.value.path == "$"


def test_locate_and_format_path():
    text = '{"a": {"b": [10, {"c": 3}]}}'
    i = locate(text, ["a", "b", 1, "c"])
    assert text[i] == "3"
    assert format_path(["a", 0, "b"]) == "$.a[0].b"
