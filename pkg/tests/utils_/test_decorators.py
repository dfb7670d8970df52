import pytest

from process_bo.utils.decorators import optional_float, optional_int


@optional_int("n")
def int_return(n):
    return n


@optional_float("pi")
def float_return(pi):
    return pi


@pytest.mark.parametrize("query, expected", [
    ("", None), ("?n=", None), ("?n=3", 3), ("?n=3.0", 3), ("?n=-2", -2),
])
def test_optional_int(app, query, expected):
    with app.test_request_context(f"/{query}"):
        value = int_return()
    assert value == expected
    assert value is None or isinstance(value, int)


@pytest.mark.parametrize("query", ["?n=3.5", "?n=three", "?n=inf"])
def test_optional_int_rejects(app, query):
    with app.test_request_context(f"/{query}"):
        response, status = int_return()
        body = response.get_json()
    assert status == 400
    assert body["success"] is False
    assert "n" in body["data"]["error-message"]


@pytest.mark.parametrize("query, expected", [("", None), ("?pi=0.25", 0.25), ("?pi=1", 1.0)])
def test_optional_float(app, query, expected):
    with app.test_request_context(f"/{query}"):
        assert float_return() == expected


@pytest.mark.parametrize("query", ["?pi=nan", "?pi=-inf", "?pi=half"])
def test_optional_float_rejects(app, query):
    with app.test_request_context(f"/{query}"):
        _, status = float_return()
    assert status == 400


def test_form_values(app):
    with app.test_request_context("/", method="POST", data={"pi": "0.1"}):
        assert float_return() == 0.1
