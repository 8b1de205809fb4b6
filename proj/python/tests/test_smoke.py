import json

import numpy as np
import pytest

import equivaria as eq


def test_catalogue():
    names = [n for n, _ in eq.datasets()]
    assert names == ["z2-line", "dihedral-plane", "anticomplete-point", "two-component"]
    assert "S3" in eq.builtin_groups()
    assert eq.SCHEMA == "equivaria/1"


def test_irreps_sum_of_squares():
    for g in ["Z/5", "S3", "Q8"]:
        r = eq.irreps(g)
        assert sum(i["dim"] ** 2 for i in r["irreps"]) == r["sum_of_squares"]
    assert [i["dim"] for i in eq.irreps("S3")["irreps"]] == [1, 1, 2]


def test_spectrum_z2_line():
    (rep,) = eq.spectrum("z2-line")
    assert len(rep["entries"]) == 6
    assert rep["crosscheck"]["pass"]
    assert sorted(rep["crosscheck"]["blocks"]) == [1, 1, 2, 2, 2, 2]


def test_fixed_point_algebra_is_closed():
    basis = eq.fixed_point_algebra({"builtin": "z2-line", "params": {"n": 1}})
    assert len(basis) == 6
    flat = np.stack([b.ravel() for b in basis], axis=1)
    prod = (basis[2] @ basis[3]).ravel()
    coeff, *_ = np.linalg.lstsq(flat, prod, rcond=None)
    assert np.linalg.norm(flat @ coeff - prod) < 1e-10


def test_cocycle_values():
    i = eq.cocycle({"builtin": "z2-line", "params": {"n": 1}}, 1, 1)
    assert i.shape == (2, 2)
    assert np.allclose(i @ i.conj().T, np.eye(2))


def test_morita_anticomplete_is_strict():
    (item,) = eq.morita("anticomplete-point")
    thm = item["theorem"]
    assert thm["strict"] and thm["dims"]["j"] == 1 and thm["dims"]["c"] == 2


def test_morita_z2_line_with_reduction():
    (item,) = eq.morita({"builtin": "z2-line", "params": {"n": 1}})
    assert item["reduction"]["ok"]


def test_green_julg_regular_point():
    v = eq.green_julg({"builtin": "regular-point", "params": {"group": "S3"}})
    assert v["pass"] and v["residual"] < 1e-8


def test_round_trip_is_byte_identical():
    for name, _ in eq.datasets():
        text = eq.canonical(name)
        assert eq.canonical(text) == text
        assert json.loads(text)["schema"] == "equivaria/1"


def test_suite_groups():
    r = eq.run_suite("groups", tol=1e-10)
    assert r["ok"] and len(r["checks"]) == 48


def test_errors():
    with pytest.raises(eq.InputError):
        eq.irreps("A5")
    with pytest.raises(eq.InputError, match="parse error"):
        eq.spectrum('{"group": ')
    with pytest.raises(eq.InputError):
        eq.run_suite("nonsense")
    bad = eq.dataset("anticomplete-point")["components"][0]
    bad["cocycle"]["1,0"] = [[[0.0, 1.0]]]
    with pytest.raises(eq.ValidationError, match="cocycle identity"):
        eq.spectrum(bad)
    assert issubclass(eq.InputError, eq.EquivariaError)
