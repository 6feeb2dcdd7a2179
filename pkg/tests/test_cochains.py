import numpy as np
import pytest

from cs4d.cochains import (
    ROW_IDS,
    coboundary,
    delta_of,
    descent_residual,
    eval_cochain,
    row_min_variables,
)
from cs4d.errors import UnknownCochainError
from cs4d.fields import (
    ConstGroup,
    eval_at_points,
    eval_form_at_points,
    random_connection,
    random_gauge_field,
)
from cs4d.forms import Form, maurer_cartan
from cs4d.jets import Jet
from cs4d import lie


def config(rng, m, n=3, batch=5, box=0.6):
    gs_gen = [random_gauge_field(rng, m, n) for _ in range(3)]
    a_gen = random_connection(rng, m, n)
    pts = box * (2 * rng.random((m, batch)) - 1)
    gs = [eval_at_points(g, pts, order=2) for g in gs_gen]
    a = eval_form_at_points(a_gen, pts, order=2)
    return gs, a, pts


def test_c11_at_identity_vanishes():
    rng = np.random.default_rng(0)
    gs, a, _ = config(rng, 4)
    one = Jet.const(4, np.eye(3, dtype=complex), order=2, batch=5)
    assert eval_cochain("dim4", 1, 1, [one], a).max_abs() < 1e-14


def test_c02_of_zero_connection():
    zero = Form(5, 1, {})
    assert eval_cochain("dim4", 0, 2, [], zero).max_abs() == 0.0


def test_c21_matches_c11_substitution():
    # independent expansion: substitute the left Maurer-Cartan form into c^{1,1}
    rng = np.random.default_rng(1)
    gs, _, _ = config(rng, 4)
    direct = eval_cochain("dim4", 2, 1, gs[:2], None)
    w1 = maurer_cartan(gs[0], "left")
    subst = eval_cochain("dim4", 1, 1, [gs[1]], w1)
    assert (direct - subst).max_abs() < 1e-12


def test_delta_of_constant_cochain():
    rng = np.random.default_rng(2)
    gs, a, _ = config(rng, 4)
    const_form = Form.from_jet(Jet.const(4, np.eye(3, dtype=complex), 2, batch=5))
    fn = delta_of(lambda g, A: const_form, 0, False)
    assert fn([gs[0]], a).max_abs() < 1e-15


def test_delta_squared_vanishes():
    rng = np.random.default_rng(3)
    for family, p, q, m in [("dim4", 1, 1, 4), ("dim2", 1, 0, 3), ("dim4", 1, 2, 5)]:
        gs, a, _ = config(rng, m)
        from cs4d.cochains import cochain_entry

        arity, uses_a, fn = cochain_entry(family, p, q)
        dd = delta_of(delta_of(fn, arity, uses_a), arity + 1, uses_a)
        assert dd(gs[: arity + 2], a).max_abs() < 1e-9


@pytest.mark.parametrize("key", ROW_IDS)
def test_descent_rows(key):
    family, row, p = key
    rng = np.random.default_rng(17 + 13 * hash(key) % 1000)
    m = row_min_variables(family, row, p)
    gs, a, _ = config(rng, m)
    assert descent_residual(family, row, p, gs, a) < 1e-9


def test_conjugation_invariance():
    rng = np.random.default_rng(5)
    n = 3
    c = lie.group_exp(lie.random_algebra(rng, n))
    for (family, p, q) in [("dim4", 0, 3), ("dim4", 0, 2), ("dim4", 1, 2),
                           ("dim4", 1, 1), ("dim4", 2, 1), ("dim4", 2, 0),
                           ("dim2", 0, 2), ("dim2", 0, 1), ("dim2", 1, 1),
                           ("dim2", 1, 0), ("dim2", 2, 0)]:
        m = 6 if family == "dim4" else 4
        gs, a, pts = config(rng, m, n=n)
        from cs4d.cochains import cochain_entry

        arity, uses_a, fn = cochain_entry(family, p, q)
        base = fn(gs[:arity], a)
        cj = Jet.const(m, c, order=2, batch=pts.shape[1])
        gs_c = [cj.inverse().mul(g).mul(cj) for g in gs[:arity]]
        a_c = a.conj_by(cj)
        conj = fn(gs_c, a_c)
        assert (base - conj).max_abs() < 1e-10


def test_row_trivial_cases():
    rng = np.random.default_rng(6)
    gs, a, _ = config(rng, 5)
    one = Jet.const(5, np.eye(3, dtype=complex), order=2, batch=5)
    # g = 1 in the variation row: delta c^{0,2} and dc^{1,1} and c^{1,2} all vanish
    r = descent_residual("dim4", 2, 1, [one, gs[1], gs[2]], a)
    assert r < 1e-13


def test_unknown_cochain_errors():
    with pytest.raises(UnknownCochainError):
        eval_cochain("dim4", 3, 3, [], None)
    with pytest.raises(UnknownCochainError):
        descent_residual("dim4", 5, 0, [], None)
    rng = np.random.default_rng(7)
    gs, a, _ = config(rng, 4)
    with pytest.raises(UnknownCochainError):
        eval_cochain("dim4", 1, 1, gs, a)  # arity mismatch
    with pytest.raises(UnknownCochainError):
        eval_cochain("dim4", 0, 2, [], None)  # missing connection


def test_many_seeded_configurations():
    # smaller version of the acceptance sweep: every defined residual < 1e-8
    rng = np.random.default_rng(8)
    for trial in range(5):
        for (family, row, p) in ROW_IDS:
            m = row_min_variables(family, row, p)
            gs, a, _ = config(rng, m, batch=2)
            assert descent_residual(family, row, p, gs, a) < 1e-8
