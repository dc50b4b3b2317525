import pytest

import symflow


def test_parse_round_trip():
    e = symflow.parse("I*Diff(u,t) + alpha*u^2*v")
    assert symflow.parse(str(e)) == e
    assert (e - e).is_zero()


def test_parse_error():
    with pytest.raises(ValueError):
        symflow.parse("u +* v")


def test_euler_lagrange_of_heat_operator():
    L = symflow.parse("m1*(Diff(u,t) - Diff(u,x,x))")
    assert symflow.euler_lagrange(L, "u") == symflow.parse("-Diff(m1,t) - Diff(m1,x,x)")


def test_reduce_on_shell():
    mixed = symflow.total_derivative(symflow.parse("Diff(phi,x)"), "t")
    other = symflow.total_derivative(symflow.parse("Diff(phi,t)"), "x")
    assert symflow.reduce(mixed - other).is_zero()


def test_systems_and_manifest():
    assert symflow.systems() == ["hirota", "hirota_lax", "prolonged"]
    assert "[solved]" in symflow.manifest("prolonged")


def passed(checks):
    return all(c["status"] != "fail" for c in checks)


def test_zero_curvature():
    assert passed(symflow.zero_curvature())


def test_symmetry_families():
    checks = symflow.verify_symmetry("hirota")
    assert passed(checks)
    assert len(checks) == 2


def test_optimal_system():
    checks, brackets = symflow.optimal_system(samples=20)
    assert passed(checks)
    assert brackets["[v2,v3]"] == "-2*v1"


def test_conservation_v3():
    assert passed(symflow.conservation("v3", numeric_points=3))


def test_finite_transform_group_law():
    checks = symflow.finite_transform(group_law=True)
    assert passed(checks)
