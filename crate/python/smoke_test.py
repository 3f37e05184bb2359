"""Smoke test for the cfc Python module.

Build and install it first:
    pip install --no-build-isolation -e crates/py
then run:
    python3 python/smoke_test.py
"""

from pathlib import Path

import cfc

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(name):
    return cfc.Program.from_file(str(CORPUS / name))


def main():
    equ = load("equ.cfc")
    assert equ.ok, equ.diagnostics
    assert str(equ.normalize("Equ Int Bool").ty) == "False"
    nf = equ.normalize(equ.parse_type("Equ Int Int"))
    assert str(nf.ty) == "True" and nf.steps == 1 and not nf.stuck

    plus = load("plus.cfc")
    assert str(plus.normalize("Plus (S (S Z)) (S Z)").ty) == "S (S (S Z))"
    run = plus.eval("main", trace=True)
    assert run.outcome == "value" and run.result == "MkInt", run
    assert run.trace[0][0] == "S_Resolve"
    assert plus.terms["main"] == "Int"

    only = load("onlyint.cfc")
    assert only.normalize("OnlyInt Bool").stuck

    bad = load("loop_bad.cfc")
    assert not bad.ok
    assert bad.diagnostics[0][0] == "FamilyInRHS"
    try:
        bad.normalize("Loop")
    except cfc.CheckError as e:
        assert "FamilyInRHS" in str(e)
    else:
        raise AssertionError("expected CheckError")

    collects = load("collects.cfc")
    assert collects.infer("Elem c -> c -> c") == ["Collects c"]
    surface, core = load("loopy.cfc").elaborate()
    assert "instance Loopy => Loopy where type Loop = List Loop" in surface
    assert any(d.startswith("family Loop : 0") for d in core)

    a = cfc.Type("P x (L y)")
    b = cfc.Type("P (L B) x")
    theta = cfc.unify(a, b)
    assert theta is not None and str(theta["x"]) == "L B", theta
    assert cfc.unify(cfc.Type("A"), cfc.Type("B")) is None
    assert cfc.alpha_eq(cfc.Type("forall a. a -> a"), cfc.Type("forall b. b -> b"))
    assert cfc.Type("F A", families=["F"]).fam_count == 1

    try:
        cfc.Program("data Z : zero")
    except cfc.ParseError as e:
        assert e.args[1] == 1
    else:
        raise AssertionError("expected ParseError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
