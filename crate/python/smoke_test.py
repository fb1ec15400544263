"""Smoke test for the qlimit extension module.

Build and install first, e.g.  maturin develop -m crates/py/Cargo.toml
"""

import json
import math

import qlimit


def main():
    nand = qlimit.Function.catalog("NAND2")
    assert nand.arity == 2 and len(nand) == 4
    assert nand("11") == 0 and nand("01") == 1
    for m in ["C", "D", "s", "bs", "fbs", "deg", "R0"]:
        assert nand.measure(m) == "2", m
    assert qlimit.Function.catalog("MAJ3").measure("R0") == "8/3"

    s = qlimit.Function(2, [("01", 0), ("10", 1)])
    assert s == qlimit.Function.catalog("S")
    assert s.measure("Rbar", "0") == "1"
    assert qlimit.Function.parse(s.to_json()) == s

    rep = nand.report("D")
    assert rep["verified"]

    power = nand.power(3)
    assert power.arity == 8 and power.measure("D") == "8"

    decision, witness = qlimit.decide(qlimit.Function.catalog("I"), qlimit.Function.catalog("PrOR", 3))
    assert decision == "Reducible"
    assert qlimit.verify_witness(witness)
    kind, w = qlimit.is_switchable(qlimit.Function.catalog("MAJ3"))
    assert kind == "Switchable" and qlimit.verify_witness(w)
    assert qlimit.verify_witness(qlimit.bs_reduction_witness(qlimit.Function.catalog("MAJ3")))

    seq = qlimit.limit(nand, "D", 4)
    assert [e["value"] for e in seq["entries"]] == ["2", "4", "8", "16"]

    table = qlimit.exact_expected_cost("directional-nand", nand, 30)
    w1 = [int(a) / int(b) for a, b in (t[1].split("/") if "/" in t[1] else (t[1], "1") for t in table)]
    assert abs(w1[-1] / w1[-2] - (1 + math.sqrt(33)) / 4) < 1e-3

    run = qlimit.run_ak(nand, 4, 1, 7, "directional-nand")
    assert not run["bot"] and run["verified"]
    assert run["transcript"][-1]["event"] == "output"

    report = qlimit.growth_report(nand, "directional-nand", 2, 5, 200, 3)
    assert report["prng"] == qlimit.PRNG
    assert all(r["bot_rate"] <= 0.5 and r["invalid"] == 0 for r in report["rows"])

    try:
        nand.power(30, 1024)
    except OverflowError:
        pass
    else:
        raise AssertionError("cap was not enforced")

    print(json.dumps({"ok": True, "rows": len(report["rows"])}))


if __name__ == "__main__":
    main()
