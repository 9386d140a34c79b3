"""Print the finite-level Jacquet-Langlands constituents at q = 3."""

from ltlab.cli import Result, render_report
from ltlab.reptheory import jl_finite_check

rep = jl_finite_check(3)
rows = [{"part": part, "name": c["name"], "dim": c["dim"], "mult": c["multiplicity"],
         "scalar": c.get("frobenius_scalar")}
        for part in ("depth_zero", "unramified", "ramified") for c in rep[part]["constituents"]]
table, _ = render_report(Result("jl", ["part", "name", "dim", "mult", "scalar"], rows))
print(table)
print("ok" if rep["ok"] else "FAILED")
