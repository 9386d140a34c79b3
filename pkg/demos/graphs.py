"""Write DOT renderings of the depth-zero ball, a sprouted ball and a modular graph.

    python3 demos/graphs.py [outdir]
"""

import sys
from pathlib import Path

from ltlab.strata import quad_ext
from ltlab.tower_graph import depth_zero_ball, export, genus_total, modular_graph, quotient, sprout

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

ball = depth_zero_ball(3, 2)
(out / "ball.dot").write_bytes(export(ball, "dot"))

# wild vertices over the root and over one ramified neighbour
G = sprout(ball, "U0", quad_ext(3, "unramified"), 2)
G = sprout(G, "R1:b0", quad_ext(3, "ramified-pi"), 2)
(out / "sprouted.dot").write_bytes(export(G, "dot"))

Q = quotient(sprout(depth_zero_ball(3, 2), "U0", quad_ext(3, "unramified"), 2, "cm"), 2)
print(f"K_2 quotient: {len(Q.vertices)} vertices, {len(Q.edges)} edges, genus_total {genus_total(Q)}")

M = modular_graph(3, 1, {"s": 2, "igusa_genus": 0})
(out / "modular_3_1.dot").write_bytes(export(M, "dot"))
print(f"modular graph p=3 n=1 s=2: {len(M.vertices)} vertices, genus_total {genus_total(M)}")
print(f"wrote DOT files to {out}/")
