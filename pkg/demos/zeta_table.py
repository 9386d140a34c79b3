"""Point counts and L-polynomials of the vertex curves at q = 3."""

from ltlab.curves import count_points, make_curve, zeta_genus

for kind, iso in (("P1", 1), ("Hyper", 1), ("Hermitian", 1), ("DL", 1), ("BigAS", 3)):
    C = make_curve(kind, 3)
    N = [count_points(C, k) for k in range(1, 9)]
    z = zeta_genus(N, 3, isotypic=iso)
    print(f"{C.label:32s} N = {N[:4]}  genus {z.genus}  components {z.components}  L = {z.L}")
