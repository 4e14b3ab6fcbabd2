"""Golden data for the three-node example tree (ids 0, 1, 2 are the nodes)."""
from plumbing_pc.series import LaurentPoly, RationalFunction

NODES = (0, 1, 2)

# polynomial part on (t0, t1, t2); every coefficient is 1
POLYPART = {
    (41, 85, 37), (29, 61, 23), (23, 49, 16), (20, 43, 19), (17, 37, 9),
    (13, 23, 13), (11, 25, 2), (8, 19, 5), (5, 13, -5), (2, 7, -2),
    (1, -1, -1), (-1, 1, -12), (-1, -8, 1),
}
PC = 13

A_RAY, B_RAY = (28, 62, 24), (12, 24, 14)

# simplified reduction to the nodes: prod(1 + t^e) / prod(1 - t^a)
SIMPLIFIED_NUMERATOR = [(42, 93, 36), (21, 42, 18), (18, 36, 21)]
SIMPLIFIED_DENOMINATOR = [B_RAY, A_RAY]


def poly(*items):
    """Sum of coef * t^e over (coef, e) pairs on the node variables."""
    out = LaurentPoly(NODES, 1, ())
    for coef, e in items:
        out = out + LaurentPoly.monomial(NODES, 1, (), e, coef=coef)
    return out


def summand():
    """t^(63,135,54) over the two denominator factors."""
    return RationalFunction(NODES, 1, (), poly((1, (63, 135, 54))), (), (((), A_RAY), ((), B_RAY)))


def simplified_numerator():
    one = poly((1, (0, 0, 0)))
    out = one
    for e in SIMPLIFIED_NUMERATOR:
        out = out * (one + poly((1, e)))
    return out


# item-by-item splits of summand(): (v, w) -> (P_vw, alpha ray, Pp, Ppp, Pppp)
SPLIT_2V = {
    (0, 1): (poly((1, (23, 49, 16)), (1, (11, 25, 2)), (1, (-1, 1, -12))), B_RAY,
             poly((-1, (-1, 1, -12))), poly((-1, (23, 49, 16))), poly((1, (23, 49, 16)))),
    (0, 2): (poly((1, (23, 49, 16)), (1, (11, 25, 2))), A_RAY,
             poly(), poly((-1, (11, 25, 2)), (-1, (7, 11, 6))), poly((1, (7, 11, 6)))),
}
# one variable t0: P_0 and the remainder numerator (two opposite terms cancelled)
SPLIT_1V = (poly((1, (23, 49, 16)), (1, (11, 25, 2))),
            poly((1, (35, 73, 30)), (1, (39, 87, 26)), (-1, (11, 25, 2))))
