"""Exact 2x2 matrix algebra, the Moebius action on rational points of the
upper half-plane, the point-pair invariant u, and fundamental-domain reduction.

All geometric predicates are decided over Q; irrational thresholds such as
sqrt(3)/2 are compared by squaring both (positive) sides.
"""

from fractions import Fraction
from math import ceil

from .errors import NotUnimodular


class Mat2:
    """2x2 matrix with exact integer or Fraction entries."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = a
        self.b = b
        self.c = c
        self.d = d

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"Mat2({self.a}, {self.b}, {self.c}, {self.d})"

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def adjugate(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "Mat2":
        """Exact inverse; entries become Fractions unless det divides exactly."""
        det = self.det
        if det == 0:
            raise ZeroDivisionError("matrix is singular")
        if det == 1:
            return self.adjugate()
        if det == -1:
            return Mat2(-self.d, self.b, self.c, -self.a)
        return Mat2(
            Fraction(self.d, det),
            Fraction(-self.b, det),
            Fraction(-self.c, det),
            Fraction(self.a, det),
        )

    def is_integral(self) -> bool:
        return all(
            isinstance(e, int) or (isinstance(e, Fraction) and e.denominator == 1)
            for e in self.entries()
        )

    def to_int(self) -> "Mat2":
        """Copy with plain int entries; raises if any entry is non-integral."""
        if not self.is_integral():
            raise ValueError(f"non-integral matrix {self!r}")
        a, b, c, d = (int(e) for e in self.entries())
        return Mat2(a, b, c, d)

    def is_sl2(self) -> bool:
        return self.is_integral() and self.det == 1

    def require_sl2(self) -> "Mat2":
        if not self.is_sl2():
            raise NotUnimodular(f"expected SL2(Z), got {self!r} with det {self.det}")
        return self

    def scale(self, s) -> "Mat2":
        return Mat2(s * self.a, s * self.b, s * self.c, s * self.d)

    def to_json(self):
        def enc(e):
            e = Fraction(e)
            return int(e) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"

        return [[enc(self.a), enc(self.b)], [enc(self.c), enc(self.d)]]


# standard generators
MAT_T = Mat2(1, 1, 0, 1)
MAT_S = Mat2(0, -1, 1, 0)


class PointH:
    """Exact rational point x + iy of the upper half-plane (y > 0)."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = Fraction(x)
        self.y = Fraction(y)
        if self.y <= 0:
            raise ValueError(f"point must have y > 0, got y = {self.y}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointH):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"PointH({self.x}, {self.y})"

    def serialize(self) -> str:
        """"x_num/x_den,y_num/y_den" wire format."""
        return (
            f"{self.x.numerator}/{self.x.denominator},"
            f"{self.y.numerator}/{self.y.denominator}"
        )

    @classmethod
    def parse(cls, text: str) -> "PointH":
        xs, ys = text.split(",")
        return cls(Fraction(xs), Fraction(ys))


def mobius_act(g: Mat2, z: PointH) -> PointH:
    """Exact Moebius action (az+b)/(cz+d) for det(g) > 0."""
    det = Fraction(g.det)
    if det <= 0:
        raise ValueError(f"mobius_act needs det > 0, got {det}")
    x, y = z.x, z.y
    den = (g.c * x + g.d) ** 2 + (g.c * y) ** 2  # |cz+d|^2 > 0 since y > 0
    new_x = ((g.a * x + g.b) * (g.c * x + g.d) + g.a * g.c * y * y) / den
    new_y = det * y / den
    return PointH(new_x, new_y)


def point_pair_u(z: PointH, w: PointH) -> Fraction:
    """Point-pair invariant u(z, w) = |z - w|^2 / (4 Im z Im w)."""
    return ((z.x - w.x) ** 2 + (z.y - w.y) ** 2) / (4 * z.y * w.y)


def fd_reduce(z: PointH) -> tuple[Mat2, PointH]:
    """Reduce z into the standard fundamental domain: z = tau * z0.

    Gauss reduction: translate to x in (-1/2, 1/2], invert while |z| < 1;
    on the boundary arc |z0| = 1 the representative with x0 >= 0 is chosen.
    Terminates on exact rationals (each inversion strictly increases y
    within a discrete set of attainable heights).
    """
    x, y = z.x, z.y
    tau = Mat2.identity()
    while True:
        n = ceil(x - Fraction(1, 2))  # shift into (-1/2, 1/2]
        if n:
            x -= n
            tau = tau * Mat2(1, n, 0, 1)  # tau <- tau * T^n, point <- T^-n point
        norm = x * x + y * y
        if norm >= 1:
            break
        # apply S: z <- -1/z, tau <- tau * S^-1
        x, y = -x / norm, y / norm
        tau = tau * Mat2(0, 1, -1, 0)
    if x < 0 and x * x + y * y == 1:
        x = -x  # S acts as x -> -x on the unit arc
        tau = tau * Mat2(0, 1, -1, 0)
    if tau.c < 0 or (tau.c == 0 and tau.a < 0):
        tau = -tau  # +-tau act identically; pin the sign for determinism
    return tau, PointH(x, y)
