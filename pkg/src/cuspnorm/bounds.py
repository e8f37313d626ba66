"""Symbolic exponent calculus over the parameters (N, M, Lambda, y, N0, L):
max-of-monomials envelopes tracked modulo N^epsilon, exact domination
certificates via vertex enumeration over small constraint polytopes, the
two-branch Fourier-expansion sup bound, and the final exponent pipelines.

A monomial N^eN M^eM Lambda^eL y^ey N0^e0 L^el is identified with its
exponent vector; taking log base N turns domination questions into exact
linear programs over the variables

    mu = log_N M,  eta = -log_N y,  nu = log_N N0,  alpha = log_N Lambda,
    ell = log_N L.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import mpmath

from .arith import euler_phi, factor
from .errors import (
    ConfigError,
    InfeasibleConstraints,
    InvalidM,
    OutOfRange,
    UnboundedPolytope,
)
from .precision import default_dps

PARAMS = ("N", "M", "Lam", "y", "N0", "L")
_VAR_OF_PARAM = {"M": "mu", "y": "eta", "N0": "nu", "Lam": "alpha", "L": "ell"}
_SIGN_OF_PARAM = {"M": 1, "y": -1, "N0": 1, "Lam": 1, "L": 1}


@dataclass(frozen=True)
class ExponentVector:
    """Exact rational exponents for one monomial in (N, M, Lam, y, N0, L)."""

    exps: tuple[Fraction, ...]

    @classmethod
    def make(cls, **kw) -> "ExponentVector":
        unknown = set(kw) - set(PARAMS)
        if unknown:
            raise ConfigError(f"unknown parameters {sorted(unknown)}")
        return cls(tuple(Fraction(kw.get(p, 0)) for p in PARAMS))

    def __getitem__(self, param: str) -> Fraction:
        return self.exps[PARAMS.index(param)]

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        return ExponentVector(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.exps)

    def __str__(self) -> str:
        parts = []
        for p, e in zip(PARAMS, self.exps):
            if e == 0:
                continue
            parts.append(p if e == 1 else f"{p}^({e})")
        return "*".join(parts) if parts else "1"

    def as_functional(self, variables: tuple[str, ...]):
        """(constant, coefficient vector) of log_N(monomial) over `variables`."""
        const = self["N"]
        coeffs = [Fraction(0)] * len(variables)
        for p in PARAMS[1:]:
            e = self[p]
            if e == 0:
                continue
            var = _VAR_OF_PARAM[p]
            if var not in variables:
                raise ConfigError(
                    f"monomial {self} involves {p} but the polytope has no {var}"
                )
            coeffs[variables.index(var)] += _SIGN_OF_PARAM[p] * e
        return const, tuple(coeffs)


def monomial(**kw) -> ExponentVector:
    return ExponentVector.make(**kw)


@dataclass(frozen=True)
class MonomialBound:
    """Finite set of exponent vectors: an upper bound by the max of the
    monomials, up to N^epsilon factors."""

    monomials: tuple[ExponentVector, ...]

    @classmethod
    def of(cls, *vecs: ExponentVector) -> "MonomialBound":
        return cls(tuple(sorted(set(vecs), key=lambda v: v.exps)))

    def __str__(self) -> str:
        return "max(" + ", ".join(str(v) for v in self.monomials) + ")"


def bound_product(b1: MonomialBound, b2: MonomialBound) -> MonomialBound:
    """{v + w : v in b1, w in b2}, deduplicated."""
    return MonomialBound.of(*(v + w for v in b1.monomials for w in b2.monomials))


def substitute(b, param: str, replacement: ExponentVector):
    """Replace param by the monomial `replacement`: an exponent e of param
    contributes e * replacement.  Accepts a bound or a single vector.

    The identity substitution param := param is a no-op; any other
    replacement involving param would be circular and is rejected.
    """
    if replacement[param] != 0:
        is_identity = replacement[param] == 1 and all(
            e == 0 for p, e in zip(PARAMS, replacement.exps) if p != param
        )
        if is_identity:
            return b
        raise ConfigError(f"replacement for {param} must not involve {param}")
    idx = PARAMS.index(param)

    def sub_vec(v: ExponentVector) -> ExponentVector:
        e = v.exps[idx]
        if e == 0:
            return v
        stripped = ExponentVector(
            tuple(0 if i == idx else x for i, x in enumerate(v.exps))
        )
        scaled = ExponentVector(tuple(e * x for x in replacement.exps))
        return stripped + scaled

    if isinstance(b, ExponentVector):
        return sub_vec(b)
    return MonomialBound.of(*(sub_vec(v) for v in b.monomials))


@dataclass
class ConstraintSet:
    """Linear inequalities sum_i coeffs[i] * x_i <= rhs over named variables.

    The feasible region must be a bounded nonempty polytope; equalities are
    entered as inequality pairs via `eq`.
    """

    variables: tuple[str, ...]
    rows: list[tuple[tuple[Fraction, ...], Fraction]] = field(default_factory=list)

    def le(self, coeffs: dict, rhs) -> "ConstraintSet":
        row = tuple(Fraction(coeffs.get(v, 0)) for v in self.variables)
        self.rows.append((row, Fraction(rhs)))
        return self

    def ge(self, coeffs: dict, rhs) -> "ConstraintSet":
        return self.le({v: -Fraction(c) for v, c in coeffs.items()}, -Fraction(rhs))

    def eq(self, coeffs: dict, rhs) -> "ConstraintSet":
        self.le(coeffs, rhs)
        self.ge(coeffs, rhs)
        return self

    def box(self, var: str, lo, hi) -> "ConstraintSet":
        self.ge({var: 1}, lo)
        self.le({var: 1}, hi)
        return self


def _solve_square(rows, rhs):
    """Exact Gaussian elimination; None if singular."""
    d = len(rhs)
    mat = [list(rows[i]) + [rhs[i]] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if mat[r][col] != 0), None)
        if piv is None:
            return None
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = mat[col][col]
        mat[col] = [x / inv for x in mat[col]]
        for r in range(d):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    return tuple(mat[i][d] for i in range(d))


def _rank(rows, d):
    mat = [list(r) for r in rows]
    rank = 0
    for col in range(d):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col] / mat[rank][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def _null_direction(rows, d):
    """A nonzero solution of rows * v = 0, or None if only the trivial one."""
    mat = [list(r) for r in rows]
    pivots = {}
    rank = 0
    for col in range(d):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][col]
        mat[rank] = [x / inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        pivots[col] = rank
        rank += 1
    free = [c for c in range(d) if c not in pivots]
    if not free:
        return None
    v = [Fraction(0)] * d
    v[free[0]] = Fraction(1)
    for col, r in pivots.items():
        v[col] = -mat[r][free[0]]
    return tuple(v)


def vertices(cs: ConstraintSet) -> list[tuple[Fraction, ...]]:
    """All vertices of the polytope, by solving the d x d boundary subsystems.

    Raises UnboundedPolytope when the recession cone {A v <= 0} is nonzero,
    and InfeasibleConstraints when no feasible vertex exists.
    """
    d = len(cs.variables)
    rows = [r for r, _ in cs.rows]
    rhs = [b for _, b in cs.rows]
    if len(rows) < d or _rank(rows, d) < d:
        v = _null_direction(rows, d) if rows else tuple([Fraction(1)] * d)
        raise UnboundedPolytope(
            f"constraint matrix has rank < {d}; free direction {v}"
        )
    # pointedness: look for a nonzero v with A v <= 0 among (d-1)-face rays
    for subset in combinations(range(len(rows)), d - 1):
        sub = [rows[i] for i in subset]
        if _rank(sub, d) != d - 1:
            continue
        v = _null_direction(sub, d)
        if v is None:
            continue
        for cand in (v, tuple(-x for x in v)):
            if all(sum(c * x for c, x in zip(row, cand)) <= 0 for row in rows):
                raise UnboundedPolytope(f"recession direction {cand}")
    verts = set()
    for subset in combinations(range(len(rows)), d):
        sol = _solve_square([rows[i] for i in subset], [rhs[i] for i in subset])
        if sol is None:
            continue
        if all(
            sum(c * x for c, x in zip(row, sol)) <= b for row, b in cs.rows
        ):
            verts.add(sol)
    if not verts:
        raise InfeasibleConstraints("no feasible vertex")
    return sorted(verts)


@dataclass
class MonomialMax:
    monomial: ExponentVector
    max_value: Fraction
    argmax: tuple[Fraction, ...]


@dataclass
class DominationResult:
    """Per-monomial maxima of log_N(monomial / target) over the polytope;
    ok iff every maximum is <= 0."""

    target: ExponentVector
    per_monomial: list[MonomialMax]

    @property
    def ok(self) -> bool:
        return all(mm.max_value <= 0 for mm in self.per_monomial)

    def failures(self) -> list[MonomialMax]:
        return [mm for mm in self.per_monomial if mm.max_value > 0]


def maximize(vec: ExponentVector, cs: ConstraintSet) -> MonomialMax:
    """Exact maximum of log_N(monomial) over the polytope."""
    const, coeffs = vec.as_functional(cs.variables)
    best = None
    arg = None
    for v in vertices(cs):
        val = const + sum(c * x for c, x in zip(coeffs, v))
        if best is None or val > best:
            best, arg = val, v
    return MonomialMax(vec, best, arg)


def dominated_by(
    b: MonomialBound, target: ExponentVector, cs: ConstraintSet
) -> DominationResult:
    """Decide max-of-monomials <= target over the polytope, exactly.

    The certificate lists, per monomial, the maximizing vertex and the
    margin; a positive margin is a failure witness.
    """
    per = []
    for vec in b.monomials:
        diff = vec + ExponentVector(tuple(-e for e in target.exps))
        mm = maximize(diff, cs)
        per.append(MonomialMax(vec, mm.max_value, mm.argmax))
    return DominationResult(target, per)


# ---------------------------------------------------------------------------
# Fourier-expansion sup bound
# ---------------------------------------------------------------------------


@dataclass
class FourierBound:
    """Value of the two-branch bound at concrete (N, M, y): (Ny)^(-1/2) for
    1/N <= y <= 1/M^2 and M^(1/2) N^(-1/2) y^(-1/4) for y >= 1/M^2.

    fourth_power is the exact rational fourth power of the value, so branch
    agreement at the crossover can be asserted with no rounding.
    """

    branch: str
    value: mpmath.mpf
    fourth_power: Fraction

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "value": mpmath.nstr(self.value, default_dps()),
            "fourth_power": str(self.fourth_power),
        }


def fourier_sup_bound(n: int, m: int, y, dps: int | None = None) -> FourierBound:
    if m < 1 or n % (m * m):
        raise InvalidM(f"M^2 = {m * m} does not divide N = {n}")
    y = Fraction(y)
    if y * n < 1:
        raise OutOfRange(f"y = {y} below 1/N = 1/{n}")
    dps = dps or default_dps()
    low = y * m * m <= 1
    with mpmath.workdps(dps + 10):
        if low:
            fourth = Fraction(1) / (n * y) ** 2
            value = 1 / mpmath.sqrt(mpmath.mpf(n) * y.numerator / y.denominator)
            return FourierBound("low", value, fourth)
        fourth = Fraction(m * m, n * n) / y
        yf = mpmath.mpf(y.numerator) / y.denominator
        value = mpmath.sqrt(m) / (mpmath.sqrt(n) * yf ** mpmath.mpf("0.25"))
        return FourierBound("high", value, fourth)


def fourier_branch_exponents(mu: Fraction, h: Fraction) -> dict[str, Fraction]:
    """Both branch exponents at M = N^mu, y = N^h: low is -(1 + h)/2 and
    high is mu/2 - 1/2 - h/4."""
    mu, h = Fraction(mu), Fraction(h)
    return {"low": -(1 + h) / 2, "high": mu / 2 - Fraction(1, 2) - h / 4}


def fourier_exponent(mu: Fraction, h: Fraction) -> tuple[str, Fraction]:
    """Branch and exponent of the bound at M = N^mu, y = N^h (h >= -1).

    Low branch -(1 + h)/2 applies for h <= -2 mu; otherwise
    mu/2 - 1/2 - h/4.
    """
    mu, h = Fraction(mu), Fraction(h)
    if h < -1:
        raise OutOfRange(f"y = N^{h} below 1/N")
    branches = fourier_branch_exponents(mu, h)
    if h <= -2 * mu:
        return "low", branches["low"]
    return "high", branches["high"]


# ---------------------------------------------------------------------------
# miscellaneous closed forms
# ---------------------------------------------------------------------------


def norm_factor(m: int) -> Fraction:
    """phi(M) / gcd(M, 2), the Petersson-normalization factor."""
    from math import gcd

    return Fraction(euler_phi(m), gcd(m, 2))


def smooth_count(x: int, n: int) -> int:
    """#{t <= x : every prime of t divides n}, by bounded DFS over the
    prime powers of n."""
    if x < 1:
        raise ValueError(f"smooth_count expects x >= 1, got {x}")
    primes = [p for p, _ in factor(n)]

    def dfs(idx: int, value: int) -> int:
        if idx == len(primes):
            return 1
        total = 0
        v = value
        while v <= x:
            total += dfs(idx + 1, v)
            v *= primes[idx]
        return total

    return dfs(0, 1)


# ---------------------------------------------------------------------------
# exponent pipelines
# ---------------------------------------------------------------------------

# the amplifier envelope, in display order
AMPL_RHS_TERMS = (
    monomial(Lam=1, M=-1),
    monomial(Lam=2, y=1, N0=1, M=-3),
    monomial(Lam=Fraction(5, 2), M=-2, N=Fraction(-1, 2)),
    monomial(Lam=4, M=-1, N=-1),
)
AMPL_RHS = MonomialBound.of(*AMPL_RHS_TERMS)

LAMBDA_CHOICE = monomial(N=Fraction(1, 3))


@dataclass
class DerivationStep:
    op: str
    inputs: dict
    output: object
    certificate: object = None

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, (ExponentVector, MonomialBound)):
                return str(v)
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, MonomialMax):
                return {
                    "monomial": str(v.monomial),
                    "max": str(v.max_value),
                    "argmax": [str(x) for x in v.argmax],
                }
            if isinstance(v, DominationResult):
                return {
                    "target": str(v.target),
                    "ok": v.ok,
                    "per_monomial": [enc(mm) for mm in v.per_monomial],
                }
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        out = {"op": self.op, "inputs": enc(self.inputs), "output": enc(self.output)}
        if self.certificate is not None:
            out["certificate"] = enc(self.certificate)
        return out


@dataclass
class DerivationReport:
    case: str
    steps: list[DerivationStep]
    sup_norm_exponent: object  # Fraction, or list of ExponentVector for a max
    ok: bool

    def exponent_at(self, nu) -> Fraction:
        """Concrete exponent when the result is a max over N0 = N^nu."""
        if isinstance(self.sup_norm_exponent, Fraction):
            return self.sup_norm_exponent
        nu = Fraction(nu)
        vals = [
            vec["N"] + vec["N0"] * nu for vec in self.sup_norm_exponent
        ]
        return max(vals)

    def to_json(self) -> dict:
        if isinstance(self.sup_norm_exponent, Fraction):
            expo = str(self.sup_norm_exponent)
        else:
            expo = "max(" + ", ".join(str(v) for v in self.sup_norm_exponent) + ")"
        return {
            "case": self.case,
            "ok": self.ok,
            "sup_norm_exponent": expo,
            "steps": [s.to_json() for s in self.steps],
        }

    def render_text(self) -> str:
        """Human-readable derivation transcript."""
        doc = self.to_json()
        lines = [
            f"derivation case: {doc['case']}",
            f"all checks hold: {doc['ok']}",
            f"sup-norm exponent: {doc['sup_norm_exponent']}",
            "",
        ]
        for i, step in enumerate(doc["steps"], start=1):
            lines.append(f"step {i}: {step['op']}")
            for key in ("inputs", "output", "certificate"):
                if key in step:
                    lines.append(f"  {key}: {step[key]}")
        return "\n".join(lines) + "\n"


def _suffices_bound() -> list[ExponentVector]:
    """M^2/Lam + y N0 + M Lam^(1/2) N^(-1/2) + M^2 Lam^2 / N, assembled from
    the amplifier envelope times the spectral prefactor M^2/Lam^2 and the
    norm factor M (listed in display order, duplicates kept separate)."""
    prefactor = monomial(M=3, Lam=-2)  # M^2/Lam^2 from the amplifier, M from <g,g>
    return [v + prefactor for v in AMPL_RHS_TERMS]


def theorem_pipeline(case: str = "main", nu=None) -> DerivationReport:
    """Replay the final optimization: a Fourier branch for large M and an
    amplification branch for small M, joined by an exact domination check.

    case "main": exponent -1/12.  case "case2" (no square divisor M^2 with
    1 < M < N^(1/6)): exponent max(-1/6, -1/4 + nu/4) over N0 = N^nu,
    nu <= 1/2; worst case -1/8.
    """
    steps: list[DerivationStep] = []
    if case == "main":
        thr = Fraction(1, 12)
        # for M >= N^thr, y' >= M^2/N = N^(2 thr - 1) at worst; each branch is
        # evaluated at its extreme point of that range
        branches = fourier_branch_exponents(thr, 2 * thr - 1)
        fourier_exp = max(branches.values())
        steps.append(
            DerivationStep(
                "fourier_large_M",
                {"M_threshold": thr, "y_floor": 2 * thr - 1},
                {"low": branches["low"], "high": branches["high"],
                 "exponent": fourier_exp},
            )
        )
        terms = _suffices_bound()
        steps.append(
            DerivationStep(
                "suffices_inequality",
                {"amplifier_rhs": AMPL_RHS, "prefactor": "M^3/Lam^2"},
                terms,
            )
        )
        terms_sub = [substitute(t, "Lam", LAMBDA_CHOICE) for t in terms]
        steps.append(
            DerivationStep("choose_lambda", {"Lam": LAMBDA_CHOICE}, terms_sub)
        )
        cs = ConstraintSet(("mu", "eta", "nu"))
        cs.box("mu", 0, thr)
        cs.ge({"eta": 1}, Fraction(5, 6))
        cs.le({"eta": 1, "mu": 2}, 1)  # y >= M^2/N
        cs.box("nu", 0, Fraction(1, 2))
        target = monomial(N=-Fraction(1, 6))
        dom = dominated_by(MonomialBound(tuple(terms_sub)), target, cs)
        per_term = [maximize(t, cs) for t in terms_sub]
        steps.append(
            DerivationStep(
                "domination",
                {"target": target, "constraints": "0<=mu<=1/12, 5/6<=eta<=1-2mu, 0<=nu<=1/2"},
                [mm.max_value for mm in per_term],
                certificate=dom,
            )
        )
        # |g'|^2 << M^-1 N^-1/6 and <g,g> <= M give |g| << N^-1/12
        ampl_exp = -Fraction(1, 12)
        ok = dom.ok and fourier_exp == -Fraction(1, 12)
        final = max(fourier_exp, ampl_exp)
        steps.append(
            DerivationStep(
                "conclude",
                {"fourier": fourier_exp, "amplification": ampl_exp},
                final,
            )
        )
        return DerivationReport("main", steps, final, ok)

    if case == "case2":
        thr = Fraction(1, 6)
        branches = fourier_branch_exponents(thr, 2 * thr - 1)
        steps.append(
            DerivationStep(
                "fourier_large_M",
                {"M_threshold": thr, "y_floor": 2 * thr - 1},
                {"low": branches["low"], "high": branches["high"],
                 "exponent": max(branches.values())},
            )
        )
        steps.append(
            DerivationStep(
                "hypothesis", {"no_square_divisor_below": "N^(1/6)"}, "M = 1"
            )
        )
        # Fourier finishes unless y' <= (N N0)^(-1/2); symbolic in nu
        steps.append(
            DerivationStep(
                "fourier_y_large",
                {"y_floor": "(N N0)^(-1/2)"},
                "exponent -(1 - nu)/4 = -1/4 + nu/4 on the low branch",
            )
        )
        terms = [substitute(substitute(t, "M", monomial()), "Lam", LAMBDA_CHOICE)
                 for t in _suffices_bound()]
        steps.append(
            DerivationStep("choose_lambda", {"Lam": LAMBDA_CHOICE, "M": 1}, terms)
        )
        cs = ConstraintSet(("eta", "nu"))
        cs.box("nu", 0, Fraction(1, 2))
        cs.le({"eta": 1}, 1)  # y >= 1/N
        # y <= (N N0)^(-1/2): eta >= 1/2 + nu/2
        cs.ge({"eta": 1, "nu": -Fraction(1, 2)}, Fraction(1, 2))
        targets = [
            monomial(N=-Fraction(1, 3)),
            monomial(N=-Fraction(1, 2), N0=Fraction(1, 2)),
        ]
        assignment = []
        ok = True
        for t in terms:
            doms = [dominated_by(MonomialBound.of(t), tg, cs) for tg in targets]
            hit = next((i for i, d in enumerate(doms) if d.ok), None)
            assignment.append((t, hit, doms[hit] if hit is not None else doms[0]))
            if hit is None:
                ok = False
        steps.append(
            DerivationStep(
                "domination_max_targets",
                {"targets": targets,
                 "constraints": "0<=nu<=1/2, 1/2+nu/2<=eta<=1"},
                [(str(t), i) for t, i, _ in assignment],
                certificate=[d for _, _, d in assignment],
            )
        )
        # square roots of the two targets, joined with the Fourier branches
        final_vectors = [
            monomial(N=-Fraction(1, 6)),
            monomial(N=-Fraction(1, 4), N0=Fraction(1, 4)),
        ]
        steps.append(
            DerivationStep(
                "conclude",
                {"amplification": targets, "fourier": "-1/4 + nu/4"},
                final_vectors,
            )
        )
        report = DerivationReport("case2", steps, final_vectors, ok)
        if nu is not None:
            steps.append(
                DerivationStep("evaluate_nu", {"nu": Fraction(nu)},
                               report.exponent_at(nu))
            )
        return report

    raise ConfigError(f"unknown case {case!r}; expected 'main' or 'case2'")
