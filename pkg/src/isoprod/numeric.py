"""Small dense linear algebra, symmetric functions and seeded sampling.

Everything here works on plain Python floats: the matrices are at most a
dozen rows and the per-element overhead of numpy would dominate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

Matrix = list[list[float]]


class ConvergenceError(RuntimeError):
    pass


# ------------------------------------------------------------------ tolerance


@dataclass(frozen=True)
class Tolerance:
    """Pass iff |err| <= atol + rtol * scale."""

    atol: float = 1e-9
    rtol: float = 1e-6

    def bound(self, scale: float) -> float:
        return self.atol + self.rtol * abs(scale)

    def ok(self, err: float, scale: float) -> bool:
        return abs(err) <= self.bound(scale)

    def to_dict(self) -> dict:
        return {"atol": self.atol, "rtol": self.rtol}


# ----------------------------------------------------------- symmetric matrix


@dataclass(frozen=True)
class SymmetricMatrix:
    """Symmetric n x n matrix stored as its row-major upper triangle."""

    n: int
    upper: tuple[float, ...]

    def __post_init__(self):
        upper = tuple(float(v) for v in self.upper)
        if len(upper) != self.n * (self.n + 1) // 2:
            raise ValueError("upper triangle has the wrong length")
        if not all(math.isfinite(v) for v in upper):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "SymmetricMatrix":
        """Build from a square array, reading only the upper triangle."""
        n = len(rows)
        return cls(n, tuple(rows[i][j] for i in range(n) for j in range(i, n)))

    def _index(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return i * self.n - i * (i - 1) // 2 + (j - i)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return self.upper[self._index(*ij)]

    def rows(self) -> Matrix:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def max_abs(self) -> float:
        return max((abs(v) for v in self.upper), default=0.0)

    def trace(self) -> float:
        return math.fsum(self[i, i] for i in range(self.n))

    def quadratic_form(self, u: Sequence[float], v: Sequence[float] | None = None) -> float:
        """u^T A v (v defaults to u)."""
        v = u if v is None else v
        return math.fsum(u[i] * self[i, j] * v[j] for i in range(self.n) for j in range(self.n))


def _as_rows(A) -> Matrix:
    if isinstance(A, SymmetricMatrix):
        return A.rows()
    return [[float(v) for v in row] for row in A]


# ----------------------------------------------------------------- eigensolver


def jacobi_eigh(A, *, tol: float = 1e-12, max_sweeps: int = 50) -> tuple[list[float], Matrix]:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ascending eigenvalues and a matrix whose columns are the
    matching orthonormal eigenvectors. Iterates until the off-diagonal
    Frobenius norm drops below ``tol * ||A||_F``.
    """
    a = _as_rows(A)
    n = len(a)
    q = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    norm = math.sqrt(math.fsum(v * v for row in a for v in row))
    threshold = tol * norm

    def off():
        return math.sqrt(2.0 * math.fsum(a[p][r] ** 2 for p in range(n) for r in range(p + 1, n)))

    sweeps = 0
    while off() > threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off():.3e})")
        sweeps += 1
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p][r]
                if apr == 0.0:
                    continue
                theta = (a[r][r] - a[p][p]) / (2.0 * apr)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k == p or k == r:
                        continue
                    akp, akr = a[k][p], a[k][r]
                    a[k][p] = a[p][k] = c * akp - s * akr
                    a[k][r] = a[r][k] = s * akp + c * akr
                a[p][p] -= t * apr
                a[r][r] += t * apr
                a[p][r] = a[r][p] = 0.0
                for k in range(n):
                    qkp, qkr = q[k][p], q[k][r]
                    q[k][p] = c * qkp - s * qkr
                    q[k][r] = s * qkp + c * qkr

    order = sorted(range(n), key=lambda i: a[i][i])
    values = [a[i][i] for i in order]
    vectors = [[q[k][i] for i in order] for k in range(n)]
    return values, vectors


def eigenvalues_symmetric(A) -> list[float]:
    return jacobi_eigh(A)[0]


# ------------------------------------------------------- symmetric functions


def elementary_symmetric(values: Sequence[float]) -> list[float]:
    """[e_1, ..., e_n] via the Pascal-triangle recurrence e_j <- e_j + v*e_{j-1}."""
    e = [1.0] + [0.0] * len(values)
    for k, v in enumerate(values, start=1):
        for j in range(k, 0, -1):
            e[j] += v * e[j - 1]
    return e[1:]


def elementary_symmetric_means(values: Sequence[float]) -> list[float]:
    """K_j = e_j / C(n, j)."""
    n = len(values)
    return [ej / math.comb(n, j) for j, ej in enumerate(elementary_symmetric(values), start=1)]


def determinant(A) -> float:
    """LU with partial pivoting."""
    a = _as_rows(A)
    n = len(a)
    det = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0.0:
            return 0.0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            m = a[r][col] / p
            if m != 0.0:
                row_r, row_c = a[r], a[col]
                for k in range(col + 1, n):
                    row_r[k] -= m * row_c[k]
    return det


MAX_MINOR_DIM = 12


def principal_minor_means(A) -> list[float]:
    """K_j as the mean of all j x j principal minors."""
    a = _as_rows(A)
    n = len(a)
    if n > MAX_MINOR_DIM:
        raise ValueError(f"principal-minor enumeration limited to n <= {MAX_MINOR_DIM}")
    out = []
    for j in range(1, n + 1):
        total = math.fsum(
            determinant([[a[r][c] for c in idx] for r in idx]) for idx in combinations(range(n), j)
        )
        out.append(total / math.comb(n, j))
    return out


# ------------------------------------------------------------------- sampling

_MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** 1.0 (Blackman & Vigna), seeded through SplitMix64."""

    def __init__(self, seed: int):
        sm = int(seed) & _MASK
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self.s = s

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform in the open interval (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()


@dataclass(frozen=True)
class SamplePlan:
    n: int
    count: int = 128
    lo: float = 0.1
    hi: float = 10.0
    seed: int = 42
    distribution: str = field(default="log-uniform")

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sample plan dimension must be >= 1")
        if self.count < 1:
            raise ValueError("sample plan count must be >= 1")
        if not 0 < self.lo < self.hi:
            raise ValueError("sample plan needs 0 < lo < hi")
        if self.distribution != "log-uniform":
            raise ValueError("only log-uniform sampling is supported")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "lo": self.lo,
            "hi": self.hi,
            "seed": self.seed,
            "distribution": self.distribution,
        }


def iter_points(plan: SamplePlan) -> Iterator[tuple[float, ...]]:
    rng = Xoshiro256(plan.seed)
    llo, lhi = math.log(plan.lo), math.log(plan.hi)
    for _ in range(plan.count):
        pt = []
        for _ in range(plan.n):
            v = math.exp(llo + (lhi - llo) * rng.random())
            pt.append(min(max(v, math.nextafter(plan.lo, math.inf)), math.nextafter(plan.hi, 0.0)))
        yield tuple(pt)


def sample_points(plan: SamplePlan) -> list[tuple[float, ...]]:
    """Deterministic log-uniform points strictly inside the plan's box."""
    return list(iter_points(plan))
