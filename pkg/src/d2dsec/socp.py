"""Real-valued SOCP description and interior-point solve.

Complex design variables are embedded into the real solver vector with the
standard [Re; Im] isometry. ``AffExpr`` carries complex-valued expressions
that are affine in the real variable vector, which is enough to express
every quadratic form of the surrogate problem as a norm.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

try:
    import clarabel
except ImportError:  # pragma: no cover
    clarabel = None


class AffExpr:
    """Array-valued expression ``coef @ x + const``, affine in the real x.

    coef has shape (*shape, nx) and may be complex; conj() stays affine
    because x is real.
    """

    def __init__(self, coef, const):
        self.coef = np.asarray(coef)
        self.const = np.asarray(const)

    @property
    def shape(self):
        return self.const.shape

    def __add__(self, other):
        if isinstance(other, AffExpr):
            return AffExpr(self.coef + other.coef, self.const + other.const)
        return AffExpr(self.coef, self.const + np.asarray(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, AffExpr):
            return AffExpr(self.coef - other.coef, self.const - other.const)
        return AffExpr(self.coef, self.const - np.asarray(other))

    def __mul__(self, s):
        return AffExpr(self.coef * s, self.const * s)

    __rmul__ = __mul__

    def conj(self):
        return AffExpr(self.coef.conj(), self.const.conj())

    def ravel(self):
        nx = self.coef.shape[-1]
        return AffExpr(self.coef.reshape(-1, nx), self.const.reshape(-1))

    def lmul(self, A):
        """Constant matrix times expression: A @ self (2-D or vector self)."""
        A = np.asarray(A)
        if self.const.ndim == 1:
            return AffExpr(np.einsum("ij,jx->ix", A, self.coef), A @ self.const)
        return AffExpr(np.einsum("ij,jkx->ikx", A, self.coef), A @ self.const)

    def rmul(self, B):
        """Expression times constant: self @ B (2-D self; B matrix or vector)."""
        B = np.asarray(B)
        if B.ndim == 1:
            return AffExpr(np.einsum("ijx,j->ix", self.coef, B), self.const @ B)
        return AffExpr(np.einsum("ijx,jk->ikx", self.coef, B), self.const @ B)

    def vdot(self, a):
        """Scalar expression conj(a)^T self for a constant vector a."""
        ac = np.conj(np.asarray(a))
        return AffExpr(np.einsum("j,jx->x", ac, self.coef), ac @ self.const)

    def entry(self, idx):
        return AffExpr(self.coef[idx], self.const[idx])

    def times_vec(self, a):
        """Scalar expression times a constant vector -> vector expression."""
        a = np.asarray(a)
        return AffExpr(a[:, None] * self.coef[None, :], a * self.const)

    def real_rows(self):
        """Stack [Re; Im] into real affine rows (A, b)."""
        e = self.ravel()
        if np.iscomplexobj(e.coef) or np.iscomplexobj(e.const):
            A = np.vstack([np.real(e.coef), np.imag(e.coef)])
            b = np.concatenate([np.real(e.const), np.imag(e.const)])
        else:
            A, b = e.coef, e.const
        return A.astype(float), b.astype(float)

    def real_row(self):
        """Real part of a scalar expression as a single affine row."""
        e = self.ravel()
        return np.real(e.coef[0]).astype(float), float(np.real(e.const[0]))


def concat(exprs):
    """Stack flattened expressions into one vector expression."""
    parts = [e.ravel() for e in exprs]
    coef = np.vstack([p.coef for p in parts])
    const = np.concatenate([p.const for p in parts])
    return AffExpr(coef, const)


def stack_rows(exprs):
    """Stack vector expressions into a matrix expression (one per row)."""
    coef = np.stack([e.coef for e in exprs])
    const = np.stack([e.const for e in exprs])
    return AffExpr(coef, const)


def const_expr(arr, nx):
    """Constant expression over an nx-dimensional variable vector."""
    arr = np.asarray(arr)
    return AffExpr(np.zeros(arr.shape + (nx,), dtype=arr.dtype), arr)


@dataclass
class ConicProgram:
    """Solver-agnostic real SOCP: maximize c @ x subject to cone constraints."""

    n_vars: int
    objective: np.ndarray
    eqs: list                 # (A, b): A x + b == 0
    ineqs: list               # (A, b): A x + b >= 0
    socs: list                # (Au, bu, at, bt): ||Au x + bu|| <= at @ x + bt
    var_index: dict           # name -> (slice, kind, shape); kind in {real, complex}

    def dump(self, path):
        """Debug dump in a plain coordinate (row col value) text format."""
        with open(path, "w") as f:
            f.write(f"# socp n_vars={self.n_vars}\n")

            def block(tag, A, b):
                A = np.atleast_2d(A)
                f.write(f"{tag} {A.shape[0]} {A.shape[1]}\n")
                for (i, j), val in np.ndenumerate(A):
                    if val != 0:
                        f.write(f"{i} {j} {val:.17g}\n")
                f.write("rhs " + " ".join(f"{v:.17g}" for v in np.atleast_1d(b)) + "\n")

            block("objective", self.objective[None, :], [0.0])
            for A, b in self.eqs:
                block("zero", A, b)
            for A, b in self.ineqs:
                block("nonneg", A, b)
            for Au, bu, at, bt in self.socs:
                block("soc", np.vstack([at[None, :], Au]), np.concatenate([[bt], bu]))


@dataclass
class SolveResult:
    status: str               # optimal | infeasible | numerical_failure
    x: np.ndarray
    objective_value: float
    program: ConicProgram

    def get(self, name):
        """Extract a named variable, undoing the complex embedding."""
        sl, kind, shape = self.program.var_index[name]
        vals = self.x[sl]
        if kind == "complex":
            n = vals.size // 2
            out = vals[:n] + 1j * vals[n:]
        else:
            out = vals
        return out.reshape(shape) if shape else float(out[0])


class SocpBuilder:
    """Incremental builder; declare all variables before writing constraints."""

    def __init__(self):
        self.nx = 0
        self.var_index = {}
        self.eqs = []
        self.ineqs = []
        self.socs = []
        self.objective = None

    def add_var(self, name, shape=(), complex_valued=False):
        size = int(np.prod(shape)) if shape else 1
        width = 2 * size if complex_valued else size
        sl = slice(self.nx, self.nx + width)
        self.var_index[name] = (sl, "complex" if complex_valued else "real", shape)
        self.nx += width
        return sl

    def expr(self, name) -> AffExpr:
        sl, kind, shape = self.var_index[name]
        size = int(np.prod(shape)) if shape else 1
        if kind == "complex":
            coef = np.zeros((size, self.nx), dtype=complex)
            idx = np.arange(size)
            coef[idx, sl.start + idx] = 1.0
            coef[idx, sl.start + size + idx] = 1j
        else:
            coef = np.zeros((size, self.nx))
            idx = np.arange(size)
            coef[idx, sl.start + idx] = 1.0
        const = np.zeros(size, dtype=coef.dtype)
        if shape:
            return AffExpr(coef.reshape(*shape, self.nx), const.reshape(shape))
        return AffExpr(coef, const)

    def scalar_row(self, name, index=0):
        """Unit row selecting one real scalar variable."""
        sl, kind, shape = self.var_index[name]
        a = np.zeros(self.nx)
        a[sl.start + index] = 1.0
        return a

    def add_nonneg(self, a, b):
        self.ineqs.append((np.atleast_2d(np.asarray(a, float)), np.atleast_1d(b).astype(float)))

    def add_eq(self, a, b):
        self.eqs.append((np.atleast_2d(np.asarray(a, float)), np.atleast_1d(b).astype(float)))

    def add_soc(self, u: AffExpr, at, bt):
        """||u|| <= at @ x + bt with u an (possibly complex) expression."""
        Au, bu = u.real_rows()
        self.socs.append((Au, bu, np.asarray(at, float), float(bt)))

    def add_sqnorm_epigraph(self, s_row, u: AffExpr):
        """s >= ||u||^2 as the SOC ||(2u, s-1)|| <= s + 1."""
        Au, bu = u.real_rows()
        Au = np.vstack([2.0 * Au, s_row[None, :]])
        bu = np.concatenate([2.0 * bu, [-1.0]])
        self.socs.append((Au, bu, s_row, 1.0))

    def set_objective(self, c):
        self.objective = np.asarray(c, float)

    def build(self) -> ConicProgram:
        return ConicProgram(n_vars=self.nx, objective=self.objective,
                            eqs=self.eqs, ineqs=self.ineqs, socs=self.socs,
                            var_index=self.var_index)


def solve(cp: ConicProgram, tol=1e-8, max_iter=200) -> SolveResult:
    """Interior-point solve via Clarabel; never raises on solver failure."""
    rows = []
    rhs = []
    cones = []
    for A, b in cp.eqs:
        rows.append(A)
        rhs.append(-b)
        cones.append(clarabel.ZeroConeT(A.shape[0]))
    for A, b in cp.ineqs:
        rows.append(-A)
        rhs.append(b)
        cones.append(clarabel.NonnegativeConeT(A.shape[0]))
    for Au, bu, at, bt in cp.socs:
        rows.append(-np.vstack([at[None, :], Au]))
        rhs.append(np.concatenate([[bt], bu]))
        cones.append(clarabel.SecondOrderConeT(Au.shape[0] + 1))

    A = sp.csc_matrix(np.vstack(rows))
    b = np.concatenate(rhs)
    P = sp.csc_matrix((cp.n_vars, cp.n_vars))
    q = -cp.objective

    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = max_iter
    settings.tol_feas = tol
    settings.tol_gap_abs = tol
    settings.tol_gap_rel = tol

    try:
        solver = clarabel.DefaultSolver(P, q, A, b, cones, settings)
        sol = solver.solve()
    except BaseException:
        return SolveResult("numerical_failure", np.zeros(cp.n_vars), np.nan, cp)

    status = str(sol.status)
    x = np.asarray(sol.x, dtype=float)
    if status in ("Solved", "AlmostSolved"):
        return SolveResult("optimal", x, float(cp.objective @ x), cp)
    if "Infeasible" in status:
        return SolveResult("infeasible", x, np.nan, cp)
    return SolveResult("numerical_failure", x, np.nan, cp)
