"""From-definition oracles for sprays, volumes, S and E.

These never touch the scalar jets: the spray comes from automatic
differentiation of F^2, the Busemann-Hausdorff volume from a direct
quadrature over the indicatrix, and E from finite differences of S.
"""
from functools import lru_cache
import math

import numpy as np
import jax
import jax.numpy as jnp

from .errors import IllConditioned
from .geometry import _fd_jacobian

jax.config.update("jax_enable_x64", True)

G_COND_LIMIT = 1e10
# second differences at 1e-4 |y| sit on the roundoff floor (~1e-7 absolute in E)
Y_STEP = 2e-3
X_STEP = 1e-3


@lru_cache(maxsize=None)
def _kernels(phi, n):
    """Jitted (G, divG, g) for one phi and dimension.

    F^2 is built from fields linearised at the base point; G only needs first
    x-derivatives, so the linearisation is exact for it.
    """

    def F2(dx, y, a0, da, b0, db):
        a = a0 + da @ dx
        b = b0 + db @ dx
        alpha = jnp.sqrt(y @ a @ y)
        return (alpha * phi.evaluate(b @ y / alpha, xp=jnp)) ** 2

    grad_y = jax.grad(F2, 1)

    def spray(dx, y, a0, da, b0, db):
        g = 0.5 * jax.hessian(F2, 1)(dx, y, a0, da, b0, db)
        mixed = jax.jacfwd(grad_y, 0)(dx, y, a0, da, b0, db)
        rhs = mixed @ y - jax.grad(F2, 0)(dx, y, a0, da, b0, db)
        return 0.25 * jnp.linalg.solve(g, rhs)

    def div(dx, y, a0, da, b0, db):
        return jnp.trace(jax.jacfwd(spray, 1)(dx, y, a0, da, b0, db))

    def g_of(dx, y, a0, da, b0, db):
        return 0.5 * jax.hessian(F2, 1)(dx, y, a0, da, b0, db)

    batched = (None, 0, None, None, None, None)
    return {
        "G": jax.jit(jax.vmap(spray, in_axes=batched)),
        "div": jax.jit(jax.vmap(div, in_axes=batched)),
        "g": jax.jit(jax.vmap(g_of, in_axes=batched)),
    }


def field_jets(fixture, x):
    """(a0, da, b0, db) at x; symbolic fields are differentiated by jax."""
    x = np.asarray(x, dtype=float)
    n = fixture.n
    out = []
    for field, getter, shape in (
        (fixture.metric, fixture.metric.a, (n, n)),
        (fixture.form, fixture.form.b, (n,)),
    ):
        if field.expr is not None:
            fn = field.jax_fn()
            f = lambda z, fn=fn, shape=shape: jnp.reshape(jnp.asarray(fn(z), dtype=jnp.float64), shape)
            xj = jnp.asarray(x)
            val = np.asarray(f(xj))
            jac = np.asarray(jax.jacfwd(f)(xj))
        else:
            val = getter(x)
            jac = _fd_jacobian(getter, x, shape)
        out += [val, jac]
    return tuple(out)


class SprayOracle:
    """Spray, divergence and fundamental tensor of F from F^2 directly."""

    def __init__(self, fixture):
        self.fixture = fixture
        self.kern = _kernels(fixture.phi, fixture.n)
        self._cache = {}

    def _fields(self, x):
        key = tuple(np.asarray(x, dtype=float))
        if key not in self._cache:
            self._cache[key] = tuple(jnp.asarray(v) for v in field_jets(self.fixture, x))
        return self._cache[key]

    def _call(self, name, x, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        dx = jnp.zeros(self.fixture.n)
        return np.asarray(self.kern[name](dx, jnp.asarray(Y), *self._fields(x)))

    def spray(self, x, y):
        g = self._call("g", x, y)[0]
        if np.linalg.cond(g) > G_COND_LIMIT:
            raise IllConditioned(f"fundamental tensor condition number {np.linalg.cond(g):.3g}")
        return self._call("G", x, y)[0]

    def divergence(self, x, Y):
        """dG^m/dy^m for one direction or a stack of directions."""
        Y = np.asarray(Y, dtype=float)
        out = self._call("div", x, Y)
        return float(out[0]) if Y.ndim == 1 else out


def finsler_spray_oracle(fixture, x, y):
    return SprayOracle(fixture).spray(x, y)


# --- Busemann-Hausdorff volume by indicatrix quadrature ---------------------

@lru_cache(maxsize=None)
def _sphere_rule(n, n_polar=96, n_azimuth=192):
    """Nodes u on the Euclidean unit sphere and weights summing to its area."""
    if n == 2:
        t = 2 * np.pi * np.arange(n_azimuth * 2) / (n_azimuth * 2)
        U = np.stack([np.cos(t), np.sin(t)], axis=1)
        w = np.full(len(t), 2 * np.pi / len(t))
        return U, w
    if n == 3:
        z, wz = np.polynomial.legendre.leggauss(n_polar)
        t = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
        Z, T = np.meshgrid(z, t, indexing="ij")
        R = np.sqrt(1 - Z**2)
        U = np.stack([R * np.cos(T), R * np.sin(T), Z], axis=-1).reshape(-1, 3)
        w = np.outer(wz, np.full(n_azimuth, 2 * np.pi / n_azimuth)).ravel()
        return U, w
    raise NotImplementedError("indicatrix quadrature is implemented for n = 2, 3")


def indicatrix_volume(phi, a, b, n):
    """Lebesgue volume of {y : F(y) < 1} = (1/n) * integral of F^{-n} over the unit sphere."""
    U, w = _sphere_rule(n)
    alpha = np.sqrt(np.einsum("pi,ij,pj->p", U, a, U))
    F = alpha * phi.evaluate((U @ b) / alpha)
    if np.any(F <= 0):
        raise IllConditioned("F is not positive on the unit sphere")
    return float(w @ F ** (-n)) / n


def unit_ball_volume(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sigma_bh_oracle(fixture, x):
    """sigma_BH(x) from the indicatrix volume, including any volume shift.

    Above three dimensions the sphere quadrature is not available and the
    one-dimensional reduction in :func:`abmetric.curvature.sigma_bh` is used.
    """
    x = np.asarray(x, dtype=float)
    if fixture.n > 3:
        from .curvature import sigma_bh

        return sigma_bh(fixture, x)
    a = fixture.metric.a(x)
    b = fixture.form.b(x)
    psi, _ = fixture.shift(x)
    return unit_ball_volume(fixture.n) / indicatrix_volume(fixture.phi, a, b, fixture.n) * math.exp(psi)


def grad_log_sigma_oracle(fixture, x, h=X_STEP):
    """d_m ln sigma_BH by central differences in x with one Richardson level."""
    x = np.asarray(x, dtype=float)
    h = h * (1.0 + float(np.linalg.norm(x)))
    out = np.empty(fixture.n)
    for m in range(fixture.n):
        e = np.zeros(fixture.n)
        e[m] = 1.0

        def central(step):
            return (
                math.log(sigma_bh_oracle(fixture, x + step * e))
                - math.log(sigma_bh_oracle(fixture, x - step * e))
            ) / (2 * step)

        out[m] = (4 * central(h / 2) - central(h)) / 3
    return out


# --- S and E ----------------------------------------------------------------

class SOracle:
    """S(x, y) = dG^m/dy^m - y^m d_m ln sigma_BH, all from definitions."""

    def __init__(self, fixture):
        self.fixture = fixture
        self.spray = SprayOracle(fixture)
        self._grad = {}

    def grad_log_sigma(self, x):
        key = tuple(np.asarray(x, dtype=float))
        if key not in self._grad:
            self._grad[key] = grad_log_sigma_oracle(self.fixture, x)
        return self._grad[key]

    def __call__(self, x, Y):
        Y = np.asarray(Y, dtype=float)
        div = self.spray.divergence(x, np.atleast_2d(Y))
        S = div - np.atleast_2d(Y) @ self.grad_log_sigma(x)
        return float(S[0]) if Y.ndim == 1 else S


def s_curvature_oracle(fixture, x, y):
    return SOracle(fixture)(x, y)


def _hessian_stencil(y, h):
    """Stencil points for central second differences at steps h and h/2."""
    n = len(y)
    pts = [y]
    for step in (h, h / 2):
        for i in range(n):
            for j in range(i, n):
                ei = np.zeros(n)
                ei[i] = step
                ej = np.zeros(n)
                ej[j] = step
                if i == j:
                    pts += [y + ei, y - ei]
                else:
                    pts += [y + ei + ej, y + ei - ej, y - ei + ej, y - ei - ej]
    return np.array(pts)


def fd_hessian(fn, y, rel_step=Y_STEP, symmetrize=True):
    """Richardson-extrapolated Hessian of a batched scalar function of y.

    ``fn`` maps an (m, n) array of points to m values.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    h = rel_step * float(np.linalg.norm(y))
    vals = np.asarray(fn(_hessian_stencil(y, h)), dtype=float)
    f0 = vals[0]
    pos = 1
    H = []
    for step in (h, h / 2):
        M = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    M[i, i] = (vals[pos] + vals[pos + 1] - 2 * f0) / step**2
                    pos += 2
                else:
                    pp, pm, mp, mm = vals[pos : pos + 4]
                    M[i, j] = M[j, i] = (pp - pm - mp + mm) / (4 * step**2)
                    pos += 4
        H.append(M)
    out = (4 * H[1] - H[0]) / 3
    return 0.5 * (out + out.T) if symmetrize else out


def e_curvature_oracle(s_fn, x, y):
    """E_ij = 1/2 d^2 S / dy^i dy^j with S evaluated on a y-stencil."""
    return 0.5 * fd_hessian(lambda Y: s_fn(x, Y), y)


# --- fundamental and angular tensors ------------------------------------------

def fundamental_tensor(F, y, rel_step=Y_STEP):
    """g_ij = 1/2 d^2 F^2 / dy^i dy^j for a scalar callable ``F(y)``."""
    y = np.asarray(y, dtype=float)
    g = 0.5 * fd_hessian(lambda Y: np.array([F(v) ** 2 for v in Y]), y, rel_step)
    if np.linalg.cond(g) > G_COND_LIMIT:
        raise IllConditioned(f"fundamental tensor condition number {np.linalg.cond(g):.3g}")
    return g


def angular_metric(g, y):
    """h = g - (g y)(g y)^T / (y^T g y); the denominator is F^2 and makes h y = 0 exactly."""
    g = np.asarray(g, dtype=float)
    y = np.asarray(y, dtype=float)
    gy = g @ y
    return g - np.outer(gy, gy) / float(y @ gy)


def distortion(g, sigma):
    """tau = ln(sqrt(det g) / sigma)."""
    return 0.5 * math.log(float(np.linalg.det(g))) - math.log(sigma)
