#!/usr/bin/env python3
"""Reference values for the C++ test suites, computed with independent tools
(scipy/mpmath) rather than the library under test.  Rerun to regenerate the
constants that the tests freeze as literals.
"""
import numpy as np
import mpmath as mp
from scipy import optimize

mp.mp.dps = 30

CX, CY, R = 0.45, 0.5, 0.3


def on_circle(t):
    return CX + R * mp.cos(t), CY + R * mp.sin(t)


def boundary_integral(fn):
    # fn(x, y, nx, ny, t) -> scalar; integrate over the circle w.r.t. arc length
    return mp.quad(lambda t: fn(*on_circle(t), mp.cos(t), mp.sin(t), t) * R,
                   [0, 2 * mp.pi])


def domain_integral(fn):
    # fn(x, y) -> scalar; integrate over the disk in polar coordinates
    def outer(t):
        return mp.quad(lambda rho: fn(CX + rho * mp.cos(t), CY + rho * mp.sin(t)) * rho,
                       [0, R])
    return mp.quad(outer, [0, 2 * mp.pi])


def show(label, value):
    print(f"{label} = {mp.nstr(value, 17)}")


# --- divergence-theorem case: f=1, g=0, theta(x)=x ------------------------
show("divergence_case_both_sides (2*pi*R^2)", 2 * mp.pi * R ** 2)

# --- structure case: theta = rot90(x-c)/R, f = exp(x)*sin(y) ---------------
val = domain_integral(lambda x, y: mp.e ** x * mp.sin(y) * (-(y - CY) / R)
                      + mp.e ** x * mp.cos(y) * ((x - CX) / R))
show("structure_case_domain_value (expect 0)", val)

# --- tangential Green, g = exp(x)*cos(2y) ----------------------------------
def g(x, y):
    return mp.e ** x * mp.cos(2 * y)

def grad_g(x, y):
    return mp.e ** x * mp.cos(2 * y), -2 * mp.e ** x * mp.sin(2 * y)

# radial theta: both sides equal  ∮ (∂_n g + g/R) ds
rad = boundary_integral(lambda x, y, nx, ny, t:
                        grad_g(x, y)[0] * nx + grad_g(x, y)[1] * ny + g(x, y) / R)
show("tangential_green_radial_value", rad)

# general theta = (sin(pi x) y + 0.2, cos(pi y) x - 0.1): RHS form
def theta(x, y):
    return mp.sin(mp.pi * x) * y + mp.mpf("0.2"), mp.cos(mp.pi * y) * x - mp.mpf("0.1")

gen = boundary_integral(lambda x, y, nx, ny, t:
                        (grad_g(x, y)[0] * nx + grad_g(x, y)[1] * ny + g(x, y) / R)
                        * (theta(x, y)[0] * nx + theta(x, y)[1] * ny))
show("tangential_green_general_value", gen)

# corollary integral: alpha = 1 + 0.5 sin(3t)-like smooth field alpha(x,y)=1+0.5*x*y
def alpha(x, y):
    return 1 + mp.mpf("0.5") * x * y

cor = boundary_integral(lambda x, y, nx, ny, t:
                        alpha(x, y) / R * (theta(x, y)[0] * nx + theta(x, y)[1] * ny))
show("corollary_integral_value", cor)

# --- equilibrium residual pilot: u = x^2 y, p = sin(x) cos(y) --------------
# consistent data: f = -lap(u) + u, u_d = u + (-lap(p) + p)/2; residual of
# -div(S1) + S0 sampled with 2nd-order central differences should be O(d^2);
# the negative control (u_d = u + 1) must stay O(1).
def fields(x, y, ud_mode):
    u = x * x * y
    ux, uy = 2 * x * y, x * x
    lap_u = 2 * y
    glap_u = np.array([0.0, 2.0])
    p = np.sin(x) * np.cos(y)
    px, py = np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y)
    lap_p = -2 * np.sin(x) * np.cos(y)
    glap_p = np.array([-2 * np.cos(x) * np.cos(y), 2 * np.sin(x) * np.sin(y)])
    f = -lap_u + u
    gf = np.array([ux, uy]) - glap_u
    if ud_mode == "consistent":
        ud = u + (-lap_p + p) / 2
        gud = np.array([ux, uy]) + (np.array([px, py]) - glap_p) / 2
    else:
        ud = u + 1
        gud = np.array([ux, uy])
    return u, np.array([ux, uy]), p, np.array([px, py]), f, gf, ud, gud


def S1(x, y, ud_mode):
    u, gu, p, gp, f, gf, ud, gud = fields(x, y, ud_mode)
    return (-np.outer(gp, gu) - np.outer(gu, gp)
            + (gu @ gp + u * p - f * p + (u - ud) ** 2) * np.eye(2))


def S0(x, y, ud_mode):
    u, gu, p, gp, f, gf, ud, gud = fields(x, y, ud_mode)
    return -2 * (u - ud) * gud - p * gf


def residual_max(delta, ud_mode):
    worst = 0.0
    for x in np.linspace(0.15, 0.85, 9):
        for y in np.linspace(0.15, 0.85, 9):
            div = ((S1(x + delta, y, ud_mode) - S1(x - delta, y, ud_mode))[:, 0]
                   + (S1(x, y + delta, ud_mode) - S1(x, y - delta, ud_mode))[:, 1]) / (2 * delta)
            r = -div + S0(x, y, ud_mode)
            worst = max(worst, np.abs(r).max())
    return worst


r1, r2 = residual_max(1e-2, "consistent"), residual_max(5e-3, "consistent")
print(f"equilibrium_residual d=1e-2: {r1:.6e}  d=5e-3: {r2:.6e}  order: {np.log2(r1 / r2):.3f}")
print(f"equilibrium_negative_control d=1e-2: {residual_max(1e-2, 'offset'):.6e}")

# --- ellipse signed distances ----------------------------------------------
def ellipse_sdf(q, c, a, b, ang):
    ca, sa = np.cos(ang), np.sin(ang)
    lx = ca * (q[0] - c[0]) + sa * (q[1] - c[1])
    ly = -sa * (q[0] - c[0]) + ca * (q[1] - c[1])
    ts = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    d2 = (a * np.cos(ts) - lx) ** 2 + (b * np.sin(ts) - ly) ** 2
    t0 = ts[np.argmin(d2)]
    res = optimize.minimize_scalar(
        lambda t: (a * np.cos(t) - lx) ** 2 + (b * np.sin(t) - ly) ** 2,
        bracket=(t0 - 0.1, t0, t0 + 0.1), method="brent",
        options={"xtol": 1e-14})
    d = np.sqrt(res.fun)
    inside = (lx / a) ** 2 + (ly / b) ** 2 < 1
    return -d if inside else d


ell = dict(c=(0.5, 0.5), a=0.3, b=0.15, ang=0.5)
for q in [(0.9, 0.8), (0.2, 0.7), (0.55, 0.52), (0.5, 0.5)]:
    print(f"ellipse_sdf{q} = {ellipse_sdf(q, **ell):.15f}")
