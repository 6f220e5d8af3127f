"""Brute-force reference values for the golden file.

Independent of the Rust crates: its own grid layout, analytic Jacobian,
minimum-norm Newton steps (no gauge row), perturbation series by
pseudo-inverse, dense numpy eigensolves and a plain RK4 loop.

    python3 oracles/oracle.py > oracles/goldens.json
"""

import json
import math
import sys

import numpy as np

N = 10


class Lattice:
    def __init__(self, half_width, ncomp):
        r = range(-half_width + 1, half_width)
        self.nodes = [(n, m) for m in r for n in r]
        self.pos = {nd: k for k, nd in enumerate(self.nodes)}
        rows, cols = [], []
        for k, (n, m) in enumerate(self.nodes):
            for nb in ((n + 1, m), (n - 1, m), (n, m + 1), (n, m - 1)):
                if nb in self.pos:
                    rows.append(k)
                    cols.append(self.pos[nb])
        size = len(self.nodes)
        self.hop = np.zeros((size, size))
        self.hop[rows, cols] = 1.0
        self.ncomp = ncomp
        self.size = size


S0 = [(-1, 0), (0, -1), (1, 0), (0, 1)]


class Model:
    def __init__(self, lat, beta=0.0, omega=1.0, charge_sign=1):
        self.lat = lat
        self.beta = beta
        self.omega = omega
        self.sign = charge_sign

    def base(self):
        return [1.0, self.omega][: self.lat.ncomp]

    def nonlinear(self, u):
        """Cubic part of the residual (everything except hopping), u shape (ncomp, size)."""
        out = np.empty_like(u)
        for c in range(self.lat.ncomp):
            other = np.abs(u[1 - c]) ** 2 if self.lat.ncomp == 2 else 0.0
            out[c] = (self.base()[c] - np.abs(u[c]) ** 2 - self.beta * other) * u[c]
        return out

    def residual(self, u, eps):
        return self.nonlinear(u) - eps * (self.lat.hop @ u.T).T

    def jacobian(self, u, eps):
        """Real Jacobian of the residual in block order [Re c0, Im c0, Re c1, Im c1]."""
        nc, s = self.lat.ncomp, self.lat.size
        J = np.zeros((2 * nc * s, 2 * nc * s))
        for c in range(nc):
            w = u[c]
            other = np.abs(u[1 - c]) ** 2 if nc == 2 else 0.0
            d = self.base()[c] - 2 * np.abs(w) ** 2 - self.beta * other
            e = -(w ** 2)
            # dF = d dw + e dw̄ ; dw = dx + i dy
            blk = slice(2 * c * s, 2 * c * s + s), slice(2 * c * s + s, 2 * c * s + 2 * s)
            rr, ri = blk
            dx = d + e
            dy = 1j * (d - e)
            J[rr, rr] += np.diag(dx.real) - eps * self.lat.hop
            J[ri, rr] += np.diag(dx.imag)
            J[rr, ri] += np.diag(dy.real)
            J[ri, ri] += np.diag(dy.imag) - eps * self.lat.hop
            if nc == 2:
                o = u[1 - c]
                # dF_c/do = −β w ō, dF_c/dō = −β w o
                f = -self.beta * w * np.conj(o)
                g = -self.beta * w * o
                ox = f + g
                oy = 1j * (f - g)
                orr = slice(2 * (1 - c) * s, 2 * (1 - c) * s + s)
                ori = slice(2 * (1 - c) * s + s, 2 * (1 - c) * s + 2 * s)
                J[rr, orr] += np.diag(ox.real)
                J[ri, orr] += np.diag(ox.imag)
                J[rr, ori] += np.diag(oy.real)
                J[ri, ori] += np.diag(oy.imag)
        return J

    def pack(self, u):
        return np.concatenate([np.concatenate([u[c].real, u[c].imag]) for c in range(self.lat.ncomp)])

    def unpack(self, x):
        s = self.lat.size
        return np.array([x[2 * c * s: 2 * c * s + s] + 1j * x[2 * c * s + s: 2 * c * s + 2 * s]
                         for c in range(self.lat.ncomp)])

    def seed(self, a=1.0, b=1.0):
        u = np.zeros((self.lat.ncomp, self.lat.size), dtype=complex)
        for j, nd in enumerate(S0):
            u[0, self.lat.pos[nd]] = a * 1j ** j
            if self.lat.ncomp == 2:
                u[1, self.lat.pos[nd]] = b * (1j ** j if self.sign > 0 else (-1j) ** j)
        return u

    def newton(self, u, eps, tol=1e-12):
        x = self.pack(u)
        for _ in range(60):
            f = self.pack(self.residual(self.unpack(x), eps))
            if np.max(np.abs(f)) < tol:
                break
            step = np.linalg.lstsq(self.jacobian(self.unpack(x), eps), f, rcond=1e-12)[0]
            x = x - step
        res = np.max(np.abs(self.pack(self.residual(self.unpack(x), eps))))
        assert res < 1e-10, res
        return self.unpack(x)

    def continue_to(self, u, eps, step=0.01):
        e = 0.0
        while e < eps - 1e-12:
            e = min(eps, e + step)
            u = self.newton(u, e)
        return u

    def generator(self, u, eps):
        """Real generator of u̇ = −iF: ẋ = ∂F_im, ẏ = −∂F_re."""
        J = self.jacobian(u, eps)
        s, nc = self.lat.size, self.lat.ncomp
        A = np.empty_like(J)
        for c in range(nc):
            re = slice(2 * c * s, 2 * c * s + s)
            im = slice(2 * c * s + s, 2 * c * s + 2 * s)
            A[re] = J[im]
            A[im] = -J[re]
        return A

    def series2(self, u0):
        """Second-order perturbation series by pseudo-inverse of the ε=0 Jacobian."""
        J0 = self.jacobian(u0, 0.0)
        pinv = np.linalg.pinv(J0, rcond=1e-10)
        hop = lambda u: (self.lat.hop @ u.T).T
        u1 = self.unpack(pinv @ self.pack(hop(u0)))
        n2 = 0.5 * (self.nonlinear(u0 + u1) + self.nonlinear(u0 - u1)) - self.nonlinear(u0)
        u2 = self.unpack(pinv @ self.pack(hop(u1) - n2))
        return u1, u2


def g2(theta):
    t = lambda j: theta[j % 4]
    return [2 * math.sin(t(j) - t(j + 1)) + 2 * math.sin(t(j) - t(j - 1)) + math.sin(t(j) - t(j + 2))
            for j in range(4)]


def m2_by_finite_differences(theta):
    h = 1e-5
    M = np.zeros((4, 4))
    for k in range(4):
        p, q = list(theta), list(theta)
        p[k] += h
        q[k] -= h
        M[:, k] = (np.array(g2(p)) - np.array(g2(q))) / (2 * h)
    return M


def rk4_growth(model, u, eps, rate_hint, horizon, dt=0.01, amp=1e-8):
    A = model.generator(u, eps)
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmax(vals.real))
    v = vecs[:, k]
    v = v * np.conj(v[np.argmax(np.abs(v))])
    v = v.real / np.linalg.norm(v.real)
    base = model.pack(u)
    x = base + amp * np.linalg.norm(base) * v
    rhs = lambda z: (lambda f: np.concatenate(
        [np.concatenate([f[c].imag, -f[c].real]) for c in range(model.lat.ncomp)]))(
        model.residual(model.unpack(z), eps))
    steps = int(math.ceil(horizon / dt))
    dt = horizon / steps
    ts, ys = [], []
    p0 = np.sum(x ** 2)
    drift = 0.0
    for i in range(1, steps + 1):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if i % 10 == 0:
            ts.append(i * dt)
            ys.append(math.log(np.linalg.norm(x - base)))
            drift = max(drift, abs(np.sum(x ** 2) - p0) / p0)
    ts, ys = np.array(ts), np.array(ys)
    keep = ts >= 0.25 * horizon
    slope = np.polyfit(ts[keep], ys[keep], 1)[0]
    return float(slope), float(drift), float(vals.real[k])


def main():
    out = {}

    theta = [0.0, math.pi / 3, math.pi, math.pi]
    out["g2_0_pi3_pi_pi"] = g2(theta)

    fam = [0.0, math.pi / 3, math.pi, math.pi + math.pi / 3]
    out["m2_eigenvalues_pi3"] = sorted(np.linalg.eigvalsh(m2_by_finite_differences(fam)).tolist())

    # Second-order series, scalar: residual at ε and ε/2.
    lat1 = Lattice(N, 1)
    sc = Model(lat1)
    u0 = sc.seed()
    u1, u2 = sc.series2(u0)
    res = {}
    for eps in (0.05, 0.025):
        r = sc.residual(u0 + eps * u1 + eps ** 2 * u2, eps)
        res[str(eps)] = float(max(np.max(np.abs(r.real)), np.max(np.abs(r.imag))))
    out["scalar_series2_residual"] = res

    # Second-order S0 coefficients, vector (1,1), β = 2/3, ω = 1.
    lat2 = Lattice(N, 2)
    beta = 2.0 / 3.0
    a = math.sqrt(1.0 / (1.0 + beta))
    vec = Model(lat2, beta=beta, omega=1.0, charge_sign=1)
    v0 = vec.seed(a, a)
    _, v2 = vec.series2(v0)
    node = lat2.pos[S0[1]]
    out["vector_11_s2"] = float((v2[0, node] / v0[0, node]).real * a)
    out["vector_11_r2"] = float((v2[1, node] / v0[1, node]).real * a)

    # Nondegeneracy of the Newton state at ε = 0.1.
    u = sc.continue_to(u0, 0.1)
    p = np.sum(np.abs(u[0]) ** 2)
    q = np.sum(u[0] ** 2)
    out["nondegeneracy_eps_0.1"] = float(p * p - abs(q) ** 2)

    # β = 2, ω = 1: λ5..8 from the quadratic at ε = 0.1.
    b2 = 2.0
    a2 = 1.0 / (1.0 + b2)
    gam = -(a2 + a2) + math.sqrt(4 * a2 * a2 * b2 * b2)
    out["beta2_lambda5_eps_0.1"] = math.sqrt(2 * gam) * 0.1

    # β = 2, (1,−1), ε = 0.05: spectral rate and RK4 fit.
    a = math.sqrt(1.0 / 3.0)
    hid = Model(lat2, beta=2.0, omega=1.0, charge_sign=-1)
    w = hid.continue_to(hid.seed(a, a), 0.05)
    A = hid.generator(w, 0.05)
    rate = float(np.max(np.linalg.eigvals(A).real))
    fit, drift, _ = rk4_growth(hid, w, 0.05, rate, horizon=max(60.0, 4.0 / rate))
    out["beta2_hidden_eps_0.05"] = {"spectral_rate": rate, "rk4_rate": fit, "power_drift": drift}

    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
