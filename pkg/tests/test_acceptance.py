"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import itertools
import sys
import time

import numpy as np
import pytest

from triobose import exact as ex
from triobose import gaussian as ga
from triobose import rdm
from triobose import spectral as sp
from triobose import wavefunction as wf
from triobose.model import energy_harmonic, equilibrium


def report(number, ok, detail, capsys=None):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def criterion_1(capsys=None):
    t0 = time.perf_counter()
    d1, d2 = sp.asymptotic_spectra(sp.build_quadrature(8.0, 200))
    dt = time.perf_counter() - t0
    l1, l2 = d1.eigenvalues[0], d2.eigenvalues[0]
    ok = abs(l1 - 0.3193) <= 1e-3 and abs(l2 - 0.3249) <= 1e-3 and dt < 5
    report(1, ok, f"lambda0(1)={l1:.5f} lambda0(2)={l2:.5f} runtime={dt:.2f}s", capsys)


def criterion_2(capsys=None):
    rep = sp.asymptotic_occupancies()
    ok = abs(rep.residual_mass - 0.03) <= 0.005
    report(2, ok, f"residual mass={rep.residual_mass:.5f}", capsys)


def criterion_3(capsys=None):
    d1, d2 = sp.asymptotic_spectra()
    s1, s2 = d1.full_spectrum.sum(), d2.full_spectrum.sum()
    total = s1 + 2 * s2
    ok = abs(total - 1) <= 1e-6 and abs(s1 - 1 / 3) <= 1e-6 and abs(s2 - 1 / 3) <= 1e-6
    report(3, ok, f"total={total:.12f} sum1={s1:.10f} sum2={s2:.10f}", capsys)


def criterion_4(capsys=None):
    rho1, rho_t = rdm.rdm_asymptotic()
    c1, a1, b1 = rdm.single_exponential_form(rho1)
    c2, a2, b2 = rdm.single_exponential_form(rho_t)
    got = np.array([c1, -a1, b1, c2, -a2, b2, -2 * a1 + b1, -2 * a2 + b2])
    want = np.array([0.2407, -0.8944, 0.1499, 0.2262, -0.7618, 0.0770, -1.6389, -1.4466])
    err = np.abs(got - want).max()
    report(4, err <= 5e-4, f"coefficients={np.round(got, 5).tolist()} max err={err:.1e}", capsys)


def criterion_5(capsys=None):
    rng = np.random.default_rng(2024)
    pts = rng.uniform(-2, 2, size=(50, 3))
    res = wf.verify_ansatz_solves_pde(pts)
    e1 = energy_harmonic(1.0)
    closed = (10 + 10 * np.sqrt(3) + 2 * np.sqrt(145) + 15 * 10 ** (2 / 3)) / 20
    ok = res < 1e-8 and abs(e1 - 6.05138) <= 1e-5 and abs(e1 - closed) < 1e-12
    report(5, ok, f"max residual={res:.1e} E_ap(1)={e1:.6f}", capsys)


def criterion_6(capsys=None):
    t0 = time.perf_counter()
    rep = sp.g0_occupancies(3)
    dt = time.perf_counter() - t0
    err = np.abs(np.array(rep.merged) - [0.6619, 0.1755, 0.1004]).max()
    report(6, err <= 2e-3 and dt < 60, f"occupancies={np.round(rep.merged, 5).tolist()} runtime={dt:.2f}s", capsys)


def criterion_7(capsys=None):
    e0 = ex.energy_limit_g0()
    t0 = time.perf_counter()
    big = ex.solve_exact(20.0, ex.GridSpec.default(20.0, 512))
    dt = time.perf_counter() - t0
    energies = {5.0: ex.solve_exact(5.0, ex.GridSpec.default(5.0, 256)).energy, 20.0: big.energy}
    energies[100.0] = ex.solve_exact(100.0, ex.GridSpec.default(100.0, 256)).energy
    above = all(e > energy_harmonic(g) for g, e in energies.items())
    ok = abs(e0 - 4.5) <= 0.05 and above and dt < 300
    detail = f"E(g->0)={e0:.4f} exact>harmonic at 5,20,100: {above} 512^2 solve={dt:.1f}s"
    report(7, ok, detail, capsys)


def criterion_8(capsys=None):
    k = rdm.assemble_asymptotic_total(200.0)
    purity = ga.integral(ga.product(k.body, k.body))
    rep = sp.asymptotic_occupancies()
    d1, d2 = sp.asymptotic_spectra()
    nystrom = np.sum(d1.full_spectrum**2) + 2 * np.sum(d2.full_spectrum**2)
    K = 1 / purity
    ok = abs(purity - nystrom) <= 1e-6 and abs(K - 3.19) <= 0.05 and abs(rep.K - K) < 1e-6
    report(8, ok, f"tr rho^2={purity:.10f} sum lambda^2={nystrom:.10f} K={K:.4f}", capsys)


def criterion_9(capsys=None):
    checks = {}
    # kernel invariants
    k = rdm.rdm_finite(20.0)
    rule = sp.build_quadrature(equilibrium(20.0).x_c + 8, 300)
    M = k.matrix(rule.nodes)
    dec = sp.nystrom_matrix(M, rule)
    checks["kernel"] = (
        np.abs(M - M.T).max() < 1e-12 and dec.full_spectrum.min() >= 0 and abs(k.trace() - 1) < 1e-10
    )
    # gaussian algebra vs brute-force tensor quadrature
    rng = np.random.default_rng(9)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    s = ga.GaussianSum.single(Q @ np.diag([0.4, 1.0, 1.7]) @ Q.T, rng.uniform(-1, 1, 3), 1.3)
    t, w = np.polynomial.legendre.leggauss(100)
    t, w = 12 * t, 12 * w
    Z1, Z2 = np.meshgrid(t, t, indexing="ij")
    x = 0.37
    brute = np.sum(np.outer(w, w) * s(np.stack([Z1, np.full_like(Z1, x), Z2], -1)))
    checks["gaussian"] = abs(ga.marginalize(s, [1])([x]) - brute) <= 1e-8 * abs(brute)
    # node doubling
    a = sp.asymptotic_spectra(sp.build_quadrature(8.0, 200))
    b = sp.asymptotic_spectra(sp.build_quadrature(8.0, 400))
    checks["doubling"] = all(np.abs(p.full_spectrum[:6] - q.full_spectrum[:6]).max() < 1e-8 for p, q in zip(a, b))
    # eta/tau reassembly
    x_c = equilibrium(200.0).x_c
    rho_t = rdm.rdm_asymptotic()[1]
    v0 = lambda z: sp.nystrom_extend(a[1], rho_t, 0, z)  # noqa: E731
    grid = np.linspace(-(x_c + 8), x_c + 8, 801)
    eta, tau = sp.eta_tau_basis(v0, x_c, grid)
    lhs = np.outer(eta, eta) + np.outer(tau, tau)
    rhs = np.outer(v0(grid + x_c), v0(grid + x_c)) + np.outer(v0(grid - x_c), v0(grid - x_c))
    checks["eta_tau"] = np.abs(lhs - rhs).max() < 1e-10
    # permutation invariance of the symmetrized ansatz
    st = wf.symmetrize(7.0)
    pts = rng.normal(scale=2, size=(100, 3))
    ref = st(pts)
    checks["permutation"] = all(
        np.abs(st(pts[:, list(p)]) - ref).max() <= 1e-12 * np.abs(ref).max() for p in itertools.permutations(range(3))
    )
    report(9, all(checks.values()), " ".join(f"{k}={'ok' if v else 'fail'}" for k, v in checks.items()), capsys)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(criterion, capsys):
    criterion(capsys)


if __name__ == "__main__":
    failed = 0
    for c in CRITERIA:
        try:
            c()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
