"""Exit criteria, each at its stated tolerance. One line per criterion is printed
in the terminal summary."""
import math

import numpy as np

from higgscs.algebra import SurfaceSpec, energy_flat, energy_sphere, g_deform, h_residuals, structure_table
from higgscs.cli import main
from higgscs.fock import FockVector, build_ladder, commutator, number_operator
from higgscs.states import CoherentState, coherent_flat, coherent_sphere, fidelity, identity_moments_flat, verify_identity_flat
from higgscs.statistics import default_phi_grid, mandel, mean_photon, photon_variance, squeeze_deformed, squeeze_nondeformed


def test_01_algebra_closure(criterion):
    worst_raise, worst_comm, where = 0.0, 0.0, None
    for N in range(0, 51):
        for lam in (0.0, 0.05, 0.1, 1.0):
            spec = SurfaceSpec(lam, N)
            nop = number_operator(spec)
            for flavor in ("flat", "sphere"):
                A, Adag = build_ladder(spec, flavor)
                phi = structure_table(spec, flavor)
                worst_raise = max(worst_raise, np.max(np.abs(commutator(nop, Adag) - Adag.entries)))
                err = np.max(np.abs(commutator(A, Adag) - np.diag(phi[1:] - phi[:-1])))
                if err > worst_comm:
                    worst_comm, where = err, (flavor, lam, N)
    ok = worst_raise < 1e-12 and worst_comm < 1e-10
    criterion(1, ok, f"max|[n,A+]-A+|={worst_raise:.2e} (<1e-12), max|[A,A+]-diag dPhi|={worst_comm:.2e} (<1e-10) worst at {where}")


def test_02_flat_limit(criterion):
    lam = 1e-8
    g_err = inf_err = e_err = 0.0
    e_where = None
    for N in range(0, 31):
        spec = SurfaceSpec(lam, N)
        g_err = max(g_err, np.max(np.abs(g_deform(spec, np.arange(N + 2)) - 1)))
        for mu in (0.1, 0.5, 1.0, 2.0):
            inf_err = max(inf_err, 1 - fidelity(coherent_sphere(mu, spec), coherent_flat(mu, N)))
        e = abs(energy_sphere(N, lam) - energy_flat(N))
        if e > e_err:
            e_err, e_where = e, N
    ok = g_err < 1e-6 and inf_err < 1e-12 and e_err < 1e-6
    criterion(2, ok, f"|g-1|={g_err:.2e}, infidelity={inf_err:.2e}, |Es-Ef|={e_err:.2e} at N={e_where} (each bound 1e-6/1e-12/1e-6)")


def test_03_flat_oracle(criterion):
    worst = 0.0
    for N in (10, 20, 30):
        for mu in (0.1, 0.5, 1.0, 2.0, 10.0):
            s = coherent_flat(mu, N)
            p = mu**2 / (1 + mu**2)
            worst = max(worst, abs(mean_photon(s) - N * p), abs(photon_variance(s) - N * p * (1 - p)), abs(mandel(s) + p))
    criterion(3, worst < 1e-10, f"max deviation from binomial closed forms {worst:.2e} (<1e-10)")


def test_04_saturation(criterion):
    devs = {N: abs(mean_photon(coherent_flat(1e3, N)) - N) / N for N in (10, 20, 30)}
    criterion(4, all(d < 1e-4 for d in devs.values()), f"|<n>-N|/N at mu=1e3: {', '.join(f'N={k}:{v:.1e}' for k, v in devs.items())} (<1e-4)")


def test_05_resolution_of_identity(criterion):
    worst_rel = worst_res = 0.0
    for N in range(0, 11):
        moments = identity_moments_flat(N)
        exact = np.array([1 / ((N + 1) * math.comb(N, n)) for n in range(N + 1)])
        worst_rel = max(worst_rel, np.max(np.abs(moments - exact) / exact))
        worst_res = max(worst_res, verify_identity_flat(N))
    ok = worst_rel < 1e-6 and worst_res < 1e-6
    criterion(5, ok, f"max relative moment error {worst_rel:.2e} (<1e-6), operator residual {worst_res:.2e} (<1e-6)")


def test_06_replacement_rule(criterion):
    N, mu = 10, 0.5
    lams = [1e-3, 1e-2]
    replaced, plain = [], []
    for lam in lams:
        s = coherent_sphere(mu, SurfaceSpec(lam, N))
        replaced.append(1 - fidelity(s, coherent_flat(mu * (1 + lam / 2 * (N + 1)), N)))
        plain.append(1 - fidelity(s, coherent_flat(mu, N)))
    slope = math.log(replaced[1] / replaced[0]) / math.log(lams[1] / lams[0])
    smaller = all(r < p for r, p in zip(replaced, plain))
    ok = abs(slope - 2.0) <= 0.1 and smaller
    criterion(6, ok, f"replaced infidelity {replaced[0]:.2e}->{replaced[1]:.2e}, log-log slope {slope:.3f} (need 2+-0.1); "
                     f"smaller than non-replaced {plain[0]:.2e}->{plain[1]:.2e}: {smaller}")


def test_07_curvature_trends(criterion):
    lams = np.linspace(0.0, 1.0, 21)
    ok = True
    notes = []
    for N in (10, 20, 30):
        states = [coherent_sphere(0.5, SurfaceSpec(l, N)) for l in lams]
        means = np.array([mean_photon(s) for s in states])
        ms = np.array([mandel(s) for s in states])
        good = bool(np.all(np.diff(means) > 0) and np.all(np.diff(ms) < 0) and np.all(ms < 0))
        ok &= good
        notes.append(f"N={N}: <n> {means[0]:.3f}->{means[-1]:.3f}, M {ms[0]:.3f}->{ms[-1]:.3f}")
    criterion(7, ok, "; ".join(notes))


def test_08_squeezing_trends(criterion):
    phi = default_phi_grid()
    table = []
    for lam in (0.0, 0.05, 0.1):
        s = coherent_sphere(0.1, SurfaceSpec(lam, 10))
        nd, de = squeeze_nondeformed(s, phi), squeeze_deformed(s, phi)
        table.append((nd.min_s1, nd.min_s2, de.min_s1, de.min_s2))
    table = np.array(table)
    decreasing = bool(np.all(np.diff(table, axis=0) < 0))
    deformed_deeper = bool(np.all(table[:, 2] <= table[:, 0]) and np.all(table[:, 3] <= table[:, 1]))
    rows = ", ".join(f"lam={l}: S1a={r[0]:.4f} S1A={r[2]:.4f}" for l, r in zip((0, 0.05, 0.1), table))
    criterion(8, decreasing and deformed_deeper, rows)


def test_09_vacuum_baselines(criterion):
    phi = default_phi_grid()
    worst = 0.0
    for lam in (0.0, 0.05, 0.1, 1.0):
        spec = SurfaceSpec(lam, 10)
        for flavor in ("flat", "sphere"):
            s = CoherentState(FockVector.basis(spec, 0), 0j, flavor, spec)
            for curve in (squeeze_nondeformed(s, phi), squeeze_deformed(s, phi)):
                worst = max(worst, np.max(np.abs(curve.s1)), np.max(np.abs(curve.s2)))
    criterion(9, worst < 1e-12, f"max |S| on |0> = {worst:.2e} (<1e-12)")


def test_10_h_residual_report(criterion, capsys):
    lines = []
    flat_worst = 0.0
    for lam in (0.0, 0.1):
        for N in (2, 10):
            r = h_residuals(SurfaceSpec(lam, N))
            lines.append(f"lam={lam} N={N} max r={r.max():.3e}")
            if lam == 0.0:
                flat_worst = max(flat_worst, r.max())
    criterion(10, flat_worst < 1e-12, f"{'; '.join(lines)} (lam=0 bound 1e-12; lam>0 informational)")


def test_11_sweep_determinism(criterion, tmp_path):
    args = ["sweep", "--n-max", "5,10", "--lambda", "0,0.05,0.1", "--mu", "0.1,0.5,1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = (main(args + ["--out", str(a)]), main(args + ["--out", str(b)]))
    same = a.read_bytes() == b.read_bytes()
    criterion(11, codes == (0, 0) and same, f"two sweep runs byte-identical: {same} ({len(a.read_bytes())} bytes)")
