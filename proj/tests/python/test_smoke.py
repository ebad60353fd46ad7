"""Python smoke tests for the vort2d extension module."""

import math
import sys

import numpy as np

import vort2d


def check(cond, msg):
    if not cond:
        print("FAIL:", msg)
        sys.exit(1)
    print("ok:", msg)


def main():
    g = vort2d.GridSpec(32)
    check(g.cutoff == 10, "dealias cutoff")

    # sin(x1) shear: u = (0, -cos x1), closed-form norms.
    w = vort2d.VorticityState(g)
    vort2d.add_real_coord(w, 1, 0, 1.0)
    w = vort2d.state_from_coeffs(g, w.coeffs, 0.0)
    nm = vort2d.norms(w)
    check(abs(nm.l2**2 - 2 * math.pi**2) < 1e-12, "||sin x1||^2 = 2 pi^2")
    check(abs(nm.energy - math.pi**2) < 1e-12, "energy = pi^2")
    u = vort2d.biot_savart(w)
    check(np.max(np.abs(u.u1)) < 1e-15, "u1 = 0 for shear")

    spec = vort2d.validate_forcing([[1, 0, 1.0], [1, 1, 1.0]], auto_reflect=True)
    check(abs(spec.eps - 8 * math.pi**2) < 1e-12, "eps = 8 pi^2")
    check(abs(spec.eps_prime - 6 * math.pi**2) < 1e-12, "eps' = 6 pi^2")

    rep = vort2d.hormander_check([(1, 0), (-1, 0), (1, 1), (-1, -1)])
    check(rep.passes(), "admissible example passes")
    rep2 = vort2d.hormander_check([(1, 0), (-1, 0), (0, 1), (0, -1)])
    check(not rep2.cond_b, "equal-length set fails (b)")

    cfg = vort2d.SimConfig(g, nu=0.1, tau=0.0, dt=0.01, t_end=0.5,
                           forcing=spec, seed=7, output_every=10)
    t1 = vort2d.simulate(cfg)
    t2 = vort2d.simulate(cfg)
    check(len(t1.records) == len(t2.records), "record counts agree")
    check(all(a.enstrophy == b.enstrophy
              for a, b in zip(t1.records, t2.records)),
          "same seed reproduces observables bitwise")
    check(t1.records[-1].enstrophy > 0, "forced run has enstrophy")

    s = vort2d.energy_spectrum(t1.final_state)
    nmf = vort2d.norms(t1.final_state)
    check(abs(s.energy_density() - nmf.energy / g.area) < 1e-12 * nmf.energy,
          "spectrum energy sum rule")

    M = np.eye(6)
    res = vort2d.cone_min(M, [0, 1, 2], 0.5)
    check(abs(res.value - 1.0) < 1e-10, "cone_min(I) = 1")

    print("smoke tests passed")


if __name__ == "__main__":
    main()
