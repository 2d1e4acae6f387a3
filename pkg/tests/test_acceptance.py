"""Acceptance criteria 1-7, one test each; every test logs a pass/fail line with its timing."""

import csv
import io
import itertools
import math
import time
from fractions import Fraction

import numpy as np

from oracles import central_charge_rn, embed_charge, gamma_fn, log_rel, omega_rn, permute_rn, rho_rn
from toda_bootstrap import cli
from toda_bootstrap.blocks import BlockSystem, exponents_from_charges
from toda_bootstrap.bootstrap import bootstrap_exponents, crossing_residual, max_consistency
from toda_bootstrap.kinematics import TodaParams, central_charge, delta, w3_charge
from toda_bootstrap.lattice import (
    Charge,
    CoeffB,
    WeylElement,
    background_charge,
    dual,
    exact_dot,
    gram,
    omega,
    rho,
    star_act,
    weyl_act,
)
from toda_bootstrap.nonscalar import (
    conjugated,
    fuse_nonscalar_degenerate,
    make_field_sl2,
    make_field_sl3,
    make_field_sln,
    monodromy_charges,
    neutrality,
    scalar_field,
    semidegenerate_field,
    verify_constraints,
)
from toda_bootstrap.sampling import random_generic_charge, random_kappa
from toda_bootstrap.special import QuadratureConfig, UpsilonEvaluator, evaluator
from toda_bootstrap.structure import nonscalar_C, scalar_C, shift_residual_nonscalar, shift_residual_scalar

B0 = 0.731
KAPPA = 0.37
CASES = 100


class Criterion:
    """Collects named checks, then logs one line and asserts."""

    def __init__(self, log, number, title, limit_s):
        self.log, self.number, self.title, self.limit = log, number, title, limit_s
        self.failures = []
        self.notes = []
        self.start = time.perf_counter()

    def bound(self, name, value, tol):
        """value <= tol."""
        self.notes.append(f"{name}={value:.1e}<={tol:.0e}")
        if not value <= tol:
            self.failures.append(f"{name}={value:.3e} exceeds {tol:.0e}")

    def above(self, name, value, floor):
        self.notes.append(f"{name}={value:.1e}>{floor:.0e}")
        if not value > floor:
            self.failures.append(f"{name}={value:.3e} not above {floor:.0e}")

    def holds(self, name, ok):
        self.notes.append(f"{name} ok" if ok else f"{name} FAILED")
        if not ok:
            self.failures.append(f"{name} failed")

    def finish(self):
        elapsed = time.perf_counter() - self.start
        if elapsed > self.limit:
            self.failures.append(f"runtime {elapsed:.1f} s over {self.limit} s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures) if self.failures else ", ".join(self.notes)
        self.log.append(f"criterion {self.number} [{status}] {self.title} ({elapsed:.2f} s): {detail}")
        assert not self.failures, self.failures


def random_charge(rng, n):
    parts = rng.integers(-150, 150, size=(n - 1, 3))
    return Charge(n, tuple(CoeffB(*(Fraction(int(x), 97) for x in row)) for row in parts))


def random_perm(rng, n):
    return WeylElement(tuple(int(x) + 1 for x in rng.permutation(n)))


def rel_err(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def test_criterion_1_lattice_kinematics(acceptance_log):
    crit = Criterion(acceptance_log, 1, "lattice and kinematics", 5.0)
    rng = np.random.default_rng(1)
    gram_err = max(
        float(np.max(np.abs(gram(n) - np.array([[omega_rn(n, i) @ omega_rn(n, j) for j in range(1, n)]
                                                 for i in range(1, n)]))))
        for n in (2, 3, 4, 5)
    )
    crit.bound("gram", gram_err, 1e-14)
    crit.holds("rho.rho", all(exact_dot(rho(n), rho(n)).coeff(0) == Fraction(n * (n * n - 1), 12)
                              for n in range(2, 9)))
    crit.holds("rho.rho embedding", all(np.isclose(rho_rn(n) @ rho_rn(n), n * (n * n - 1) / 12) for n in range(2, 9)))
    compose_ok = weyl_embed_ok = True
    delta_worst = w_worst = dual_worst = 0.0
    dual_exact = True
    for case in range(CASES):
        n = (2, 3, 4)[case % 3]
        p = TodaParams(n, B0)
        v = random_charge(rng, n)
        s1, s2 = random_perm(rng, n), random_perm(rng, n)
        compose_ok &= weyl_act(s1, weyl_act(s2, v)) == weyl_act(s1.compose(s2), v)
        compose_ok &= star_act(s1, star_act(s2, v)) == star_act(s1.compose(s2), v)
        weyl_embed_ok &= np.allclose(embed_charge(weyl_act(s1, v), B0), permute_rn(s1.perm, embed_charge(v, B0)),
                                     atol=1e-10)
        d = delta(v, p)
        delta_worst = max(delta_worst, rel_err(delta(star_act(s1, v), p), d))
        dual_worst = max(dual_worst, rel_err(delta(dual(v), p), d))
        dual_exact &= dual(dual(v)) == v
        dual_exact &= background_charge(n) * 2 - v == star_act(WeylElement.longest(n), dual(v))
        v3 = random_charge(rng, 3)
        p3 = TodaParams(3, B0)
        w = w3_charge(v3, p3)
        s3 = random_perm(rng, 3)
        w_worst = max(w_worst, abs(w3_charge(star_act(s3, v3), p3) - w) / max(abs(w), 1.0),
                      abs(w3_charge(dual(v3), p3) + w) / max(abs(w), 1.0))
    crit.holds("Weyl and star composition", compose_ok)
    crit.holds("Weyl action vs R^n permutation", weyl_embed_ok)
    crit.holds("dual involution and 2Q - alpha", dual_exact)
    crit.bound("Delta Weyl", delta_worst, 1e-12)
    crit.bound("w Weyl/dual", w_worst, 1e-12)
    crit.bound("Delta dual", dual_worst, 1e-12)
    crit.bound("c", max(rel_err(central_charge(TodaParams(n, B0)), central_charge_rn(n, B0)) for n in (2, 3, 4)), 1e-12)
    crit.finish()


def test_criterion_2_special_functions(acceptance_log):
    crit = Criterion(acceptance_log, 2, "special functions", 30.0)
    worst_ups = worst_gb = worst_quad = 0.0
    signs_ok = True
    for b in (0.731, 1.23):
        ev, evi = evaluator(b), evaluator(1 / b)
        q = b + 1 / b
        for x in np.linspace(-3.3, 4.9, 50):
            u = ev.upsilon(x)
            if u.order:
                continue
            worst_ups = max(worst_ups, log_rel(u.log_abs, ev.upsilon(q - x).log_abs),
                            log_rel(u.log_abs, evi.upsilon(x).log_abs))
            for g, shifted, expo in ((gamma_fn(b * x), x + b, (1 - 2 * b * x) * math.log(b)),
                                     (gamma_fn(x / b), x + 1 / b, (2 * x / b - 1) * math.log(b))):
                if np.isfinite(g) and g != 0:
                    up = ev.upsilon(shifted)
                    worst_ups = max(worst_ups, log_rel(up.log_abs, math.log(abs(g)) + expo + u.log_abs))
                    signs_ok &= up.sign * u.sign == (1 if g > 0 else -1)
        for x in np.linspace(0.05, 3.1, 50):
            g = ev.gamma_b(x)
            if g.order:
                continue
            worst_gb = max(worst_gb, log_rel(g.log_abs, evi.gamma_b(x).log_abs))
            expected = 0.5 * math.log(2 * math.pi) + (b * x - 0.5) * math.log(b) - math.log(abs(math.gamma(b * x)))
            worst_gb = max(worst_gb, log_rel(ev.gamma_b(x + b).log_abs - g.log_abs, expected))
            expected = 0.5 * math.log(2 * math.pi) + (0.5 - x / b) * math.log(b) - math.log(abs(math.gamma(x / b)))
            worst_gb = max(worst_gb, log_rel(ev.gamma_b(x + 1 / b).log_abs - g.log_abs, expected))
            if x < q:
                worst_gb = max(worst_gb, abs((g * ev.gamma_b(q - x) * ev.upsilon(x)).log_abs))
    for b in (0.3, 0.731, 1.7):
        base, fine = UpsilonEvaluator(b), UpsilonEvaluator(b, QuadratureConfig().doubled())
        for x in np.linspace(1e-3, b + 1 / b - 1e-3, 25):
            worst_quad = max(worst_quad, abs(base.log_upsilon_strip(x) - fine.log_upsilon_strip(x)),
                             abs(base.log_gamma_b_strip(x) - fine.log_gamma_b_strip(x)))
    crit.holds("Upsilon shift signs", signs_ok)
    crit.bound("Upsilon identities", worst_ups, 1e-9)
    crit.bound("Gamma_b identities", worst_gb, 1e-9)
    crit.bound("quadrature doubling", worst_quad, 1e-10)
    crit.finish()


def random_system(n, seed):
    rng = np.random.default_rng(seed)
    p = TodaParams(n, B0)
    a1, a2 = random_generic_charge(n, rng), random_generic_charge(n, rng)
    return BlockSystem(exponents_from_charges(a1, a2, random_kappa(rng), n - 1, p))


def test_criterion_3_blocks(acceptance_log):
    crit = Criterion(acceptance_log, 3, "blocks and ODE", 120.0)
    ode = transport = inverse = 0.0
    fuchs_ok = True
    for n in (2, 3):
        for seed in range(20):
            sys = random_system(n, 300 + seed)
            fuchs_ok &= sys.exponents.exponent_sum() == Fraction(n * (n - 1), 2)
            transport = max(transport, sys.verify_connection(-0.5, -2.0))
            inverse = max(inverse, float(np.max(np.abs(sys.M @ sys.Minv - np.eye(n)))))
            if seed < 5:
                ode = max(ode, *(sys.ode_residual(z, i) for i in range(n) for z in (-0.2, -0.6, -1.7, -5.0)))
    crit.holds("Fuchs sum n(n-1)/2", fuchs_ok)
    crit.holds("sl_3 sum is 3", random_system(3, 1).exponents.exponent_sum() == 3)
    crit.bound("ODE residual", ode, 1e-10)
    crit.bound("transport", transport, 1e-6)
    crit.bound("M Minv - I", inverse, 1e-8)
    crit.finish()


def test_criterion_4_structure_constants(acceptance_log):
    crit = Criterion(acceptance_log, 4, "structure constants", 120.0)
    norm = sym = 0.0
    for n, b in ((2, 0.731), (3, 0.731), (3, 1.23), (4, 0.8)):
        p, ev = TodaParams(n, b), evaluator(b)
        rng = np.random.default_rng(n)
        for _ in range(3):
            a = random_generic_charge(n, rng)
            norm = max(norm, abs(complex(scalar_C(a, dual(a), 0, n - 1, p, ev)) - 1))
            a2 = random_generic_charge(n, rng)
            c = complex(scalar_C(a, a2, KAPPA, 1, p, ev))
            sym = max(sym, abs(complex(scalar_C(a2, a, KAPPA, 1, p, ev)) / c - 1))
        k = Fraction(21, 50)
        norm = max(norm, abs(complex(scalar_C(omega(n, 1, CoeffB(k)), Charge.zero(n), k, n - 1, p, ev)) - 1))
    crit.bound("normalizations", norm, 1e-8)
    crit.bound("alpha1<->alpha2", sym, 1e-10)
    p, ev = TodaParams(3, B0), evaluator(B0)
    a1 = Charge(3, (CoeffB(Fraction(3, 10)), CoeffB(Fraction(-1, 7))))
    a2 = Charge(3, (CoeffB(Fraction(2, 5)), CoeffB(Fraction(1, 3))))
    c0 = complex(scalar_C(a1, a2, KAPPA, 1, p, ev))
    weyl = max(
        abs(complex(scalar_C(star_act(WeylElement(s1), a1), star_act(WeylElement(s2), a2), KAPPA, 1, p, ev)) / c0 - 1)
        for s1, s2 in itertools.product(itertools.permutations((1, 2, 3)), repeat=2)
    )
    crit.bound("S3xS3", weyl, 1e-9)
    rng = np.random.default_rng(4)
    for family in ("b", "-1/b"):
        worst = 0.0
        for _ in range(20):
            b1, b2, b2o = (random_generic_charge(3, rng) for _ in range(3))
            kappa = random_kappa(rng)
            direction = int(rng.choice([1, 2]))
            i, j = (int(x) + 1 for x in rng.choice(3, size=2, replace=False))
            worst = max(worst, shift_residual_scalar(b1, b2, b2o, kappa, direction, i, j, p, ev, family).residual)
        crit.bound(f"shift {family}", worst, 1e-7)
    crit.finish()


def constructed_fields():
    fields = [make_field_sl2(Fraction(r, 2), Fraction(s, 2)) for r in range(-3, 4) for s in range(-3, 4)]
    thirds = [Fraction(k, 3) for k in range(-2, 3)]
    fields += [make_field_sl3("cyclic", (n1, n1 + d, m1, m1 + e))
               for n1 in thirds for m1 in thirds for d in (0, 1) for e in (0, -1)]
    fields += [make_field_sl3("transposition", (r, s), CoeffB(0, Fraction(3, 10))) for r in (-1, 0, 2) for s in (1, 3)]
    fields.append(make_field_sln(WeylElement.from_cycles(4, [(1, 2, 3, 4)]), [Fraction(1, 4)] * 3 + [Fraction(-3, 4)],
                                 [Fraction(1, 4)] * 3 + [Fraction(-3, 4)]))
    fields.append(make_field_sln(WeylElement.from_cycles(4, [(1, 2)]), [1, -1, 0, 0], [2, -2, 0, 0], {3: "beta"}))
    return fields


def test_criterion_5_nonscalar(acceptance_log):
    crit = Criterion(acceptance_log, 5, "non-scalar fields", 60.0)
    fields = constructed_fields()
    crit.holds("constraints", all(verify_constraints(f) for f in fields))
    exact = True
    for f in fields:
        if f.alpha.has_cont:
            continue
        m = monodromy_charges(f)
        exact &= (m.eta * f.n).denominator == 1 and m.etahat is not None and (m.etahat * f.n).denominator == 1
    crit.holds("eta and etahat in Z/n", exact)
    p, ev = TodaParams(2, B0), evaluator(B0)
    f1 = scalar_field(omega(2, 1, CoeffB(Fraction(3, 10))))
    f2 = make_field_sl2(Fraction(1, 2), Fraction(1, 2))
    f2o = make_field_sl2(Fraction(-1, 2), Fraction(3, 2))
    f3 = make_field_sl2(Fraction(1, 2), Fraction(1, 2), semidegenerate=True)
    plain = semidegenerate_field(2, 1, CoeffB(Fraction(37, 100)))
    crit.holds("neutral triple accepted", neutrality(f1, f2, f3) == (True, True))
    crit.holds("non-neutral triple flagged", neutrality(f1, f2, plain) == (False, False))
    try:
        nonscalar_C(f1, f2, plain, p, ev)
        crit.holds("non-neutral constant refused", False)
    except ValueError:
        pass
    g1 = make_field_sl2(Fraction(1, 2), Fraction(1, 2))
    g2 = scalar_field(omega(2, 1, CoeffB(Fraction(3, 10))))
    g2o = scalar_field(omega(2, 1, CoeffB(Fraction(-2, 9))))
    worst = max(
        shift_residual_nonscalar(a, b_, c, f3, family, 1, 2, p, ev).residual
        for family in ("b", "-1/b") for a, b_, c in ((f1, f2, f2o), (g1, g2, g2o))
    )
    crit.bound("geometric-mean shift", worst, 1e-7)
    base = make_field_sl3("cyclic", (Fraction(1, 3), Fraction(4, 3), Fraction(2, 3), Fraction(5, 3)))
    covariant = True
    for perm in itertools.permutations((1, 2, 3)):
        mu = WeylElement(perm)
        g = conjugated(base, mu)
        covariant &= verify_constraints(g) and monodromy_charges(g) == monodromy_charges(base)
        for label in ("bw1", "-w1/b"):
            lhs = {(o.alpha, o.alphabar, o.sigma) for o in map(lambda o: conjugated(o, mu),
                                                               fuse_nonscalar_degenerate(base, label))}
            rhs = {(o.alpha, o.alphabar, o.sigma) for o in fuse_nonscalar_degenerate(g, label)}
            covariant &= lhs == rhs
    crit.holds("conjugation covariance", covariant)
    crit.finish()


def test_criterion_6_crossing(acceptance_log):
    crit = Criterion(acceptance_log, 6, "crossing", 120.0)
    configs = []
    for n, seed in ((2, 1), (3, 7)):
        rng = np.random.default_rng(seed)
        p = TodaParams(n, B0)
        configs.append((f"sl{n} scalar", p, (scalar_field(random_generic_charge(n, rng)),
                                             scalar_field(random_generic_charge(n, rng)),
                                             semidegenerate_field(n, n - 1, CoeffB(Fraction(random_kappa(rng))
                                                                                   .limit_denominator(1000))))))
    rng = np.random.default_rng(5)
    sl2 = (scalar_field(random_generic_charge(2, rng)), make_field_sl2(Fraction(1, 2), Fraction(1, 2)),
           make_field_sl2(Fraction(1, 2), Fraction(1, 2), semidegenerate=True))
    configs.append(("sl2 non-scalar", TodaParams(2, B0), sl2))
    for name, p, fields in configs:
        rep = crossing_residual(*fields, p)
        crit.holds(f"{name} uses 10 points", len(rep.sample_points) == 10)
        crit.bound(f"{name} X spread", rep.x_spread, 1e-8)
        crit.bound(f"{name} offdiag", rep.offdiag_residual, 1e-8)
        crit.bound(f"{name} crossing", rep.crossing_mismatch, 1e-6)
        crit.bound(f"{name} consistency", rep.consistency_residual, 1e-10)
    non_neutral = (sl2[0], sl2[1], semidegenerate_field(2, 1, CoeffB(Fraction(37, 100))))
    crit.above("non-neutral consistency", max_consistency(bootstrap_exponents(*non_neutral, TodaParams(2, B0))), 1e-3)
    crit.finish()


def test_criterion_7_cli(acceptance_log, tmp_path, capsys):
    crit = Criterion(acceptance_log, 7, "command line", 30.0)

    def code_of(*argv):
        code = cli.main(list(argv))
        capsys.readouterr()
        return code

    crit.holds("exit 0", code_of("verify-crossing", "--n", "3", "--b", str(B0), "--seed", "7") == cli.EXIT_OK)
    crit.holds("exit 1", code_of("verify-crossing", "--n", "3", "--b", str(B0), "--seed", "7",
                                 "--tol-offdiag", "1e-30") == cli.EXIT_TOLERANCE)
    crit.holds("exit 2", code_of("weights", "--n", "3", "--b", "0.7", "--alpha", "1/3,oops") == cli.EXIT_PARSE)
    crit.holds("exit 3", code_of("weights", "--n", "3", "--b", "-1", "--alpha", "1/3,1/5") == cli.EXIT_DOMAIN)
    rng = np.random.default_rng(7)
    round_trip = True
    for case in range(CASES):
        n = int(rng.integers(2, 6))
        job = cli.JobSpec(cli.COMMANDS[case % len(cli.COMMANDS)], n, float(rng.uniform(0.1, 3.0)),
                          {"alpha": cli.charge_to_json(random_charge(rng, n)), "seed": int(rng.integers(1000))},
                          {"path": None if case % 2 else f"out{case}.json", "format": "json"})
        again = cli.JobSpec.from_json(job.to_json())
        round_trip &= again == job and cli.charge_from_json(again.inputs["alpha"]) == cli.charge_from_json(
            job.inputs["alpha"])
    crit.holds("JSON round trip", round_trip)
    outputs = []
    for k in range(2):
        path = tmp_path / f"sweep{k}.csv"
        crit.holds("sweep exit", code_of("sweep", "--n", "3", "--b", str(B0), "--alpha1", "3/10,-1/7",
                                         "--alpha2", "2/5,1/3", "-o", str(path)) == cli.EXIT_OK)
        outputs.append(path.read_bytes())
    crit.holds("byte-identical reruns", outputs[0] == outputs[1])
    rows = list(csv.reader(io.StringIO(outputs[0].decode())))
    crit.holds("CSV header and 100 rows", tuple(rows[0]) == cli.SWEEP_COLUMNS and len(rows) == 101)
    crit.finish()
