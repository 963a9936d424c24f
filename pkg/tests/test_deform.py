"""Lift verification, Hensel chains, obstruction witnesses, reports."""

import numpy as np
import pytest

from defcert import coeff, deform, fdmod, groups
from defcert.fdmod import RelationViolated

from conftest import E, small_module


FAMILY_RELATION_COUNTS = {"I": 6, "II": 9, "III": 7}


# ---------------------------------------------------------------------------
# base modules and lift candidates


@pytest.mark.parametrize("family,d", deform.FAMILY_CASES)
def test_base_module_agrees_with_explicit_fixture(family, d, completed):
    system = completed(family, d)
    ours = deform.base_module(family, system)
    ref = small_module(family, system)
    assert ours.dim == ref.dim
    assert np.array_equal(ours.block_of, ref.block_of)
    for name in ours.algebra.generators:
        assert np.array_equal(ours.mats[name], ref.mats[name])


def test_builtin_lift_directions():
    # one matrix unit each, sitting in degree 1
    for family, (name, i, j) in deform._LIFT_DIRECTION.items():
        d = 2 if family == "II" else 3
        L = deform.builtin_lift(family, d)
        assert sorted(L.t_parts) == [name]
        part = L.t_parts[name]
        assert part.shape[2] == 1
        expect = np.zeros_like(part[:, :, 0])
        expect[i, j] = 1
        assert np.array_equal(part[:, :, 0], expect)


def test_lift_candidate_rejects_bad_input(completed):
    T = deform.base_module("I", completed("I", 2))
    with pytest.raises(ValueError, match="unknown generator"):
        deform.LiftCandidate(T, {"zeta": E(5, 0, 0)})
    with pytest.raises(ValueError, match="shape"):
        deform.LiftCandidate(T, {"gamma": np.zeros((4, 4))})


def test_lift_candidate_drops_zero_parts(completed):
    T = deform.base_module("I", completed("I", 2))
    L = deform.LiftCandidate(T, {"gamma": np.zeros((5, 5))})
    assert L.t_parts == {}
    assert L.max_degree() == 0


@pytest.mark.parametrize("family,d", deform.FAMILY_CASES)
def test_builtin_lift_satisfies_every_relation(family, d, completed):
    system = completed(family, d)
    cert = deform.verify_quiver_lift(
        deform.builtin_lift(family, d, system), system
    )
    assert cert.ok
    assert cert.relations_checked == FAMILY_RELATION_COUNTS[family]
    assert cert.max_degree == 1
    assert cert.truncation_levels == (2, 3, 4)


def test_trivial_lift_is_valid_with_zero_class(completed):
    system = completed("I", 2)
    T = deform.base_module("I", system)
    L = deform.trivial_lift(T)
    assert deform.verify_quiver_lift(L, system).ok
    cls = deform.first_order_class(L)
    assert cls.dim == 1
    assert cls.representative_is_trivial()


def test_perturbation_outside_arrow_block_is_rejected(completed):
    system = completed("I", 2)
    T = deform.base_module("I", system)
    bad = deform.LiftCandidate(T, {"gamma": E(5, 2, 4) + E(5, 2, 3)})
    with pytest.raises(RelationViolated) as exc:
        deform.verify_quiver_lift(bad, system)
    assert exc.value.relation_id == "grading:gamma"
    assert exc.value.position == (2, 3, 1)


def test_perturbation_inside_block_violates_a_relation(completed):
    system = completed("I", 2)
    T = deform.base_module("I", system)
    bad = deform.LiftCandidate(T, {"gamma": E(5, 2, 4) + E(5, 0, 4)})
    with pytest.raises(RelationViolated) as exc:
        deform.verify_quiver_lift(bad, system)
    assert exc.value.relation_id.startswith("rel[")
    i, j, deg = exc.value.position
    assert deg == 1  # failure appears in the t-linear coefficient


@pytest.mark.parametrize("family,d", deform.FAMILY_CASES)
def test_first_order_class_nonzero(family, d, completed):
    system = completed(family, d)
    cls = deform.first_order_class(deform.builtin_lift(family, d, system))
    assert cls.dim == 1
    assert not cls.representative_is_trivial()


def _conjugate_lift(T, L, f):
    """Action of (1 + tf) L (1 + tf)^(-1); f must square to zero mod p."""
    p = T.p
    assert not (f @ f % p).any()
    parts = {}
    for name in T.algebra.generators:
        poly = L.action_poly(name)
        deg = poly.shape[2]
        out = np.zeros((T.dim, T.dim, deg + 2), dtype=np.int64)
        # (1 + tf) X(t) (1 - tf): three convolution passes
        for k in range(deg):
            X = poly[:, :, k]
            out[:, :, k] += X
            out[:, :, k + 1] += (f @ X - X @ f) % p
            out[:, :, k + 2] += (-f @ X @ f) % p
        out %= p
        assert np.array_equal(out[:, :, 0], T.mats[name])
        if out[:, :, 1:].any():
            parts[name] = out[:, :, 1:]
    return deform.LiftCandidate(T, parts)


def test_coboundary_conjugate_of_trivial_lift_has_zero_class(completed):
    system = completed("I", 2)
    T = deform.base_module("I", system)
    f = E(5, 4, 1)  # block-preserving, radical-lowering, f^2 = 0
    L = _conjugate_lift(T, deform.trivial_lift(T), f)
    assert L.t_parts  # genuinely moved
    assert deform.verify_quiver_lift(L, system).ok
    assert deform.first_order_class(L).representative_is_trivial()


def test_first_order_class_is_additive_in_the_t_part(completed):
    system = completed("I", 2)
    T = deform.base_module("I", system)
    p = T.p
    Lb = deform.builtin_lift("I", 2, system)
    Lc = _conjugate_lift(T, deform.trivial_lift(T), E(5, 4, 1))
    summed = {}
    for name in set(Lb.t_parts) | set(Lc.t_parts):
        deg = max(Lb.degree(name), Lc.degree(name))
        acc = np.zeros((T.dim, T.dim, deg), dtype=np.int64)
        for src in (Lb, Lc):
            part = src.t_parts.get(name)
            if part is not None:
                acc[:, :, : part.shape[2]] += part
        summed[name] = acc % p
    Ls = deform.LiftCandidate(T, summed)
    assert deform.verify_quiver_lift(Ls, system).ok
    # adding a coboundary direction leaves the class non-zero
    assert not deform.first_order_class(Ls).representative_is_trivial()
    # and the cocycle vectors literally add, slot by slot
    ref = fdmod.ext1_by_extensions(T, T)
    cob, _, slots, total = ref.representative[2]

    def as_vec(L):
        v = np.zeros(total, dtype=np.int64)
        for name, (pos, off) in slots.items():
            if pos.shape[0]:
                th = L.t_coefficient(name, 1)
                v[off : off + pos.shape[0]] = th[pos[:, 0], pos[:, 1]]
        return v % p

    assert np.array_equal((as_vec(Lb) + as_vec(Lc)) % p, as_vec(Ls))


def test_invalid_mod_t2_lift_fails_the_class_extraction(completed):
    system = completed("I", 2)
    T = deform.base_module("I", system)
    bad = deform.LiftCandidate(T, {"gamma": E(5, 0, 4)})
    with pytest.raises(RelationViolated):
        deform.first_order_class(bad)


# ---------------------------------------------------------------------------
# Hensel chains


def test_hensel_chain_p3_reaches_81():
    chain = deform.hensel_chain(3, 4)
    assert [r.ring.moduli[0] for r in chain] == [3, 9, 27, 81]
    for lo, hi in zip(chain, chain[1:]):
        assert np.array_equal(hi.convert(lo.ring).mats, lo.mats)
    # regression pin: the solver zeroes free variables, so the level-2
    # representative is deterministic even though corrections are not unique
    assert np.array_equal(
        chain[1].generator_matrix("sigma")[:, :, 0],
        np.array([[4, 4], [6, 4]]),
    )
    assert np.array_equal(
        np.diagonal(chain[1].generator_matrix("epsilon")[:, :, 0]),
        np.array([8, 1]),  # Teichmueller lift of 2 mod 9
    )


@pytest.mark.parametrize("p", [5, 7])
def test_hensel_chain_coherent_with_teichmuller_eps(p):
    chain = deform.hensel_chain(p, 4)
    base = groups.uniserial_representation(p, table=chain[0].table)
    assert np.array_equal(chain[0].mats, base.mats)
    for m, rep in enumerate(chain, start=1):
        mod = p**m
        diag = np.diagonal(rep.generator_matrix("epsilon")[:, :, 0])
        assert all(pow(int(v), p - 1, mod) == 1 for v in diag)
    for lo, hi in zip(chain, chain[1:]):
        assert np.array_equal(hi.convert(lo.ring).mats, lo.mats)


def test_hensel_step_on_the_trivial_module_makes_no_correction():
    qt = groups.build_group(3, quotient=True)
    one = np.eye(1, dtype=np.int64)
    triv = groups.GroupRep.from_generators(
        qt, coeff.prime_field(3), {"sigma": one, "epsilon": one}
    )
    up = deform.hensel_lift_step(triv)
    assert up.ring == coeff.trunc_witt(3, 2)
    assert np.array_equal(up.mats, np.ones_like(up.mats))


def test_hensel_step_p5_level_one_to_two():
    q5 = groups.build_group(5, quotient=True)
    r2 = deform.hensel_lift_step(groups.uniserial_representation(5, table=q5))
    assert r2.ring.moduli == (25,)
    s = r2.generator_matrix("sigma")[:, :, 0]
    assert np.array_equal(s % 5, groups.uniserial_representation(
        5, table=q5).generator_matrix("sigma")[:, :, 0])
    diag = np.diagonal(r2.generator_matrix("epsilon")[:, :, 0])
    assert list(diag) == [18, 24, 7, 1]  # Teichmueller lifts of 3, 4, 2, 1


def test_hensel_step_requires_diagonal_teichmuller_eps():
    qt = groups.build_group(3, quotient=True)
    rep = groups.uniserial_representation(3, table=qt)
    g = np.array([[1, 1], [1, 2]], dtype=np.int64)  # invertible mod 3
    ginv = np.array([[2, 2], [2, 1]], dtype=np.int64)
    assert np.array_equal(g @ ginv % 3, np.eye(2, dtype=np.int64))
    moved = groups.GroupRep.from_generators(
        qt, coeff.prime_field(3),
        {
            "sigma": g @ rep.generator_matrix("sigma")[:, :, 0] @ ginv % 3,
            "epsilon": g @ rep.generator_matrix("epsilon")[:, :, 0] @ ginv % 3,
        },
    )
    with pytest.raises(ValueError, match="Teichmueller"):
        deform.hensel_lift_step(moved)


def test_hensel_rejects_full_group_table():
    full = groups.build_group(3, quotient=False)
    qt = groups.build_group(3, quotient=True)
    rep = groups.inflate(groups.uniserial_representation(3, table=qt), full)
    with pytest.raises(ValueError, match="quotient"):
        deform.hensel_lift_step(rep)


def test_hensel_obstruction_carries_level_info():
    err = deform.HenselObstruction(3, 2)
    assert err.p == 3 and err.level == 2
    assert "Z/3^2" in str(err)


# ---------------------------------------------------------------------------
# the mixed-ring representation


def test_mixed_representation_p3_table_and_identities():
    rep = deform.mixed_representation(3, 2, 3)
    assert rep.ring == coeff.mixed_deform(3, 2, 3)
    assert rep.table.size == 18
    assert rep.check_table() == []
    ids = deform.mixed_identity_checks(rep)
    assert ids["tau_power_p_is_identity"]
    assert ids["eps_conjugates_tau_to_power"]
    assert ids["eps_conjugation_exponent"] == 2
    tau = rep.matrix(rep.table.tau)
    assert np.array_equal(tau.arr[:, :, 0], np.eye(2, dtype=np.int64))
    assert np.array_equal(tau.arr[:, :, 1], np.array([[0, 1], [0, 0]]))
    assert not tau.arr[:, :, 2].any()
    eps0 = rep.matrix(rep.table.eps).arr[:, :, 0]
    assert list(np.diagonal(eps0)) == [8, 1]


@pytest.mark.parametrize("p", [5, 7])
def test_mixed_representation_identities(p):
    rep = deform.mixed_representation(p, 2, 3)
    ids = deform.mixed_identity_checks(rep)
    assert ids["tau_power_p_is_identity"]
    assert ids["eps_conjugates_tau_to_power"]
    assert deform.tangent_class_is_nonzero(rep)


def test_mixed_representation_truncates_functorially():
    rep3 = deform.mixed_representation(3, 2, 3)
    down = rep3.convert(coeff.mixed_deform(3, 2, 2))
    assert down.check_table() == []
    fresh = deform.mixed_representation(3, 2, 2)
    assert np.array_equal(down.mats, fresh.mats)


def test_mixed_representation_needs_room_for_tau():
    with pytest.raises(ValueError, match="N >= 2"):
        deform.mixed_representation(3, 2, 1)


def test_tangent_class_vanishes_for_constant_representations():
    # no t-part at all: the deformation is trivial by inspection
    qt = groups.build_group(3, quotient=True)
    full = groups.build_group(3, quotient=False)
    rep = groups.inflate(groups.uniserial_representation(3, table=qt), full)
    lifted = groups.GroupRep(
        full, coeff.mixed_deform(3, 1, 2),
        np.concatenate(
            [rep.mats, np.zeros_like(rep.mats)], axis=3
        ),
    )
    assert not deform.tangent_class_is_nonzero(lifted)


# ---------------------------------------------------------------------------
# the obstruction identity


def test_obstruction_power_is_frozen_for_zero_matrix():
    w = deform.obstruction_check(3, np.zeros((2, 2), dtype=np.int64), "zero")
    assert w.verdict == "PASS"
    assert np.array_equal(w.power.arr[:, :, 0], np.eye(2, dtype=np.int64))
    assert np.array_equal(w.power.arr[:, :, 1], np.array([[0, 3], [0, 0]]))
    assert not w.power.arr[:, :, 2].any()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_obstruction_holds_for_special_and_random_matrices(p):
    witnesses = deform.obstruction_sweep(p, samples=100, seed=7)
    assert len(witnesses) == 103
    assert [w.label for w in witnesses[:3]] == ["zero", "identity", "all-ones"]
    assert all(w.passed() for w in witnesses)


def test_obstruction_verdict_is_seed_independent():
    rng = np.random.default_rng(952)
    for seed in rng.integers(0, 10**6, size=4):
        ws = deform.obstruction_sweep(5, samples=10, seed=int(seed))
        assert all(w.passed() for w in ws)


def test_obstruction_rejects_wrong_shape():
    with pytest.raises(ValueError, match="must be"):
        deform.obstruction_check(5, np.zeros((2, 2), dtype=np.int64))


# ---------------------------------------------------------------------------
# scenarios and reports


def test_family_scenario_reports_five_passing_premises(completed):
    completed("I", 2)  # warm the shared cache
    report = deform.scenario_report(
        deform.Scenario("family", family="I", d=2)
    )
    assert report.scenario_id == "family-I-d2"
    assert report.status == "VERIFIED"
    assert [p.name for p in report.premises] == [
        "stable-endomorphisms",
        "self-extensions-degree-1",
        "self-extensions-degree-2",
        "flat-lift",
        "first-order-class",
    ]
    assert all(p.verdict == "PASS" for p in report.premises)
    assert report.premises[1].anchor == "Ext^1_Λ(T,T) ≅ k"
    assert report.conclusion == deform.CLAIM_FAMILY
    stable = report.premises[0].computed
    assert stable["stable_end_dim"] == 1
    assert stable["end_dim"] == 2  # the full endomorphism algebra is bigger
    assert stable["cover_summands"] == ["1"]


def test_group_scenario_p3_verifies():
    report = deform.scenario_report(deform.Scenario("group", p=3))
    assert report.status == "VERIFIED"
    assert len(report.premises) == 7
    assert all(p.verdict == "PASS" for p in report.premises)
    assert report.conclusion == deform.CLAIM_GROUP
    by_name = {p.name: p.computed for p in report.premises}
    assert by_name["endomorphisms-over-G"]["end_dim_over_G"] == 1
    assert by_name["first-cohomology"]["h1_dim"] == 1
    assert by_name["mixed-ring-representation"]["pairs_checked"] == 18 * 18
    assert by_name["obstruction-identity"]["failures"] == []


def test_obstruction_scenario_report():
    report = deform.scenario_report(
        deform.Scenario("obstruction", p=3, samples=5, seed=11)
    )
    assert report.scenario_id == "obstruction-p3"
    assert report.status == "VERIFIED"
    assert report.conclusion == ""
    assert report.premises[0].computed["witnesses"] == 8


def test_report_json_round_trip():
    report = deform.scenario_report(
        deform.Scenario("obstruction", p=3, samples=2)
    )
    data = report.to_json_dict()
    assert data["schema"] == 1
    back = deform.VerificationReport.from_json_dict(data)
    assert back == report


def test_premises_must_carry_anchors():
    with pytest.raises(ValueError, match="anchor"):
        deform.Premise("nameless", "", "PASS")
    with pytest.raises(ValueError, match="verdict"):
        deform.Premise("odd", "x = y", "MAYBE")


def test_failed_premise_downgrades_and_withholds_the_conclusion():
    good = deform.Premise("a", "x = x", "PASS")
    bad = deform.Premise("b", "x = y", "FAIL", {"left": 1, "right": 2})
    report = deform._finish("demo", [good, bad], "anything")
    assert report.status == "DISCREPANCY"
    assert report.conclusion == ""


def test_scenario_validation():
    with pytest.raises(ValueError, match="kind"):
        deform.Scenario("mystery")
    with pytest.raises(ValueError, match="built-in"):
        deform.Scenario("family", family="I", d=7)
    with pytest.raises(ValueError, match="odd prime"):
        deform.Scenario("group", p=4)
