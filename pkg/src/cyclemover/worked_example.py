"""Built-in regression on the divisor family y*g(x) and its degree-1 cousin.

Runs the full chain of exact symbolic assertions for the moving machinery on
a fixed, non-sampled instance: the pullback formulas of the vertex move and
the degree-1 ladder, the leading-form identity of the moved divisor, the
endpoint and quasi-finiteness properties of the two homotopy families, and
the bad-locus containment for the interval-embedding pullback.  Every check
is an exact polynomial or radical-level ideal identity; no tolerances.

Interval-embedding convention: the embedding indexed by the monotone vertex
sequence (0, 1) sends the homotopy coordinate to t1.  In the mirrored
convention, where it equals 1 - t1 = t0, the distinguished bad point reads
((1,0), [1:0]) instead of ours, ((0,1), [1:0]); reports print both readings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .idealkit import IdealPresentation, ideal_equal, radical_membership
from .polyring import FIBER, SubstitutionMap, leading_form
from .simplicial import chart_restrict, make_context, FaceSelector
from .supports import (
    Support,
    classify_support,
    locus_is_empty,
    quasi_finite_locus,
    tower_position,
    CERTIFIED,
)

__all__ = ["CheckResult", "run_checks"]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def _radical_equal(I: IdealPresentation, J: IdealPresentation, budget=None) -> bool:
    return all(radical_membership(g, J, budget) for g in I.generators) and all(
        radical_membership(g, I, budget) for g in J.generators
    )


def _radical_contained(I: IdealPresentation, J: IdealPresentation, budget=None) -> bool:
    """V(I) ⊆ V(J): every generator of J vanishes on V(I)."""
    return all(radical_membership(g, I, budget) for g in J.generators)


def run_checks(field=None, budget=None) -> list[CheckResult]:
    """All assertions of the built-in regression, in order."""
    out: list[CheckResult] = []

    def check(name: str, ok: bool, detail: str = ""):
        out.append(CheckResult(name, bool(ok), detail))

    # ----- degree 0: the divisor y*g(x) ------------------------------------
    ctx0 = make_context(0, 1, 1, "affine", field)
    R0 = ctx0.ring
    g0 = R0.parse("y1*x1")
    D0 = Support(ctx0, [g0])

    check(
        "deg0-bad-locus-is-y-axis",
        _radical_equal(
            quasi_finite_locus(D0),
            IdealPresentation(quasi_finite_locus(D0).ring,
                              [quasi_finite_locus(D0).ring.parse("y1"),
                               quasi_finite_locus(D0).ring.parse("t0 - 1")]),
            budget,
        ),
        "non-quasi-finite locus of V(y*x) equals V(y)",
    )

    phi0 = SubstitutionMap.from_dict(R0, R0, {"y1": R0.parse("y1 + x1^2")})
    moved0 = phi0(g0)
    check(
        "deg0-move-formula",
        moved0 == R0.parse("(y1 + x1^2)*x1"),
        f"pullback of V(y*x) under y -> y + x^2 is {moved0}",
    )
    check(
        "deg0-moved-quasi-finite",
        locus_is_empty(ctx0, quasi_finite_locus(Support(ctx0, [moved0]), budget), budget),
        "moved divisor has finite fibers over the whole y-line",
    )

    # projective closure of the same move
    pctx0 = make_context(0, 1, 1, "projective", field)
    P0 = pctx0.ring
    D0bar = Support(pctx0, [P0.parse("Y1*x1")])
    phi0bar = SubstitutionMap.from_dict(P0, P0, {"Y1": P0.parse("Y1 + x1^2*Y0")})
    moved0bar = phi0bar(P0.parse("Y1*x1"))
    check(
        "deg0-projective-move-formula",
        moved0bar == P0.parse("(Y1 + x1^2*Y0)*x1"),
        f"pullback of Z(Y1*x) is {moved0bar}",
    )
    check(
        "deg0-projective-moved-quasi-finite",
        locus_is_empty(pctx0, quasi_finite_locus(Support(pctx0, [moved0bar]), budget), budget),
        "moved closure is quasi-finite over the whole projective line",
    )

    # homotopy family in degree 0
    hctx0 = pctx0.with_homotopy()
    H0 = hctx0.ring
    fam0 = H0.parse("(Y1 + (1 - u)*x1^2*Y0)*x1")
    at0 = H0.transfer(fam0.evaluate({"u": H0.field.zero}), P0)
    at1 = H0.transfer(fam0.evaluate({"u": H0.field.one}), P0)
    check("deg0-family-endpoint-0", at0 == moved0bar, "u=0 slice is the moved divisor")
    check("deg0-family-endpoint-1", at1 == P0.parse("Y1*x1"), "u=1 slice is the original divisor")

    fam0_support = Support(hctx0, [fam0])
    c0_ctx, c0_ideal = chart_restrict(hctx0, fam0_support.ideal, 0)
    c0_sup = Support(c0_ctx, [g for g in c0_ideal.generators if g != c0_ctx.relation])
    c0_locus = quasi_finite_locus(c0_sup, budget)
    expected0 = IdealPresentation(
        c0_locus.ring,
        [c0_locus.ring.parse("u - 1"), c0_locus.ring.parse("y1"), c0_locus.ring.parse("t0 - 1")],
    )
    check(
        "deg0-family-bad-locus-single-point",
        _radical_equal(c0_locus, expected0, budget),
        "bad locus on the distinguished chart is the single point (u=1, [1:0])",
    )
    c1_ctx, c1_ideal = chart_restrict(hctx0, fam0_support.ideal, 1)
    c1_sup = Support(c1_ctx, [g for g in c1_ideal.generators if g != c1_ctx.relation])
    check(
        "deg0-family-bad-locus-misses-other-chart",
        locus_is_empty(c1_ctx, quasi_finite_locus(c1_sup, budget), budget),
        "family is quasi-finite along the whole complementary chart",
    )

    # ----- degree 1: the divisor t1(t0 + y*g) + t0(t1 + y*h) -----------------
    ctx1 = make_context(1, 1, 1, "affine", field)
    R1 = ctx1.ring
    binds = {"g": R1.parse("x1"), "h": R1.parse("x1 + 1"),
             "a": R1.parse("x1^3"), "b": R1.parse("x1^3"), "p": R1.parse("x1^2")}
    f_d1 = R1.parse("t1*(t0 + y1*g) + t0*(t1 + y1*h)", binds)
    D1 = Support(ctx1, [f_d1])

    check(
        "deg1-defining-polynomial",
        f_d1 == R1.parse("2*t0*t1 + t1*y1*x1 + t0*y1*x1 + t0*y1"),
        f"degree-1 divisor polynomial expands to {f_d1}",
    )

    # vertex restrictions
    v1_ctx = ctx1.twin(n=0)
    face_t0 = D1.face(FaceSelector((1,), 1))   # set t0 = 0
    face_t1 = D1.face(FaceSelector((0,), 1))   # set t1 = 0
    exp_g = v1_ctx.adjoin_relation([v1_ctx.ring.parse("y1*x1")])
    exp_h = v1_ctx.adjoin_relation([v1_ctx.ring.parse("y1*(x1+1)")])
    check("deg1-vertex-restriction-t0", ideal_equal(face_t0.ideal, exp_g, budget),
          "restriction to t0=0 is V(y*g)")
    check("deg1-vertex-restriction-t1", ideal_equal(face_t1.ideal, exp_h, budget),
          "restriction to t1=0 is V(y*h)")

    bad_d1 = quasi_finite_locus(D1, budget)
    two_points = IdealPresentation(
        bad_d1.ring,
        [bad_d1.ring.parse("y1"), bad_d1.ring.parse("t0*t1"),
         bad_d1.ring.parse("t0 + t1 - 1")],
    )
    check(
        "deg1-bad-locus-two-vertices",
        _radical_equal(bad_d1, two_points, budget),
        "non-quasi-finite locus is the two vertex points over y=0",
    )

    tower = tower_position(D1)
    top = [rec for rec in tower.per_face if rec[0].is_full()][0]
    check(
        "deg1-tower-position",
        top[1:] == (1, 1, 2) and tower.q_max == 1 and tower.e_bound == 1,
        f"top-face tower indices {top[1:]}, global ({tower.q_max}, {tower.e_bound}, {tower.f_bound})",
    )

    # the explicit degree-1 ladder with a = b = x^3, p = x^2
    phi1 = SubstitutionMap.from_dict(
        R1, R1,
        {"t0": R1.parse("t0 + t0*t1*a", binds),
         "t1": R1.parse("t1 - t0*t1*a", binds),
         "y1": R1.parse("y1 + p + t0*t1*b", binds)},
    )
    f_moved = phi1(f_d1)
    f_display = R1.parse(
        "(t1 - t0*t1*a)*(t0 + t0*t1*a + g*(y1 + p + t0*t1*b))"
        " + (t0 + t0*t1*a)*(t1 - t0*t1*a + h*(y1 + p + t0*t1*b))",
        binds,
    )
    check(
        "deg1-move-pullback-term-for-term",
        f_moved == f_display,
        "substituted divisor equation matches its displayed expansion exactly",
    )

    lf = leading_form(f_moved, FIBER)
    # at this instance lf_x(h - g) = 1 and the two top contributions tie:
    # (t0 t1)^2 a b lf_x(h-g) - 2 (t0 t1 a)^2 = -(t0 t1)^2 a b, exactly.
    expected_lf = -(R1.parse("(t0*t1)^2 * a * b", binds))
    check(
        "deg1-leading-form-tied-instance",
        lf == expected_lf,
        f"leading fiber form is {lf} = -(t0*t1)^2*a*b*c with c = lf_x(h-g) = 1",
    )

    # generic-degree companion where the displayed identity holds on the nose
    binds2 = {"g": R1.parse("x1"), "h": R1.parse("x1^2"),
              "a": R1.parse("x1^3"), "b": R1.parse("x1^3"), "p": R1.parse("x1^2")}
    f_d1_gen = R1.parse("t1*(t0 + y1*g) + t0*(t1 + y1*h)", binds2)
    phi1_gen = SubstitutionMap.from_dict(
        R1, R1,
        {"t0": R1.parse("t0 + t0*t1*a", binds2),
         "t1": R1.parse("t1 - t0*t1*a", binds2),
         "y1": R1.parse("y1 + p + t0*t1*b", binds2)},
    )
    lf_gen = leading_form(phi1_gen(f_d1_gen), FIBER)
    c_gen = leading_form(R1.parse("h - g", binds2), FIBER)
    check(
        "deg1-leading-form-generic-instance",
        lf_gen == R1.parse("(t0*t1)^2 * a * b", binds2) * c_gen,
        "leading fiber form equals (t0*t1)^2*a*b*lf_x(h-g) exactly",
    )

    check(
        "deg1-moved-quasi-finite",
        locus_is_empty(ctx1, quasi_finite_locus(Support(ctx1, [f_moved]), budget), budget),
        "moved degree-1 divisor is quasi-finite over the whole base",
    )

    # projective degree-1 move
    pctx1 = make_context(1, 1, 1, "projective", field)
    P1 = pctx1.ring
    pbinds = {"g": P1.parse("x1"), "h": P1.parse("x1 + 1"),
              "a": P1.parse("x1^3"), "b": P1.parse("x1^3"), "p": P1.parse("x1^2")}
    F_d1 = P1.parse("t1*(Y0*t0 + Y1*g) + t0*(Y0*t1 + Y1*h)", pbinds)
    D1bar = Support(pctx1, [F_d1])
    phi1bar = SubstitutionMap.from_dict(
        P1, P1,
        {"t0": P1.parse("t0 + t0*t1*a", pbinds),
         "t1": P1.parse("t1 - t0*t1*a", pbinds),
         "Y1": P1.parse("Y1 + (p + t0*t1*b)*Y0", pbinds)},
    )
    F_moved = phi1bar(F_d1)
    moved_bar_support = Support(pctx1, [F_moved])
    ok_charts = True
    for k in (0, 1):
        ck, ci = chart_restrict(pctx1, moved_bar_support.ideal, k)
        sup = Support(ck, [g for g in ci.generators if g != ck.relation])
        ok_charts = ok_charts and locus_is_empty(ck, quasi_finite_locus(sup, budget), budget)
    check(
        "deg1-projective-moved-quasi-finite-both-charts",
        ok_charts,
        "moved closure is quasi-finite over the whole projective ambient "
        "(infinity side uses that g and h are not proportional)",
    )

    # homotopy family in degree 1
    hctx1 = pctx1.with_homotopy()
    HR = hctx1.ring
    hbinds = {"g": HR.parse("x1"), "h": HR.parse("x1 + 1"),
              "a": HR.parse("x1^3"), "b": HR.parse("x1^3"), "p": HR.parse("x1^2")}
    Phi1 = SubstitutionMap.from_dict(
        HR, HR,
        {"t0": HR.parse("t0 + (1-u)*t0*t1*a", hbinds),
         "t1": HR.parse("t1 - (1-u)*t0*t1*a", hbinds),
         "Y1": HR.parse("Y1 + (1-u)*(p + t0*t1*b)*Y0", hbinds)},
    )
    lift = hctx1.lift_from(pctx1)
    fam1 = Phi1(lift(F_d1))
    at0 = HR.transfer(fam1.evaluate({"u": HR.field.zero}), P1)
    at1 = HR.transfer(fam1.evaluate({"u": HR.field.one}), P1)
    check("deg1-family-endpoint-0", at0 == F_moved, "u=0 slice is the ladder pullback")
    check("deg1-family-endpoint-1", at1 == F_d1, "u=1 slice is the original closure")

    fam1_support = Support(hctx1, [fam1])
    ok_contained = True
    detail_pieces = []
    for k in (0, 1):
        ck, ci = chart_restrict(hctx1, fam1_support.ideal, k)
        sup = Support(ck, [g for g in ci.generators if g != ck.relation])
        locus = quasi_finite_locus(sup, budget)
        if locus_is_empty(ck, locus, budget):
            detail_pieces.append(f"chart {k}: empty")
            continue
        member = radical_membership(locus.ring.parse("u - 1"), locus, budget)
        ok_contained = ok_contained and member
        detail_pieces.append(f"chart {k}: contained in u=1 ({member})")
    check(
        "deg1-family-bad-locus-in-u1-slice",
        ok_contained,
        "; ".join(detail_pieces),
    )

    # interval embedding with vertex sequence (0, 1): u -> t1
    fj = SubstitutionMap.from_dict(HR, P1, {"u": P1.parse("t1")})
    member = Support(pctx1, [fj(fam1)])
    c0, ci0 = chart_restrict(pctx1, member.ideal, 0)
    sup0 = Support(c0, [g for g in ci0.generators if g != c0.relation])
    locus0 = quasi_finite_locus(sup0, budget)
    point = IdealPresentation(
        locus0.ring,
        [locus0.ring.parse("t0"), locus0.ring.parse("y1"), locus0.ring.parse("t0 + t1 - 1")],
    )
    check(
        "deg1-interval-pullback-bad-locus-single-vertex",
        _radical_equal(locus0, point, budget),
        "bad locus is the single point ((0,1),[1:0]); mirrored convention reads ((1,0),[1:0])",
    )
    d1bar_c0, d1bar_i0 = chart_restrict(pctx1, D1bar.ideal, 0)
    d1bar_sup = Support(d1bar_c0, [g for g in d1bar_i0.generators if g != d1bar_c0.relation])
    own_bad = quasi_finite_locus(d1bar_sup, budget)
    check(
        "deg1-interval-pullback-bad-locus-containment",
        _radical_contained(locus0, own_bad, budget),
        "bad locus of the interval pullback sits inside the divisor's own bad locus",
    )
    # restriction at the vertex where the interval coordinate is 1
    at_vertex = fj(fam1).evaluate({"t0": P1.field.zero, "t1": P1.field.one})
    check(
        "deg1-interval-pullback-vertex-equation",
        at_vertex == P1.parse("Y1*g", pbinds).evaluate({}),
        f"restriction at the u=1 vertex is {at_vertex} = Y1*g",
    )

    # classification of the original closure certifies at (1,1,1)
    rec = classify_support(D1bar, 1, 1, 1)
    check(
        "deg1-closure-classification",
        rec.verdict == CERTIFIED,
        f"closure certifies at (1,1,1): {rec.verdict}",
    )

    return out
