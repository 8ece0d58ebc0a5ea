"""Built-in benchmark systems, constructed programmatically.

The same systems ship as text files under specs/; these builders are the
reference used by the engine tests.
"""
from __future__ import annotations

from .schema import ArtifactSetting, Signature, Theory
from .search import RasSystem
from .syntax import (
    CaseFn,
    Cst,
    Cube,
    Read,
    TRUE,
    Transition,
    Var,
    conj,
    eq,
    member,
    neq,
)
from .updates import BulkMacro, InsertMacro, KEEP, PropagateMacro, RawTransition


def job_hiring() -> RasSystem:
    """Recruitment process: applications are received, scored, and notified
    in bulk as winner or loser."""
    sig = Signature()
    user = sig.add_sort("UserId", "id")
    emp = sig.add_sort("EmpId", "id")
    comp_in = sig.add_sort("CompInId", "id")
    job_cat = sig.add_sort("JobCatId", "id")
    string = sig.add_sort("String", "value")
    score = sig.add_sort("Score", "value")

    sig.add_func("userName", user, string)
    sig.add_func("empName", emp, string)
    who = sig.add_func("who", comp_in, emp)
    what = sig.add_func("what", comp_in, job_cat)
    sig.add_func("jobCatDescr", job_cat, string)

    enabled = sig.add_const("enabled", string)
    received = sig.add_const("received", string)
    notified = sig.add_const("notified", string)
    winner = sig.add_const("winner", string)
    loser = sig.add_const("loser", string)
    scores = {n: sig.add_const(str(n), score) for n in range(-1, 101)}

    th = Theory(sig)
    st = ArtifactSetting(th)
    app = st.add_artifact_sort("appIndex")
    app_job_cat = st.add_component("appJobCat", app, job_cat)
    applicant = st.add_component("applicant", app, user)
    app_resp = st.add_component("appResp", app, emp)
    app_score = st.add_component("appScore", app, score)
    app_result = st.add_component("appResult", app, string)

    p_state = st.add_variable("pState", string)
    a_state = st.add_variable("aState", string)
    u_id = st.add_variable("uId", user)
    j_id = st.add_variable("jId", job_cat)
    e_id = st.add_variable("eId", emp)
    c_id = st.add_variable("cId", comp_in)

    u_user = Cst(sig.undef(user))
    u_emp = Cst(sig.undef(emp))
    u_comp = Cst(sig.undef(comp_in))
    u_job = Cst(sig.undef(job_cat))
    u_str = Cst(sig.undef(string))

    u = Var("u", user)
    j = Var("j", job_cat)
    e = Var("e", emp)
    c = Var("c", comp_in)
    i = Var("i", app)
    s = Var("s", score)

    enable = PropagateMacro(
        "enable", st, fresh=(u,),
        where=conj(eq(p_state, u_str), neq(u, u_user)),
        sets={p_state: Cst(enabled)},
    )
    from .syntax import App
    insert_step1 = PropagateMacro(
        "insert-step1", st, fresh=(u, j, e, c),
        where=conj(eq(p_state, Cst(enabled)), eq(a_state, u_str),
                   neq(u, u_user), neq(j, u_job), neq(e, u_emp), neq(c, u_comp),
                   eq(App(who, c), e), eq(App(what, c), j)),
        sets={a_state: Cst(received), u_id: u, j_id: j, e_id: e, c_id: c},
    )
    insert_step2 = InsertMacro(
        "insert-step2", st, app, row=i,
        where=conj(eq(p_state, Cst(enabled)), eq(a_state, Cst(received))),
        empty_guard=[applicant],
        row_values={app_job_cat: j_id, applicant: u_id, app_resp: e_id,
                    app_score: Cst(scores[-1]), app_result: u_str},
        sets={a_state: u_str, c_id: u_comp, j_id: u_job, u_id: u_user, e_id: u_emp},
    )
    evaluate = PropagateMacro(
        "evaluate", st, fresh=(s,),
        where=conj(eq(p_state, Cst(enabled)), eq(a_state, u_str)),
        write=(app_score, i, s,
               conj(eq(Read(app_score, i), Cst(scores[-1])),
                    member(s, [scores[n] for n in range(0, 101)]))),
    )
    notify = BulkMacro(
        "notify", st, app,
        var_cond=conj(eq(p_state, Cst(enabled)), eq(a_state, u_str)),
        row_param=Var("r", app),
        row_cond=member(Read(app_score, Var("r", app)),
                        [scores[n] for n in range(81, 101)]),
        updates={app_result: (winner, loser)},
        sets={p_state: Cst(notified)},
    )

    k = Var("k", app)
    props = {
        "P1": [Cube((k,), frozenset({
            eq(p_state, Cst(notified)),
            neq(Read(applicant, k), u_user),
            neq(Read(app_result, k), Cst(winner)),
            neq(Read(app_result, k), Cst(loser)),
        }))],
        "P3": [Cube((k,), frozenset({
            eq(p_state, Cst(notified)),
            neq(Read(applicant, k), u_user),
            neq(Read(app_result, k), Cst(loser)),
        }))],
    }
    init = {}  # everything starts undef
    transitions = [m.compile() for m in
                   (enable, insert_step1, insert_step2, evaluate, notify)]
    return RasSystem("job-hiring", st, init, transitions, props)


def flight_management() -> RasSystem:
    """Airline process: safe cities, passenger registration, overbooking
    detection and route cancellation, in merged single-transition form."""
    sig = Signature()
    city = sig.add_sort("CityId", "id")
    flight = sig.add_sort("FlightId", "id")
    destination = sig.add_func("destination", flight, city)

    th = Theory(sig)
    st = ArtifactSetting(th)
    city_idx = st.add_artifact_sort("CityIndex")
    pass_idx = st.add_artifact_sort("PassengerIndex")
    flight_idx = st.add_artifact_sort("FlightIndex")
    safe_city = st.add_component("safeCity", city_idx, city)
    regd = st.add_component("regdPassenger", pass_idx, flight)
    overbooked = st.add_component("overbooked", flight_idx, flight)

    u_city = Cst(sig.undef(city))
    u_flight = Cst(sig.undef(flight))

    from .syntax import App

    c = Var("c", city)
    i = Var("i", city_idx)
    jc = Var("@y", city_idx)
    mark_safe = Transition(
        "mark-safe", (c, i),
        conj(neq(c, u_city), eq(Read(safe_city, i), u_city)),
        (),
        ((safe_city, jc, CaseFn((
            (eq(jc, i), c),
            (eq(Read(safe_city, jc), c), u_city),
            (TRUE, Read(safe_city, jc)),
        ))),),
    )

    f = Var("f", flight)
    p = Var("p", pass_idx)
    jp = Var("@y", pass_idx)
    register = Transition(
        "register", (i, f, p),
        conj(neq(f, u_flight), eq(App(destination, f), Read(safe_city, i)),
             eq(Read(regd, p), u_flight)),
        (),
        ((regd, jp, CaseFn((
            (eq(jp, p), f),
            (TRUE, Read(regd, jp)),
        ))),),
    )

    p1, p2, p3 = Var("p1", pass_idx), Var("p2", pass_idx), Var("p3", pass_idx)
    m = Var("m", flight_idx)
    jf = Var("@y", flight_idx)
    overbook = Transition(
        "overbook", (p1, p2, p3, m),
        conj(neq(p1, p2), neq(p1, p3), neq(p2, p3),
             neq(Read(regd, p1), u_flight),
             neq(Read(regd, p2), u_flight),
             neq(Read(regd, p3), u_flight),
             eq(Read(regd, p1), Read(regd, p2)),
             eq(Read(regd, p1), Read(regd, p3)),
             eq(Read(overbooked, m), u_flight)),
        (),
        ((regd, jp, CaseFn((
            (eq(Read(regd, jp), Read(regd, p1)), u_flight),
            (TRUE, Read(regd, jp)),
        ))),
         (overbooked, jf, CaseFn((
             (eq(jf, m), Read(regd, p1)),
             (TRUE, Read(overbooked, jf)),
         )))),
    )

    cancel = Transition(
        "cancel-route", (i,),
        neq(Read(safe_city, i), u_city),
        (),
        ((regd, jp, CaseFn((
            (eq(App(destination, Read(regd, jp)), Read(safe_city, i)), u_flight),
            (TRUE, Read(regd, jp)),
        ))),),
    )

    q = Var("q", pass_idx)
    i1, i2 = Var("i1", city_idx), Var("i2", city_idx)
    props = {
        # a passenger registered on a flight with no destination on record
        "phantom-flight": [Cube((q,), frozenset({
            neq(Read(regd, q), u_flight),
            eq(App(destination, Read(regd, q)), u_city),
        }))],
        # two distinct safe-city entries hold the same city
        "duplicate-safe-city": [Cube((i1, i2), frozenset({
            neq(i1, i2),
            neq(Read(safe_city, i1), u_city),
            eq(Read(safe_city, i1), Read(safe_city, i2)),
        }))],
        # some passenger is registered at all
        "any-registration": [Cube((q,), frozenset({
            neq(Read(regd, q), u_flight),
        }))],
    }
    transitions = [RawTransition(t.name, t).compile()
                   for t in (mark_safe, register, overbook, cancel)]
    return RasSystem("flight-management", st, {}, transitions, props)
