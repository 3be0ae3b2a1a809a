from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from anoncontract import Agent, Instance

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def fractions(lo=0, hi=1, denom=40):
    return st.integers(int(lo * denom), int(hi * denom)).map(lambda k: Fraction(k, denom))


@st.composite
def instances(draw, min_n=1, max_n=6, positive_q=True, costs_below_q=False):
    n = draw(st.integers(min_n, max_n))
    agents = []
    for _ in range(n):
        q = draw(fractions(Fraction(1, 40) if positive_q else 0, 1))
        c = draw(fractions(0, q if costs_below_q else 1))
        agents.append(Agent(q, c))
    return Instance(tuple(agents))


@st.composite
def contracts(draw, n, lo=-1, hi=1, denom=20):
    return tuple(Fraction(draw(st.integers(lo * denom, hi * denom)), denom) for _ in range(n))


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
