import pytest
from hypothesis import settings
from hypothesis import strategies as st

from hornersearch.expr import from_dict, parse
from hornersearch.resolvent import ResolventSpec, load_or_generate

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def polynomials(draw, max_vars=5, max_terms=8, max_deg=6, max_coeff=20):
    n = draw(st.integers(1, max_vars))
    names = [f"v{i}" for i in range(n)]
    exps = st.lists(st.integers(0, max_deg), min_size=n, max_size=n).filter(
        lambda e: sum(e) <= max_deg
    )
    coeffs = draw(st.dictionaries(
        exps.map(tuple),
        st.integers(-max_coeff, max_coeff).filter(bool),
        min_size=1, max_size=max_terms,
    ))
    return from_dict(names, coeffs)


@pytest.fixture(scope="session")
def res_cache(tmp_path_factory):
    return tmp_path_factory.mktemp("res")


@pytest.fixture(scope="session")
def resolvent(res_cache):
    def get(m, n):
        return load_or_generate(ResolventSpec(m, n), res_cache)
    return get


@pytest.fixture
def eq1():
    return parse("x^2*z + x^3*y + x^3*y*z")


@pytest.fixture
def eq3():
    return parse("x^50*y + x^40 + y + y*z")


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` records one acceptance line and asserts ``ok``."""

    def check(n: int, ok: bool, detail: str) -> None:
        request.config.stash.setdefault(_ACCEPTANCE, {})[n] = (
            f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        )
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in range(1, max(11, *lines) + 1):
            terminalreporter.write_line(lines.get(n, f"criterion {n:>2}: NOT RUN"))
