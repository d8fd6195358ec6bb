import random
import shutil
import subprocess

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polynomials
from oracles import EQ1, string_cse_count
from hornersearch.csedag import (
    ADD,
    MUL,
    SUB,
    DagNode,
    build_dag,
    count_ops,
    dag_from_code,
    emit_code,
    evaluate_dag,
    tree_op_count,
)
from hornersearch.expr import OpCount, evaluate, parse
from hornersearch.hornerform import (
    Const,
    HornerScheme,
    Neg,
    Power,
    Product,
    Sum,
    Var,
    apply_scheme,
    evaluate_tree,
)

a, b, c, d, e = (Var(i) for i in range(5))


def fig1_tree():
    shared = Product((b, Sum((a, e))))
    return Sum((Product((c, shared)), Product((d, Product((b, Sum((e, a))))))))


def test_fig1_sharing_saves_one_add_one_mul():
    t = fig1_tree()
    assert tree_op_count(t) - count_ops(build_dag(t)) == OpCount(1, 1)
    assert count_ops(build_dag(t)) == OpCount(3, 2)


def test_commutative_duplicates_collapse():
    d1 = build_dag(Sum((a, b)))
    d2 = build_dag(Sum((b, a)))
    assert d1 == d2
    assert [n.kind for n in d1.nodes].count(ADD) == 1


def test_power_prefix_shared():
    dag = build_dag(Sum((Power(a, 3), Power(a, 2))))
    assert count_ops(dag) == OpCount(2, 1)


def test_eq1_dag():
    p = parse(EQ1)
    dag = build_dag(apply_scheme(p, HornerScheme((0, 1, 2))))
    assert count_ops(dag) == OpCount(4, 2)


def test_single_var():
    dag = build_dag(Var(0))
    assert count_ops(dag) == OpCount(0, 0)
    assert emit_code(dag, ["x"]) == "result = x;"


def test_emit_product():
    assert emit_code(build_dag(Product((a, b))), ["x", "y"]) == "Z1 = x*y;\nresult = Z1;"


def test_emit_shared_once():
    code = emit_code(build_dag(fig1_tree()), list("abcde"))
    lines = code.splitlines()
    defs = [ln for ln in lines if ln.startswith("Z")]
    assert len(defs) == count_ops(build_dag(fig1_tree())).total
    shared = next(ln.split(" = ")[0] for ln in defs if ln.endswith("= a+e;"))
    prod = next(ln.split(" = ")[0] for ln in defs if f"b*{shared}" in ln)
    assert sum(f"*{prod};" in ln or f"= {prod}*" in ln for ln in lines) == 2


def test_opposite_differences_share_one_node():
    t = Sum((Product((Sum((a, Neg(b))), c)), Product((Sum((b, Neg(a))), d))))
    dag = build_dag(t)
    assert [n.kind for n in dag.nodes].count(SUB) == 2
    assert count_ops(dag) == OpCount(2, 2)
    for vals in ([1, 2, 3, 4, 5], [7, -3, 2, 9, 0]):
        assert evaluate_dag(dag, vals) == evaluate_tree(t, vals)


def test_negated_root():
    p = parse("-x*y - x")
    dag = build_dag(apply_scheme(p, HornerScheme((0, 1))))
    assert dag.negate
    assert emit_code(dag, p.names).splitlines()[-1].startswith("result = -")


def _well_formed(dag):
    assert len(set(dag.nodes)) == len(dag.nodes)
    for i, n in enumerate(dag.nodes):
        if n.kind in (ADD, SUB, MUL):
            assert n.a < i and n.b < i
            if n.kind != SUB:
                assert n.a <= n.b


def _random_scheme(p, rng, partial=False):
    order = list(range(p.nvars))
    rng.shuffle(order)
    if partial:
        order = order[: rng.randint(0, len(order))]
    return HornerScheme(tuple(order), rng.choice(["forward", "backward"]))


@given(polynomials(), st.randoms(use_true_random=False), st.booleans())
def test_sharing_sound_and_monotone(p, rng, partial):
    t = apply_scheme(p, _random_scheme(p, rng, partial))
    dag = build_dag(t)
    _well_formed(dag)
    assert count_ops(dag).total <= tree_op_count(t).total
    pts = random.Random(3)
    for _ in range(20):
        point = [pts.randint(-40, 40) for _ in range(p.nvars)]
        assert evaluate_dag(dag, point) == evaluate_tree(t, point)


@given(polynomials(), st.randoms(use_true_random=False))
def test_matches_string_oracle(p, rng):
    t = apply_scheme(p, _random_scheme(p, rng))
    ops = count_ops(build_dag(t))
    assert (ops.muls, ops.adds) == string_cse_count(t)


@given(polynomials(), st.randoms(use_true_random=False), st.booleans())
def test_code_roundtrip_idempotent(p, rng, partial):
    dag = build_dag(apply_scheme(p, _random_scheme(p, rng, partial)))
    code = emit_code(dag, p.names)
    again = dag_from_code(code, p.names)
    assert again == dag
    assert emit_code(again, p.names) == code
    assert count_ops(dag).total == sum(1 for ln in code.splitlines() if ln.startswith("Z"))


@given(polynomials(), st.randoms(use_true_random=False))
def test_emitted_code_runs_as_python(p, rng):
    dag = build_dag(apply_scheme(p, _random_scheme(p, rng)))
    code = emit_code(dag, p.names)
    pts = random.Random(11)
    for _ in range(20):
        point = {n: pts.randint(-30, 30) for n in p.names}
        env = dict(point)
        exec(code, {}, env)
        assert env["result"] == evaluate(p, point)


def test_deterministic_tables():
    p = parse(EQ1)
    t = apply_scheme(p, HornerScheme((1, 0, 2)))
    assert build_dag(t) == build_dag(apply_scheme(p, HornerScheme((1, 0, 2))))


def test_bad_code_rejected():
    with pytest.raises(ValueError):
        dag_from_code("Z1 = x / y;\nresult = Z1;", ["x", "y"])


def test_dag_node_defaults():
    assert DagNode("var", 3) == DagNode("var", 3, -1)
    assert build_dag(Const(7)).nodes == (DagNode("const", 7),)


@pytest.mark.skipif(shutil.which("cc") is None, reason="no C compiler")
def test_emitted_code_compiles_as_c(tmp_path):
    rng = random.Random(5)
    p = parse("3*w^2*x - 2*x*y*z + y^3 - 5*w*z + 7*x^2*y - z + 4")
    dag = build_dag(apply_scheme(p, _random_scheme(p, rng)))
    body = emit_code(dag, p.names)
    temps = sorted({ln.split(" = ")[0] for ln in body.splitlines() if ln.startswith("Z")},
                   key=lambda s: int(s[1:]))
    decl = f"long long {', '.join(temps)};" if temps else ""
    src = tmp_path / "poly.c"
    src.write_text(
        "#include <stdio.h>\n#include <stdlib.h>\n"
        "int main(int argc, char **argv) {\n"
        + "".join(f"long long {n} = atoll(argv[{i + 1}]);\n" for i, n in enumerate(p.names))
        + f"long long result;\n{decl}\n{body}\n"
        'printf("%lld\\n", result);\nreturn 0;\n}\n'
    )
    exe = tmp_path / "poly"
    subprocess.run(["cc", "-O1", "-o", str(exe), str(src)], check=True)
    pts = random.Random(2)
    for _ in range(10):
        point = [pts.randint(-20, 20) for _ in p.names]
        out = subprocess.run([str(exe), *map(str, point)], check=True,
                             capture_output=True, text=True).stdout
        assert int(out) == evaluate(p, point)
