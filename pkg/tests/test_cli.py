import csv
import io
import json
import subprocess
import sys

import pytest

from fermatq import cli


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), out=buf)
    return code, buf.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_quotient():
    code, out = run("quotient", "--a", "2", "--p", "1093")
    assert code == 0
    assert rows(out) == [{"a": "2", "p": "1093", "q": "0"}]


def test_solutions():
    code, out = run("solutions", "--p", "29")
    assert rows(out) == [{"p": "29", "z": "14", "d": "28", "lambda": "0"}]


def test_p0():
    assert rows(run("p0", "--a", "2", "--c", "1")[1])[0]["p0"] == "79"


def test_json_document():
    code, out = run("crt", "--p", "5,7", "--format", "json")
    doc = json.loads(out)
    assert set(doc) == {"config", "rows", "runtime_seconds"}
    assert [r["A"] for r in doc["rows"]][:2] == [1, 18]
    assert doc["config"]["command"] == "crt"


def test_float_format():
    _, out = run("moments", "--p", "10^7+1009", "--n", "11")
    assert rows(out)[0]["sigma"] == "1.00004672766831"
    _, out = run("ratio", "--p", "100003", "--a", "2")
    assert len(rows(out)[0]["ratio"].replace("0.", "", 1)) <= 15


def test_bad_arguments_exit_2(capsys):
    assert run("quotient", "--a", "2", "--p", "1092")[0] == 2
    assert run("quotient", "--p", "7")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.run(["quotient", "--a", "two"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.run(["no-such-command"])


def test_budget_exit_3(monkeypatch):
    from fermatq import arith

    def boom(*a, **k):
        raise arith.FactorizationTimeout(91, 1)

    monkeypatch.setattr(arith, "phi_squared_sum", boom)
    assert run("upsilon-eta", "--p", "1009")[0] == 3


def test_parse_int():
    assert cli.parse_int("10^7") == 10**7
    assert cli.parse_int("2*10^5") == 200000
    assert cli.parse_int("2e5") == 200000
    assert cli.parse_int("10**7+19") == 10000019
    assert cli.parse_int_list("0-3,123") == [0, 1, 2, 3, 123]


def test_deterministic_across_threads():
    a = run("first-zero", "--a", "2", "--lo", "1094", "--hi", "10000", "--threads", "1")[1]
    b = run("first-zero", "--a", "2", "--lo", "1094", "--hi", "10000", "--threads", "3")[1]
    assert a == b
    a = run("lambda-stats", "--lo", "1000", "--hi", "3000", "--seed", "5", "--n", "4")[1]
    b = run("lambda-stats", "--lo", "1000", "--hi", "3000", "--seed", "5", "--n", "4", "--threads", "2")[1]
    assert a == b


def test_every_operation_has_exactly_one_command():
    ops = [
        "arith.is_prime", "arith.prime_range", "arith.pow_mod", "arith.factorize", "arith.euler_phi",
        "arith.moebius", "arith.divisors", "arith.multiplicative_order", "arith.phi_squared_sum",
        "cyclotomic.phi_m_eval", "cyclotomic.reduce", "cyclotomic.factor_congruence_check",
        "cyclotomic.pairwise_coprime_check", "cyclotomic.wieferich_equivalence_check",
        "fermat.fermat_quotient", "fermat.quotient_variants", "fermat.lift_to_solution",
        "fermat.solutions_in_range", "fermat.solutions_mod_p2", "fermat.crt_solutions",
        "fermat.orders_of_powers", "fermat.theta_offsets", "fermat.first_solution_search",
        "fermat.average_solution_count",
        "stats.classify_primes", "stats.value_coverage", "stats.lambda_multiplicity",
        "stats.multiplicity_survey", "stats.equidistribution_nt", "stats.sigma_moment",
        "stats.binomial_tail", "stats.ratio_encadre", "stats.epsilon_exponent",
        "densities.c_p", "densities.p_m_product", "densities.local_solution_table",
        "densities.dp_product", "densities.crt_exact_count", "densities.survey_nonzero",
        "densities.upsilon", "densities.eta", "densities.eta_minus_upsilon",
        "densities.s_partial", "densities.series_sums", "densities.p0_solver",
    ]
    exposed = [op for _, listed in cli.COMMANDS.values() for op in listed]
    for op in ops:
        assert exposed.count(op) == 1, op
    import importlib

    for op in exposed:
        mod, name = op.split(".")
        assert hasattr(importlib.import_module(f"fermatq.{mod}"), name), op


@pytest.mark.parametrize("argv", [
    ["variants", "--a", "14", "--p", "29"],
    ["lift", "--a", "2", "--p", "11"],
    ["orders-of-powers", "--a", "3", "--p", "37813"],
    ["theta", "--a", "3", "--p", "11"],
    ["classify", "--lo", "2", "--hi", "42"],
    ["coverage", "--p", "11"],
    ["lambda-stats", "--p", "97", "--v", "41"],
    ["lambda-stats", "--lo", "1000", "--hi", "2000", "--v", "0-2"],
    ["nt-equidist", "--bound", "1000", "--t", "2"],
    ["binom-tail", "--p", "10007", "--n", "14"],
    ["epsilon", "--p", "101", "--a", "2"],
    ["cp", "--m", "5", "--p", "11"],
    ["pm-product", "--m", "40", "--n", "1000"],
    ["local-table", "--p", "7"],
    ["dp-product", "--x", "1000"],
    ["crt-count", "--x", "5"],
    ["survey", "--y", "100", "--x", "100"],
    ["upsilon-eta", "--p", "1000003"],
    ["s-partial", "--x", "1000"],
    ["series", "--a", "2", "--bound", "1000"],
    ["avg-count", "--lo", "2", "--hi", "14", "--bound", "100"],
    ["table-small"],
    ["first-zero", "--a", "5", "--p", "6692367337"],
    ["cyclotomic", "--m", "6", "--a", "5"],
    ["coprime", "--a", "23", "--m", "6"],
    ["wieferich", "--a", "2", "--p", "1093"],
    ["factor", "--n", "10000102"],
])
def test_commands_run(argv):
    code, out = run(*argv)
    assert code == 0
    assert len(rows(out)) >= 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fermatq", "table-small"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "3,11"
