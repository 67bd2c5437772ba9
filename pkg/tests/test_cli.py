"""Command line driver: verbs, exit codes, flag placement, sessions."""

import json

from opcurve.cli import main
from opcurve.session import Session

CUSP_P = "Dx^2 - 2*1/((x+1)^2)"
CUSP_Q = "Dx^3 - 3*1/((x+1)^2)*Dx + 3*1/((x+1)^3)"
J_GEN = "[[0,1],[z^-1,0]]"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


# -- verify commute ---------------------------------------------------

def test_verify_commute_cusp_pass(capsys):
    code, out, err = run(capsys, "verify", "commute", CUSP_P, CUSP_Q)
    assert code == 0
    assert out == ["PASS: all commutators zero to precision (Nx=12)"]
    assert err == ""


def test_verify_commute_exact_pass(capsys):
    code, out, _ = run(capsys, "verify", "commute", "Dx^2", "Dx^3")
    assert code == 0
    assert out == ["PASS: all commutators zero exactly"]


def test_verify_commute_witness(capsys):
    code, out, _ = run(capsys, "verify", "commute", "Dx", "x*Dx")
    assert code == 1
    assert out[0] == "FAIL: 1 nonzero commutator(s) exactly"
    assert out[1] == "  [op0, op1] = Dx"


def test_verify_commute_session_operators(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "session", "set", "P", CUSP_P)
    run(capsys, "--session", path, "session", "set", "Q", CUSP_Q)
    code, out, _ = run(capsys, "--session", path, "verify", "commute")
    assert code == 0
    assert out == ["PASS: all commutators zero to precision (Nx=12)"]


def test_verify_commute_needs_operands(capsys):
    code, out, err = run(capsys, "verify", "commute")
    assert code == 3
    assert "session" in err


# -- pdo verbs --------------------------------------------------------

def test_compose_heisenberg(capsys):
    code, out, _ = run(capsys, "pdo", "commutator", "Dx", "x")
    assert code == 0
    assert out == ["(1)"]


def test_compose_json_is_canonical(capsys):
    code, out, _ = run(capsys, "--json", "pdo", "compose", "Dx", "x")
    assert code == 0
    text = "\n".join(out) + "\n"
    obj = json.loads(text)
    assert obj["type"] == "pdo"
    assert json.dumps(obj, sort_keys=True, indent=2) + "\n" == text


def test_split(capsys):
    code, out, _ = run(capsys, "pdo", "split", "Dx^2 + x*Dx^-1")
    assert code == 0
    assert out == ["differential part: Dx^2",
                   "integral part: (x)*Dx^-1"]


def test_rho_scalar(capsys):
    code, out, _ = run(capsys, "pdo", "rho", "Dx")
    assert code == 0
    assert out == ["z^-1"]


def test_rho_matrix(capsys):
    code, out, _ = run(capsys, "pdo", "rho", "[[0, 1], [Dx, 0]]")
    assert code == 0
    assert out == ["[[0, 1], [z^-1, 0]]"]


def test_root_exact(capsys):
    code, out, _ = run(capsys, "pdo", "root", "Dx^2", "2")
    assert code == 0
    assert out == ["Dx"]


def test_root_truncated_window(capsys):
    code, out, _ = run(capsys, "--depth", "3", "pdo", "root",
                       "Dx^2 + 2*x", "2")
    assert code == 0
    assert out == ["Dx + (x)*Dx^-1 + (-1/2)*Dx^-2",
                   "window: degrees >= -2"]


def test_root_order_mismatch(capsys):
    code, _, err = run(capsys, "pdo", "root", "Dx^4", "2")
    assert code == 3
    assert "order exactly 2" in err


def test_invert_matrix(capsys):
    code, out, _ = run(capsys, "pdo", "invert", "[[1,1],[0,1]]")
    assert code == 0
    assert out == ["[[1, -1], [0, 1]]"]


def test_invert_respects_xprec(capsys):
    code, out, _ = run(capsys, "--x-prec", "4", "pdo", "invert", "1 - x")
    assert code == 0
    assert out == ["1 + x + x^2 + x^3", "window: x-precision 4"]


def test_invert_zero_is_domain_error(capsys):
    code, _, err = run(capsys, "pdo", "invert", "0")
    assert code == 3
    assert err.startswith("error (domain):")


# -- grass verbs ------------------------------------------------------

def test_h0h1_base_point(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "grass", "from-dressing", "1",
        "--store", "W")
    code, out, _ = run(capsys, "--session", path, "grass", "h0h1", "W")
    assert code == 0
    assert out[0] == "h0=0 h1=0 index=0 (big cell)"


def test_stabilizes_verdicts(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "grass", "from-dressing", "1",
        "--store", "W")
    code, out, _ = run(capsys, "--session", path, "grass", "stabilizes",
                       "W", "z^-1")
    assert code == 0 and out[0].startswith("yes:")
    code, out, _ = run(capsys, "--session", path, "grass", "stabilizes",
                       "W", "z")
    assert code == 1 and out[0].startswith("no:")


def test_dressing_round_trip_through_frame(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "grass", "from-dressing",
        "1 + x*Dx^-1", "--store", "V")
    code, out, _ = run(capsys, "--session", path, "--depth", "3",
                       "--x-prec", "4", "grass", "to-dressing", "V")
    assert code == 0
    assert out[0] == "(1) + (x)*Dx^-1"


def test_is_differential_action(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "grass", "from-dressing", "1",
        "--store", "W")
    code, out, _ = run(capsys, "--session", path, "grass",
                       "is-differential", "Dx^2", "W")
    assert code == 0 and out[0].startswith("yes:")
    code, out, _ = run(capsys, "--session", path, "grass",
                       "is-differential", "Dx^-1", "W")
    assert code == 1 and out[0].startswith("no:")


# -- curve verbs ------------------------------------------------------

def test_semigroup_from_orders(capsys):
    code, out, _ = run(capsys, "curve", "semigroup", "--orders", "2,3")
    assert code == 0
    assert out == ["orders: 2, 3 (rank 1, reduced: 2, 3)",
                   "conductor: 2",
                   "genus: 1",
                   "table (members +, gaps -): 0:+ 1:- 2:+",
                   "coprime pair bound: 1"]


def test_semigroup_from_generator(capsys):
    code, out, _ = run(capsys, "curve", "semigroup", J_GEN)
    assert code == 0
    assert out[0] == "orders: 1 (rank 1, reduced: 1)"
    assert "genus: 0" in out


def test_semigroup_needs_input(capsys):
    code, _, err = run(capsys, "curve", "semigroup")
    assert code == 3
    assert "--orders" in err


def test_filtration_dimension(capsys):
    code, out, _ = run(capsys, "curve", "filtration", "--bound", "6",
                       "z^-2", "z^-3")
    assert code == 0
    assert out[0] == "dim of the order-bounded piece (bound 6): 6"
    assert "  exponents 1, 1" in out


def test_charpoly(capsys):
    code, out, _ = run(capsys, "curve", "charpoly", J_GEN)
    assert code == 0
    assert out == ["t^2 - z^-1"]


def test_cyclicity_verdicts(capsys):
    code, out, _ = run(capsys, "curve", "cyclicity", J_GEN)
    assert code == 0 and out[0].startswith("yes:")
    code, out, _ = run(capsys, "curve", "cyclicity", "[[z^-1,0],[0,z^-1]]")
    assert code == 1 and out[0].startswith("no:")


def test_condition21(capsys):
    code, out, _ = run(capsys, "curve", "condition21", J_GEN)
    assert code == 0
    assert out == ["commutes: yes",
                   "span dimension: 2 (need 2)",
                   "rank (gcd of orders): 1 (need 1)",
                   "satisfied: yes"]


def test_condition21_failure(capsys):
    code, out, _ = run(capsys, "curve", "condition21", "--n", "2", "z^-2")
    assert code == 1
    assert out[-1] == "satisfied: no"


# -- pipelines --------------------------------------------------------

def test_pipeline_forward_j(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "grass", "from-dressing",
        "[[1,0],[0,1]]", "--store", "W")
    code, out, _ = run(capsys, "--session", path, "pipeline", "forward",
                       "W", J_GEN)
    assert code == 0
    assert "operator 0: [[0, (1)], [Dx, 0]]  [differential]" in out
    assert "commuting: yes" in out


def test_pipeline_roundtrip_j(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "grass", "from-dressing",
        "[[1,0],[0,1]]", "--store", "W")
    code, out, _ = run(capsys, "--session", path, "pipeline", "roundtrip",
                       "W", J_GEN)
    assert code == 0
    assert "recovered charpoly: t^2 - z^-1" in out
    assert "round trip closed: yes" in out


def test_pipeline_backward_cusp(capsys):
    code, out, _ = run(capsys, "--depth", "6", "pipeline", "backward",
                       CUSP_P, CUSP_Q)
    assert code == 0
    assert out[0] == "monic operator index: 0"
    assert "constant 0: z^-2" in out
    assert "constant 1: z^-3" in out
    assert "genus: 1" in out
    assert "condition satisfied: yes" in out


# -- sessions and flags -----------------------------------------------

def test_session_set_show(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    code, out, _ = run(capsys, "--session", path, "session", "set",
                       "a", "3/4")
    assert code == 0
    assert out == ["stored 'a' (scalar)"]
    code, out, _ = run(capsys, "--session", path, "session", "show")
    assert code == 0
    assert "a: scalar" in out
    code, out, _ = run(capsys, "--session", path, "session", "show", "a")
    assert code == 0
    assert out == ["3/4"]


def test_session_file_is_canonical(capsys, tmp_path):
    path = tmp_path / "s.json"
    run(capsys, "--session", str(path), "session", "set", "a", "1 - x^2")
    text = path.read_text()
    ses = Session.loads(text)
    assert ses.dumps() == text


def test_store_requires_session(capsys):
    code, _, err = run(capsys, "grass", "from-dressing", "1",
                       "--store", "W")
    assert code == 3
    assert "--session" in err


def test_missing_session_file(capsys, tmp_path):
    path = str(tmp_path / "absent.json")
    code, _, err = run(capsys, "--session", path, "session", "show")
    assert code == 3
    assert "does not exist" in err


def test_unknown_binding_is_domain_error(capsys, tmp_path):
    path = str(tmp_path / "s.json")
    run(capsys, "--session", path, "session", "set", "a", "1")
    code, _, err = run(capsys, "--session", path, "pdo", "compose",
                       "b", "a")
    assert code == 3
    assert "no binding named 'b'" in err


def test_syntax_error_position(capsys):
    code, _, err = run(capsys, "pdo", "compose", "x +", "x")
    assert code == 2
    assert "line 1, column 4" in err


def test_precision_error_exit(capsys):
    code, _, err = run(capsys, "--x-prec", "4", "grass", "from-dressing",
                       "1 + 1/(1+x)*Dx^-1")
    assert code == 4
    assert err.startswith("error (precision):")


def test_json_error_goes_to_stdout(capsys):
    code, out, err = run(capsys, "--json", "pdo", "invert", "0")
    assert code == 3
    assert err == ""
    obj = json.loads("\n".join(out))
    assert obj["error"]["category"] == "domain"


def test_flags_after_verb_equivalent(capsys):
    code1, out1, _ = run(capsys, "--x-prec", "4", "pdo", "invert", "1 - x")
    code2, out2, _ = run(capsys, "pdo", "invert", "1 - x",
                         "--x-prec", "4")
    assert (code1, out1) == (code2, out2)
