import json
import os
import subprocess
import sys

from aq.abgroups import FGAbelianGroup
from aq.algebras import cyclic_group, find_isomorphism
from aq.cli import main
from aq.fixtures import (
    load_algebra,
    load_sres,
    load_xmodule,
    parse_module_presentation,
    write_sres,
)
from aq.resolutions import check_certificate

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


def G(*divs):
    return FGAbelianGroup.from_divisors(divs)


def test_load_algebra_table():
    z2 = load_algebra(fx("z2.alg"))
    assert z2.order() == 2
    assert find_isomorphism(z2, cyclic_group(2)) is not None


def test_load_algebra_presentation():
    z4p = load_algebra(fx("z4-presented.alg"))
    assert z4p.order() == 4
    assert find_isomorphism(z4p, cyclic_group(4)) is not None


def test_load_xmodule_with_action_tables():
    km = load_xmodule(fx("z2-triv.xmod"))
    assert km.invariants() == G(2)
    assert km.is_trivial_action()


def test_load_xmodule_inversion():
    km = load_xmodule(fx("z3-inv.xmod"))
    assert km.invariants() == G(3)
    assert not km.is_trivial_action()


def test_load_module_presentation():
    with open(fx("y-z4.alg")) as fh:
        mod = parse_module_presentation(fh.read())
    assert mod.invariants() == G(4)


def test_load_sres_and_certificate():
    v = load_sres(fx("z2res.sres"))
    v.check_identities()
    cert = check_certificate(v, v.target, rng=2)
    assert cert.valid


def test_cli_cohomology_with_user_resolution(capsys):
    code = main([
        "cohomology", "--theory", "gp", "--algebra", fx("z2.alg"),
        "--coeffs", fx("z2-triv.xmod"), "--max-degree", "2",
        "--resolution", fx("z2res.sres"), "--method", "both",
    ])
    captured = capsys.readouterr()
    assert code == 0
    # H^*(Z/2; Z/2) = Z/2 in every degree
    assert "H^0 = Z/2" in captured.out
    assert "H^1 = Z/2" in captured.out
    assert "H^2 = Z/2" in captured.out


def test_cli_accept_quick(tmp_path, capsys):
    out = tmp_path / "accept.json"
    code = main(["accept", "--quick", "--json", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.count("[pass]") == 8
    data = json.loads(out.read_text())
    assert len(data) == 8 and all(rec["pass"] for rec in data)


def test_sres_round_trip():
    v = load_sres(fx("z2res.sres"))
    text = write_sres(v, name="z2res")
    import aq.fixtures as F

    v2 = F.parse_sres(text, base_dir=FIXTURES)
    v2.check_identities()


def test_cli_check_fixtures(capsys):
    assert main(["check", fx("gp.thy")]) == 0
    assert main(["check", fx("z2.alg")]) == 0
    assert main(["check", fx("z2-triv.xmod")]) == 0
    assert main(["check", fx("z2res.sres")]) == 0
    capsys.readouterr()


def test_cli_check_broken_sres_names_identity(capsys):
    code = main(["check", fx("broken.sres")])
    captured = capsys.readouterr()
    assert code == 1
    assert "d_" in captured.err


def test_cli_theory_constructions(capsys):
    assert main(["theory", "abelianize", "--theory", "gp"]) == 0
    out1 = capsys.readouterr().out
    assert "theory" in out1
    assert main(["theory", "comma", "--theory", "gp",
                 "--algebra", fx("z2.alg")]) == 0
    out2 = capsys.readouterr().out
    assert "@" in out2
    assert main(["theory", "module", "--theory", "gp",
                 "--algebra", fx("z2.alg")]) == 0
    out3 = capsys.readouterr().out
    assert "act_" in out3
    assert main(["theory", "product", "--theory", "gp", "--phi", "ab"]) == 0
    capsys.readouterr()


def test_cli_cohomology_group_both_routes(tmp_path, capsys):
    out = tmp_path / "coh.json"
    code = main([
        "cohomology", "--theory", "gp", "--algebra", fx("z2.alg"),
        "--coeffs", fx("z2-triv.xmod"), "--max-degree", "1",
        "--method", "both", "--json", str(out),
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H^0 = Z/2" in captured.out
    assert "H^1 = Z/2" in captured.out
    data = json.loads(out.read_text())
    assert data[0] == {"degree": 0, "rank": 0, "torsion": [2]}
    assert data[1]["em_route"] == {"rank": 0, "torsion": [2]}


def test_cli_cohomology_module_theory(capsys):
    code = main([
        "cohomology", "--theory", "mod:Z", "--algebra", fx("y-z4.alg"),
        "--coeffs", "2", "--max-degree", "2", "--method", "both",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H^0 = Z/2" in captured.out and "H^1 = Z/2" in captured.out
    assert "H^2 = 0" in captured.out


def test_cli_homology_with_coeffs(capsys):
    code = main([
        "homology", "--theory", "mod:Z", "--algebra", fx("y-z4.alg"),
        "--coeffs", "2", "--max-degree", "1",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H_0 = Z/2" in captured.out and "H_1 = Z/2" in captured.out


def test_cli_group_cohomology_moduli_shorthand(capsys):
    # integer-moduli coefficients over a group theory lift to the trivial
    # module over the group ring
    code = main([
        "cohomology", "--theory", "gp", "--algebra", fx("z4.alg"),
        "--coeffs", "3", "--max-degree", "1", "--method", "both",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H^0 = 0" in captured.out and "H^1 = 0" in captured.out
    code = main([
        "cohomology", "--theory", "gp", "--algebra", fx("z4.alg"),
        "--coeffs", "2", "--max-degree", "1",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H^0 = Z/2" in captured.out and "H^1 = Z/2" in captured.out


def test_cli_homology_abelianization(capsys):
    code = main([
        "homology", "--theory", "gp", "--algebra", fx("s3.alg"),
        "--max-degree", "0",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H_0 = Z/2" in captured.out


def test_cli_classical_indexing_shift(capsys):
    code = main([
        "cohomology", "--theory", "gp", "--algebra", fx("z2.alg"),
        "--coeffs", fx("z2-triv.xmod"), "--max-degree", "1",
        "--classical-indexing",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "H^2 = Z/2" in captured.out  # degree 1 reported classically


def test_cli_oracles(capsys):
    assert main(["oracle", "bar", "--group", fx("z2.alg"),
                 "--coeffs", "2", "--max-degree", "2"]) == 0
    out = capsys.readouterr().out
    assert "H^2" in out
    assert main(["oracle", "factor-set", "--group", fx("z3.alg"),
                 "--coeffs", "3", "--degree", "2"]) == 0
    out = capsys.readouterr().out
    assert "Z/3" in out
    assert main(["oracle", "ext", "--ring", "Z", "--module", fx("y-z4.alg"),
                 "--coeffs", "2", "--max-degree", "2"]) == 0
    out = capsys.readouterr().out
    assert "Ext^1 = Z/2" in out
    assert main(["oracle", "tor", "--ring", "Z", "--module", fx("y-z4.alg"),
                 "--coeffs", "2", "--max-degree", "1"]) == 0
    capsys.readouterr()


def test_cli_spectral_pages(tmp_path, capsys):
    out = tmp_path / "page.json"
    code = main([
        "ss", "uct", "--ring", "Z", "--module", fx("y-z4.alg"),
        "--coeffs", "2", "--smax", "3", "--tmax", "2", "--check",
        "--json", str(out),
    ])
    captured = capsys.readouterr()
    assert code == 0
    data = json.loads(out.read_text())
    assert data["quadrant"] == "second"
    assert any(cell["group"] == {"rank": 0, "torsion": [2]}
               for cell in data["grid"])
    assert all(row["consistent"] for row in data["convergence"])
    assert main(["ss", "rev-adams", "--ring", "Z", "--module",
                 fx("y-z4.alg"), "--coeffs", "2", "--variant", "homology",
                 "--smax", "2", "--check"]) == 0
    capsys.readouterr()


def test_cli_spectral_graded_input(capsys):
    code = main([
        "ss", "uct", "--ring", "Z", "--h", "0:4", "--h", "1:2",
        "--coeffs", "2", "--smax", "2", "--tmax", "2",
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "E2[0,1] = Z/2" in captured.out
    assert "E2[1,1] = Z/2" in captured.out
    # neither --module nor --h is a usage error
    code = main(["ss", "tor", "--ring", "Z", "--coeffs", "2"])
    capsys.readouterr()
    assert code == 2


def test_cli_json_deterministic(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        main([
            "cohomology", "--theory", "gp", "--algebra", fx("z2.alg"),
            "--coeffs", fx("z2-triv.xmod"), "--max-degree", "1",
            "--json", str(out),
        ])
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_usage_error_exit_code(capsys):
    code = main(["check", "nonexistent.xyz"])
    capsys.readouterr()
    assert code == 2


def test_cli_entry_point_runs():
    env = dict(os.environ)
    src = os.path.join(os.path.dirname(__file__), "..", "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run(
        [sys.executable, "-m", "aq.cli", "check", fx("z2.alg")],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    assert "ok" in proc.stdout
