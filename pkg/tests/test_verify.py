from ntcp import cli, propagator, verify


def test_all_checks_pass():
    results = verify.run()
    assert len(results) == len(verify.REGISTRY)
    assert all(r.passed for r in results), verify.format_matrix(results)


def test_tolerance_only_loosens():
    for r in verify.run(tolerance=1e-2):
        assert r.passed and r.bound >= 1e-2


def test_detects_wrong_detuning_sign(monkeypatch):
    original = propagator.u_prime
    monkeypatch.setattr(propagator, "u_prime",
                        lambda g, delta, t, space, qubits=None: original(g, -delta, t, space, qubits))
    res = {r.name: r for r in verify.run(names={"displaced-oscillator closed form vs integrator"})}
    assert not res["displaced-oscillator closed form vs integrator"].passed


def test_detects_wrong_step1(monkeypatch):
    original = propagator.u_step1

    def broken(omega0, Omega, lam, tau, space, **kw):
        return original(omega0, -Omega, lam, tau, space, **kw)

    monkeypatch.setattr(propagator, "u_step1", broken)
    failed = [r.name for r in verify.run() if not r.passed]
    assert "step (i) closed form vs dressed integration" in failed


def test_crashing_check_fails(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(propagator, "u_step3", boom)
    res = {r.name: r for r in verify.run(names={"step (iii) closed form vs integrator"})}
    assert not res["step (iii) closed form vs integrator"].passed


def test_cli_verify(capsys):
    assert cli.main(["verify"]) == 0
    assert "PASS" in capsys.readouterr().out
