def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(RESULTS):
        checks = RESULTS[key]
        advisory = any(c.advisory for c in checks)
        ok = all(c.passed for c in checks)
        tag = "PASS" if ok else ("WARN" if advisory else "FAIL")
        tr.write_line(f"{tag} criterion {key}")
        for c in checks:
            tr.write_line(f"    {c.line()}")
