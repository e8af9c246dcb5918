import sys

CRITERIA = [f"A{i}" for i in range(1, 13)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None:
        return
    results = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for cid in CRITERIA:
        if cid in results:
            ok, detail = results[cid]
            terminalreporter.write_line(f"{cid:4s} {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"{cid:4s} FAIL  (not run or crashed before recording)")
