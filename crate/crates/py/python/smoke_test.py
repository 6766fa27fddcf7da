"""Exercise the qrao extension end to end. Run after `pip install --no-build-isolation crates/py`."""

import math

import qrao


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    assert close(qrao.success_probability("21"), 0.5 + 1 / (2 * math.sqrt(2)))
    assert close(qrao.success_probability("32"), 0.5 + 1 / math.sqrt(6))

    rho = qrao.encode("31", [0, 1, 1])
    trace = sum(rho[i][i] for i in range(2))
    purity = sum((rho[i][k] * rho[k][i]).real for i in range(2) for k in range(2))
    assert close(trace.real, 1.0) and close(purity, 1.0)

    g = qrao.Graph.complete(3)
    assert qrao.Graph.parse("0 1\n1 2\n0 2\n").edges == g.edges
    value, assignment = g.maxcut()
    assert value == 2 and g.cut_value(assignment) == 2

    n, terms = qrao.relaxed_hamiltonian(qrao.Graph.path(2), "31")
    assert n == 2 and dict(terms) == {"II": 0.5, "XX": -1.5}

    report = qrao.solve(g, "tetra", shots=200, seed=3)
    assert report == qrao.solve(g, "tetra", shots=200, seed=3)
    assert "best cut" in report

    assert qrao.exact_ratio(qrao.Graph.cycle(5), "32") >= 13 / 18 - 1e-9

    checks = qrao.verify("all")
    assert checks and all(passed for _, passed, _ in checks)

    bound, branch, feasible = qrao.ratio_bound("tetra", 0.45, 0.5)
    assert branch == 2 and not feasible and close(bound, 25.4 / 51.3)
    assert close(qrao.ratio_bound("32", 0.5)[0], 13 / 18)
    assert close(qrao.tetra_feasibility_threshold(), (81 - math.sqrt(3)) / (146 + 30 * math.sqrt(3)))
    assert close(qrao.qrac_probability_bounds(2, 3)[1], 0.5 + 1 / math.sqrt(6))

    rows = qrao.sweep([0.0, 0.5], [0.0, 1.0])
    assert len(rows) == 4
    assert qrao.sweep_csv([0.0], [0.0]).splitlines()[0] == "epsilon,lambda,bound,branch,feasible"

    try:
        qrao.Graph(2, [(0, 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("self-loop accepted")

    print(f"python smoke test passed ({len(checks)} certification checks)")


if __name__ == "__main__":
    main()
