"""Smoke test for the pyudisc extension module.

Build and install it first, e.g. `pip install maturin && maturin develop -m crates/py/Cargo.toml`,
or `cargo build --release -p udisc-py` and copy `target/release/libpyudisc.so` to `pyudisc.so`
next to this script.
"""

import math

import pyudisc


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    povm = pyudisc.Povm.build("universal", 3, 2)
    assert povm.dim == 27 and close(povm.constant, 0.5)
    report = povm.verify()
    assert report["pass"] and report["max_leakage"] < 1e-9
    assert povm.covariance(trials=4, seed=1)["pass"]

    pair = pyudisc.StateSet([[1, 0, 0], [0.6, 0.8, 0]])
    assert close(pair.gram_determinant(), 0.64)
    assert close(pyudisc.success_probability(pair, "universal"), 0.16)
    probs = povm.outcome_probabilities(pair, 2)
    assert close(probs[1], 0.0) and close(probs[2], 0.16) and close(sum(probs), 1.0)

    lower, upper = pyudisc.efficiency_bounds(pair.known_state_optimum(), 2)
    assert close(lower, 0.04) and close(upper, 0.1)

    again = pyudisc.Povm.from_text(povm.to_text())
    assert again.element(1) == povm.element(1)

    half = [[0.5 if r == c else 0 for c in range(8)] for r in range(8)]
    zero = [[0] * 8 for _ in range(8)]
    leaky = pyudisc.Povm.from_elements(2, 2, [half, half, zero])
    assert not leaky.verify()["pass"]

    counts = pyudisc.sample([0.5, 0.5], 64, 0)
    assert counts == [33, 31], counts

    rho_a = [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0]]
    rho_b = [[0, 0, 0], [0, 0.5, 0], [0, 0, 0.5]]
    mixed = pyudisc.mixed_report([rho_a, rho_b], 1)
    assert mixed["discriminable"] and mixed["bounds_ok"] and mixed["regime"] == "equal"
    assert close(mixed["parts"][2], 0.0)

    try:
        pyudisc.Povm.build("universal", 2, 3)
    except pyudisc.UdiscError as e:
        assert "m > n" in str(e)
    else:
        raise AssertionError("expected a regime error")

    assert math.isclose(sum(mixed["parts"]) + mixed["inconclusive"], 1.0)
    print("pyudisc smoke test passed")


if __name__ == "__main__":
    main()
