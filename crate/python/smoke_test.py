"""Smoke test for the canonloop Python module.

Build and install first:
    pip install maturin
    cd crates/python && maturin develop --release
"""

import canonloop


def main():
    assert canonloop.fk_counts(2, 6) == [1, 1, 2, 5, 14, 42, 132]
    assert canonloop.fk_counts(3, 4) == [1, 1, 3, 14, 84]
    assert canonloop.rho_squared(2) == "1/4"

    gf = canonloop.loop_gf("hairpin", 2, 1, 8)
    assert gf[3] == [1, 1]
    for kind in ("hairpin", "interior", "bulge"):
        closed = canonloop.loop_gf(kind, 3, 1, 9)
        brute = canonloop.histogram(3, 1, 9)[kind]
        assert closed[9] == brute, (kind, closed[9], brute)
        assert canonloop.cross_check(kind, 2, 2, 12)

    assert len(canonloop.structures(2, 1, 7)) == 37
    profile = canonloop.classify(10, [(1, 10), (2, 9), (4, 7)])
    assert profile["hairpins"] == 1 and profile["interiors"] == 1, profile

    r = canonloop.mu_sigma("hairpin", 2, 1)
    assert r.mu(6) == "0.105573" and r.sigma2(6) == "0.032260", r
    assert r.dominance and r.validated and r.derivatives_agree(6)

    cells = canonloop.tables("bulge")
    assert len(cells) == 24 and all(c["passed"] for c in cells)

    try:
        canonloop.fk_counts(1, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("k = 1 should be rejected")

    print("python smoke test passed:", r)


if __name__ == "__main__":
    main()
