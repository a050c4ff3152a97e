"""Smoke test of the pypolar extension.

    pip install --no-build-isolation -e crates/python
    python3 python/smoke_test.py
"""

import math

import pypolar


def main():
    assert pypolar.boxplus(0.0, 3.0) == 0.0
    assert math.isclose(pypolar.boxplus(2.0, 3.0), 2 * math.atanh(math.tanh(1.0) * math.tanh(1.5)))

    assert pypolar.bec_bit_errors(0.5, 1) == [0.375, 0.125]
    e = pypolar.bec_bit_errors(0.5, 2)
    assert e == [0.46875, 0.28125, 0.21875, 0.03125], e
    de = pypolar.bit_errors("bec:0.5", 2)
    assert all(abs(a - b) <= 1e-9 for a, b in zip(de, e)), de

    code, bound = pypolar.PolarCode.construct("bsc:0.06", 6, 32, grid_q=1024)
    assert (len(code), code.k) == (64, 32)
    assert 0.0 < bound < 1.0

    info = [i % 2 for i in range(32)]
    word = code.encode(info)
    llrs = [5.0 if b == 0 else -5.0 for b in word]
    assert code.decode(llrs) == info

    trials, errors, fer, ci = code.simulate("bsc:0.06", 2000, seed=3)
    assert trials == 2000 and fer == errors / trials
    assert code.simulate("bsc:0.06", 2000, seed=3)[1] == errors

    assert pypolar.min_distance(["1" * 8]) == (8, 1)
    assert pypolar.min_distance(["11000000", "00110000"]) == (2, 2)

    found, reference = pypolar.shipped_table()
    assert len(reference) == 26
    print(f"shipped table: {len(found)}/{len(reference)} entries")

    try:
        pypolar.PolarCode(2, [7])
    except ValueError:
        pass
    else:
        raise AssertionError("frozen index outside the code was accepted")

    print("pypolar smoke test OK")


if __name__ == "__main__":
    main()
