#!/usr/bin/env python3
"""Regenerates tests/kw_reference.hpp.

Draws 50 random datasets (2-5 groups, 3-12 values each, with deliberate
ties) and freezes scipy's Kruskal-Wallis H and p for each, so the C++
tests can cross-check the hand-rolled implementation without a runtime
Python dependency.
"""

import numpy as np
from scipy import stats

OUT = "tests/kw_reference.hpp"


def main() -> None:
    rng = np.random.default_rng(20240817)
    cases = []
    for _ in range(50):
        k = int(rng.integers(2, 6))
        groups = []
        for _ in range(k):
            size = int(rng.integers(3, 13))
            if rng.random() < 0.5:
                # integer-valued groups to exercise tie handling
                vals = rng.integers(0, 15, size=size).astype(float)
            else:
                vals = np.round(rng.normal(rng.uniform(-5, 5), 3.0, size=size), 3)
            groups.append(vals)
        h, p = stats.kruskal(*groups)
        cases.append((groups, float(h), float(p)))

    with open(OUT, "w") as f:
        f.write("// Generated by tools/gen_kw_reference.py -- do not edit by hand.\n")
        f.write("// Frozen Kruskal-Wallis H/p values from scipy.stats.kruskal.\n")
        f.write("#pragma once\n\n#include <vector>\n\n")
        f.write("namespace dynknap::testdata {\n\n")
        f.write("struct KwCase {\n")
        f.write("  std::vector<std::vector<double>> groups;\n")
        f.write("  double h;\n  double p;\n};\n\n")
        f.write("inline const std::vector<KwCase>& kw_reference_cases() {\n")
        f.write("  static const std::vector<KwCase> cases = {\n")
        for groups, h, p in cases:
            gs = ", ".join(
                "{" + ", ".join(repr(float(v)) for v in g) + "}" for g in groups
            )
            f.write("      {{%s}, %r, %r},\n" % (gs, h, p))
        f.write("  };\n  return cases;\n}\n\n")
        f.write("}  // namespace dynknap::testdata\n")


if __name__ == "__main__":
    main()
