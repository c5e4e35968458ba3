"""Solve an LP-format file with HiGHS and write a solution file.

Usage: ``python3 -m mpcsp.solver.highs_bridge model.lp model.sol [--time-limit S]``
"""

from __future__ import annotations

import argparse
import sys


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("lp")
    ap.add_argument("sol")
    ap.add_argument("--time-limit", type=float)
    ap.add_argument("--abs-gap", type=float, default=1 - 1e-6)
    args = ap.parse_args(argv)

    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", args.abs_gap)
    if args.time_limit:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.lp}", file=sys.stderr)
        return 2
    h.run()
    status = h.getModelStatus()
    M = highspy.HighsModelStatus
    names = {M.kOptimal: "optimal", M.kInfeasible: "infeasible", M.kUnbounded: "unbounded",
             M.kTimeLimit: "limit", M.kIterationLimit: "limit"}
    label = names.get(status, "limit")
    with open(args.sol, "w") as fh:
        fh.write(f"# status {label}\n")
        if label in ("optimal", "limit") and h.getInfo().primal_solution_status:
            fh.write(f"# objective {h.getInfo().objective_function_value!r}\n")
            values = h.getSolution().col_value
            lp = h.getLp()
            for name, val in zip(lp.col_names_, values):
                if abs(val) > 1e-12:
                    fh.write(f"{name} {val!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
