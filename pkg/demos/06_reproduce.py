"""The five worked examples end to end, as ``hcgibbs reproduce`` prints them.

Each row compares one computed value with its published value under a stated
tolerance. INFO rows have no published value; the second example reports
its exact-Lambda root that way, because the published Lambda is rounded to 1.9.
"""

# %%
from hcgibbs.reproduce import EXAMPLES, all_passed, format_table, run_example

for n in sorted(EXAMPLES):
    rows = run_example(n)
    print(f"Example {n}: {'PASS' if all_passed(rows) else 'FAIL'}")
    print(format_table(rows))
    print()
